#include "warpforge/facegen.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "warpforge/flow_ops.hpp"
#include "warpforge/io/image_io.hpp"
#include "warpforge/manifest.hpp"
#include "warpforge/rng.hpp"

namespace warpforge {

namespace {

constexpr float kPi = 3.14159265358979323846f;

struct Color {
    float r, g, b;
};

float smooth(float a) {
    a = std::clamp(a, 0.0f, 1.0f);
    return a * a * (3.0f - 2.0f * a);
}

void paint(Image& img, Index i, Index j, const Color& color, float alpha) {
    if (alpha <= 0.0f) return;
    img.planes[0](i, j) += alpha * (color.r - img.planes[0](i, j));
    img.planes[1](i, j) += alpha * (color.g - img.planes[1](i, j));
    img.planes[2](i, j) += alpha * (color.b - img.planes[2](i, j));
}

/// Soft-edged axis-aligned ellipse; edge is the transition width in px.
void fill_ellipse(Image& img, float cx, float cy, float ax, float ay, const Color& color,
                  float edge = 1.5f) {
    const Index i0 = std::max<Index>(0, static_cast<Index>(cy - ay - edge - 1));
    const Index i1 = std::min<Index>(img.height() - 1, static_cast<Index>(cy + ay + edge + 1));
    const Index j0 = std::max<Index>(0, static_cast<Index>(cx - ax - edge - 1));
    const Index j1 = std::min<Index>(img.width() - 1, static_cast<Index>(cx + ax + edge + 1));
    const float scale = std::min(ax, ay);
    for (Index i = i0; i <= i1; ++i) {
        for (Index j = j0; j <= j1; ++j) {
            const float nx = (static_cast<float>(j) - cx) / ax;
            const float ny = (static_cast<float>(i) - cy) / ay;
            const float r = std::sqrt(nx * nx + ny * ny);
            paint(img, i, j, color, smooth((1.0f - r) * scale / edge + 0.5f));
        }
    }
}

/// Soft capsule between two points (eyebrows, nose ridge, lip crease).
void fill_capsule(Image& img, float x0, float y0, float x1, float y1, float radius,
                  const Color& color, float edge = 1.2f) {
    const float pad = radius + edge + 1.0f;
    const Index i0 = std::max<Index>(0, static_cast<Index>(std::min(y0, y1) - pad));
    const Index i1 = std::min<Index>(img.height() - 1, static_cast<Index>(std::max(y0, y1) + pad));
    const Index j0 = std::max<Index>(0, static_cast<Index>(std::min(x0, x1) - pad));
    const Index j1 = std::min<Index>(img.width() - 1, static_cast<Index>(std::max(x0, x1) + pad));
    const float vx = x1 - x0, vy = y1 - y0;
    const float len_sq = std::max(vx * vx + vy * vy, 1e-12f);
    for (Index i = i0; i <= i1; ++i) {
        for (Index j = j0; j <= j1; ++j) {
            const float px = static_cast<float>(j) - x0, py = static_cast<float>(i) - y0;
            const float t = std::clamp((px * vx + py * vy) / len_sq, 0.0f, 1.0f);
            const float dx = px - t * vx, dy = py - t * vy;
            const float d = std::sqrt(dx * dx + dy * dy);
            paint(img, i, j, color, smooth((radius - d) / edge + 0.5f));
        }
    }
}

}  // namespace

FaceExample make_face(Index size, std::uint64_t seed) {
    require(size >= 64, "make_face: size must be >= 64");
    Rng rng(seed);
    const float n = static_cast<float>(size);
    auto jitter = [&](float amount) { return static_cast<float>(rng.uniform(-amount, amount)); };

    // Seed-jittered portrait geometry, in pixels.
    const float face_cx = n * (0.50f + jitter(0.012f));
    const float face_cy = n * (0.52f + jitter(0.012f));
    const float face_ax = n * (0.30f + jitter(0.02f));
    const float face_ay = n * (0.38f + jitter(0.02f));
    const float eye_y = face_cy - n * (0.12f + jitter(0.008f));
    const float eye_dx = n * (0.13f + jitter(0.008f));
    const float eye_ax = n * (0.050f + jitter(0.004f));
    const float eye_ay = n * (0.030f + jitter(0.003f));
    const float nose_top_y = eye_y + n * 0.035f;
    const float nose_tip_y = face_cy + n * (0.06f + jitter(0.006f));
    const float nose_w = n * (0.035f + jitter(0.004f));
    const float mouth_y = face_cy + n * (0.22f + jitter(0.01f));
    const float mouth_ax = n * (0.11f + jitter(0.01f));
    const float mouth_ay = n * (0.035f + jitter(0.004f));

    const Color background{0.30f + jitter(0.08f), 0.34f + jitter(0.08f), 0.40f + jitter(0.08f)};
    const Color skin{0.78f + jitter(0.06f), 0.62f + jitter(0.06f), 0.52f + jitter(0.05f)};
    const Color skin_shade{skin.r * 0.82f, skin.g * 0.82f, skin.b * 0.82f};
    const Color sclera{0.93f, 0.93f, 0.90f};
    const Color iris{0.25f + jitter(0.15f), 0.35f + jitter(0.15f), 0.50f + jitter(0.2f)};
    const Color pupil{0.06f, 0.05f, 0.05f};
    const Color brow{0.32f * skin.r, 0.30f * skin.g, 0.28f * skin.b};
    const Color lip{0.70f + jitter(0.05f), 0.35f + jitter(0.05f), 0.34f + jitter(0.04f)};
    const Color lip_dark{lip.r * 0.7f, lip.g * 0.7f, lip.b * 0.7f};

    FaceExample out;
    out.image = Image(size, size, 3);
    Image& img = out.image;

    // Background: vertical gradient.
    for (Index i = 0; i < size; ++i) {
        const float t = static_cast<float>(i) / n;
        const float shade = 0.85f + 0.3f * t;
        for (Index j = 0; j < size; ++j) {
            img.planes[0](i, j) = background.r * shade;
            img.planes[1](i, j) = background.g * shade;
            img.planes[2](i, j) = background.b * shade;
        }
    }

    // Head with a darker rim, then features.
    fill_ellipse(img, face_cx, face_cy, face_ax * 1.02f, face_ay * 1.02f, skin_shade, 2.5f);
    fill_ellipse(img, face_cx, face_cy, face_ax * 0.94f, face_ay * 0.95f, skin, 3.0f);

    for (int side = -1; side <= 1; side += 2) {
        const float ex = face_cx + static_cast<float>(side) * eye_dx;
        fill_capsule(img, ex - eye_ax * 1.2f, eye_y - eye_ay * 2.6f, ex + eye_ax * 1.2f,
                     eye_y - eye_ay * 2.9f, n * 0.011f, brow);
        fill_ellipse(img, ex, eye_y, eye_ax, eye_ay, sclera, 1.2f);
        fill_ellipse(img, ex, eye_y, eye_ay * 0.85f, eye_ay * 0.85f, iris, 1.0f);
        fill_ellipse(img, ex, eye_y, eye_ay * 0.38f, eye_ay * 0.38f, pupil, 0.9f);
    }

    fill_capsule(img, face_cx, nose_top_y, face_cx, nose_tip_y, n * 0.012f, skin_shade);
    fill_ellipse(img, face_cx - nose_w, nose_tip_y, n * 0.012f, n * 0.009f, skin_shade, 1.0f);
    fill_ellipse(img, face_cx + nose_w, nose_tip_y, n * 0.012f, n * 0.009f, skin_shade, 1.0f);

    fill_ellipse(img, face_cx, mouth_y, mouth_ax, mouth_ay, lip, 1.5f);
    fill_capsule(img, face_cx - mouth_ax * 0.9f, mouth_y, face_cx + mouth_ax * 0.9f, mouth_y,
                 n * 0.006f, lip_dark);

    // Band-limited blotches plus fine grain make resampling measurable.
    {
        Plane<float> noise(size, size);
        for (int c = 0; c < 3; ++c) {
            for (Index i = 0; i < size; ++i) {
                for (Index j = 0; j < size; ++j) {
                    noise(i, j) = static_cast<float>(rng.normal(0.0, 1.0));
                }
            }
            const Plane<float> blotch = gaussian_blur(noise, static_cast<double>(size) / 48.0);
            img.planes[static_cast<size_t>(c)] += 0.35f * blotch;
            for (Index i = 0; i < size; ++i) {
                for (Index j = 0; j < size; ++j) {
                    img.planes[static_cast<size_t>(c)](i, j) +=
                        static_cast<float>(rng.normal(0.0, 0.008));
                }
            }
        }
    }
    for (auto& plane : img.planes) plane = plane.cwiseMax(0.0f).cwiseMin(1.0f);

    // Landmarks mirror the rendered geometry.
    LandmarkMesh& mesh = out.mesh;
    mesh.width = size;
    mesh.height = size;
    auto add_point = [&](LandmarkGroup g, float x, float y) {
        const float lim = n - 1.0f;
        mesh.group(g).push_back(static_cast<int>(mesh.points.size()));
        mesh.points.push_back({std::clamp(x, 0.0f, lim), std::clamp(y, 0.0f, lim)});
    };

    for (int side = -1; side <= 1; side += 2) {
        const LandmarkGroup g = side < 0 ? LandmarkGroup::left_eye : LandmarkGroup::right_eye;
        const float ex = face_cx + static_cast<float>(side) * eye_dx;
        for (int k = 0; k < 6; ++k) {
            const float a = 2.0f * kPi * static_cast<float>(k) / 6.0f;
            add_point(g, ex + eye_ax * std::cos(a), eye_y + eye_ay * std::sin(a));
        }
    }
    add_point(LandmarkGroup::nose, face_cx, nose_top_y);
    add_point(LandmarkGroup::nose, face_cx, 0.5f * (nose_top_y + nose_tip_y));
    add_point(LandmarkGroup::nose, face_cx, nose_tip_y);
    add_point(LandmarkGroup::nose, face_cx - nose_w, nose_tip_y);
    add_point(LandmarkGroup::nose, face_cx + nose_w, nose_tip_y);
    for (int k = 0; k < 8; ++k) {
        const float a = 2.0f * kPi * static_cast<float>(k) / 8.0f;
        add_point(LandmarkGroup::mouth, face_cx + mouth_ax * std::cos(a),
                  mouth_y + mouth_ay * std::sin(a));
    }
    for (int k = 0; k < 9; ++k) {
        // Lower face arc, 20 to 160 degrees (y grows downward).
        const float a = kPi * (20.0f + 140.0f * static_cast<float>(k) / 8.0f) / 180.0f;
        add_point(LandmarkGroup::jaw, face_cx + 0.95f * face_ax * std::cos(a),
                  face_cy + 0.95f * face_ay * std::sin(a));
    }
    for (int k = 0; k < 5; ++k) {
        // Upper arc, inside the hairline.
        const float a = kPi * (215.0f + 110.0f * static_cast<float>(k) / 4.0f) / 180.0f;
        add_point(LandmarkGroup::forehead, face_cx + 0.75f * face_ax * std::cos(a),
                  face_cy + 0.80f * face_ay * std::sin(a));
    }
    mesh.validate();
    return out;
}

std::filesystem::path write_demo_corpus(const std::filesystem::path& dir, int count, Index size,
                                        std::uint64_t seed) {
    require(count >= 1, "write_demo_corpus: count must be >= 1");
    std::filesystem::create_directories(dir);
    std::map<std::string, LandmarkMesh> meshes;
    for (int k = 0; k < count; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "face_%03d.png", k);
        const FaceExample face = make_face(size, derive_seed(seed, "facegen", k));
        io::write_png(dir / name, face.image);
        meshes[name] = face.mesh;
    }
    const std::filesystem::path landmark_path = dir / "landmarks.json";
    write_landmarks(landmark_path, meshes);
    return landmark_path;
}

}  // namespace warpforge
