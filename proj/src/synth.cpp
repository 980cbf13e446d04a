#include "warpforge/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "warpforge/flow_ops.hpp"
#include "warpforge/rng.hpp"

namespace warpforge {

namespace {

constexpr std::array<std::string_view, FalParams::kCount> kParamNames = {
    "eye_size_l",  "eye_size_r",  "eye_height", "eye_width",       "eye_tilt",   "eye_distance",
    "nose_width",  "nose_height", "mouth_smile", "mouth_width",    "mouth_height", "upper_lip",
    "lower_lip",   "forehead_height", "chin_height", "face_width"};

constexpr std::array<std::string_view, kNumLandmarkGroups> kGroupNames = {
    "left_eye", "right_eye", "nose", "mouth", "jaw", "forehead"};

/// One landmark displacement destined for Gaussian scattering.
struct Poke {
    float x, y;
    float dx, dy;
};

void scale_group(std::vector<Poke>& pokes, const LandmarkMesh& mesh, LandmarkGroup g, float gain_x,
                 float gain_y) {
    const auto c = mesh.centroid(g);
    for (int idx : mesh.group(g)) {
        const auto& p = mesh.points[static_cast<size_t>(idx)];
        pokes.push_back({p[0], p[1], gain_x * (p[0] - c[0]), gain_y * (p[1] - c[1])});
    }
}

void shift_group(std::vector<Poke>& pokes, const LandmarkMesh& mesh, LandmarkGroup g, float dx,
                 float dy) {
    for (int idx : mesh.group(g)) {
        const auto& p = mesh.points[static_cast<size_t>(idx)];
        pokes.push_back({p[0], p[1], dx, dy});
    }
}

void rotate_group(std::vector<Poke>& pokes, const LandmarkMesh& mesh, LandmarkGroup g,
                  float theta) {
    const auto c = mesh.centroid(g);
    for (int idx : mesh.group(g)) {
        const auto& p = mesh.points[static_cast<size_t>(idx)];
        pokes.push_back({p[0], p[1], -theta * (p[1] - c[1]), theta * (p[0] - c[0])});
    }
}

void require_groups(const LandmarkMesh& mesh, std::string_view param,
                    std::initializer_list<LandmarkGroup> groups) {
    for (LandmarkGroup g : groups) {
        require(mesh.has_group(g), "params_to_flow: parameter '" + std::string(param) +
                                       "' needs landmark group '" + std::string(group_name(g)) + "'");
    }
}

}  // namespace

std::string_view group_name(LandmarkGroup g) { return kGroupNames[static_cast<size_t>(g)]; }

std::optional<LandmarkGroup> group_from_name(std::string_view name) {
    for (int i = 0; i < kNumLandmarkGroups; ++i) {
        if (kGroupNames[static_cast<size_t>(i)] == name) return static_cast<LandmarkGroup>(i);
    }
    return std::nullopt;
}

std::array<float, 2> LandmarkMesh::centroid(LandmarkGroup g) const {
    const auto& idx = group(g);
    require(!idx.empty(), "LandmarkMesh: centroid of empty group");
    double sx = 0, sy = 0;
    for (int i : idx) {
        sx += points[static_cast<size_t>(i)][0];
        sy += points[static_cast<size_t>(i)][1];
    }
    return {static_cast<float>(sx / static_cast<double>(idx.size())),
            static_cast<float>(sy / static_cast<double>(idx.size()))};
}

void LandmarkMesh::validate() const {
    require(width >= 1 && height >= 1, "LandmarkMesh: image dims must be positive");
    for (const auto& p : points) {
        require(p[0] >= 0 && p[0] < static_cast<float>(width) && p[1] >= 0 &&
                    p[1] < static_cast<float>(height),
                "LandmarkMesh: point outside image bounds");
    }
    for (const auto& idx : group_indices) {
        for (int i : idx) {
            require(i >= 0 && static_cast<size_t>(i) < points.size(),
                    "LandmarkMesh: group index out of range");
        }
    }
}

float interocular_distance(const LandmarkMesh& mesh) {
    require(mesh.has_group(LandmarkGroup::left_eye) && mesh.has_group(LandmarkGroup::right_eye),
            "interocular_distance: both eye groups required");
    const auto l = mesh.centroid(LandmarkGroup::left_eye);
    const auto r = mesh.centroid(LandmarkGroup::right_eye);
    return std::hypot(r[0] - l[0], r[1] - l[1]);
}

const std::array<std::string_view, FalParams::kCount>& FalParams::names() { return kParamNames; }

float FalParams::value(int index) const {
    const std::array<const float*, kCount> slots = {
        &eye_size_l, &eye_size_r, &eye_height, &eye_width,       &eye_tilt,   &eye_distance,
        &nose_width, &nose_height, &mouth_smile, &mouth_width,   &mouth_height, &upper_lip,
        &lower_lip,  &forehead_height, &chin_height, &face_width};
    require(index >= 0 && index < kCount, "FalParams: index out of range");
    return *slots[static_cast<size_t>(index)];
}

void FalParams::set_value(int index, float v) {
    const std::array<float*, kCount> slots = {
        &eye_size_l, &eye_size_r, &eye_height, &eye_width,       &eye_tilt,   &eye_distance,
        &nose_width, &nose_height, &mouth_smile, &mouth_width,   &mouth_height, &upper_lip,
        &lower_lip,  &forehead_height, &chin_height, &face_width};
    require(index >= 0 && index < kCount, "FalParams: index out of range");
    *slots[static_cast<size_t>(index)] = v;
}

bool FalParams::is_identity() const {
    for (int i = 0; i < kCount; ++i) {
        if (value(i) != 0.0f) return false;
    }
    return true;
}

void FalParams::validate() const {
    for (int i = 0; i < kCount; ++i) {
        const float v = value(i);
        require(v >= -1.0f && v <= 1.0f && std::isfinite(v),
                "FalParams: '" + std::string(kParamNames[static_cast<size_t>(i)]) +
                    "' must lie in [-1,1]");
    }
}

void SynthConfig::validate() const {
    require(max_displacement > 0, "SynthConfig: max_displacement must be > 0");
    require(active_min >= 0 && active_max >= active_min && active_max <= FalParams::kCount,
            "SynthConfig: active knob range must satisfy 0 <= min <= max <= 16");
    require(rbf_sigma_scale > 0, "SynthConfig: rbf_sigma_scale must be > 0");
}

FalParams sample_fal_params(std::uint64_t seed, const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(seed);
    const int k = cfg.active_min +
                  static_cast<int>(rng.uniform_int(
                      static_cast<std::uint64_t>(cfg.active_max - cfg.active_min) + 1));

    std::array<int, FalParams::kCount> order;
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(
                              static_cast<std::uint64_t>(FalParams::kCount - i)));
        std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
    }

    FalParams params;
    for (int i = 0; i < k; ++i) {
        params.set_value(order[static_cast<size_t>(i)], static_cast<float>(rng.uniform(-1.0, 1.0)));
    }
    return params;
}

FlowField params_to_flow(const FalParams& params, const LandmarkMesh& mesh, const SynthConfig& cfg) {
    params.validate();
    mesh.validate();
    cfg.validate();

    FlowField flow(mesh.height, mesh.width);
    if (params.is_identity()) return flow;

    // Every active knob needs the mesh scale, so both eyes must be present.
    require(mesh.has_group(LandmarkGroup::left_eye) && mesh.has_group(LandmarkGroup::right_eye),
            "params_to_flow: active parameters need both eye groups for the mesh scale");
    const float iod = interocular_distance(mesh);
    require(iod > 0, "params_to_flow: eye centroids coincide");

    using G = LandmarkGroup;
    std::vector<Poke> pokes;

    if (const float v = params.eye_size_l; v != 0) {
        require_groups(mesh, "eye_size_l", {G::left_eye});
        scale_group(pokes, mesh, G::left_eye, 0.12f * v, 0.12f * v);
    }
    if (const float v = params.eye_size_r; v != 0) {
        require_groups(mesh, "eye_size_r", {G::right_eye});
        scale_group(pokes, mesh, G::right_eye, 0.12f * v, 0.12f * v);
    }
    if (const float v = params.eye_height; v != 0) {
        scale_group(pokes, mesh, G::left_eye, 0.0f, 0.25f * v);
        scale_group(pokes, mesh, G::right_eye, 0.0f, 0.25f * v);
    }
    if (const float v = params.eye_width; v != 0) {
        scale_group(pokes, mesh, G::left_eye, 0.25f * v, 0.0f);
        scale_group(pokes, mesh, G::right_eye, 0.25f * v, 0.0f);
    }
    if (const float v = params.eye_tilt; v != 0) {
        rotate_group(pokes, mesh, G::left_eye, 0.15f * v);
        rotate_group(pokes, mesh, G::right_eye, -0.15f * v);
    }
    if (const float v = params.eye_distance; v != 0) {
        shift_group(pokes, mesh, G::left_eye, -0.06f * iod * v, 0.0f);
        shift_group(pokes, mesh, G::right_eye, 0.06f * iod * v, 0.0f);
    }
    if (const float v = params.nose_width; v != 0) {
        require_groups(mesh, "nose_width", {G::nose});
        scale_group(pokes, mesh, G::nose, 0.20f * v, 0.0f);
    }
    if (const float v = params.nose_height; v != 0) {
        require_groups(mesh, "nose_height", {G::nose});
        shift_group(pokes, mesh, G::nose, 0.0f, 0.05f * iod * v);
    }
    if (const float v = params.mouth_smile; v != 0) {
        require_groups(mesh, "mouth_smile", {G::mouth});
        const auto& idx = mesh.group(G::mouth);
        auto by_x = [&](int a, int b) {
            return mesh.points[static_cast<size_t>(a)][0] < mesh.points[static_cast<size_t>(b)][0];
        };
        const int lc = *std::min_element(idx.begin(), idx.end(), by_x);
        const int rc = *std::max_element(idx.begin(), idx.end(), by_x);
        const auto& lp = mesh.points[static_cast<size_t>(lc)];
        const auto& rp = mesh.points[static_cast<size_t>(rc)];
        pokes.push_back({lp[0], lp[1], -0.03f * iod * v, -0.06f * iod * v});
        pokes.push_back({rp[0], rp[1], 0.03f * iod * v, -0.06f * iod * v});
    }
    if (const float v = params.mouth_width; v != 0) {
        require_groups(mesh, "mouth_width", {G::mouth});
        scale_group(pokes, mesh, G::mouth, 0.20f * v, 0.0f);
    }
    if (const float v = params.mouth_height; v != 0) {
        require_groups(mesh, "mouth_height", {G::mouth});
        scale_group(pokes, mesh, G::mouth, 0.0f, 0.20f * v);
    }
    if (const float v = params.upper_lip; v != 0) {
        require_groups(mesh, "upper_lip", {G::mouth});
        const auto c = mesh.centroid(G::mouth);
        for (int idx : mesh.group(G::mouth)) {
            const auto& p = mesh.points[static_cast<size_t>(idx)];
            if (p[1] < c[1]) pokes.push_back({p[0], p[1], 0.0f, -0.04f * iod * v});
        }
    }
    if (const float v = params.lower_lip; v != 0) {
        require_groups(mesh, "lower_lip", {G::mouth});
        const auto c = mesh.centroid(G::mouth);
        for (int idx : mesh.group(G::mouth)) {
            const auto& p = mesh.points[static_cast<size_t>(idx)];
            if (p[1] > c[1]) pokes.push_back({p[0], p[1], 0.0f, 0.04f * iod * v});
        }
    }
    if (const float v = params.forehead_height; v != 0) {
        require_groups(mesh, "forehead_height", {G::forehead});
        shift_group(pokes, mesh, G::forehead, 0.0f, -0.06f * iod * v);
    }
    if (const float v = params.chin_height; v != 0) {
        require_groups(mesh, "chin_height", {G::jaw});
        const auto c = mesh.centroid(G::jaw);
        for (int idx : mesh.group(G::jaw)) {
            const auto& p = mesh.points[static_cast<size_t>(idx)];
            if (p[1] > c[1]) pokes.push_back({p[0], p[1], 0.0f, 0.06f * iod * v});
        }
    }
    if (const float v = params.face_width; v != 0) {
        require_groups(mesh, "face_width", {G::jaw});
        scale_group(pokes, mesh, G::jaw, 0.12f * v, 0.0f);
    }

    if (pokes.empty()) return flow;

    // Gaussian scattering, one separable rank-1 update per landmark poke.
    const float sigma = cfg.rbf_sigma_scale * iod;
    const float inv_two_sigma_sq = 1.0f / (2.0f * sigma * sigma);
    Eigen::VectorXf gx(mesh.width), gy(mesh.height);
    for (const Poke& poke : pokes) {
        for (Index j = 0; j < mesh.width; ++j) {
            const float d = static_cast<float>(j) - poke.x;
            gx(j) = std::exp(-d * d * inv_two_sigma_sq);
        }
        for (Index i = 0; i < mesh.height; ++i) {
            const float d = static_cast<float>(i) - poke.y;
            gy(i) = std::exp(-d * d * inv_two_sigma_sq);
        }
        flow.dx.matrix().noalias() += poke.dx * (gy * gx.transpose());
        flow.dy.matrix().noalias() += poke.dy * (gy * gx.transpose());
    }

    const float maxmag = flow_magnitude(flow).maxCoeff();
    if (maxmag > cfg.max_displacement) {
        const float s = cfg.max_displacement / maxmag;
        flow.dx *= s;
        flow.dy *= s;
    }
    return flow;
}

SynthExample synthesize_example(const Image& img, const LandmarkMesh& mesh, std::uint64_t seed,
                                const SynthConfig& cfg) {
    require(img.height() == mesh.height && img.width() == mesh.width,
            "synthesize_example: image and mesh dims must match");
    SynthExample out;
    out.params = sample_fal_params(seed, cfg);
    out.flow = params_to_flow(out.params, mesh, cfg);
    if (out.params.is_identity()) {
        out.warped = img;
        out.inverse_flow = FlowField(img.height(), img.width());
        return out;
    }
    out.inverse_flow = invert_flow(out.flow, 30, 1e-3f).flow;
    out.warped = warp_image(img, out.inverse_flow);
    return out;
}

FlowField random_smooth_warp(Index height, Index width, std::uint64_t seed, const SynthConfig& cfg) {
    require(height >= 1 && width >= 1, "random_smooth_warp: dims must be positive");
    require(cfg.max_displacement >= 0, "random_smooth_warp: max_displacement must be >= 0");
    Rng rng(seed);
    FlowField flow(height, width);
    for (Index i = 0; i < height; ++i) {
        for (Index j = 0; j < width; ++j) {
            flow.dx(i, j) = static_cast<float>(rng.normal());
            flow.dy(i, j) = static_cast<float>(rng.normal());
        }
    }
    const double sigma = static_cast<double>(std::min(height, width)) / 8.0;
    flow.dx = gaussian_blur(flow.dx, sigma);
    flow.dy = gaussian_blur(flow.dy, sigma);

    const float maxmag = flow_magnitude(flow).maxCoeff();
    if (maxmag > 0) {
        const float s = cfg.max_displacement / maxmag;
        flow.dx *= s;
        flow.dy *= s;
    } else {
        flow.dx.setZero();
        flow.dy.setZero();
    }
    return flow;
}

Image make_noise_image(Index height, Index width, std::uint64_t seed, int channels) {
    Image img(height, width, channels);
    Rng rng(seed);
    for (auto& plane : img.planes) {
        for (Index i = 0; i < height; ++i) {
            for (Index j = 0; j < width; ++j) {
                plane(i, j) = std::clamp(static_cast<float>(rng.normal(0.5, 0.15)), 0.0f, 1.0f);
            }
        }
    }
    return img;
}

}  // namespace warpforge
