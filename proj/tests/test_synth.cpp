#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "support/oracles.hpp"
#include "warpforge/facegen.hpp"
#include "warpforge/flow_ops.hpp"
#include "warpforge/metrics.hpp"
#include "warpforge/synth.hpp"

using namespace warpforge;

namespace {

bool flows_equal(const FlowField& a, const FlowField& b) {
    return a.same_dims(b) && (a.dx == b.dx).all() && (a.dy == b.dy).all();
}

bool images_equal(const Image& a, const Image& b) {
    if (!a.same_dims(b)) return false;
    for (int c = 0; c < a.channels(); ++c) {
        if (!(a.planes[static_cast<size_t>(c)] == b.planes[static_cast<size_t>(c)]).all())
            return false;
    }
    return true;
}

int active_count(const FalParams& p) {
    int n = 0;
    for (int i = 0; i < FalParams::kCount; ++i) n += p.value(i) != 0.0f;
    return n;
}

}  // namespace

TEST_SUITE_BEGIN("synth");

TEST_CASE("FalParams indexing round-trips through names and values") {
    CHECK(FalParams::names().size() == 16);
    FalParams p;
    for (int i = 0; i < FalParams::kCount; ++i) {
        p.set_value(i, 0.01f * static_cast<float>(i + 1));
    }
    for (int i = 0; i < FalParams::kCount; ++i) {
        CHECK(p.value(i) == 0.01f * static_cast<float>(i + 1));
    }
    CHECK_THROWS_AS((void)p.value(16), std::invalid_argument);
    CHECK_THROWS_AS(p.set_value(-1, 0.0f), std::invalid_argument);
}

TEST_CASE("FalParams validation rejects out-of-range values") {
    FalParams p;
    p.validate();
    p.eye_tilt = 1.5f;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("LandmarkMesh validation rejects out-of-bounds points and bad indices") {
    const FaceExample face = make_face(96, 5);
    face.mesh.validate();

    LandmarkMesh bad = face.mesh;
    bad.points[0] = {-1.0f, 10.0f};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = face.mesh;
    bad.group(LandmarkGroup::nose).push_back(static_cast<int>(bad.points.size()));
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("sample_fal_params is deterministic and respects the active-count range") {
    SynthConfig cfg;
    const FalParams a = sample_fal_params(123, cfg);
    const FalParams b = sample_fal_params(123, cfg);
    for (int i = 0; i < FalParams::kCount; ++i) CHECK(a.value(i) == b.value(i));

    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const FalParams p = sample_fal_params(seed, cfg);
        p.validate();
        const int k = active_count(p);
        CHECK(k >= cfg.active_min);
        CHECK(k <= cfg.active_max);
    }
}

TEST_CASE("sample_fal_params with an empty active range is the identity") {
    SynthConfig cfg;
    cfg.active_min = 0;
    cfg.active_max = 0;
    CHECK(sample_fal_params(7, cfg).is_identity());
}

TEST_CASE("sample_fal_params activates each knob at the expected frequency") {
    SynthConfig cfg;
    const int draws = 2000;
    std::array<int, FalParams::kCount> active{};
    for (int d = 0; d < draws; ++d) {
        const FalParams p = sample_fal_params(static_cast<std::uint64_t>(d) + 1000, cfg);
        for (int i = 0; i < FalParams::kCount; ++i) active[static_cast<size_t>(i)] += p.value(i) != 0.0f;
    }
    // Expected activation probability: E[k]/16 with k uniform on [2,8].
    const double expect = 0.5 * (cfg.active_min + cfg.active_max) / 16.0;
    const double se = std::sqrt(expect * (1.0 - expect) / draws);
    for (int i = 0; i < FalParams::kCount; ++i) {
        const double freq = static_cast<double>(active[static_cast<size_t>(i)]) / draws;
        CHECK(std::abs(freq - expect) < 4.0 * se);
    }
}

TEST_CASE("params_to_flow of identity params is the zero field") {
    const FaceExample face = make_face(96, 6);
    const FlowField flow = params_to_flow(FalParams{}, face.mesh);
    CHECK((flow.dx == 0.0f).all());
    CHECK((flow.dy == 0.0f).all());
}

TEST_CASE("params_to_flow moves the eyes apart for positive eye_distance") {
    const FaceExample face = make_face(128, 7);
    FalParams p;
    p.eye_distance = 1.0f;
    const FlowField flow = params_to_flow(p, face.mesh);
    const auto le = face.mesh.centroid(LandmarkGroup::left_eye);
    const auto re = face.mesh.centroid(LandmarkGroup::right_eye);
    const float at_left = flow.dx(static_cast<Index>(le[1]), static_cast<Index>(le[0]));
    const float at_right = flow.dx(static_cast<Index>(re[1]), static_cast<Index>(re[0]));
    CHECK(at_left * at_right < 0.0f);  // opposite horizontal directions
}

TEST_CASE("params_to_flow never exceeds the displacement budget") {
    const FaceExample face = make_face(96, 8);
    SynthConfig cfg;
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const FalParams p = sample_fal_params(seed, cfg);
        const FlowField flow = params_to_flow(p, face.mesh, cfg);
        CHECK(flow_magnitude(flow).maxCoeff() <= cfg.max_displacement + 1e-4f);
    }
}

TEST_CASE("params_to_flow is linear in each single knob before the cap engages") {
    const FaceExample face = make_face(96, 9);
    SynthConfig cfg;
    cfg.max_displacement = 1e6f;  // cap never fires at this budget
    for (int knob = 0; knob < FalParams::kCount; ++knob) {
        FalParams single;
        single.set_value(knob, 0.3f);
        FalParams doubled;
        doubled.set_value(knob, 0.6f);
        const FlowField f1 = params_to_flow(single, face.mesh, cfg);
        const FlowField f2 = params_to_flow(doubled, face.mesh, cfg);
        CHECK(((f2.dx - 2.0f * f1.dx).abs() < 1e-4f).all());
        CHECK(((f2.dy - 2.0f * f1.dy).abs() < 1e-4f).all());
    }
}

TEST_CASE("params_to_flow reports the missing landmark group by name") {
    const FaceExample face = make_face(96, 10);
    LandmarkMesh no_nose = face.mesh;
    no_nose.group(LandmarkGroup::nose).clear();
    FalParams p;
    p.nose_width = 0.5f;
    CHECK_THROWS_WITH_AS((void)params_to_flow(p, no_nose),
                         doctest::Contains("nose_width"), std::invalid_argument);
}

TEST_CASE("synthesize_example with identity params returns the input bit-exactly") {
    const FaceExample face = make_face(96, 11);
    SynthConfig cfg;
    cfg.active_min = 0;
    cfg.active_max = 0;
    const SynthExample ex = synthesize_example(face.image, face.mesh, 4, cfg);
    CHECK(ex.params.is_identity());
    CHECK(images_equal(ex.warped, face.image));
    CHECK((ex.flow.dx == 0.0f).all());
    CHECK((ex.flow.dy == 0.0f).all());
    CHECK((ex.inverse_flow.dx == 0.0f).all());
}

TEST_CASE("synthesize_example is deterministic per seed") {
    const FaceExample face = make_face(96, 12);
    const SynthExample a = synthesize_example(face.image, face.mesh, 99);
    const SynthExample b = synthesize_example(face.image, face.mesh, 99);
    CHECK(images_equal(a.warped, b.warped));
    CHECK(flows_equal(a.flow, b.flow));
    CHECK(flows_equal(a.inverse_flow, b.inverse_flow));

    const SynthExample c = synthesize_example(face.image, face.mesh, 100);
    CHECK_FALSE(images_equal(a.warped, c.warped));
}

TEST_CASE("synthesize_example flows respect the displacement budget") {
    const FaceExample face = make_face(96, 13);
    SynthConfig cfg;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const SynthExample ex = synthesize_example(face.image, face.mesh, seed, cfg);
        CHECK(flow_magnitude(ex.flow).maxCoeff() <= cfg.max_displacement + 1e-4f);
    }
}

TEST_CASE("synthesize_example undoes its own warp") {
    const FaceExample face = make_face(128, 14);
    const SynthExample ex = synthesize_example(face.image, face.mesh, 3);
    REQUIRE_FALSE(ex.params.is_identity());
    const Image undone = warp_image(ex.warped, ex.flow);
    CHECK(psnr(face.image, undone) > psnr(face.image, ex.warped));
}

TEST_CASE("random_smooth_warp with a zero budget is the zero field") {
    SynthConfig cfg;
    cfg.max_displacement = 0.0f;
    const FlowField flow = random_smooth_warp(64, 64, 17, cfg);
    CHECK((flow.dx == 0.0f).all());
    CHECK((flow.dy == 0.0f).all());
}

TEST_CASE("random_smooth_warp is deterministic and hits its budget exactly") {
    SynthConfig cfg;
    const FlowField a = random_smooth_warp(64, 80, 18, cfg);
    const FlowField b = random_smooth_warp(64, 80, 18, cfg);
    CHECK(flows_equal(a, b));
    const float maxmag = flow_magnitude(a).maxCoeff();
    CHECK(maxmag == doctest::Approx(cfg.max_displacement).epsilon(1e-5));
    CHECK(maxmag <= cfg.max_displacement + 1e-4f);
}

TEST_CASE("random_smooth_warp is band-limited with a long correlation length") {
    const Index n = 128;
    const FlowField flow = random_smooth_warp(n, n, 19);
    const double sigma = static_cast<double>(n) / 8.0;

    // Normalized horizontal autocorrelation of the dx component; the first
    // lag dropping below 1/2 must be at least sigma/2 for a field this smooth.
    const double mean = flow.dx.cast<double>().mean();
    const Plane<double> centered = flow.dx.cast<double>() - mean;
    const double var = (centered * centered).mean();
    REQUIRE(var > 0.0);
    Index first_below = n;
    for (Index lag = 1; lag < n; ++lag) {
        double acc = 0.0;
        Index count = 0;
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j + lag < n; ++j) {
                acc += centered(i, j) * centered(i, j + lag);
                ++count;
            }
        }
        const double corr = acc / static_cast<double>(count) / var;
        if (corr < 0.5) {
            first_below = lag;
            break;
        }
    }
    CHECK(static_cast<double>(first_below) >= sigma / 2.0);
}

TEST_CASE("make_noise_image is deterministic, bounded, and centered") {
    const Image a = make_noise_image(256, 256, 21);
    const Image b = make_noise_image(256, 256, 21);
    CHECK(images_equal(a, b));
    CHECK(a.channels() == 3);

    double mean = 0.0;
    for (const auto& plane : a.planes) {
        CHECK(plane.minCoeff() >= 0.0f);
        CHECK(plane.maxCoeff() <= 1.0f);
        mean += plane.cast<double>().mean();
    }
    mean /= a.channels();
    CHECK(mean >= 0.48);
    CHECK(mean <= 0.52);

    const Plane<double> p0 = a.planes[0].cast<double>();
    const double m0 = p0.mean();
    const double std0 = std::sqrt(((p0 - m0) * (p0 - m0)).mean());
    CHECK(std0 >= 0.13);
    CHECK(std0 <= 0.17);
}

TEST_CASE("interocular_distance requires both eye groups") {
    const FaceExample face = make_face(96, 22);
    CHECK(interocular_distance(face.mesh) > 0.0f);
    LandmarkMesh one_eye = face.mesh;
    one_eye.group(LandmarkGroup::left_eye).clear();
    CHECK_THROWS_AS((void)interocular_distance(one_eye), std::invalid_argument);
}

TEST_CASE("landmark group names round-trip") {
    for (const LandmarkGroup g :
         {LandmarkGroup::left_eye, LandmarkGroup::right_eye, LandmarkGroup::nose,
          LandmarkGroup::mouth, LandmarkGroup::jaw, LandmarkGroup::forehead}) {
        const auto name = group_name(g);
        const auto back = group_from_name(name);
        REQUIRE(back.has_value());
        CHECK(*back == g);
    }
    CHECK_FALSE(group_from_name("eyebrow").has_value());
}

TEST_SUITE_END();
