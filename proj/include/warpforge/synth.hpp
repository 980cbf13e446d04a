#ifndef WARPFORGE_SYNTH_HPP
#define WARPFORGE_SYNTH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "warpforge/types.hpp"

namespace warpforge {

enum class LandmarkGroup : int { left_eye = 0, right_eye, nose, mouth, jaw, forehead };
inline constexpr int kNumLandmarkGroups = 6;

std::string_view group_name(LandmarkGroup g);
std::optional<LandmarkGroup> group_from_name(std::string_view name);

/// Facial landmark mesh: point cloud in pixel coordinates plus semantic
/// group membership, registered against an image of known size.
struct LandmarkMesh {
    std::vector<std::array<float, 2>> points;  // (x, y)
    std::array<std::vector<int>, kNumLandmarkGroups> group_indices;
    Index width = 0;
    Index height = 0;

    const std::vector<int>& group(LandmarkGroup g) const {
        return group_indices[static_cast<size_t>(g)];
    }
    std::vector<int>& group(LandmarkGroup g) {
        return group_indices[static_cast<size_t>(g)];
    }
    bool has_group(LandmarkGroup g) const { return !group(g).empty(); }

    /// Mean point of a non-empty group.
    std::array<float, 2> centroid(LandmarkGroup g) const;

    /// Checks dims, point bounds and index validity; throws on violation.
    void validate() const;
};

/// Distance between the two eye-group centroids, the mesh's natural scale.
float interocular_distance(const LandmarkMesh& mesh);

/// The 16-knob parametric warp vocabulary. Every value lies in [-1,1];
/// 0 means the knob is untouched.
struct FalParams {
    float eye_size_l = 0;
    float eye_size_r = 0;
    float eye_height = 0;
    float eye_width = 0;
    float eye_tilt = 0;
    float eye_distance = 0;
    float nose_width = 0;
    float nose_height = 0;
    float mouth_smile = 0;
    float mouth_width = 0;
    float mouth_height = 0;
    float upper_lip = 0;
    float lower_lip = 0;
    float forehead_height = 0;
    float chin_height = 0;
    float face_width = 0;

    static constexpr int kCount = 16;
    static const std::array<std::string_view, kCount>& names();
    float value(int index) const;
    void set_value(int index, float v);
    bool is_identity() const;
    void validate() const;
};

struct SynthConfig {
    float max_displacement = 5.0f;
    int active_min = 2;
    int active_max = 8;
    float rbf_sigma_scale = 0.6f;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Draws a random parameter vector: an active-knob count k uniform in
/// [active_min, active_max], k distinct knobs, each uniform in [-1,1].
FalParams sample_fal_params(std::uint64_t seed, const SynthConfig& cfg = {});

/// Expands the parameter vector to a dense flow field by scattering per-
/// landmark displacements as Gaussian bumps of width rbf_sigma_scale times
/// the inter-ocular distance, then rescaling so the max magnitude does not
/// exceed max_displacement. The field follows the original-to-modified
/// convention: warp_image(modified, flow) approximates the original.
FlowField params_to_flow(const FalParams& params, const LandmarkMesh& mesh,
                         const SynthConfig& cfg = {});

struct SynthExample {
    Image warped;
    FlowField flow;          // ground truth, original -> modified
    FlowField inverse_flow;  // numeric inverse used to render; reusable for masks
    FalParams params;
};

/// Draws params, builds the ground-truth flow and renders the warped image
/// with the flow's numeric inverse, so warp_image(warped, flow) recovers the
/// input up to interpolation. Identity params return the input bit-exactly.
SynthExample synthesize_example(const Image& img, const LandmarkMesh& mesh, std::uint64_t seed,
                                const SynthConfig& cfg = {});

/// Band-limited random field: per-component white noise blurred with
/// sigma = min(H,W)/8 and rescaled to max magnitude max_displacement.
FlowField random_smooth_warp(Index height, Index width, std::uint64_t seed,
                             const SynthConfig& cfg = {});

/// Per-pixel Gaussian noise, mean 0.5, std 0.15, clamped to [0,1].
Image make_noise_image(Index height, Index width, std::uint64_t seed, int channels = 3);

}  // namespace warpforge

#endif
