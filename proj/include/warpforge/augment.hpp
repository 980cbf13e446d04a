#ifndef WARPFORGE_AUGMENT_HPP
#define WARPFORGE_AUGMENT_HPP

#include <cstdint>
#include <optional>

#include "warpforge/types.hpp"

namespace warpforge {

enum class ResizeMethod { bilinear, bicubic };

/// One augmentation recipe. Optional stages are skipped when unset; the
/// photometric factors are neutral at 1. Applied in a fixed order:
/// flip, crop, resize, photometric, JPEG.
struct AugmentSpec {
    std::optional<int> jpeg_quality;          // 1..100
    std::optional<double> resize_factor;      // > 0
    ResizeMethod resize_method = ResizeMethod::bicubic;
    double brightness = 1.0;
    double contrast = 1.0;
    double saturation = 1.0;
    bool flip = false;
    std::optional<int> crop_size;             // square crop side, px
    std::uint64_t seed = 0;                   // drives the crop offset

    bool is_identity() const;
    void validate() const;
};

/// Applies the spec stages in order; deterministic per spec.seed; output
/// values clamped to [0,1].
Image apply_augment(const Image& img, const AugmentSpec& spec);

/// Encode to JPEG at the given quality and decode back.
Image jpeg_cycle(const Image& img, int quality);

/// Scale both dimensions by factor (rounded, floor 1 px), sampling at pixel
/// centers. Bicubic uses the Catmull-Rom kernel and may overshoot [0,1];
/// apply_augment clamps afterwards.
Image resize_image(const Image& img, double factor, ResizeMethod method);

/// Mirror left-right.
Image flip_horizontal(const Image& img);

/// Gaussian blur applied per channel (the corruption sweep's second knob).
Image blur_image(const Image& img, double sigma);

}  // namespace warpforge

#endif
