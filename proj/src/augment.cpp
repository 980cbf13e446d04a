#include "warpforge/augment.hpp"

#include <algorithm>
#include <cmath>

#include "warpforge/flow_ops.hpp"
#include "warpforge/io/image_io.hpp"
#include "warpforge/rng.hpp"

namespace warpforge {

namespace {

// Catmull-Rom cubic, a = -0.5; partition of unity over integer offsets.
double cubic_weight(double t) {
    constexpr double a = -0.5;
    t = std::abs(t);
    if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

Plane<float> resize_plane(const Plane<float>& p, Index oh, Index ow, ResizeMethod method) {
    const Index ih = p.rows(), iw = p.cols();
    const double ry = static_cast<double>(ih) / static_cast<double>(oh);
    const double rx = static_cast<double>(iw) / static_cast<double>(ow);
    Plane<float> out(oh, ow);

    if (method == ResizeMethod::bilinear) {
        for (Index i = 0; i < oh; ++i) {
            const float y = static_cast<float>((static_cast<double>(i) + 0.5) * ry - 0.5);
            for (Index j = 0; j < ow; ++j) {
                const float x = static_cast<float>((static_cast<double>(j) + 0.5) * rx - 0.5);
                out(i, j) = detail::sample_plane(p, x, y);
            }
        }
        return out;
    }

    for (Index i = 0; i < oh; ++i) {
        const double y = (static_cast<double>(i) + 0.5) * ry - 0.5;
        const Index y0 = static_cast<Index>(std::floor(y));
        double wy[4];
        for (int k = 0; k < 4; ++k) wy[k] = cubic_weight(y - static_cast<double>(y0 - 1 + k));
        for (Index j = 0; j < ow; ++j) {
            const double x = (static_cast<double>(j) + 0.5) * rx - 0.5;
            const Index x0 = static_cast<Index>(std::floor(x));
            double wx[4];
            for (int k = 0; k < 4; ++k) wx[k] = cubic_weight(x - static_cast<double>(x0 - 1 + k));
            double acc = 0.0;
            for (int ky = 0; ky < 4; ++ky) {
                const Index yy = std::clamp<Index>(y0 - 1 + ky, 0, ih - 1);
                double row = 0.0;
                for (int kx = 0; kx < 4; ++kx) {
                    const Index xx = std::clamp<Index>(x0 - 1 + kx, 0, iw - 1);
                    row += wx[kx] * static_cast<double>(p(yy, xx));
                }
                acc += wy[ky] * row;
            }
            out(i, j) = static_cast<float>(acc);
        }
    }
    return out;
}

}  // namespace

bool AugmentSpec::is_identity() const {
    return !jpeg_quality && !resize_factor && brightness == 1.0 && contrast == 1.0 &&
           saturation == 1.0 && !flip && !crop_size;
}

void AugmentSpec::validate() const {
    if (jpeg_quality) {
        require(*jpeg_quality >= 1 && *jpeg_quality <= 100,
                "AugmentSpec: jpeg_quality must be in [1,100]");
    }
    if (resize_factor) require(*resize_factor > 0, "AugmentSpec: resize_factor must be > 0");
    require(brightness > 0 && contrast > 0 && saturation > 0,
            "AugmentSpec: photometric factors must be positive");
    if (crop_size) require(*crop_size >= 1, "AugmentSpec: crop_size must be >= 1");
}

Image flip_horizontal(const Image& img) {
    Image out(img.height(), img.width(), img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        out.planes[static_cast<size_t>(c)] = img.planes[static_cast<size_t>(c)].rowwise().reverse();
    }
    return out;
}

Image resize_image(const Image& img, double factor, ResizeMethod method) {
    require(factor > 0, "resize_image: factor must be > 0");
    const Index oh = std::max<Index>(1, static_cast<Index>(std::lround(img.height() * factor)));
    const Index ow = std::max<Index>(1, static_cast<Index>(std::lround(img.width() * factor)));
    Image out(oh, ow, img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        out.planes[static_cast<size_t>(c)] =
            resize_plane(img.planes[static_cast<size_t>(c)], oh, ow, method);
    }
    return out;
}

Image jpeg_cycle(const Image& img, int quality) {
    const auto bytes = io::encode_jpeg(img, quality);
    return io::decode_jpeg(bytes.data(), bytes.size());
}

Image blur_image(const Image& img, double sigma) {
    Image out(img.height(), img.width(), img.channels());
    for (int c = 0; c < img.channels(); ++c) {
        out.planes[static_cast<size_t>(c)] = gaussian_blur(img.planes[static_cast<size_t>(c)], sigma);
    }
    return out;
}

Image apply_augment(const Image& img, const AugmentSpec& spec) {
    spec.validate();
    Image out = img;

    if (spec.flip) out = flip_horizontal(out);

    if (spec.crop_size) {
        const Index crop = *spec.crop_size;
        require(crop <= std::min(out.height(), out.width()),
                "apply_augment: crop_size exceeds image dimensions");
        Rng rng(spec.seed);
        const Index oy = static_cast<Index>(
            rng.uniform_int(static_cast<std::uint64_t>(out.height() - crop) + 1));
        const Index ox = static_cast<Index>(
            rng.uniform_int(static_cast<std::uint64_t>(out.width() - crop) + 1));
        Image cropped(crop, crop, out.channels());
        for (int c = 0; c < out.channels(); ++c) {
            cropped.planes[static_cast<size_t>(c)] =
                out.planes[static_cast<size_t>(c)].block(oy, ox, crop, crop);
        }
        out = std::move(cropped);
    }

    if (spec.resize_factor) out = resize_image(out, *spec.resize_factor, spec.resize_method);

    const bool photometric = spec.brightness != 1.0 || spec.contrast != 1.0 ||
                             (spec.saturation != 1.0 && out.channels() == 3);
    if (photometric) {
        if (spec.brightness != 1.0) {
            for (auto& plane : out.planes) plane *= static_cast<float>(spec.brightness);
        }
        if (spec.contrast != 1.0) {
            double sum = 0.0;
            for (const auto& plane : out.planes) sum += plane.cast<double>().sum();
            const float mean = static_cast<float>(
                sum / (static_cast<double>(out.height()) * static_cast<double>(out.width()) *
                       static_cast<double>(out.channels())));
            const float k = static_cast<float>(spec.contrast);
            for (auto& plane : out.planes) plane = mean + k * (plane - mean);
        }
        if (spec.saturation != 1.0 && out.channels() == 3) {
            const float k = static_cast<float>(spec.saturation);
            Plane<float> luma =
                0.299f * out.planes[0] + 0.587f * out.planes[1] + 0.114f * out.planes[2];
            for (auto& plane : out.planes) plane = luma + k * (plane - luma);
        }
    }

    if (spec.jpeg_quality) {
        out = jpeg_cycle(out, *spec.jpeg_quality);
    } else {
        for (auto& plane : out.planes) plane = plane.cwiseMax(0.0f).cwiseMin(1.0f);
    }
    return out;
}

}  // namespace warpforge
