#ifndef WARPFORGE_TYPES_HPP
#define WARPFORGE_TYPES_HPP

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace warpforge {

using Index = Eigen::Index;

/// Dense scalar raster, row-major so serialized formats map directly onto memory.
template <class Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

/// Raster image with samples in [0,1], stored as one plane per channel.
template <class Scalar>
struct ImageT {
    std::vector<Plane<Scalar>> planes;  // size 1 (gray) or 3 (rgb)

    ImageT() = default;
    ImageT(Index height, Index width, int channels, Scalar fill = Scalar(0)) {
        require(height >= 1 && width >= 1, "image dimensions must be positive");
        require(channels == 1 || channels == 3, "image must have 1 or 3 channels");
        planes.assign(static_cast<size_t>(channels), Plane<Scalar>::Constant(height, width, fill));
    }

    Index height() const { return planes.empty() ? 0 : planes[0].rows(); }
    Index width() const { return planes.empty() ? 0 : planes[0].cols(); }
    int channels() const { return static_cast<int>(planes.size()); }

    bool same_dims(const ImageT& other) const {
        return height() == other.height() && width() == other.width() &&
               channels() == other.channels();
    }

    template <class Other>
    ImageT<Other> cast() const {
        ImageT<Other> out;
        out.planes.reserve(planes.size());
        for (const auto& p : planes) out.planes.push_back(p.template cast<Other>());
        return out;
    }
};

/// Per-pixel displacement field in pixel units.
///
/// Convention: for a flow U from image A to image B, B sampled at p + U(p)
/// corresponds to A at p, so warp_image(B, U) reconstructs A.
template <class Scalar>
struct FlowFieldT {
    Plane<Scalar> dx, dy;

    FlowFieldT() = default;
    FlowFieldT(Index height, Index width)
        : dx(Plane<Scalar>::Zero(height, width)), dy(Plane<Scalar>::Zero(height, width)) {
        require(height >= 1 && width >= 1, "flow dimensions must be positive");
    }

    Index height() const { return dx.rows(); }
    Index width() const { return dx.cols(); }

    bool same_dims(const FlowFieldT& other) const {
        return height() == other.height() && width() == other.width();
    }

    template <class Other>
    FlowFieldT<Other> cast() const {
        FlowFieldT<Other> out;
        out.dx = dx.template cast<Other>();
        out.dy = dy.template cast<Other>();
        return out;
    }
};

/// Soft validity mask in [0,1]; 1 = flow-consistent pixel, 0 = discarded.
template <class Scalar>
struct ConsistencyMaskT {
    Plane<Scalar> values;

    ConsistencyMaskT() = default;
    explicit ConsistencyMaskT(Index height, Index width, Scalar fill = Scalar(1))
        : values(Plane<Scalar>::Constant(height, width, fill)) {}

    Index height() const { return values.rows(); }
    Index width() const { return values.cols(); }

    template <class Other>
    ConsistencyMaskT<Other> cast() const {
        ConsistencyMaskT<Other> out;
        out.values = values.template cast<Other>();
        return out;
    }
};

/// Parameters of the forward-backward consistency test.
struct ConsistencyConfig {
    double epsilon = 0.1;
    double tau = 0.85;
    double blur_sigma = 7.0;

    void validate() const {
        require(epsilon > 0, "epsilon must be > 0");
        require(tau > 0 && tau < 1, "tau must be in (0,1)");
        require(blur_sigma > 0, "blur_sigma must be > 0");
    }
};

/// Per-pixel class ids for integer flow offsets in {-5..5}^2 (11*11 = 121 classes).
struct FlowClassGrid {
    static constexpr int kMaxOffset = 5;
    static constexpr int kSide = 2 * kMaxOffset + 1;
    static constexpr int kNumClasses = kSide * kSide;

    Eigen::Array<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> class_ids;

    Index height() const { return class_ids.rows(); }
    Index width() const { return class_ids.cols(); }
};

using Image = ImageT<float>;
using FlowField = FlowFieldT<float>;
using ConsistencyMask = ConsistencyMaskT<float>;

}  // namespace warpforge

#endif
