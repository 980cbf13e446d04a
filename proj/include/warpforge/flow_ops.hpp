#ifndef WARPFORGE_FLOW_OPS_HPP
#define WARPFORGE_FLOW_OPS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "warpforge/types.hpp"

namespace warpforge {

/// Bilinear plane sample with value and partial derivatives w.r.t. (x, y).
template <class Scalar>
struct PlaneSample {
    Scalar value;
    Scalar ddx;  // zero where the border clamp is active
    Scalar ddy;
};

namespace detail {

// Resolves a sample coordinate to a cell [i, i+1] and a blend weight.
// Coordinates are clamped to the valid range first (edge-clamp policy);
// `grad_pass` is 0 whenever the clamp fired, cutting the derivative chain.
// Interior lattice coordinates resolve to the cell on their left (weight 1),
// which both keeps lattice samples bit-exact and fixes the subgradient
// convention at texel boundaries.
template <class Scalar>
inline void resolve_axis(Scalar coord, Index size, Index& i0, Scalar& frac, Scalar& grad_pass) {
    grad_pass = Scalar(1);
    if (coord < Scalar(0)) {
        coord = Scalar(0);
        grad_pass = Scalar(0);
    } else if (coord > Scalar(size - 1)) {
        coord = Scalar(size - 1);
        grad_pass = Scalar(0);
    }
    if (size == 1) {
        i0 = 0;
        frac = Scalar(0);
        grad_pass = Scalar(0);
        return;
    }
    i0 = static_cast<Index>(std::floor(coord));
    if (Scalar(i0) == coord && i0 > 0) --i0;
    frac = coord - Scalar(i0);
}

template <class Scalar>
inline PlaneSample<Scalar> sample_plane_grad(const Plane<Scalar>& p, Scalar x, Scalar y) {
    Index x0, y0;
    Scalar fx, fy, gx, gy;
    resolve_axis(x, p.cols(), x0, fx, gx);
    resolve_axis(y, p.rows(), y0, fy, gy);
    const Index x1 = std::min(x0 + 1, p.cols() - 1);
    const Index y1 = std::min(y0 + 1, p.rows() - 1);

    const Scalar v00 = p(y0, x0), v01 = p(y0, x1);
    const Scalar v10 = p(y1, x0), v11 = p(y1, x1);
    const Scalar top = (Scalar(1) - fx) * v00 + fx * v01;
    const Scalar bot = (Scalar(1) - fx) * v10 + fx * v11;

    PlaneSample<Scalar> out;
    out.value = (Scalar(1) - fy) * top + fy * bot;
    out.ddx = gx * ((Scalar(1) - fy) * (v01 - v00) + fy * (v11 - v10));
    out.ddy = gy * (bot - top);
    return out;
}

template <class Scalar>
inline Scalar sample_plane(const Plane<Scalar>& p, Scalar x, Scalar y) {
    Index x0, y0;
    Scalar fx, fy, unused;
    resolve_axis(x, p.cols(), x0, fx, unused);
    resolve_axis(y, p.rows(), y0, fy, unused);
    const Index x1 = std::min(x0 + 1, p.cols() - 1);
    const Index y1 = std::min(y0 + 1, p.rows() - 1);
    const Scalar top = (Scalar(1) - fx) * p(y0, x0) + fx * p(y0, x1);
    const Scalar bot = (Scalar(1) - fx) * p(y1, x0) + fx * p(y1, x1);
    return (Scalar(1) - fy) * top + fy * bot;
}

}  // namespace detail

/// Per-channel bilinear sample at (x, y); x runs along columns, y along rows.
/// Out-of-bounds coordinates clamp to the border. Non-finite coordinates are
/// rejected.
template <class Scalar>
std::array<Scalar, 3> sample_bilinear(const ImageT<Scalar>& img, Scalar x, Scalar y) {
    require(std::isfinite(static_cast<double>(x)) && std::isfinite(static_cast<double>(y)),
            "sample_bilinear: coordinates must be finite");
    std::array<Scalar, 3> out{Scalar(0), Scalar(0), Scalar(0)};
    for (int c = 0; c < img.channels(); ++c) {
        out[static_cast<size_t>(c)] = detail::sample_plane(img.planes[static_cast<size_t>(c)], x, y);
    }
    return out;
}

/// Backward warp T(X; U): out(p) = X(p + U(p)), bilinearly sampled.
/// With U the original-to-modified flow and X the modified image, the output
/// approximates the original (the "undo" resampling).
template <class Scalar>
ImageT<Scalar> warp_image(const ImageT<Scalar>& img, const FlowFieldT<Scalar>& flow) {
    require(img.height() == flow.height() && img.width() == flow.width(),
            "warp_image: image and flow dimensions must match");
    ImageT<Scalar> out(img.height(), img.width(), img.channels());
    const Index h = img.height(), w = img.width();
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const Scalar x = Scalar(j) + flow.dx(i, j);
            const Scalar y = Scalar(i) + flow.dy(i, j);
            for (int c = 0; c < img.channels(); ++c) {
                out.planes[static_cast<size_t>(c)](i, j) =
                    detail::sample_plane(img.planes[static_cast<size_t>(c)], x, y);
            }
        }
    }
    return out;
}

/// Resamples a flow field through another flow, treating each component as a
/// single-channel image: out(p) = flow_to_warp(p + by(p)).
template <class Scalar>
FlowFieldT<Scalar> warp_flow(const FlowFieldT<Scalar>& flow_to_warp, const FlowFieldT<Scalar>& by) {
    require(flow_to_warp.same_dims(by), "warp_flow: flow dimensions must match");
    FlowFieldT<Scalar> out(by.height(), by.width());
    const Index h = by.height(), w = by.width();
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const Scalar x = Scalar(j) + by.dx(i, j);
            const Scalar y = Scalar(i) + by.dy(i, j);
            out.dx(i, j) = detail::sample_plane(flow_to_warp.dx, x, y);
            out.dy(i, j) = detail::sample_plane(flow_to_warp.dy, x, y);
        }
    }
    return out;
}

template <class Scalar>
struct FlowInverseT {
    FlowFieldT<Scalar> flow;
    Plane<Scalar> residual;  // ||V(p) + U(p + V(p))|| of the returned V
    int iterations = 0;
    bool converged = false;
};

/// Fixed-point flow inversion: V_{k+1}(p) = -U(p + V_k(p)) starting from
/// V_0 = 0. Stops when the mean update step drops to `tol` pixels or after
/// `max_iters` sweeps; non-convergence is reported through the residual
/// field, never thrown. Exact after one sweep for constant flows.
template <class Scalar>
FlowInverseT<Scalar> invert_flow(const FlowFieldT<Scalar>& flow, int max_iters = 30,
                                 Scalar tol = Scalar(1e-3)) {
    require(max_iters >= 1, "invert_flow: max_iters must be >= 1");
    const Index h = flow.height(), w = flow.width();
    FlowInverseT<Scalar> result;
    result.flow = FlowFieldT<Scalar>(h, w);
    FlowFieldT<Scalar> next(h, w);

    for (int iter = 0; iter < max_iters; ++iter) {
        double step_sum = 0.0;
        for (Index i = 0; i < h; ++i) {
            for (Index j = 0; j < w; ++j) {
                const Scalar x = Scalar(j) + result.flow.dx(i, j);
                const Scalar y = Scalar(i) + result.flow.dy(i, j);
                const Scalar nx = -detail::sample_plane(flow.dx, x, y);
                const Scalar ny = -detail::sample_plane(flow.dy, x, y);
                const double sx = static_cast<double>(nx - result.flow.dx(i, j));
                const double sy = static_cast<double>(ny - result.flow.dy(i, j));
                step_sum += std::sqrt(sx * sx + sy * sy);
                next.dx(i, j) = nx;
                next.dy(i, j) = ny;
            }
        }
        std::swap(result.flow, next);
        result.iterations = iter + 1;
        if (step_sum / static_cast<double>(h * w) <= static_cast<double>(tol)) {
            result.converged = true;
            break;
        }
    }

    result.residual = Plane<Scalar>(h, w);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const Scalar x = Scalar(j) + result.flow.dx(i, j);
            const Scalar y = Scalar(i) + result.flow.dy(i, j);
            const Scalar rx = result.flow.dx(i, j) + detail::sample_plane(flow.dx, x, y);
            const Scalar ry = result.flow.dy(i, j) + detail::sample_plane(flow.dy, x, y);
            result.residual(i, j) = std::sqrt(rx * rx + ry * ry);
        }
    }
    return result;
}

/// Separable Gaussian blur with kernel radius ceil(3*sigma), kernel
/// normalized to sum 1, edge-clamp padding.
template <class Scalar>
Plane<Scalar> gaussian_blur(const Plane<Scalar>& field, double sigma) {
    require(sigma > 0, "gaussian_blur: sigma must be > 0");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<Scalar> kernel(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
        kernel[static_cast<size_t>(k + radius)] = static_cast<Scalar>(v);
        sum += v;
    }
    for (auto& v : kernel) v = static_cast<Scalar>(static_cast<double>(v) / sum);

    const Index h = field.rows(), w = field.cols();
    Plane<Scalar> tmp(h, w), out(h, w);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            Scalar acc = 0;
            for (int k = -radius; k <= radius; ++k) {
                const Index jj = std::clamp<Index>(j + k, 0, w - 1);
                acc += kernel[static_cast<size_t>(k + radius)] * field(i, jj);
            }
            tmp(i, j) = acc;
        }
    }
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            Scalar acc = 0;
            for (int k = -radius; k <= radius; ++k) {
                const Index ii = std::clamp<Index>(i + k, 0, h - 1);
                acc += kernel[static_cast<size_t>(k + radius)] * tmp(ii, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

/// Forward-backward consistency mask. A pixel fails the test when the
/// relative error ||U'_mo(p) + U_om(p)|| / (||U_om(p)|| + epsilon) exceeds
/// tau, where U'_mo = warp_flow(u_mo, u_om) carries the backward flow into
/// the original image space. The binary failure map is blurred and
/// complemented so masked regions fade out softly.
template <class Scalar>
ConsistencyMaskT<Scalar> consistency_mask(const FlowFieldT<Scalar>& u_om,
                                          const FlowFieldT<Scalar>& u_mo,
                                          const ConsistencyConfig& cfg = {}) {
    require(u_om.same_dims(u_mo), "consistency_mask: flow dimensions must match");
    cfg.validate();
    const FlowFieldT<Scalar> carried = warp_flow(u_mo, u_om);
    const Index h = u_om.height(), w = u_om.width();
    Plane<Scalar> inconsistent(h, w);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const double ex = static_cast<double>(carried.dx(i, j) + u_om.dx(i, j));
            const double ey = static_cast<double>(carried.dy(i, j) + u_om.dy(i, j));
            const double fx = static_cast<double>(u_om.dx(i, j));
            const double fy = static_cast<double>(u_om.dy(i, j));
            const double ratio = std::sqrt(ex * ex + ey * ey) /
                                 (std::sqrt(fx * fx + fy * fy) + cfg.epsilon);
            inconsistent(i, j) = ratio > cfg.tau ? Scalar(1) : Scalar(0);
        }
    }
    ConsistencyMaskT<Scalar> mask;
    mask.values = (Scalar(1) - gaussian_blur(inconsistent, cfg.blur_sigma))
                      .cwiseMax(Scalar(0))
                      .cwiseMin(Scalar(1));
    return mask;
}

enum class GradAxis { horizontal, vertical };

/// Strided flow gradient: subsample the flow on the stride-s lattice, then
/// forward-difference along the axis on the decimated grid. The trailing
/// difference is dropped, so a horizontal gradient of an Hs x Ws lattice is
/// Hs x (Ws-1).
template <class Scalar>
FlowFieldT<Scalar> flow_gradient(const FlowFieldT<Scalar>& flow, int stride, GradAxis axis) {
    require(stride >= 1, "flow_gradient: stride must be >= 1");
    require(stride < std::min(flow.height(), flow.width()),
            "flow_gradient: stride must be smaller than both dimensions");
    const Index nr = (flow.height() - 1) / stride + 1;
    const Index nc = (flow.width() - 1) / stride + 1;
    // stride < min(H, W) guarantees at least two lattice points per axis.
    const Index rows = axis == GradAxis::vertical ? nr - 1 : nr;
    const Index cols = axis == GradAxis::horizontal ? nc - 1 : nc;
    FlowFieldT<Scalar> grad(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const Index r = i * stride, c = j * stride;
            if (axis == GradAxis::horizontal) {
                grad.dx(i, j) = flow.dx(r, c + stride) - flow.dx(r, c);
                grad.dy(i, j) = flow.dy(r, c + stride) - flow.dy(r, c);
            } else {
                grad.dx(i, j) = flow.dx(r + stride, c) - flow.dx(r, c);
                grad.dy(i, j) = flow.dy(r + stride, c) - flow.dy(r, c);
            }
        }
    }
    return grad;
}

/// Rounds each component to the nearest integer (ties away from zero),
/// clamps to [-5,5] and encodes class_id = (u+5)*11 + (v+5).
template <class Scalar>
FlowClassGrid discretize_flow(const FlowFieldT<Scalar>& flow) {
    FlowClassGrid grid;
    grid.class_ids.resize(flow.height(), flow.width());
    constexpr int kMax = FlowClassGrid::kMaxOffset;
    for (Index i = 0; i < flow.height(); ++i) {
        for (Index j = 0; j < flow.width(); ++j) {
            const int u = std::clamp<int>(static_cast<int>(std::lround(static_cast<double>(flow.dx(i, j)))), -kMax, kMax);
            const int v = std::clamp<int>(static_cast<int>(std::lround(static_cast<double>(flow.dy(i, j)))), -kMax, kMax);
            grid.class_ids(i, j) = (u + kMax) * FlowClassGrid::kSide + (v + kMax);
        }
    }
    return grid;
}

/// Decodes class ids back to the integer flow they stand for.
template <class Scalar = float>
FlowFieldT<Scalar> undiscretize(const FlowClassGrid& grid) {
    FlowFieldT<Scalar> flow(grid.height(), grid.width());
    constexpr int kMax = FlowClassGrid::kMaxOffset;
    for (Index i = 0; i < grid.height(); ++i) {
        for (Index j = 0; j < grid.width(); ++j) {
            const int id = grid.class_ids(i, j);
            require(id >= 0 && id < FlowClassGrid::kNumClasses,
                    "undiscretize: class id out of range");
            flow.dx(i, j) = static_cast<Scalar>(id / FlowClassGrid::kSide - kMax);
            flow.dy(i, j) = static_cast<Scalar>(id % FlowClassGrid::kSide - kMax);
        }
    }
    return flow;
}

/// Per-pixel Euclidean norm of the displacement.
template <class Scalar>
Plane<Scalar> flow_magnitude(const FlowFieldT<Scalar>& flow) {
    return (flow.dx.square() + flow.dy.square()).sqrt();
}

}  // namespace warpforge

#endif
