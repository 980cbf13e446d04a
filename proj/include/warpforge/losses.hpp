#ifndef WARPFORGE_LOSSES_HPP
#define WARPFORGE_LOSSES_HPP

#include <cmath>
#include <vector>

#include "warpforge/flow_ops.hpp"
#include "warpforge/types.hpp"

namespace warpforge {

struct LossConfig {
    double lambda_epe = 1.5;
    double lambda_ms = 15.0;
    double lambda_rec = 1.0;
    std::vector<int> strides = {2, 8, 32, 64};

    void validate() const {
        require(lambda_epe >= 0 && lambda_ms >= 0 && lambda_rec >= 0,
                "LossConfig: lambdas must be >= 0");
        for (int s : strides) require(s >= 1, "LossConfig: strides must be positive");
    }
};

/// Scalar loss plus its analytic gradient with respect to the predicted flow.
template <class Scalar>
struct LossValueT {
    double value = 0.0;
    FlowFieldT<Scalar> gradient;
};

using LossValue = LossValueT<float>;

/// Masked endpoint error: mean over pixels of mask(p) * ||pred(p) - gt(p)||.
/// Pixels with zero residual contribute zero gradient.
template <class Scalar>
LossValueT<Scalar> epe_loss(const FlowFieldT<Scalar>& pred, const FlowFieldT<Scalar>& gt,
                            const ConsistencyMaskT<Scalar>& mask) {
    require(pred.same_dims(gt), "epe_loss: flow dimensions must match");
    require(mask.values.rows() == pred.height() && mask.values.cols() == pred.width(),
            "epe_loss: mask dimensions must match");
    const Index h = pred.height(), w = pred.width();
    const double inv_n = 1.0 / static_cast<double>(h * w);

    LossValueT<Scalar> out;
    out.gradient = FlowFieldT<Scalar>(h, w);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const double m = static_cast<double>(mask.values(i, j));
            const double dx = static_cast<double>(pred.dx(i, j) - gt.dx(i, j));
            const double dy = static_cast<double>(pred.dy(i, j) - gt.dy(i, j));
            const double norm = std::sqrt(dx * dx + dy * dy);
            out.value += m * norm * inv_n;
            if (norm > 0) {
                out.gradient.dx(i, j) = static_cast<Scalar>(m * dx / norm * inv_n);
                out.gradient.dy(i, j) = static_cast<Scalar>(m * dy / norm * inv_n);
            }
        }
    }
    return out;
}

/// Multiscale smoothness term: for every stride and both axes, the mean
/// masked L2 norm of the strided-gradient residual, summed across scales.
/// The mask is decimated on the same stride lattice, anchored at the first
/// point of each difference pair.
template <class Scalar>
LossValueT<Scalar> multiscale_loss(const FlowFieldT<Scalar>& pred, const FlowFieldT<Scalar>& gt,
                                   const ConsistencyMaskT<Scalar>& mask, const LossConfig& cfg = {}) {
    require(pred.same_dims(gt), "multiscale_loss: flow dimensions must match");
    require(mask.values.rows() == pred.height() && mask.values.cols() == pred.width(),
            "multiscale_loss: mask dimensions must match");
    cfg.validate();

    const Index h = pred.height(), w = pred.width();
    LossValueT<Scalar> out;
    out.gradient = FlowFieldT<Scalar>(h, w);

    for (int stride : cfg.strides) {
        require(stride < std::min(h, w), "multiscale_loss: stride must be smaller than both dimensions");
        for (GradAxis axis : {GradAxis::horizontal, GradAxis::vertical}) {
            const Index nr = (h - 1) / stride + 1;
            const Index nc = (w - 1) / stride + 1;
            const Index rows = axis == GradAxis::vertical ? nr - 1 : nr;
            const Index cols = axis == GradAxis::horizontal ? nc - 1 : nc;
            const double inv_n = 1.0 / static_cast<double>(rows * cols);
            for (Index i = 0; i < rows; ++i) {
                for (Index j = 0; j < cols; ++j) {
                    const Index r = i * stride, c = j * stride;
                    const Index r2 = axis == GradAxis::vertical ? r + stride : r;
                    const Index c2 = axis == GradAxis::horizontal ? c + stride : c;
                    const double dxd = static_cast<double>((pred.dx(r2, c2) - pred.dx(r, c)) -
                                                           (gt.dx(r2, c2) - gt.dx(r, c)));
                    const double dyd = static_cast<double>((pred.dy(r2, c2) - pred.dy(r, c)) -
                                                           (gt.dy(r2, c2) - gt.dy(r, c)));
                    const double m = static_cast<double>(mask.values(r, c));
                    const double norm = std::sqrt(dxd * dxd + dyd * dyd);
                    out.value += m * norm * inv_n;
                    if (norm > 0) {
                        const Scalar gx = static_cast<Scalar>(m * dxd / norm * inv_n);
                        const Scalar gy = static_cast<Scalar>(m * dyd / norm * inv_n);
                        out.gradient.dx(r2, c2) += gx;
                        out.gradient.dx(r, c) -= gx;
                        out.gradient.dy(r2, c2) += gy;
                        out.gradient.dy(r, c) -= gy;
                    }
                }
            }
        }
    }
    return out;
}

/// L1 reconstruction error of the undo warp: mean over pixels and channels
/// of |warp_image(modified, pred) - original|. The gradient reaches the flow
/// through the bilinear sampling weights; the subgradient is 0 at the L1
/// kink and at clamped border samples.
template <class Scalar>
LossValueT<Scalar> reconstruction_loss(const ImageT<Scalar>& modified, const FlowFieldT<Scalar>& pred,
                                       const ImageT<Scalar>& original) {
    require(modified.same_dims(original), "reconstruction_loss: image dimensions must match");
    require(modified.height() == pred.height() && modified.width() == pred.width(),
            "reconstruction_loss: image and flow dimensions must match");
    const Index h = pred.height(), w = pred.width();
    const double inv_n = 1.0 / static_cast<double>(h * w * modified.channels());

    LossValueT<Scalar> out;
    out.gradient = FlowFieldT<Scalar>(h, w);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const Scalar x = Scalar(j) + pred.dx(i, j);
            const Scalar y = Scalar(i) + pred.dy(i, j);
            for (int c = 0; c < modified.channels(); ++c) {
                const auto s = detail::sample_plane_grad(modified.planes[static_cast<size_t>(c)], x, y);
                const double r = static_cast<double>(s.value) -
                                 static_cast<double>(original.planes[static_cast<size_t>(c)](i, j));
                out.value += std::abs(r) * inv_n;
                const double sign = r > 0 ? 1.0 : (r < 0 ? -1.0 : 0.0);
                out.gradient.dx(i, j) += static_cast<Scalar>(sign * static_cast<double>(s.ddx) * inv_n);
                out.gradient.dy(i, j) += static_cast<Scalar>(sign * static_cast<double>(s.ddy) * inv_n);
            }
        }
    }
    return out;
}

/// Combines already-computed component values with the configured weights.
inline double weighted_total(const LossConfig& cfg, double epe, double multiscale, double rec) {
    return cfg.lambda_epe * epe + cfg.lambda_ms * multiscale + cfg.lambda_rec * rec;
}

/// Weighted sum of the three losses; the gradient is the identically
/// weighted sum of the component gradients.
template <class Scalar>
LossValueT<Scalar> total_loss(const ImageT<Scalar>& modified, const FlowFieldT<Scalar>& pred,
                              const FlowFieldT<Scalar>& gt, const ConsistencyMaskT<Scalar>& mask,
                              const ImageT<Scalar>& original, const LossConfig& cfg = {}) {
    const auto e = epe_loss(pred, gt, mask);
    const auto m = multiscale_loss(pred, gt, mask, cfg);
    const auto r = reconstruction_loss(modified, pred, original);

    LossValueT<Scalar> out;
    out.value = weighted_total(cfg, e.value, m.value, r.value);
    out.gradient = FlowFieldT<Scalar>(pred.height(), pred.width());
    const Scalar le = static_cast<Scalar>(cfg.lambda_epe);
    const Scalar lm = static_cast<Scalar>(cfg.lambda_ms);
    const Scalar lr = static_cast<Scalar>(cfg.lambda_rec);
    out.gradient.dx = le * e.gradient.dx + lm * m.gradient.dx + lr * r.gradient.dx;
    out.gradient.dy = le * e.gradient.dy + lm * m.gradient.dy + lr * r.gradient.dy;
    return out;
}

}  // namespace warpforge

#endif
