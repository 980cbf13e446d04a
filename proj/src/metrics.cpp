#include "warpforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "warpforge/flow_ops.hpp"

namespace warpforge {

double psnr(const Image& a, const Image& b, const MetricConfig& cfg) {
    require(a.same_dims(b), "psnr: image dimensions must match");
    cfg.validate();
    double sq_sum = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        const auto& pa = a.planes[static_cast<size_t>(c)];
        const auto& pb = b.planes[static_cast<size_t>(c)];
        for (Index i = 0; i < a.height(); ++i) {
            for (Index j = 0; j < a.width(); ++j) {
                const double d = static_cast<double>(pa(i, j)) - static_cast<double>(pb(i, j));
                sq_sum += d * d;
            }
        }
    }
    const double mse = sq_sum / (static_cast<double>(a.height()) * static_cast<double>(a.width()) *
                                 static_cast<double>(a.channels()));
    if (mse == 0.0) return cfg.psnr_cap;
    return std::min(cfg.psnr_cap, 10.0 * std::log10(cfg.psnr_peak * cfg.psnr_peak / mse));
}

double delta_psnr(const Image& original, const Image& modified, const Image& unwarped,
                  const MetricConfig& cfg) {
    return psnr(original, unwarped, cfg) - psnr(original, modified, cfg);
}

double epe_metric(const FlowField& pred, const FlowField& gt) {
    require(pred.same_dims(gt), "epe_metric: flow dimensions must match");
    double sum = 0.0;
    for (Index i = 0; i < pred.height(); ++i) {
        for (Index j = 0; j < pred.width(); ++j) {
            const double dx = static_cast<double>(pred.dx(i, j)) - static_cast<double>(gt.dx(i, j));
            const double dy = static_cast<double>(pred.dy(i, j)) - static_cast<double>(gt.dy(i, j));
            sum += std::sqrt(dx * dx + dy * dy);
        }
    }
    return sum / (static_cast<double>(pred.height()) * static_cast<double>(pred.width()));
}

double masked_epe_metric(const FlowField& pred, const FlowField& gt, const ConsistencyMask& mask) {
    require(pred.same_dims(gt), "masked_epe_metric: flow dimensions must match");
    require(mask.values.rows() == pred.height() && mask.values.cols() == pred.width(),
            "masked_epe_metric: mask dimensions must match");
    double sum = 0.0;
    for (Index i = 0; i < pred.height(); ++i) {
        for (Index j = 0; j < pred.width(); ++j) {
            const double dx = static_cast<double>(pred.dx(i, j)) - static_cast<double>(gt.dx(i, j));
            const double dy = static_cast<double>(pred.dy(i, j)) - static_cast<double>(gt.dy(i, j));
            sum += static_cast<double>(mask.values(i, j)) * std::sqrt(dx * dx + dy * dy);
        }
    }
    return sum / (static_cast<double>(pred.height()) * static_cast<double>(pred.width()));
}

double iou_at_threshold(const FlowField& pred, const FlowField& gt, double tau) {
    require(pred.same_dims(gt), "iou_at_threshold: flow dimensions must match");
    require(tau > 0, "iou_at_threshold: tau must be > 0");
    std::int64_t inter = 0, uni = 0;
    for (Index i = 0; i < pred.height(); ++i) {
        for (Index j = 0; j < pred.width(); ++j) {
            const double pm = std::hypot(static_cast<double>(pred.dx(i, j)),
                                         static_cast<double>(pred.dy(i, j)));
            const double gm = std::hypot(static_cast<double>(gt.dx(i, j)),
                                         static_cast<double>(gt.dy(i, j)));
            const bool in_pred = pm >= tau, in_gt = gm >= tau;
            inter += in_pred && in_gt;
            uni += in_pred || in_gt;
        }
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double average_precision(const std::vector<ScoredSample>& samples) {
    std::size_t fakes = 0;
    for (const auto& s : samples) fakes += s.is_fake;
    require(fakes > 0 && fakes < samples.size(),
            "average_precision: need at least one fake and one real sample");

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return samples[a].score > samples[b].score;
    });

    double precision_sum = 0.0;
    std::size_t positives_seen = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        if (samples[order[rank]].is_fake) {
            ++positives_seen;
            precision_sum += static_cast<double>(positives_seen) / static_cast<double>(rank + 1);
        }
    }
    return precision_sum / static_cast<double>(fakes);
}

double two_afc(const std::vector<std::pair<double, double>>& real_fake_pairs) {
    require(!real_fake_pairs.empty(), "two_afc: need at least one pair");
    double correct = 0.0;
    for (const auto& [real_score, fake_score] : real_fake_pairs) {
        if (fake_score > real_score) {
            correct += 1.0;
        } else if (fake_score == real_score) {
            correct += 0.5;
        }
    }
    return correct / static_cast<double>(real_fake_pairs.size());
}

AccuracyReport accuracy(const std::vector<ScoredSample>& samples, const MetricConfig& cfg) {
    require(!samples.empty(), "accuracy: need at least one sample");
    cfg.validate();
    std::int64_t n_real = 0, n_fake = 0, real_correct = 0, fake_correct = 0;
    for (const auto& s : samples) {
        const bool predicted_fake = s.score >= cfg.accuracy_threshold;
        if (s.is_fake) {
            ++n_fake;
            fake_correct += predicted_fake;
        } else {
            ++n_real;
            real_correct += !predicted_fake;
        }
    }
    AccuracyReport report;
    report.total = 100.0 * static_cast<double>(real_correct + fake_correct) /
                   static_cast<double>(samples.size());
    report.orig = n_real ? 100.0 * static_cast<double>(real_correct) / static_cast<double>(n_real)
                         : 0.0;
    report.mod = n_fake ? 100.0 * static_cast<double>(fake_correct) / static_cast<double>(n_fake)
                        : 0.0;
    return report;
}

std::vector<ScaleSweepPoint> psnr_scale_sweep(const Image& original, const Image& modified,
                                              const FlowField& flow,
                                              const std::vector<double>& scales,
                                              const MetricConfig& cfg) {
    require(original.same_dims(modified), "psnr_scale_sweep: image dimensions must match");
    require(original.height() == flow.height() && original.width() == flow.width(),
            "psnr_scale_sweep: image and flow dimensions must match");
    require(!scales.empty(), "psnr_scale_sweep: scales must be non-empty");

    std::vector<ScaleSweepPoint> curve;
    curve.reserve(scales.size());
    FlowField scaled(flow.height(), flow.width());
    for (double k : scales) {
        scaled.dx = flow.dx * static_cast<float>(k);
        scaled.dy = flow.dy * static_cast<float>(k);
        const Image warped = warp_image(modified, scaled);
        curve.push_back({k, psnr(original, warped, cfg)});
    }
    return curve;
}

}  // namespace warpforge
