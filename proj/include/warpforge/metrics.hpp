#ifndef WARPFORGE_METRICS_HPP
#define WARPFORGE_METRICS_HPP

#include <string>
#include <utility>
#include <vector>

#include "warpforge/types.hpp"

namespace warpforge {

struct ScoredSample {
    std::string id;
    double score = 0.0;
    bool is_fake = false;
};

struct MetricConfig {
    double iou_threshold = 3.0;
    double psnr_peak = 1.0;
    double psnr_cap = 99.0;
    double accuracy_threshold = 0.5;

    void validate() const {
        require(iou_threshold > 0, "MetricConfig: iou_threshold must be > 0");
        require(psnr_cap > 0, "MetricConfig: psnr_cap must be > 0");
        require(psnr_peak > 0, "MetricConfig: psnr_peak must be > 0");
    }
};

/// 10*log10(peak^2 / MSE) in dB, capped at cfg.psnr_cap (identical images
/// hit the cap). MSE is accumulated in double over pixels then channels.
double psnr(const Image& a, const Image& b, const MetricConfig& cfg = {});

/// PSNR(original, unwarped) - PSNR(original, modified): the quality gained
/// by undoing the warp. Exactly 0 when unwarped == modified.
double delta_psnr(const Image& original, const Image& modified, const Image& unwarped,
                  const MetricConfig& cfg = {});

/// Mean per-pixel Euclidean distance between flows, unmasked.
double epe_metric(const FlowField& pred, const FlowField& gt);

/// Same, with per-pixel weights applied; reported separately so the two
/// variants are never conflated.
double masked_epe_metric(const FlowField& pred, const FlowField& gt, const ConsistencyMask& mask);

/// IOU of {|pred| >= tau} vs {|gt| >= tau}; 1.0 when both sets are empty.
double iou_at_threshold(const FlowField& pred, const FlowField& gt, double tau);

/// Mean precision at each fake in score-descending order (stable sort, so
/// ties keep input order). Needs at least one fake and one real.
double average_precision(const std::vector<ScoredSample>& samples);

/// Fraction of (real, fake) score pairs where the fake scores higher; ties
/// count one half.
double two_afc(const std::vector<std::pair<double, double>>& real_fake_pairs);

struct AccuracyReport {
    double total = 0.0;  // percentages in [0,100]
    double orig = 0.0;
    double mod = 0.0;
};

/// Thresholded accuracy: predicted fake iff score >= cfg.accuracy_threshold.
/// Per-class figures are 0 when that class is absent.
AccuracyReport accuracy(const std::vector<ScoredSample>& samples, const MetricConfig& cfg = {});

struct ScaleSweepPoint {
    double scale = 0.0;
    double psnr_db = 0.0;
};

/// PSNR(original, warp_image(modified, k*flow)) for each scale k. Scale 0
/// reproduces PSNR(original, modified) bit-exactly.
std::vector<ScaleSweepPoint> psnr_scale_sweep(const Image& original, const Image& modified,
                                              const FlowField& flow,
                                              const std::vector<double>& scales,
                                              const MetricConfig& cfg = {});

}  // namespace warpforge

#endif
