#ifndef WARPFORGE_PIPELINE_HPP
#define WARPFORGE_PIPELINE_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpforge/manifest.hpp"
#include "warpforge/metrics.hpp"
#include "warpforge/synth.hpp"

namespace warpforge {

struct GenerateOptions {
    SynthConfig synth;        // synth.seed is the global dataset seed
    int reps = 6;             // fakes per original
    int workers = 0;          // 0 means all logical cores
    double train_frac = 0.7;
    double val_frac = 0.15;   // test gets the remainder

    void validate() const;
};

/// Builds a dataset under out_dir: copies each original, renders `reps`
/// fakes per image (warped PNG, ground-truth .flo, consistency mask), and
/// writes manifest.jsonl with paths relative to out_dir. Per-entry seeds
/// derive from (seed, image id, rep), so serial and parallel runs emit
/// byte-identical artifacts. Images without landmarks are skipped with a
/// warning.
DatasetManifest generate_dataset(const std::filesystem::path& image_dir,
                                 const std::filesystem::path& landmarks_file,
                                 const std::filesystem::path& out_dir,
                                 const GenerateOptions& opts);

/// Sampling weights that balance the label distribution: fakes weigh 1,
/// reals fake_count/real_count. Errors on single-class manifests.
std::map<std::string, double> balanced_iteration_weights(const DatasetManifest& manifest);

/// External model outputs to score: per-entry-id manipulation scores and/or
/// predicted flow files.
struct EvalBundle {
    std::map<std::string, double> scores;
    std::map<std::string, std::filesystem::path> flow_paths;
};

/// Scores read from CSV (ids must resolve in the manifest); flows collected
/// as <id>.flo from a directory, keeping only ids the manifest knows.
EvalBundle load_eval_bundle(const DatasetManifest& manifest,
                            const std::optional<std::filesystem::path>& scores_csv,
                            const std::optional<std::filesystem::path>& flows_dir);

/// Perfect predictions derived from the manifest itself: score = label,
/// predicted flow = ground truth flow.
EvalBundle make_oracle_bundle(const DatasetManifest& manifest,
                              const std::filesystem::path& root);

struct ClassificationReport {
    double threshold = 0.5;
    AccuracyReport acc;          // at `threshold`
    double best_threshold = 0.5;
    AccuracyReport acc_best;     // at the total-accuracy-maximizing threshold
    double ap = 0.0;             // percent
    double two_afc = 0.0;        // percent
    std::size_t samples = 0;
    std::size_t pairs = 0;
};

struct LocalizationReport {
    double epe = 0.0;
    double epe_masked = 0.0;
    double iou = 0.0;
    double iou_tau = 3.0;
    double delta_psnr = 0.0;
    std::size_t flows = 0;
};

struct EvalReport {
    std::optional<ClassificationReport> classification;
    std::optional<LocalizationReport> localization;
    std::vector<std::string> warnings;
};

/// Scores the bundle against the manifest. Classification covers every
/// scored entry (2AFC pairs each fake with the real entry sharing its
/// original). Localization covers fakes with predicted flows: EPE, masked
/// EPE, IOU at cfg.iou_threshold, and the PSNR gained by unwarping with the
/// predicted flow. Sections without predictions are omitted with a warning.
EvalReport evaluate(const DatasetManifest& manifest, const EvalBundle& bundle,
                    const MetricConfig& cfg, const std::filesystem::path& root, int workers = 0);

std::string report_to_json_string(const EvalReport& report, int indent = 2);

/// Heat-colored flow magnitude blended over the desaturated image; the
/// magnitude axis is fixed to [0, max_displacement] so renders compare
/// across images. Returns the composite and writes it as PNG when out_path
/// is non-empty.
Image render_overlay(const Image& img, const FlowField& flow, float max_displacement,
                     const std::filesystem::path& out_path = {});

/// warp_image(modified, flow), written as PNG when out_path is non-empty.
Image render_undo(const Image& modified, const FlowField& flow,
                  const std::filesystem::path& out_path = {});

}  // namespace warpforge

#endif
