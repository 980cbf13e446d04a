#include "warpforge/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include <json.hpp>

#include "warpforge/flow_ops.hpp"
#include "warpforge/io/flo.hpp"
#include "warpforge/io/image_io.hpp"
#include "warpforge/io/msk.hpp"
#include "warpforge/log.hpp"
#include "warpforge/parallel.hpp"
#include "warpforge/rng.hpp"

namespace warpforge {

namespace fs = std::filesystem;

namespace {

// Fixed salt so split assignment depends only on the image id, never on the
// dataset seed or corpus contents.
constexpr std::uint64_t kSplitSalt = 0x73706c6974ULL;

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

Split split_for_id(const std::string& id, double train_frac, double val_frac) {
    const std::uint64_t h = derive_seed(kSplitSalt, id, 0);
    const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    if (u < train_frac) return Split::train;
    if (u < train_frac + val_frac) return Split::val;
    return Split::test;
}

int resolve_workers(int workers) { return workers <= 0 ? default_workers() : workers; }

}  // namespace

void GenerateOptions::validate() const {
    synth.validate();
    require(reps >= 1, "GenerateOptions: reps must be >= 1");
    require(train_frac >= 0 && val_frac >= 0 && train_frac + val_frac <= 1.0,
            "GenerateOptions: split fractions must be nonnegative and sum to <= 1");
}

DatasetManifest generate_dataset(const fs::path& image_dir, const fs::path& landmarks_file,
                                 const fs::path& out_dir, const GenerateOptions& opts) {
    opts.validate();
    require(fs::is_directory(image_dir),
            "generate_dataset: image dir not found: " + image_dir.string());

    const auto meshes = read_landmarks(landmarks_file);

    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(image_dir)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
    }
    std::sort(images.begin(), images.end());
    require(!images.empty(), "generate_dataset: no images in " + image_dir.string());

    fs::create_directories(out_dir / "original");
    fs::create_directories(out_dir / "warped");
    fs::create_directories(out_dir / "flow");
    fs::create_directories(out_dir / "mask");

    struct SourceImage {
        fs::path path;
        std::string stem;
        LandmarkMesh mesh;
    };
    std::vector<SourceImage> sources;
    for (const auto& path : images) {
        const auto it = meshes.find(path.filename().string());
        if (it == meshes.end()) {
            log_warn("generate_dataset: no landmarks for ", path.filename().string(),
                     ", skipping");
            continue;
        }
        sources.push_back({path, path.stem().string(), it->second});
    }
    require(!sources.empty(), "generate_dataset: no image has landmarks");

    const int reps = opts.reps;
    std::vector<ManifestEntry> fake_entries(sources.size() * static_cast<std::size_t>(reps));
    std::vector<ManifestEntry> real_entries(sources.size());

    parallel_for(sources.size(), resolve_workers(opts.workers), [&](std::size_t si) {
        const SourceImage& src = sources[si];
        const Image img = io::read_image(src.path);
        LandmarkMesh mesh = src.mesh;
        if (mesh.width == 0 || mesh.height == 0) {
            mesh.width = img.width();
            mesh.height = img.height();
        }
        require(mesh.width == img.width() && mesh.height == img.height(),
                "generate_dataset: landmark dims disagree with image " + src.path.string());
        mesh.validate();

        const std::string original_rel = "original/" + src.path.filename().string();
        fs::copy_file(src.path, out_dir / original_rel, fs::copy_options::overwrite_existing);

        ManifestEntry real;
        real.id = src.stem;
        real.original_path = original_rel;
        real.seed = opts.synth.seed;
        real.split = split_for_id(src.stem, opts.train_frac, opts.val_frac);
        real.is_fake = false;
        real_entries[si] = std::move(real);

        for (int rep = 0; rep < reps; ++rep) {
            const std::uint64_t seed = derive_seed(opts.synth.seed, src.stem, rep);
            const SynthExample ex = synthesize_example(img, mesh, seed, opts.synth);
            const ConsistencyMask mask = consistency_mask(ex.flow, ex.inverse_flow);

            ManifestEntry e;
            e.id = src.stem + "_r" + std::to_string(rep);
            e.original_path = original_rel;
            e.warped_path = "warped/" + e.id + ".png";
            e.flow_path = "flow/" + e.id + ".flo";
            e.mask_path = "mask/" + e.id + ".msk";
            e.params = ex.params;
            e.seed = seed;
            e.split = real_entries[si].split;
            e.is_fake = true;

            io::write_png(out_dir / e.warped_path, ex.warped);
            io::write_flo(out_dir / e.flow_path, ex.flow);
            io::write_msk(out_dir / e.mask_path, mask);
            fake_entries[si * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep)] =
                std::move(e);
        }
    });

    DatasetManifest manifest;
    manifest.entries.reserve(real_entries.size() + fake_entries.size());
    for (auto& e : real_entries) manifest.entries.push_back(std::move(e));
    for (auto& e : fake_entries) manifest.entries.push_back(std::move(e));
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
    manifest.validate();
    write_manifest(out_dir / "manifest.jsonl", manifest);
    log_info("generate_dataset: ", real_entries.size(), " originals, ", fake_entries.size(),
             " fakes -> ", out_dir.string());
    return manifest;
}

std::map<std::string, double> balanced_iteration_weights(const DatasetManifest& manifest) {
    std::size_t reals = 0, fakes = 0;
    for (const auto& e : manifest.entries) (e.is_fake ? fakes : reals) += 1;
    require(reals > 0 && fakes > 0, "balanced_iteration_weights: need both labels present");
    const double real_weight = static_cast<double>(fakes) / static_cast<double>(reals);
    std::map<std::string, double> weights;
    for (const auto& e : manifest.entries) weights[e.id] = e.is_fake ? 1.0 : real_weight;
    return weights;
}

EvalBundle load_eval_bundle(const DatasetManifest& manifest,
                            const std::optional<fs::path>& scores_csv,
                            const std::optional<fs::path>& flows_dir) {
    std::set<std::string> known;
    for (const auto& e : manifest.entries) known.insert(e.id);

    EvalBundle bundle;
    if (scores_csv) {
        for (const auto& s : read_scores_csv(*scores_csv)) {
            require(known.count(s.id) == 1,
                    "load_eval_bundle: score id '" + s.id + "' not in manifest");
            bundle.scores[s.id] = s.score;
        }
    }
    if (flows_dir) {
        require(fs::is_directory(*flows_dir),
                "load_eval_bundle: flow dir not found: " + flows_dir->string());
        for (const auto& e : manifest.entries) {
            const fs::path candidate = *flows_dir / (e.id + ".flo");
            if (fs::exists(candidate)) bundle.flow_paths[e.id] = candidate;
        }
    }
    return bundle;
}

EvalBundle make_oracle_bundle(const DatasetManifest& manifest, const fs::path& root) {
    EvalBundle bundle;
    for (const auto& e : manifest.entries) {
        bundle.scores[e.id] = e.is_fake ? 1.0 : 0.0;
        if (e.is_fake) bundle.flow_paths[e.id] = root / e.flow_path;
    }
    return bundle;
}

EvalReport evaluate(const DatasetManifest& manifest, const EvalBundle& bundle,
                    const MetricConfig& cfg, const fs::path& root, int workers) {
    cfg.validate();
    EvalReport report;

    // Classification: every manifest entry with a score.
    std::vector<ScoredSample> samples;
    std::map<std::string, double> real_score_by_original;
    for (const auto& e : manifest.entries) {
        const auto it = bundle.scores.find(e.id);
        if (it == bundle.scores.end()) continue;
        samples.push_back({e.id, it->second, e.is_fake});
        if (!e.is_fake) real_score_by_original[e.original_path] = it->second;
    }

    if (samples.empty()) {
        report.warnings.push_back("no scores supplied; classification section omitted");
    } else {
        std::size_t fakes = 0;
        for (const auto& s : samples) fakes += s.is_fake;
        if (fakes == 0 || fakes == samples.size()) {
            report.warnings.push_back("scores cover a single class; classification section omitted");
        } else {
            ClassificationReport cls;
            cls.samples = samples.size();
            cls.threshold = cfg.accuracy_threshold;
            cls.acc = accuracy(samples, cfg);
            cls.ap = 100.0 * average_precision(samples);

            // Best threshold: scan candidate cuts (each distinct score plus
            // one above the max); the lowest cut that maximizes total
            // accuracy wins.
            std::vector<double> cuts;
            cuts.reserve(samples.size() + 1);
            for (const auto& s : samples) cuts.push_back(s.score);
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
            cuts.push_back(cuts.back() + 1.0);
            MetricConfig scan_cfg = cfg;
            cls.best_threshold = cuts.front();
            double best_total = -1.0;
            for (double cut : cuts) {
                scan_cfg.accuracy_threshold = cut;
                const AccuracyReport r = accuracy(samples, scan_cfg);
                if (r.total > best_total) {
                    best_total = r.total;
                    cls.best_threshold = cut;
                    cls.acc_best = r;
                }
            }

            std::vector<std::pair<double, double>> pairs;
            for (const auto& e : manifest.entries) {
                if (!e.is_fake) continue;
                const auto fake_it = bundle.scores.find(e.id);
                if (fake_it == bundle.scores.end()) continue;
                const auto real_it = real_score_by_original.find(e.original_path);
                if (real_it == real_score_by_original.end()) continue;
                pairs.emplace_back(real_it->second, fake_it->second);
            }
            cls.pairs = pairs.size();
            if (pairs.empty()) {
                report.warnings.push_back("no (real, fake) pairs scored; 2AFC unavailable");
            } else {
                cls.two_afc = 100.0 * two_afc(pairs);
            }
            report.classification = cls;
        }
    }

    // Localization: fake entries with predicted flows.
    std::vector<const ManifestEntry*> flow_entries;
    for (const auto& e : manifest.entries) {
        if (e.is_fake && bundle.flow_paths.count(e.id)) flow_entries.push_back(&e);
    }
    if (flow_entries.empty()) {
        report.warnings.push_back("no predicted flows supplied; localization section omitted");
    } else {
        struct Row {
            double epe, epe_masked, iou, delta;
        };
        std::vector<Row> rows(flow_entries.size());
        parallel_for(flow_entries.size(), resolve_workers(workers), [&](std::size_t i) {
            const ManifestEntry& e = *flow_entries[i];
            const FlowField gt = io::read_flo(root / e.flow_path);
            const FlowField pred = io::read_flo(bundle.flow_paths.at(e.id));
            require(pred.same_dims(gt), "evaluate: predicted flow dims mismatch for '" + e.id + "'");
            const ConsistencyMask mask = io::read_msk(root / e.mask_path);
            const Image original = io::read_image(root / e.original_path);
            const Image modified = io::read_image(root / e.warped_path);
            const Image unwarped = warp_image(modified, pred);
            rows[i] = {epe_metric(pred, gt), masked_epe_metric(pred, gt, mask),
                       iou_at_threshold(pred, gt, cfg.iou_threshold),
                       delta_psnr(original, modified, unwarped, cfg)};
        });
        LocalizationReport loc;
        loc.flows = rows.size();
        loc.iou_tau = cfg.iou_threshold;
        for (const auto& r : rows) {
            loc.epe += r.epe;
            loc.epe_masked += r.epe_masked;
            loc.iou += r.iou;
            loc.delta_psnr += r.delta;
        }
        const double n = static_cast<double>(rows.size());
        loc.epe /= n;
        loc.epe_masked /= n;
        loc.iou /= n;
        loc.delta_psnr /= n;
        report.localization = loc;
    }
    return report;
}

std::string report_to_json_string(const EvalReport& report, int indent) {
    nlohmann::ordered_json j;
    if (report.classification) {
        const auto& c = *report.classification;
        nlohmann::ordered_json jc;
        jc["samples"] = c.samples;
        jc["accuracy"] = {{"threshold", c.threshold},
                          {"total", c.acc.total},
                          {"orig", c.acc.orig},
                          {"mod", c.acc.mod}};
        jc["accuracy_best"] = {{"threshold", c.best_threshold},
                               {"total", c.acc_best.total},
                               {"orig", c.acc_best.orig},
                               {"mod", c.acc_best.mod}};
        jc["ap"] = c.ap;
        jc["two_afc"] = c.two_afc;
        jc["pairs"] = c.pairs;
        j["classification"] = jc;
    }
    if (report.localization) {
        const auto& l = *report.localization;
        nlohmann::ordered_json jl;
        jl["flows"] = l.flows;
        jl["epe"] = l.epe;
        jl["epe_masked"] = l.epe_masked;
        jl["iou"] = l.iou;
        jl["iou_tau"] = l.iou_tau;
        jl["delta_psnr"] = l.delta_psnr;
        j["localization"] = jl;
    }
    j["warnings"] = report.warnings;
    return j.dump(indent);
}

Image render_overlay(const Image& img, const FlowField& flow, float max_displacement,
                     const fs::path& out_path) {
    require(img.height() == flow.height() && img.width() == flow.width(),
            "render_overlay: image and flow dimensions must match");
    require(max_displacement > 0, "render_overlay: max_displacement must be > 0");

    // Desaturate; keep three channels so the heat ramp reads in color.
    Plane<float> gray;
    if (img.channels() == 3) {
        gray = 0.299f * img.planes[0] + 0.587f * img.planes[1] + 0.114f * img.planes[2];
    } else {
        gray = img.planes[0];
    }

    // Fixed four-stop heat ramp from deep blue through magenta and orange to
    // yellow; alpha equals the normalized magnitude, so zero flow shows the
    // plain desaturated image.
    constexpr float stops[4] = {0.0f, 0.35f, 0.65f, 1.0f};
    constexpr float ramp[4][3] = {{0.050f, 0.030f, 0.530f},
                                  {0.520f, 0.060f, 0.520f},
                                  {0.930f, 0.390f, 0.180f},
                                  {0.980f, 0.910f, 0.150f}};

    Image out(img.height(), img.width(), 3);
    for (Index i = 0; i < img.height(); ++i) {
        for (Index j = 0; j < img.width(); ++j) {
            const float mag = std::hypot(flow.dx(i, j), flow.dy(i, j));
            const float t = std::clamp(mag / max_displacement, 0.0f, 1.0f);
            int seg = 0;
            while (seg < 2 && t > stops[seg + 1]) ++seg;
            const float span = stops[seg + 1] - stops[seg];
            const float u = std::clamp((t - stops[seg]) / span, 0.0f, 1.0f);
            const float g = gray(i, j);
            for (int c = 0; c < 3; ++c) {
                const float heat = ramp[seg][c] + u * (ramp[seg + 1][c] - ramp[seg][c]);
                out.planes[static_cast<size_t>(c)](i, j) = (1.0f - t) * g + t * heat;
            }
        }
    }
    if (!out_path.empty()) io::write_png(out_path, out);
    return out;
}

Image render_undo(const Image& modified, const FlowField& flow, const fs::path& out_path) {
    Image out = warp_image(modified, flow);
    if (!out_path.empty()) io::write_png(out_path, out);
    return out;
}

}  // namespace warpforge
