#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "warpforge/augment.hpp"
#include "warpforge/facegen.hpp"
#include "warpforge/flow_ops.hpp"
#include "warpforge/io/flo.hpp"
#include "warpforge/io/image_io.hpp"
#include "warpforge/io/msk.hpp"
#include "warpforge/log.hpp"
#include "warpforge/losses.hpp"
#include "warpforge/manifest.hpp"
#include "warpforge/metrics.hpp"
#include "warpforge/parallel.hpp"
#include "warpforge/pipeline.hpp"
#include "warpforge/rng.hpp"
#include "warpforge/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace warpforge;

namespace {

/// Optional overrides loaded from --config; explicit flags win over these.
struct FileConfig {
    ordered_json doc = ordered_json::object();

    template <class T>
    void apply(const CLI::Option* opt, const char* key, T& slot) const {
        if (opt != nullptr && opt->count() > 0) return;
        if (const auto it = doc.find(key); it != doc.end() && !it->is_null()) {
            slot = it->get<T>();
        }
    }
};

FileConfig load_file_config(const std::string& path) {
    FileConfig fc;
    if (path.empty()) return fc;
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    try {
        fc.doc = ordered_json::parse(in);
    } catch (const std::exception& ex) {
        throw CLI::ValidationError("--config", path + ": " + ex.what());
    }
    if (!fc.doc.is_object()) throw CLI::ValidationError("--config", "top-level object expected");
    return fc;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::vector<double> values;
    std::string token;
    std::istringstream ss(text);
    while (std::getline(ss, token, ',')) {
        if (!token.empty()) values.push_back(std::stod(token));
    }
    return values;
}

void emit(const ordered_json& j, const std::string& out_path) {
    const std::string text = j.dump(2);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text << "\n";
    }
    std::cout << text << "\n";
}

int run_synth(const std::string& images, const std::string& landmarks, const std::string& out,
              const GenerateOptions& opts, bool bench, int bench_count, Index bench_size) {
    if (bench) {
        const int workers = opts.workers <= 0 ? default_workers() : opts.workers;
        const FaceExample face = make_face(bench_size, derive_seed(opts.synth.seed, "bench-face", 0));
        // Warm-up draw keeps one-time costs out of the measurement.
        (void)synthesize_example(face.image, face.mesh, derive_seed(opts.synth.seed, "bench", 0),
                                 opts.synth);
        const auto t0 = std::chrono::steady_clock::now();
        parallel_for(static_cast<std::size_t>(bench_count), workers, [&](std::size_t k) {
            const SynthExample ex = synthesize_example(
                face.image, face.mesh, derive_seed(opts.synth.seed, "bench", k), opts.synth);
            const ConsistencyMask mask = consistency_mask(ex.flow, ex.inverse_flow);
            (void)mask;
        });
        const auto t1 = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(t1 - t0).count();
        ordered_json j;
        j["triples"] = bench_count;
        j["size"] = bench_size;
        j["seconds"] = seconds;
        j["triples_per_second"] = static_cast<double>(bench_count) / seconds;
        j["workers"] = workers;
        emit(j, "");
        return 0;
    }

    require(!images.empty(), "synth: --images is required");
    require(!out.empty(), "synth: --out is required");
    const fs::path image_dir = images;
    const fs::path landmark_file = landmarks.empty() ? image_dir / "landmarks.json"
                                                     : fs::path(landmarks);
    const DatasetManifest manifest = generate_dataset(image_dir, landmark_file, out, opts);

    std::size_t reals = 0, fakes = 0;
    for (const auto& e : manifest.entries) (e.is_fake ? fakes : reals) += 1;
    ordered_json j;
    j["manifest"] = (fs::path(out) / "manifest.jsonl").string();
    j["originals"] = reals;
    j["fakes"] = fakes;
    j["seed"] = opts.synth.seed;
    emit(j, "");
    return 0;
}

int run_eval(const std::string& manifest_path, const std::string& scores,
             const std::string& flows, bool oracle, const MetricConfig& cfg, int workers,
             const std::string& out_path) {
    const fs::path mpath = manifest_path;
    const DatasetManifest manifest = read_manifest(mpath);
    const fs::path root = mpath.parent_path();

    EvalBundle bundle;
    if (oracle) {
        require(scores.empty() && flows.empty(), "eval: --oracle excludes --scores/--flows");
        bundle = make_oracle_bundle(manifest, root);
    } else {
        bundle = load_eval_bundle(
            manifest, scores.empty() ? std::nullopt : std::optional<fs::path>(scores),
            flows.empty() ? std::nullopt : std::optional<fs::path>(flows));
    }
    const EvalReport report = evaluate(manifest, bundle, cfg, root, workers);
    const std::string text = report_to_json_string(report);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + out_path);
        f << text << "\n";
    }
    std::cout << text << "\n";
    return 0;
}

int run_augment(const std::string& spec_path, const std::string& in_dir,
                const std::string& out_dir, int workers) {
    const AugmentSpec base = read_augment_spec(spec_path);
    fs::create_directories(out_dir);
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string ext = entry.path().extension().string();
        for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") inputs.push_back(entry.path());
    }
    std::sort(inputs.begin(), inputs.end());
    require(!inputs.empty(), "augment: no images in " + in_dir);

    parallel_for(inputs.size(), workers <= 0 ? default_workers() : workers, [&](std::size_t i) {
        AugmentSpec spec = base;
        // Per-image crop offsets, still reproducible from the spec seed.
        spec.seed = derive_seed(base.seed, inputs[i].filename().string(), 0);
        const Image img = io::read_image(inputs[i]);
        const Image result = apply_augment(img, spec);
        io::write_png(fs::path(out_dir) / (inputs[i].stem().string() + ".png"), result);
    });
    ordered_json j;
    j["images"] = inputs.size();
    j["out"] = out_dir;
    emit(j, "");
    return 0;
}

int run_corrupt(const std::string& image_path, const std::string& out_dir,
                const std::vector<double>& qualities, const std::vector<double>& sigmas) {
    const Image img = io::read_image(image_path);
    fs::create_directories(out_dir);
    const std::string stem = fs::path(image_path).stem().string();

    ordered_json rows = ordered_json::array();
    for (double q : qualities) {
        const int quality = static_cast<int>(q);
        const Image corrupted = jpeg_cycle(img, quality);
        const fs::path out = fs::path(out_dir) / (stem + "_q" + std::to_string(quality) + ".png");
        io::write_png(out, corrupted);
        ordered_json row;
        row["kind"] = "jpeg";
        row["quality"] = quality;
        row["psnr"] = psnr(img, corrupted);
        row["path"] = out.string();
        rows.push_back(row);
    }
    for (double sigma : sigmas) {
        const Image corrupted = blur_image(img, sigma);
        std::ostringstream name;
        name << stem << "_blur" << sigma << ".png";
        const fs::path out = fs::path(out_dir) / name.str();
        io::write_png(out, corrupted);
        ordered_json row;
        row["kind"] = "blur";
        row["sigma"] = sigma;
        row["psnr"] = psnr(img, corrupted);
        row["path"] = out.string();
        rows.push_back(row);
    }
    ordered_json j;
    j["image"] = image_path;
    j["corruptions"] = rows;
    emit(j, "");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"warpforge: parametric face-warp synthesis, undo and evaluation toolkit"};
    app.require_subcommand(1);

    std::string config_path;

    // synth ------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate a warped-face dataset with ground truth");
    std::string synth_images, synth_landmarks, synth_out;
    GenerateOptions gen;
    bool bench = false;
    int bench_count = 200;
    Index bench_size = 256;
    synth->add_option("--images", synth_images, "Directory of source images");
    synth->add_option("--landmarks", synth_landmarks,
                      "Landmark JSON (default: <images>/landmarks.json)");
    synth->add_option("--out", synth_out, "Output dataset directory");
    auto* o_seed = synth->add_option("--seed", gen.synth.seed, "Dataset seed");
    auto* o_reps = synth->add_option("--reps", gen.reps, "Fakes per original")->check(CLI::PositiveNumber);
    auto* o_maxd = synth->add_option("--max-disp", gen.synth.max_displacement,
                                     "Max flow magnitude, px");
    auto* o_workers = synth->add_option("--workers", gen.workers, "Worker threads (0 = all cores)");
    synth->add_option("--config", config_path, "JSON config overriding defaults");
    synth->add_flag("--bench", bench, "Measure in-memory synthesis throughput instead");
    synth->add_option("--bench-count", bench_count, "Triples to synthesize in bench mode");
    synth->add_option("--bench-size", bench_size, "Image size in bench mode");

    // demo -------------------------------------------------------------
    auto* demo = app.add_subcommand("demo", "Render a procedural portrait corpus with landmarks");
    std::string demo_out = "demo_corpus";
    int demo_count = 8;
    Index demo_size = 256;
    std::uint64_t demo_seed = 0;
    demo->add_option("--out", demo_out, "Output directory");
    demo->add_option("--count", demo_count, "Number of portraits")->check(CLI::PositiveNumber);
    demo->add_option("--size", demo_size, "Image side, px");
    demo->add_option("--seed", demo_seed, "Corpus seed");

    // mask ---------------------------------------------------------------
    auto* mask_cmd = app.add_subcommand("mask", "Consistency mask from a forward/backward flow pair");
    std::string mask_fwd, mask_bwd, mask_out;
    ConsistencyConfig mask_cfg;
    mask_cmd->add_option("--forward", mask_fwd, "Original-to-modified .flo")->required();
    mask_cmd->add_option("--backward", mask_bwd,
                         "Modified-to-original .flo (default: numeric inverse of forward)");
    mask_cmd->add_option("--out", mask_out, "Output .msk path")->required();
    mask_cmd->add_option("--epsilon", mask_cfg.epsilon, "Relative-error stabilizer");
    mask_cmd->add_option("--tau", mask_cfg.tau, "Inconsistency threshold");
    mask_cmd->add_option("--blur-sigma", mask_cfg.blur_sigma, "Mask feathering sigma");

    // unwarp -------------------------------------------------------------
    auto* unwarp = app.add_subcommand("unwarp", "Undo a warp: resample image through a flow");
    std::string unwarp_image, unwarp_flow, unwarp_out;
    unwarp->add_option("--image", unwarp_image, "Input image")->required();
    unwarp->add_option("--flow", unwarp_flow, "Flow .flo (original-to-modified)")->required();
    unwarp->add_option("--out", unwarp_out, "Output PNG")->required();

    // overlay ------------------------------------------------------------
    auto* overlay = app.add_subcommand("overlay", "Heatmap of flow magnitude over the image");
    std::string overlay_image, overlay_flow, overlay_out;
    float overlay_maxd = 5.0f;
    overlay->add_option("--image", overlay_image, "Input image")->required();
    overlay->add_option("--flow", overlay_flow, "Flow .flo")->required();
    overlay->add_option("--out", overlay_out, "Output PNG")->required();
    overlay->add_option("--max-disp", overlay_maxd, "Magnitude mapped to full heat");

    // loss ---------------------------------------------------------------
    auto* loss_cmd = app.add_subcommand("loss", "Evaluate the training losses on files");
    std::string loss_pred, loss_gt, loss_mask, loss_mod, loss_orig;
    loss_cmd->add_option("--pred", loss_pred, "Predicted flow .flo")->required();
    loss_cmd->add_option("--gt", loss_gt, "Ground-truth flow .flo")->required();
    loss_cmd->add_option("--mask", loss_mask, "Consistency mask .msk")->required();
    loss_cmd->add_option("--modified", loss_mod, "Modified image")->required();
    loss_cmd->add_option("--original", loss_orig, "Original image")->required();
    loss_cmd->add_option("--config", config_path, "JSON config (lambdas, strides)");

    // eval ---------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Score predictions against a dataset manifest");
    std::string eval_manifest, eval_scores, eval_flows, eval_out;
    bool eval_oracle = false;
    MetricConfig metric_cfg;
    int eval_workers = 0;
    eval_cmd->add_option("--manifest", eval_manifest, "manifest.jsonl path")->required();
    eval_cmd->add_option("--scores", eval_scores, "CSV of id,score,label");
    eval_cmd->add_option("--flows", eval_flows, "Directory of predicted <id>.flo");
    eval_cmd->add_flag("--oracle", eval_oracle, "Score ground truth against itself");
    auto* o_iou = eval_cmd->add_option("--iou-tau", metric_cfg.iou_threshold,
                                       "Magnitude threshold for IOU");
    auto* o_acc = eval_cmd->add_option("--acc-threshold", metric_cfg.accuracy_threshold,
                                       "Score threshold for accuracy");
    auto* o_eworkers = eval_cmd->add_option("--workers", eval_workers, "Worker threads");
    eval_cmd->add_option("--out", eval_out, "Also write the JSON report here");
    eval_cmd->add_option("--config", config_path, "JSON config overriding defaults");

    // augment --------------------------------------------------------------
    auto* augment_cmd = app.add_subcommand("augment", "Apply an augmentation spec to a directory");
    std::string aug_spec, aug_in, aug_out;
    int aug_workers = 0;
    augment_cmd->add_option("--spec", aug_spec, "AugmentSpec JSON file")->required();
    augment_cmd->add_option("--in", aug_in, "Input image directory")->required();
    augment_cmd->add_option("--out", aug_out, "Output directory")->required();
    augment_cmd->add_option("--workers", aug_workers, "Worker threads");

    // corrupt --------------------------------------------------------------
    auto* corrupt_cmd = app.add_subcommand("corrupt", "JPEG/blur robustness ladder for one image");
    std::string cor_image, cor_out = "corrupt_out";
    std::string cor_qualities = "90,70,50,30,10";
    std::string cor_sigmas = "0.5,1,2,4";
    corrupt_cmd->add_option("--image", cor_image, "Input image")->required();
    corrupt_cmd->add_option("--out", cor_out, "Output directory");
    corrupt_cmd->add_option("--qualities", cor_qualities, "Comma-separated JPEG qualities");
    corrupt_cmd->add_option("--sigmas", cor_sigmas, "Comma-separated blur sigmas");

    CLI11_PARSE(app, argc, argv);

    try {
        const FileConfig fc = load_file_config(config_path);

        if (*synth) {
            fc.apply(o_seed, "seed", gen.synth.seed);
            fc.apply(o_reps, "reps", gen.reps);
            fc.apply(o_maxd, "max_displacement", gen.synth.max_displacement);
            fc.apply(o_workers, "workers", gen.workers);
            fc.apply(nullptr, "active_min", gen.synth.active_min);
            fc.apply(nullptr, "active_max", gen.synth.active_max);
            fc.apply(nullptr, "rbf_sigma_scale", gen.synth.rbf_sigma_scale);
            fc.apply(nullptr, "train_frac", gen.train_frac);
            fc.apply(nullptr, "val_frac", gen.val_frac);
            return run_synth(synth_images, synth_landmarks, synth_out, gen, bench, bench_count,
                             bench_size);
        }
        if (*demo) {
            const auto landmarks = write_demo_corpus(demo_out, demo_count, demo_size, demo_seed);
            ordered_json j;
            j["out"] = demo_out;
            j["count"] = demo_count;
            j["landmarks"] = landmarks.string();
            emit(j, "");
            return 0;
        }
        if (*mask_cmd) {
            const FlowField forward = io::read_flo(mask_fwd);
            FlowField backward;
            if (mask_bwd.empty()) {
                backward = invert_flow(forward, 30, 1e-3f).flow;
            } else {
                backward = io::read_flo(mask_bwd);
            }
            const ConsistencyMask mask = consistency_mask(forward, backward, mask_cfg);
            io::write_msk(mask_out, mask);
            ordered_json j;
            j["out"] = mask_out;
            j["mean"] = mask.values.cast<double>().mean();
            emit(j, "");
            return 0;
        }
        if (*unwarp) {
            const Image img = io::read_image(unwarp_image);
            const FlowField flow = io::read_flo(unwarp_flow);
            render_undo(img, flow, unwarp_out);
            ordered_json j;
            j["out"] = unwarp_out;
            emit(j, "");
            return 0;
        }
        if (*overlay) {
            const Image img = io::read_image(overlay_image);
            const FlowField flow = io::read_flo(overlay_flow);
            render_overlay(img, flow, overlay_maxd, overlay_out);
            ordered_json j;
            j["out"] = overlay_out;
            emit(j, "");
            return 0;
        }
        if (*loss_cmd) {
            LossConfig cfg;
            fc.apply(nullptr, "lambda_epe", cfg.lambda_epe);
            fc.apply(nullptr, "lambda_ms", cfg.lambda_ms);
            fc.apply(nullptr, "lambda_rec", cfg.lambda_rec);
            fc.apply(nullptr, "strides", cfg.strides);
            const FlowField pred = io::read_flo(loss_pred);
            const FlowField gt = io::read_flo(loss_gt);
            ConsistencyMask mask = io::read_msk(loss_mask);
            const Image modified = io::read_image(loss_mod);
            const Image original = io::read_image(loss_orig);
            const auto e = epe_loss(pred, gt, mask);
            const auto m = multiscale_loss(pred, gt, mask, cfg);
            const auto r = reconstruction_loss(modified, pred, original);
            ordered_json j;
            j["epe"] = e.value;
            j["multiscale"] = m.value;
            j["reconstruction"] = r.value;
            j["lambda_epe"] = cfg.lambda_epe;
            j["lambda_ms"] = cfg.lambda_ms;
            j["lambda_rec"] = cfg.lambda_rec;
            j["total"] = weighted_total(cfg, e.value, m.value, r.value);
            emit(j, "");
            return 0;
        }
        if (*eval_cmd) {
            fc.apply(o_iou, "iou_tau", metric_cfg.iou_threshold);
            fc.apply(o_acc, "acc_threshold", metric_cfg.accuracy_threshold);
            fc.apply(nullptr, "psnr_cap", metric_cfg.psnr_cap);
            fc.apply(nullptr, "psnr_peak", metric_cfg.psnr_peak);
            fc.apply(o_eworkers, "workers", eval_workers);
            return run_eval(eval_manifest, eval_scores, eval_flows, eval_oracle, metric_cfg,
                            eval_workers, eval_out);
        }
        if (*augment_cmd) return run_augment(aug_spec, aug_in, aug_out, aug_workers);
        if (*corrupt_cmd) {
            return run_corrupt(cor_image, cor_out, parse_number_list(cor_qualities),
                               parse_number_list(cor_sigmas));
        }
    } catch (const std::exception& ex) {
        log_error(ex.what());
        return 1;
    }
    return 0;
}
