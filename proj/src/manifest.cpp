#include "warpforge/manifest.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace warpforge {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json params_to_json(const FalParams& params) {
    ordered_json j;
    for (int i = 0; i < FalParams::kCount; ++i) {
        j[std::string(FalParams::names()[static_cast<size_t>(i)])] = params.value(i);
    }
    return j;
}

FalParams params_from_json(const ordered_json& j) {
    FalParams params;
    for (int i = 0; i < FalParams::kCount; ++i) {
        params.set_value(i, j.at(std::string(FalParams::names()[static_cast<size_t>(i)])).get<float>());
    }
    return params;
}

ordered_json augment_to_json(const AugmentSpec& spec) {
    ordered_json j;
    if (spec.jpeg_quality) j["jpeg_quality"] = *spec.jpeg_quality;
    if (spec.resize_factor) {
        j["resize_factor"] = *spec.resize_factor;
        j["resize_method"] = spec.resize_method == ResizeMethod::bicubic ? "bicubic" : "bilinear";
    }
    if (spec.brightness != 1.0) j["brightness"] = spec.brightness;
    if (spec.contrast != 1.0) j["contrast"] = spec.contrast;
    if (spec.saturation != 1.0) j["saturation"] = spec.saturation;
    if (spec.flip) j["flip"] = true;
    if (spec.crop_size) j["crop_size"] = *spec.crop_size;
    j["seed"] = spec.seed;
    return j;
}

AugmentSpec augment_from_json(const ordered_json& j) {
    AugmentSpec spec;
    if (j.contains("jpeg_quality")) spec.jpeg_quality = j.at("jpeg_quality").get<int>();
    if (j.contains("resize_factor")) spec.resize_factor = j.at("resize_factor").get<double>();
    if (j.contains("resize_method")) {
        const std::string m = j.at("resize_method").get<std::string>();
        if (m == "bicubic") {
            spec.resize_method = ResizeMethod::bicubic;
        } else if (m == "bilinear") {
            spec.resize_method = ResizeMethod::bilinear;
        } else {
            throw std::runtime_error("augment spec: unknown resize_method '" + m + "'");
        }
    }
    if (j.contains("brightness")) spec.brightness = j.at("brightness").get<double>();
    if (j.contains("contrast")) spec.contrast = j.at("contrast").get<double>();
    if (j.contains("saturation")) spec.saturation = j.at("saturation").get<double>();
    if (j.contains("flip")) spec.flip = j.at("flip").get<bool>();
    if (j.contains("crop_size")) spec.crop_size = j.at("crop_size").get<int>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    spec.validate();
    return spec;
}

ordered_json entry_to_json(const ManifestEntry& e) {
    ordered_json j;
    j["id"] = e.id;
    j["original_path"] = e.original_path;
    j["warped_path"] = e.warped_path.empty() ? ordered_json(nullptr) : ordered_json(e.warped_path);
    j["flow_path"] = e.flow_path.empty() ? ordered_json(nullptr) : ordered_json(e.flow_path);
    j["mask_path"] = e.mask_path.empty() ? ordered_json(nullptr) : ordered_json(e.mask_path);
    j["params"] = e.params ? params_to_json(*e.params) : ordered_json(nullptr);
    j["seed"] = e.seed;
    j["split"] = std::string(split_name(e.split));
    j["label"] = e.is_fake ? "fake" : "real";
    j["augment"] = e.augment ? augment_to_json(*e.augment) : ordered_json(nullptr);
    return j;
}

ManifestEntry entry_from_json(const ordered_json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    e.original_path = j.at("original_path").get<std::string>();
    if (!j.at("warped_path").is_null()) e.warped_path = j.at("warped_path").get<std::string>();
    if (!j.at("flow_path").is_null()) e.flow_path = j.at("flow_path").get<std::string>();
    if (!j.at("mask_path").is_null()) e.mask_path = j.at("mask_path").get<std::string>();
    if (!j.at("params").is_null()) e.params = params_from_json(j.at("params"));
    e.seed = j.at("seed").get<std::uint64_t>();
    const std::string split = j.at("split").get<std::string>();
    const auto s = split_from_name(split);
    if (!s) throw std::runtime_error("manifest: unknown split '" + split + "'");
    e.split = *s;
    const std::string label = j.at("label").get<std::string>();
    if (label != "real" && label != "fake")
        throw std::runtime_error("manifest: unknown label '" + label + "'");
    e.is_fake = label == "fake";
    if (j.contains("augment") && !j.at("augment").is_null())
        e.augment = augment_from_json(j.at("augment"));
    return e;
}

}  // namespace

std::string_view split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
    }
    return "?";
}

std::optional<Split> split_from_name(std::string_view name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    return std::nullopt;
}

void DatasetManifest::validate() const {
    std::set<std::string> ids;
    std::set<std::string> real_originals;
    for (const auto& e : entries) {
        require(!e.id.empty(), "manifest: empty id");
        require(ids.insert(e.id).second, "manifest: duplicate id '" + e.id + "'");
        if (!e.is_fake) real_originals.insert(e.original_path);
        if (e.is_fake) {
            require(!e.warped_path.empty() && !e.flow_path.empty() && !e.mask_path.empty(),
                    "manifest: fake entry '" + e.id + "' missing artifact paths");
            require(e.params.has_value(), "manifest: fake entry '" + e.id + "' missing params");
        }
    }
    for (const auto& e : entries) {
        if (e.is_fake) {
            require(real_originals.count(e.original_path) == 1,
                    "manifest: fake entry '" + e.id + "' has no matching real entry");
        }
    }
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("manifest: cannot open for writing: " + path.string());
    for (const auto& e : manifest.entries) out << entry_to_json(e).dump() << "\n";
    if (!out) throw std::runtime_error("manifest: write failed: " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("manifest: cannot open for reading: " + path.string());
    DatasetManifest manifest;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            manifest.entries.push_back(entry_from_json(ordered_json::parse(line)));
        } catch (const std::exception& ex) {
            throw std::runtime_error("manifest: " + path.string() + " line " +
                                     std::to_string(line_no) + ": " + ex.what());
        }
    }
    return manifest;
}

std::map<std::string, LandmarkMesh> read_landmarks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("landmarks: cannot open for reading: " + path.string());
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& ex) {
        throw std::runtime_error("landmarks: " + path.string() + ": " + ex.what());
    }
    require(doc.is_array(), "landmarks: top-level JSON array expected");

    std::map<std::string, LandmarkMesh> meshes;
    for (const auto& item : doc) {
        const std::string image = item.at("image").get<std::string>();
        LandmarkMesh mesh;
        for (const auto& pt : item.at("points")) {
            require(pt.is_array() && pt.size() == 2, "landmarks: points must be [x,y] pairs");
            mesh.points.push_back({pt[0].get<float>(), pt[1].get<float>()});
        }
        if (item.contains("groups")) {
            for (const auto& [name, indices] : item.at("groups").items()) {
                const auto g = group_from_name(name);
                if (!g) throw std::runtime_error("landmarks: unknown group '" + name + "'");
                for (const auto& idx : indices) mesh.group(*g).push_back(idx.get<int>());
            }
        }
        if (item.contains("width")) mesh.width = item.at("width").get<Index>();
        if (item.contains("height")) mesh.height = item.at("height").get<Index>();
        meshes[std::filesystem::path(image).filename().string()] = std::move(mesh);
    }
    return meshes;
}

void write_landmarks(const std::filesystem::path& path,
                     const std::map<std::string, LandmarkMesh>& meshes) {
    ordered_json doc = ordered_json::array();
    for (const auto& [image, mesh] : meshes) {
        ordered_json item;
        item["image"] = image;
        ordered_json pts = ordered_json::array();
        for (const auto& p : mesh.points) pts.push_back({p[0], p[1]});
        item["points"] = pts;
        ordered_json groups;
        for (int g = 0; g < kNumLandmarkGroups; ++g) {
            const auto& idx = mesh.group_indices[static_cast<size_t>(g)];
            if (!idx.empty()) groups[std::string(group_name(static_cast<LandmarkGroup>(g)))] = idx;
        }
        item["groups"] = groups;
        if (mesh.width > 0) item["width"] = mesh.width;
        if (mesh.height > 0) item["height"] = mesh.height;
        doc.push_back(item);
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("landmarks: cannot open for writing: " + path.string());
    out << doc.dump(2) << "\n";
    if (!out) throw std::runtime_error("landmarks: write failed: " + path.string());
}

std::vector<ScoredSample> read_scores_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("scores: cannot open for reading: " + path.string());
    std::vector<ScoredSample> scores;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("id,", 0) == 0) continue;
        std::istringstream ss(line);
        std::string id, score_text, label;
        if (!std::getline(ss, id, ',') || !std::getline(ss, score_text, ',') ||
            !std::getline(ss, label)) {
            throw std::runtime_error("scores: " + path.string() + " line " +
                                     std::to_string(line_no) + ": expected id,score,label");
        }
        ScoredSample s;
        s.id = id;
        try {
            s.score = std::stod(score_text);
        } catch (const std::exception&) {
            throw std::runtime_error("scores: " + path.string() + " line " +
                                     std::to_string(line_no) + ": bad score '" + score_text + "'");
        }
        if (label != "real" && label != "fake") {
            throw std::runtime_error("scores: " + path.string() + " line " +
                                     std::to_string(line_no) + ": bad label '" + label + "'");
        }
        s.is_fake = label == "fake";
        scores.push_back(std::move(s));
    }
    return scores;
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<ScoredSample>& scores) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("scores: cannot open for writing: " + path.string());
    out << "id,score,label\n";
    out.precision(17);
    for (const auto& s : scores) {
        out << s.id << "," << s.score << "," << (s.is_fake ? "fake" : "real") << "\n";
    }
    if (!out) throw std::runtime_error("scores: write failed: " + path.string());
}

AugmentSpec read_augment_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("augment spec: cannot open for reading: " + path.string());
    try {
        return augment_from_json(ordered_json::parse(in));
    } catch (const std::exception& ex) {
        throw std::runtime_error("augment spec: " + path.string() + ": " + ex.what());
    }
}

void write_augment_spec(const std::filesystem::path& path, const AugmentSpec& spec) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("augment spec: cannot open for writing: " + path.string());
    out << augment_to_json(spec).dump(2) << "\n";
    if (!out) throw std::runtime_error("augment spec: write failed: " + path.string());
}

}  // namespace warpforge
