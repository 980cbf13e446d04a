#ifndef WARPFORGE_MANIFEST_HPP
#define WARPFORGE_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "warpforge/augment.hpp"
#include "warpforge/metrics.hpp"
#include "warpforge/synth.hpp"

namespace warpforge {

enum class Split { train, val, test };

std::string_view split_name(Split s);
std::optional<Split> split_from_name(std::string_view name);

/// One dataset artifact: either an untouched original (is_fake false, warp
/// fields empty) or a generated fake with its flow and mask. Fakes reference
/// their source through original_path, which pairs them with the matching
/// real entry.
struct ManifestEntry {
    std::string id;
    std::string original_path;
    std::string warped_path;
    std::string flow_path;
    std::string mask_path;
    std::optional<FalParams> params;
    std::uint64_t seed = 0;
    Split split = Split::train;
    bool is_fake = false;
    std::optional<AugmentSpec> augment;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    /// Throws unless ids are unique and every fake's original is present.
    void validate() const;
};

/// JSONL, one entry per line, stable key order; round trips exactly.
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Landmark file: JSON array of
///   {"image": name, "points": [[x,y],...],
///    "groups": {"left_eye": [idx,...], ...}, "width": px, "height": px}
/// keyed here by the basename of "image". Width/height are optional; when
/// absent the caller fills them from the image before validating.
std::map<std::string, LandmarkMesh> read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path,
                     const std::map<std::string, LandmarkMesh>& meshes);

/// Scores CSV: "id,score,label" with label in {real,fake}; a leading header
/// line is skipped.
std::vector<ScoredSample> read_scores_csv(const std::filesystem::path& path);
void write_scores_csv(const std::filesystem::path& path, const std::vector<ScoredSample>& scores);

/// Standalone augmentation recipe file (same JSON shape as the manifest's
/// augment field).
AugmentSpec read_augment_spec(const std::filesystem::path& path);
void write_augment_spec(const std::filesystem::path& path, const AugmentSpec& spec);

}  // namespace warpforge

#endif
