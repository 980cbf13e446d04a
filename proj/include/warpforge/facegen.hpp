#ifndef WARPFORGE_FACEGEN_HPP
#define WARPFORGE_FACEGEN_HPP

#include <cstdint>
#include <filesystem>

#include "warpforge/synth.hpp"
#include "warpforge/types.hpp"

namespace warpforge {

/// A rendered portrait with the landmark mesh that describes it.
struct FaceExample {
    Image image;
    LandmarkMesh mesh;
};

/// Procedurally renders a frontal portrait (RGB, values in [0,1]) with
/// seed-jittered geometry, colors and band-limited texture, plus landmarks
/// for every semantic group. Deterministic per (size, seed).
FaceExample make_face(Index size, std::uint64_t seed);

/// Writes `count` portraits as PNGs plus a landmarks.json into `dir`
/// (created if needed). Returns the landmark file path.
std::filesystem::path write_demo_corpus(const std::filesystem::path& dir, int count, Index size,
                                        std::uint64_t seed);

}  // namespace warpforge

#endif
