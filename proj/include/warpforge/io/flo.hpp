#ifndef WARPFORGE_IO_FLO_HPP
#define WARPFORGE_IO_FLO_HPP

#include <filesystem>

#include "warpforge/types.hpp"

namespace warpforge::io {

/// Middlebury .flo: magic float 202021.25, int32 width, int32 height, then
/// width*height interleaved (dx, dy) float32 pairs in row-major order, all
/// little-endian. Round trips are bit-exact.
FlowField read_flo(const std::filesystem::path& path);
void write_flo(const std::filesystem::path& path, const FlowField& flow);

}  // namespace warpforge::io

#endif
