#ifndef WARPFORGE_IO_MSK_HPP
#define WARPFORGE_IO_MSK_HPP

#include <filesystem>

#include "warpforge/types.hpp"

namespace warpforge::io {

/// MSK1 mask container: 4-byte magic "MSK1", int32 width, int32 height, then
/// width*height float32 values in row-major order, little-endian.
ConsistencyMask read_msk(const std::filesystem::path& path);
void write_msk(const std::filesystem::path& path, const ConsistencyMask& mask);

}  // namespace warpforge::io

#endif
