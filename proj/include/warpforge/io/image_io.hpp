#ifndef WARPFORGE_IO_IMAGE_IO_HPP
#define WARPFORGE_IO_IMAGE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "warpforge/types.hpp"

namespace warpforge::io {

/// PNG codec. Values map linearly between [0,1] floats and 8-bit samples
/// (writing rounds to nearest); 16-bit, palette and alpha inputs are
/// normalized to 8-bit gray or RGB on read.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

/// JPEG codec (quality 1..100, default encoder chroma subsampling 4:2:0).
Image read_jpeg(const std::filesystem::path& path);
void write_jpeg(const std::filesystem::path& path, const Image& img, int quality = 95);

/// In-memory JPEG cycle used by the augmentation pipeline.
std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality);
Image decode_jpeg(const std::uint8_t* data, std::size_t size);

/// Dispatches on extension: .png, .jpg, .jpeg (case-insensitive).
Image read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const Image& img, int jpeg_quality = 95);

}  // namespace warpforge::io

#endif
