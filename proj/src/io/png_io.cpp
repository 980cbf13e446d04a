#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "warpforge/io/image_io.hpp"

namespace warpforge::io {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error("png: " + path.string() + ": " + what);
}

struct FileHandle {
    std::FILE* fp = nullptr;
    explicit FileHandle(const std::filesystem::path& path, const char* mode)
        : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
};

inline std::uint8_t to_u8(float v) {
    const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

Image read_png(const std::filesystem::path& path) {
    FileHandle file(path, "rb");
    if (!file.fp) fail(path, "cannot open for reading");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        fail(path, "png_create_info_struct failed");
    }

    // Buffers live above the setjmp point so a longjmp back here leaves
    // only libpng state to clean up.
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 w = 0, h = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "decode error");
    }

    png_init_io(png, file.fp);
    png_read_info(png, info);

    int bit_depth = 0, color_type = 0;
    png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (bit_depth == 16) png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "unsupported channel layout after normalization");
    }

    const std::size_t stride = static_cast<std::size_t>(w) * static_cast<std::size_t>(channels);
    pixels.resize(stride * h);
    rows.resize(h);
    for (png_uint_32 i = 0; i < h; ++i) rows[i] = pixels.data() + stride * i;

    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Image img(static_cast<Index>(h), static_cast<Index>(w), channels);
    for (Index i = 0; i < img.height(); ++i) {
        const std::uint8_t* row = pixels.data() + stride * static_cast<std::size_t>(i);
        for (Index j = 0; j < img.width(); ++j) {
            for (int c = 0; c < channels; ++c) {
                img.planes[static_cast<size_t>(c)](i, j) =
                    static_cast<float>(row[static_cast<std::size_t>(j) * channels + c]) / 255.0f;
            }
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    FileHandle file(path, "wb");
    if (!file.fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) fail(path, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        fail(path, "png_create_info_struct failed");
    }

    const int channels = img.channels();
    const std::size_t stride = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(channels);
    std::vector<std::uint8_t> pixels(stride * static_cast<std::size_t>(img.height()));
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    for (Index i = 0; i < img.height(); ++i) {
        std::uint8_t* row = pixels.data() + stride * static_cast<std::size_t>(i);
        rows[static_cast<std::size_t>(i)] = row;
        for (Index j = 0; j < img.width(); ++j) {
            for (int c = 0; c < channels; ++c) {
                row[static_cast<std::size_t>(j) * channels + c] =
                    to_u8(img.planes[static_cast<size_t>(c)](i, j));
            }
        }
    }

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "encode error");
    }

    png_init_io(png, file.fp);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image read_image(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".png") return read_png(path);
    if (ext == ".jpg" || ext == ".jpeg") return read_jpeg(path);
    throw std::runtime_error("read_image: unsupported extension: " + path.string());
}

void write_image(const std::filesystem::path& path, const Image& img, int jpeg_quality) {
    std::string ext = path.extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".png") return write_png(path, img);
    if (ext == ".jpg" || ext == ".jpeg") return write_jpeg(path, img, jpeg_quality);
    throw std::runtime_error("write_image: unsupported extension: " + path.string());
}

}  // namespace warpforge::io
