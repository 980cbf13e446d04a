#include <cstdio>

#include <jpeglib.h>

#include <csetjmp>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "warpforge/io/image_io.hpp"

namespace warpforge::io {

namespace {

struct JpegError {
    jpeg_error_mgr pub;
    std::jmp_buf jump;
};

void on_jpeg_error(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegError*>(cinfo->err);
    std::longjmp(err->jump, 1);
}

inline std::uint8_t to_u8(float v) {
    const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

std::vector<std::uint8_t> pack_u8(const Image& img) {
    const int channels = img.channels();
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(img.height()) *
                                     static_cast<std::size_t>(img.width()) * channels);
    std::size_t k = 0;
    for (Index i = 0; i < img.height(); ++i) {
        for (Index j = 0; j < img.width(); ++j) {
            for (int c = 0; c < channels; ++c) {
                pixels[k++] = to_u8(img.planes[static_cast<size_t>(c)](i, j));
            }
        }
    }
    return pixels;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("jpeg: " + path.string() + ": cannot open for reading");
    const std::streamsize size = in.tellg();
    in.seekg(0);
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(bytes.data()), size);
    if (!in) throw std::runtime_error("jpeg: " + path.string() + ": read failed");
    return bytes;
}

}  // namespace

std::vector<std::uint8_t> encode_jpeg(const Image& img, int quality) {
    require(quality >= 1 && quality <= 100, "encode_jpeg: quality must be in [1,100]");

    const std::vector<std::uint8_t> pixels = pack_u8(img);
    const int channels = img.channels();
    const JDIMENSION width = static_cast<JDIMENSION>(img.width());
    const JDIMENSION height = static_cast<JDIMENSION>(img.height());
    const std::size_t stride = static_cast<std::size_t>(width) * channels;

    jpeg_compress_struct cinfo;
    JpegError err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_jpeg_error;

    unsigned char* out_buf = nullptr;
    unsigned long out_size = 0;

    if (setjmp(err.jump)) {
        jpeg_destroy_compress(&cinfo);
        if (out_buf) std::free(out_buf);
        throw std::runtime_error("jpeg: encode error");
    }

    jpeg_create_compress(&cinfo);
    jpeg_mem_dest(&cinfo, &out_buf, &out_size);
    cinfo.image_width = width;
    cinfo.image_height = height;
    cinfo.input_components = channels;
    cinfo.in_color_space = channels == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_set_defaults(&cinfo);
    jpeg_set_quality(&cinfo, quality, TRUE);
    jpeg_start_compress(&cinfo, TRUE);
    while (cinfo.next_scanline < cinfo.image_height) {
        const JSAMPLE* row = pixels.data() + stride * cinfo.next_scanline;
        JSAMPROW rows[1] = {const_cast<JSAMPROW>(row)};
        jpeg_write_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_compress(&cinfo);
    jpeg_destroy_compress(&cinfo);

    std::vector<std::uint8_t> bytes(out_buf, out_buf + out_size);
    std::free(out_buf);
    return bytes;
}

Image decode_jpeg(const std::uint8_t* data, std::size_t size) {
    require(data != nullptr && size > 0, "decode_jpeg: empty input");

    jpeg_decompress_struct cinfo;
    JpegError err;
    cinfo.err = jpeg_std_error(&err.pub);
    err.pub.error_exit = on_jpeg_error;

    std::vector<std::uint8_t> pixels;

    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw std::runtime_error("jpeg: decode error (corrupt or not a JPEG)");
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, data, static_cast<unsigned long>(size));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.jpeg_color_space == JCS_GRAYSCALE ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int channels = cinfo.output_components;
    const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * channels;
    pixels.resize(stride * cinfo.output_height);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW rows[1] = {pixels.data() + stride * cinfo.output_scanline};
        jpeg_read_scanlines(&cinfo, rows, 1);
    }
    jpeg_finish_decompress(&cinfo);

    const Index h = static_cast<Index>(cinfo.output_height);
    const Index w = static_cast<Index>(cinfo.output_width);
    jpeg_destroy_decompress(&cinfo);
    if (channels != 1 && channels != 3) throw std::runtime_error("jpeg: unsupported channel count");

    Image img(h, w, channels);
    std::size_t k = 0;
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            for (int c = 0; c < channels; ++c) {
                img.planes[static_cast<size_t>(c)](i, j) = static_cast<float>(pixels[k++]) / 255.0f;
            }
        }
    }
    return img;
}

Image read_jpeg(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return decode_jpeg(bytes.data(), bytes.size());
}

void write_jpeg(const std::filesystem::path& path, const Image& img, int quality) {
    const auto bytes = encode_jpeg(img, quality);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("jpeg: " + path.string() + ": cannot open for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("jpeg: " + path.string() + ": write failed");
}

}  // namespace warpforge::io
