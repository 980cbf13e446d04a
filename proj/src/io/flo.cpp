#include "warpforge/io/flo.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace warpforge::io {

namespace {

constexpr float kFloMagic = 202021.25f;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error("flo: " + path.string() + ": " + what);
}

}  // namespace

FlowField read_flo(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");

    float magic = 0.0f;
    std::int32_t w = 0, h = 0;
    in.read(reinterpret_cast<char*>(&magic), sizeof magic);
    in.read(reinterpret_cast<char*>(&w), sizeof w);
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in) fail(path, "truncated header");
    if (magic != kFloMagic) fail(path, "bad magic (not a .flo file)");
    if (w < 1 || h < 1 || w > 1 << 20 || h > 1 << 20) fail(path, "implausible dimensions");

    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 2;
    std::vector<float> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(float)));
    if (!in || in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
        fail(path, "truncated payload");

    FlowField flow(h, w);
    std::size_t k = 0;
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            const float dx = data[k++];
            const float dy = data[k++];
            if (!std::isfinite(dx) || !std::isfinite(dy)) fail(path, "non-finite flow value");
            flow.dx(i, j) = dx;
            flow.dy(i, j) = dy;
        }
    }
    return flow;
}

void write_flo(const std::filesystem::path& path, const FlowField& flow) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");

    const float magic = kFloMagic;
    const std::int32_t w = static_cast<std::int32_t>(flow.width());
    const std::int32_t h = static_cast<std::int32_t>(flow.height());
    out.write(reinterpret_cast<const char*>(&magic), sizeof magic);
    out.write(reinterpret_cast<const char*>(&w), sizeof w);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);

    std::vector<float> row(static_cast<std::size_t>(w) * 2);
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            row[static_cast<std::size_t>(j) * 2] = flow.dx(i, j);
            row[static_cast<std::size_t>(j) * 2 + 1] = flow.dy(i, j);
        }
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) fail(path, "write failed");
}

}  // namespace warpforge::io
