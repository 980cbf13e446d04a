#include "warpforge/io/msk.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace warpforge::io {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'K', '1'};

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
    throw std::runtime_error("msk: " + path.string() + ": " + what);
}

}  // namespace

ConsistencyMask read_msk(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(path, "cannot open for reading");

    char magic[4] = {};
    std::int32_t w = 0, h = 0;
    in.read(magic, sizeof magic);
    in.read(reinterpret_cast<char*>(&w), sizeof w);
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in) fail(path, "truncated header");
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) fail(path, "bad magic (not a MSK1 file)");
    if (w < 1 || h < 1 || w > 1 << 20 || h > 1 << 20) fail(path, "implausible dimensions");

    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    std::vector<float> data(count);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * sizeof(float)));
    if (!in || in.gcount() != static_cast<std::streamsize>(count * sizeof(float)))
        fail(path, "truncated payload");

    ConsistencyMask mask;
    mask.values.resize(h, w);
    std::size_t k = 0;
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) {
            if (!std::isfinite(data[k])) fail(path, "non-finite mask value");
            mask.values(i, j) = data[k++];
        }
    }
    return mask;
}

void write_msk(const std::filesystem::path& path, const ConsistencyMask& mask) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(path, "cannot open for writing");

    const std::int32_t w = static_cast<std::int32_t>(mask.values.cols());
    const std::int32_t h = static_cast<std::int32_t>(mask.values.rows());
    out.write(kMagic, sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&w), sizeof w);
    out.write(reinterpret_cast<const char*>(&h), sizeof h);

    std::vector<float> row(static_cast<std::size_t>(w));
    for (Index i = 0; i < h; ++i) {
        for (Index j = 0; j < w; ++j) row[static_cast<std::size_t>(j)] = mask.values(i, j);
        out.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(float)));
    }
    if (!out) fail(path, "write failed");
}

}  // namespace warpforge::io
