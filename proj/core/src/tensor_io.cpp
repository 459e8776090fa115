#include "fdct/tensor_io.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "fdct/errors.hpp"

namespace fdct {

namespace {
constexpr char kMagic[8] = {'F', 'D', 'C', 'T', '-', 'T', 'E', 'N'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is, const std::string& path) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("truncated tensor file: " + path);
    return v;
}
}  // namespace

void write_tensor(const std::string& path, const Grid2& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, 0);  // reserved
    put<std::uint64_t>(os, static_cast<std::uint64_t>(g.rows));
    put<std::uint64_t>(os, static_cast<std::uint64_t>(g.cols));
    std::vector<float> buf(g.v.size());
    for (std::size_t i = 0; i < g.v.size(); ++i) buf[i] = static_cast<float>(g.v[i]);
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!os) throw IoError("write failed: " + path);
}

Grid2 read_tensor(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError("not a tensor file: " + path);
    const auto version = get<std::uint32_t>(is, path);
    if (version != kVersion)
        throw IoError("unsupported tensor file version " + std::to_string(version) + ": " + path);
    get<std::uint32_t>(is, path);  // reserved
    const auto rows = get<std::uint64_t>(is, path);
    const auto cols = get<std::uint64_t>(is, path);
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20))
        throw IoError("implausible tensor dimensions: " + path);
    Grid2 g(static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols));
    std::vector<float> buf(g.v.size());
    is.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!is) throw IoError("truncated tensor file: " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) g.v[i] = static_cast<double>(buf[i]);
    return g;
}

Sinogram read_sinogram(const std::string& path) {
    const Grid2 g = read_tensor(path);
    Sinogram s(g.rows, g.cols);
    s.v = g.v;
    return s;
}

Image read_image(const std::string& path) {
    const Grid2 g = read_tensor(path);
    Image img(g.rows, g.cols);
    img.v = g.v;
    return img;
}

namespace {
std::vector<std::uint8_t> to_bytes(const Grid2& g, DisplayWindow win) {
    double lo = win.lo, hi = win.hi;
    if (lo == hi) {
        lo = g.v.empty() ? 0.0 : g.v[0];
        hi = lo;
        for (double x : g.v) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        if (hi == lo) hi = lo + 1.0;
    }
    std::vector<std::uint8_t> bytes(g.v.size());
    const double scale = 255.0 / (hi - lo);
    for (std::size_t i = 0; i < g.v.size(); ++i) {
        const double t = (g.v[i] - lo) * scale;
        bytes[i] = static_cast<std::uint8_t>(std::clamp(t, 0.0, 255.0) + 0.5);
    }
    return bytes;
}
}  // namespace

void write_pgm(const std::string& path, const Grid2& g, DisplayWindow win) {
    const auto bytes = to_bytes(g, win);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "P5\n" << g.cols << " " << g.rows << "\n255\n";
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError("write failed: " + path);
}

// Defined in png_io.cpp.
void write_png_gray8(const std::string& path, const std::uint8_t* data, std::int64_t rows,
                     std::int64_t cols);

void write_png(const std::string& path, const Grid2& g, DisplayWindow win) {
    const auto bytes = to_bytes(g, win);
    write_png_gray8(path, bytes.data(), g.rows, g.cols);
}

}  // namespace fdct
