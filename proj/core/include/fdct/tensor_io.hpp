#pragma once

#include <string>

#include "fdct/grid.hpp"

namespace fdct {

// Flat binary tensor file: 16-byte header ("FDCT-TEN" + u32 version + u32
// reserved), two little-endian u64 dimensions (rows, cols), then row-major
// little-endian f32 values.
void write_tensor(const std::string& path, const Grid2& g);
Grid2 read_tensor(const std::string& path);

Sinogram read_sinogram(const std::string& path);
Image read_image(const std::string& path);

// Linear display window for 8-bit export; lo/hi equal means auto (min/max).
struct DisplayWindow {
    double lo = 0.0;
    double hi = 0.0;
};

void write_pgm(const std::string& path, const Grid2& g, DisplayWindow win = {});
void write_png(const std::string& path, const Grid2& g, DisplayWindow win = {});

}  // namespace fdct
