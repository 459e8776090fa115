#pragma once

#include <cstdint>
#include <vector>

namespace fdct {

// Dense row-major 2-D grid of doubles. Base for Image and Sinogram.
struct Grid2 {
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::vector<double> v;

    Grid2() = default;
    Grid2(std::int64_t r, std::int64_t c, double fill = 0.0)
        : rows(r), cols(c), v(static_cast<std::size_t>(r * c), fill) {}

    double& at(std::int64_t r, std::int64_t c) { return v[static_cast<std::size_t>(r * cols + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return v[static_cast<std::size_t>(r * cols + c)]; }
    std::int64_t size() const { return rows * cols; }
    bool same_shape(const Grid2& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const;
    double max_abs() const;
    // Frobenius norm.
    double norm() const;
    double mean() const;
};

Grid2 operator+(const Grid2& a, const Grid2& b);
Grid2 operator-(const Grid2& a, const Grid2& b);
Grid2 operator*(double s, const Grid2& a);

// Attenuation image. Pixel values are attenuation per unit pixel length;
// pixel_size carries the physical edge length for geometry mapping.
struct Image : Grid2 {
    double pixel_size = 1.0;
    Image() = default;
    Image(std::int64_t h, std::int64_t w, double fill = 0.0) : Grid2(h, w, fill) {}
    std::int64_t height() const { return rows; }
    std::int64_t width() const { return cols; }
};

// Line-integral data, indexed [view][detector].
struct Sinogram : Grid2 {
    Sinogram() = default;
    Sinogram(std::int64_t views, std::int64_t dets, double fill = 0.0) : Grid2(views, dets, fill) {}
    std::int64_t n_views() const { return rows; }
    std::int64_t n_detectors() const { return cols; }
};

}  // namespace fdct
