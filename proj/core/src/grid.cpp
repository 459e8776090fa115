#include "fdct/grid.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct {

bool Grid2::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double Grid2::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double Grid2::norm() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double Grid2::mean() const {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

static void check_same(const Grid2& a, const Grid2& b) {
    if (!a.same_shape(b)) throw ShapeError("grid shape mismatch");
}

Grid2 operator+(const Grid2& a, const Grid2& b) {
    check_same(a, b);
    Grid2 out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
}

Grid2 operator-(const Grid2& a, const Grid2& b) {
    check_same(a, b);
    Grid2 out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

Grid2 operator*(double s, const Grid2& a) {
    Grid2 out(a.rows, a.cols);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = s * a.v[i];
    return out;
}

}  // namespace fdct
