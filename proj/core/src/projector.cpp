#include "fdct/projector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fdct/errors.hpp"

namespace fdct {

RaySegment ray_in_grid_frame(const FanGeometry& geom, std::int64_t view, std::int64_t det,
                             std::int64_t n) {
    const double px = geom.pixel_size_for(n);
    const double half = static_cast<double>(n) / 2.0;
    const Vec2 s = geom.source_pos(view);
    const Vec2 e = geom.detector_pos(view, det);
    // World (x right, y up) to grid frame (x right, y down), in pixel units.
    auto to_grid = [&](Vec2 w) { return Vec2{w.x / px + half, half - w.y / px}; };
    return {to_grid(s), to_grid(e)};
}

double siddon_line_integral(const Image& img, Vec2 a, Vec2 b) {
    const double W = static_cast<double>(img.width());
    const double H = static_cast<double>(img.height());
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) return 0.0;

    // Clip the segment parameter to the grid box.
    double tmin = 0.0, tmax = 1.0;
    auto clip_axis = [&](double p0, double d, double lo, double hi) {
        if (d == 0.0) return p0 >= lo && p0 <= hi;
        double t0 = (lo - p0) / d;
        double t1 = (hi - p0) / d;
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        return true;
    };
    if (!clip_axis(a.x, dx, 0.0, W)) return 0.0;
    if (!clip_axis(a.y, dy, 0.0, H)) return 0.0;
    if (tmin >= tmax) return 0.0;

    // Entry cell. Nudging by the entry midpoint avoids boundary ambiguity.
    const double mx = a.x + 0.5 * (tmin + tmax) * dx;
    const double my = a.y + 0.5 * (tmin + tmax) * dy;
    auto cell_of = [](double v, double limit) {
        return std::clamp(static_cast<std::int64_t>(std::floor(v)), std::int64_t{0},
                          static_cast<std::int64_t>(limit) - 1);
    };
    std::int64_t ix = cell_of(a.x + tmin * dx, W);
    std::int64_t iy = cell_of(a.y + tmin * dy, H);
    // Degenerate ray fully inside one row/column of cells.
    if (dx == 0.0) ix = cell_of(mx, W);
    if (dy == 0.0) iy = cell_of(my, H);

    const std::int64_t step_x = dx > 0.0 ? 1 : -1;
    const std::int64_t step_y = dy > 0.0 ? 1 : -1;
    const double inf = std::numeric_limits<double>::infinity();
    const double dtx = dx != 0.0 ? 1.0 / std::abs(dx) : inf;
    const double dty = dy != 0.0 ? 1.0 / std::abs(dy) : inf;
    double tx = inf, ty = inf;
    if (dx != 0.0) {
        const double next = dx > 0.0 ? static_cast<double>(ix + 1) : static_cast<double>(ix);
        tx = (next - a.x) / dx;
    }
    if (dy != 0.0) {
        const double next = dy > 0.0 ? static_cast<double>(iy + 1) : static_cast<double>(iy);
        ty = (next - a.y) / dy;
    }

    double acc = 0.0;
    double t = tmin;
    while (t < tmax) {
        const double tn = std::min({tx, ty, tmax});
        if (tn > t) acc += (tn - t) * img.at(iy, ix);
        t = tn;
        if (tn >= tmax) break;
        if (tx <= ty) {
            ix += step_x;
            tx += dtx;
            if (ix < 0 || ix >= img.width()) break;
        } else {
            iy += step_y;
            ty += dty;
            if (iy < 0 || iy >= img.height()) break;
        }
    }
    return acc * len;
}

Sinogram forward_project(const Image& img, const FanGeometry& geom) {
    geom.validate();
    if (img.height() != img.width() || img.height() < 1)
        throw ShapeError("forward_project: image must be square and non-empty");
    Sinogram sino(geom.n_views, geom.n_detectors);
    const std::int64_t n = img.height();
#pragma omp parallel for schedule(static)
    for (std::int64_t v = 0; v < geom.n_views; ++v) {
        for (std::int64_t d = 0; d < geom.n_detectors; ++d) {
            const RaySegment ray = ray_in_grid_frame(geom, v, d, n);
            sino.at(v, d) = siddon_line_integral(img, ray.a, ray.b);
        }
    }
    return sino;
}

}  // namespace fdct
