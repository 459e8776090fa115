#include "fdct/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fdct/errors.hpp"
#include "fdct/rng.hpp"

namespace fdct {

bool Ellipse::contains(double x, double y) const {
    const double c = std::cos(phi), s = std::sin(phi);
    const double dx = x - x0, dy = y - y0;
    const double xr = dx * c + dy * s;
    const double yr = -dx * s + dy * c;
    return (xr * xr) / (a * a) + (yr * yr) / (b * b) <= 1.0;
}

const std::vector<Ellipse>& shepp_logan_ellipses() {
    static const double deg = std::numbers::pi / 180.0;
    static const std::vector<Ellipse> table = {
        {0.69, 0.92, 0.0, 0.0, 0.0, 1.0},
        {0.6624, 0.8740, 0.0, -0.0184, 0.0, -0.8},
        {0.11, 0.31, 0.22, 0.0, -18.0 * deg, -0.2},
        {0.16, 0.41, -0.22, 0.0, 18.0 * deg, -0.2},
        {0.21, 0.25, 0.0, 0.35, 0.0, 0.1},
        {0.046, 0.046, 0.0, 0.1, 0.0, 0.1},
        {0.046, 0.046, 0.0, -0.1, 0.0, 0.1},
        {0.046, 0.023, -0.08, -0.605, 0.0, 0.1},
        {0.023, 0.023, 0.0, -0.606, 0.0, 0.1},
        {0.023, 0.046, 0.06, -0.605, 0.0, 0.1},
    };
    return table;
}

std::vector<Ellipse> random_ellipse_set(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Ellipse> es;
    // Body ellipse.
    es.push_back({rng.uniform(0.70, 0.90), rng.uniform(0.70, 0.90), rng.uniform(-0.05, 0.05),
                  rng.uniform(-0.05, 0.05), rng.uniform(0.0, std::numbers::pi),
                  rng.uniform(0.12, 0.22)});
    const std::int64_t k = rng.uniform_int(3, 6);
    for (std::int64_t i = 0; i < k; ++i) {
        const double sign = rng.uniform() < 0.35 ? -1.0 : 1.0;
        es.push_back({rng.uniform(0.08, 0.35), rng.uniform(0.08, 0.35), rng.uniform(-0.45, 0.45),
                      rng.uniform(-0.45, 0.45), rng.uniform(0.0, std::numbers::pi),
                      sign * rng.uniform(0.03, 0.10)});
    }
    return es;
}

Image rasterize_ellipses(const std::vector<Ellipse>& es, std::int64_t n) {
    Image img(n, n);
    const double step = 2.0 / static_cast<double>(n);
    for (std::int64_t r = 0; r < n; ++r) {
        // Row 0 is the top of the image (y = +1 edge).
        const double y = 1.0 - (static_cast<double>(r) + 0.5) * step;
        for (std::int64_t c = 0; c < n; ++c) {
            const double x = -1.0 + (static_cast<double>(c) + 0.5) * step;
            double val = 0.0;
            for (const auto& e : es)
                if (e.contains(x, y)) val += e.intensity;
            img.at(r, c) = std::clamp(val, 0.0, 1.0);
        }
    }
    return img;
}

Image make_phantom(PhantomKind kind, std::int64_t n, std::uint64_t seed) {
    if (n < 8) throw DomainError("make_phantom: n must be >= 8");
    switch (kind) {
        case PhantomKind::shepp_logan:
            return rasterize_ellipses(shepp_logan_ellipses(), n);
        case PhantomKind::random_ellipses:
            return rasterize_ellipses(random_ellipse_set(seed), n);
    }
    throw DomainError("make_phantom: unknown kind");
}

}  // namespace fdct
