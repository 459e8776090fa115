#include <cmath>

#include "fdct/errors.hpp"
#include "fdct/recon.hpp"

namespace fdct {

namespace {
inline double fwd_dh(const Grid2& x, std::int64_t r, std::int64_t c) {
    return r + 1 < x.rows ? x.at(r + 1, c) - x.at(r, c) : 0.0;  // replicate boundary
}
inline double fwd_dw(const Grid2& x, std::int64_t r, std::int64_t c) {
    return c + 1 < x.cols ? x.at(r, c + 1) - x.at(r, c) : 0.0;
}
}  // namespace

double tv_seminorm(const Grid2& x, double epsilon) {
    if (!x.all_finite()) throw NumericError("tv_seminorm: non-finite input");
    double acc = 0.0;
    for (std::int64_t r = 0; r < x.rows; ++r)
        for (std::int64_t c = 0; c < x.cols; ++c) {
            const double dh = fwd_dh(x, r, c);
            const double dw = fwd_dw(x, r, c);
            acc += std::sqrt(dh * dh + dw * dw + epsilon * epsilon) - epsilon;
        }
    return acc;
}

Grid2 tv_subgradient(const Grid2& x, double epsilon) {
    Grid2 g(x.rows, x.cols);
    // Site denominators, shared by the three pixels each site touches.
    Grid2 den(x.rows, x.cols);
    for (std::int64_t r = 0; r < x.rows; ++r)
        for (std::int64_t c = 0; c < x.cols; ++c) {
            const double dh = fwd_dh(x, r, c);
            const double dw = fwd_dw(x, r, c);
            den.at(r, c) = std::sqrt(dh * dh + dw * dw + epsilon * epsilon);
        }
    for (std::int64_t r = 0; r < x.rows; ++r)
        for (std::int64_t c = 0; c < x.cols; ++c) {
            double acc = (-fwd_dh(x, r, c) - fwd_dw(x, r, c)) / den.at(r, c);
            if (r > 0) acc += fwd_dh(x, r - 1, c) / den.at(r - 1, c);
            if (c > 0) acc += fwd_dw(x, r, c - 1) / den.at(r, c - 1);
            g.at(r, c) = acc;
        }
    return g;
}

Grid2 tv_step(const Grid2& x, const TvConfig& cfg) {
    if (cfg.alpha < 0.0) throw DomainError("tv_step: alpha must be >= 0");
    if (cfg.iterations < 1) throw DomainError("tv_step: iterations must be >= 1");
    Grid2 cur = x;
    if (cfg.alpha == 0.0) return cur;
    for (std::int64_t it = 0; it < cfg.iterations; ++it) {
        const Grid2 g = tv_subgradient(cur, cfg.epsilon);
        const double norm = g.norm();
        if (norm == 0.0) break;  // stationary (constant field)
        const double step = cfg.alpha / norm;
        for (std::size_t i = 0; i < cur.v.size(); ++i) cur.v[i] -= step * g.v[i];
    }
    return cur;
}

}  // namespace fdct
