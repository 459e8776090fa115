#pragma once

#include <cstdint>
#include <vector>

#include "fdct/grid.hpp"

namespace fdct {

enum class PhantomKind { shepp_logan, random_ellipses };

// One ellipse component: semi-axes and center in [-1,1] normalized image
// coordinates, rotation in radians, additive intensity.
struct Ellipse {
    double a, b, x0, y0, phi, intensity;
    bool contains(double x, double y) const;
};

// The Shepp-Logan ellipse table (the modified intensity variant, so summed
// values stay in [0,1]).
const std::vector<Ellipse>& shepp_logan_ellipses();

// Deterministic random ellipse set for a given seed. Intensities are kept
// modest so fan-beam line integrals stay in a photon-friendly range.
std::vector<Ellipse> random_ellipse_set(std::uint64_t seed);

// Rasterize an ellipse set on an n x n grid over [-1,1]^2, clamped to [0,1].
Image rasterize_ellipses(const std::vector<Ellipse>& es, std::int64_t n);

// n >= 8; random_ellipses is deterministic given seed.
Image make_phantom(PhantomKind kind, std::int64_t n, std::uint64_t seed);

}  // namespace fdct
