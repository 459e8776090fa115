#pragma once

#include "fdct/geometry.hpp"
#include "fdct/grid.hpp"

namespace fdct {

// Fan-beam forward projection by Siddon's parametric grid traversal.
// The image must be square; its pixel size is derived from the geometry so
// the image square is inscribed in the field of view. Sinogram entries are
// line integrals in pixel-length units (sum of per-pixel intersection
// lengths, measured in pixels, times pixel values). One ray per detector
// cell, source point to cell center.
Sinogram forward_project(const Image& img, const FanGeometry& geom);

// Line integral of one ray (grid-frame endpoints, pixel units) via Siddon
// traversal. Exposed for the projector and for ray-level testing.
// Grid frame: pixel (r,c) spans [c,c+1] x [r,r+1]; x right, y down.
double siddon_line_integral(const Image& img, Vec2 a, Vec2 b);

// Endpoints of the (view, det) ray in the grid frame of an n x n image.
struct RaySegment {
    Vec2 a, b;
};
RaySegment ray_in_grid_frame(const FanGeometry& geom, std::int64_t view, std::int64_t det,
                             std::int64_t n);

}  // namespace fdct
