#pragma once

#include "fdct/geometry.hpp"
#include "fdct/grid.hpp"

namespace fdct {

enum class RampWindow { hann, ramp };

struct FbpOptions {
    // Output image side; 0 derives n_detectors / 2.
    std::int64_t image_size = 0;
    // Raised-cosine apodization by default; `ramp` is the bare filter.
    RampWindow window = RampWindow::hann;
};

// Fan-beam filtered back-projection for flat equispaced detectors: cosine
// weighting, ramp filtering along the detector axis, distance-weighted
// back-projection over views. Linear in the sinogram. Output values are in
// the same attenuation-per-pixel-length units the projector produces.
Image fbp(const Sinogram& sino, const FanGeometry& geom, const FbpOptions& opts = {});

}  // namespace fdct
