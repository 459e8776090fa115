#pragma once

#include "fdct/geometry.hpp"
#include "fdct/grid.hpp"

namespace fdct {

// Low-dose measurement simulation on line integrals x:
//   counts = Poisson(I0 * exp(-x)) [+ Gaussian(0, electronic_sigma^2)]
//   output = -ln(max(counts, 1) / I0)
// Deterministic given dose.seed; photon_count = +inf with zero electronic
// sigma returns the input unchanged.
Sinogram simulate_low_dose(const Sinogram& sino, const DoseModel& dose);

}  // namespace fdct
