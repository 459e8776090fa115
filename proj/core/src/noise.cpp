#include "fdct/noise.hpp"

#include <cmath>

#include "fdct/errors.hpp"
#include "fdct/rng.hpp"

namespace fdct {

Sinogram simulate_low_dose(const Sinogram& sino, const DoseModel& dose) {
    dose.validate();
    // Infinite dose: counts dwarf both quantum and electronic fluctuations.
    if (!std::isfinite(dose.photon_count)) return sino;

    Sinogram out(sino.n_views(), sino.n_detectors());
    Rng rng(dose.seed);
    const double i0 = dose.photon_count;
    for (std::size_t i = 0; i < sino.v.size(); ++i) {
        const double x = sino.v[i];
        double counts = static_cast<double>(rng.poisson(i0 * std::exp(-x)));
        if (dose.electronic_sigma > 0.0) counts += rng.normal(0.0, dose.electronic_sigma);
        counts = std::max(counts, 1.0);  // photon-starvation guard before the log
        out.v[i] = -std::log(counts / i0);
    }
    return out;
}

}  // namespace fdct
