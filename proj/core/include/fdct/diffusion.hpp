#pragma once

#include <cstdint>
#include <vector>

#include "fdct/grid.hpp"
#include "fdct/rng.hpp"

namespace fdct {

enum class ScheduleKind { linear };

// Interpolation weights for the forward degradation: alpha_0 = 1,
// alpha_T = 0, strictly decreasing.
struct DiffusionSchedule {
    std::int64_t total_steps = 0;
    std::vector<double> alphas;  // indexed 0..T

    double alpha(std::int64_t t) const { return alphas[static_cast<std::size_t>(t)]; }
};

// linear: alpha_t = 1 - t/T.
DiffusionSchedule make_schedule(std::int64_t total_steps, ScheduleKind kind = ScheduleKind::linear);

// x_t = alpha_t * x0 + (1 - alpha_t) * xT, elementwise. Mean-preserving when
// mean(x0) == mean(xT).
Sinogram perturb(const Sinogram& x0, const Sinogram& xT, std::int64_t t,
                 const DiffusionSchedule& sched);

// Uniform timestep in [1, T].
std::int64_t sample_step(Rng& rng, std::int64_t total_steps);

// Clean/noisy sinogram pair from the same object.
struct TrainingPair {
    Sinogram x0;
    Sinogram xT;
};

}  // namespace fdct
