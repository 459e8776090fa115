#include "fdct/diffusion.hpp"

#include "fdct/errors.hpp"

namespace fdct {

DiffusionSchedule make_schedule(std::int64_t total_steps, ScheduleKind kind) {
    if (total_steps < 1) throw DomainError("make_schedule: T must be >= 1");
    DiffusionSchedule s;
    s.total_steps = total_steps;
    s.alphas.resize(static_cast<std::size_t>(total_steps) + 1);
    switch (kind) {
        case ScheduleKind::linear:
            for (std::int64_t t = 0; t <= total_steps; ++t)
                s.alphas[static_cast<std::size_t>(t)] =
                    1.0 - static_cast<double>(t) / static_cast<double>(total_steps);
            break;
    }
    return s;
}

Sinogram perturb(const Sinogram& x0, const Sinogram& xT, std::int64_t t,
                 const DiffusionSchedule& sched) {
    if (!x0.same_shape(xT)) throw ShapeError("perturb: x0 and xT shapes differ");
    if (t < 0 || t > sched.total_steps) throw DomainError("perturb: t out of range");
    const double a = sched.alpha(t);
    // Endpoints exact: return the inputs themselves rather than 1*x + 0*y.
    if (t == 0) return x0;
    if (t == sched.total_steps) return xT;
    Sinogram out(x0.rows, x0.cols);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a * x0.v[i] + (1.0 - a) * xT.v[i];
    return out;
}

std::int64_t sample_step(Rng& rng, std::int64_t total_steps) {
    if (total_steps < 1) throw DomainError("sample_step: T must be >= 1");
    return rng.uniform_int(1, total_steps);
}

}  // namespace fdct
