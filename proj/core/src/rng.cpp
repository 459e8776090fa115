#include "fdct/rng.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fdct/errors.hpp"

namespace fdct {

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw DomainError("uniform_int: empty range");
    const std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    if (range == 0) return static_cast<std::int64_t>(next_u64());  // full 64-bit range
    const std::uint64_t mask = std::bit_ceil(range) - 1;
    std::uint64_t r;
    do {
        r = next_u64() & mask;
    } while (r >= range);
    return lo + static_cast<std::int64_t>(r);
}

double Rng::normal() {
    // u1 in (0,1] so the log is finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::normal(double mean, double sigma) { return mean + sigma * normal(); }

std::int64_t Rng::poisson(double lambda) {
    if (lambda < 0.0) throw DomainError("poisson: negative mean");
    if (lambda == 0.0) return 0;
    if (lambda < 10.0) {
        // Multiplicative inversion.
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        std::int64_t k = -1;
        do {
            prod *= uniform();
            ++k;
        } while (prod > limit);
        return k;
    }
    // Hormann's PTRS transformed-rejection sampler.
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double rhs = kf * log_lambda - lambda - std::lgamma(kf + 1.0);
        if (lhs <= rhs) return static_cast<std::int64_t>(kf);
    }
}

std::string Rng::state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::set_state(const std::string& s) {
    std::istringstream is(s);
    is >> engine_;
    if (is.fail()) throw IoError("Rng::set_state: malformed engine state");
}

}  // namespace fdct
