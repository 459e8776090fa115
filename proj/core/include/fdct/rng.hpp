#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace fdct {

// Deterministic random source. The engine is std::mt19937_64 but all value
// mappings (uniform, normal, Poisson) are fixed here instead of relying on
// std::*_distribution, so sequences are identical across standard libraries
// and the full state round-trips through checkpoints as text.
class Rng {
public:
    Rng() : Rng(0) {}
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();
    // Uniform in [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [lo, hi], inclusive, without modulo bias.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    // Standard normal via Box-Muller (two uniforms per draw, no cached spare).
    double normal();
    double normal(double mean, double sigma);
    // Poisson with mean lambda; inversion for small means, PTRS otherwise.
    std::int64_t poisson(double lambda);

    // Engine state as text (std::mt19937_64 stream format).
    std::string state() const;
    void set_state(const std::string& s);

    bool operator==(const Rng& other) const { return engine_ == other.engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace fdct
