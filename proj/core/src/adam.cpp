#include "fdct/nn/adam.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct::nn {

void adam_step(ParamStore& params, AdamState& state, const AdamConfig& cfg) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (auto& [name, tensor] : params.map()) {
        auto& m = state.m[name];
        auto& v = state.v[name];
        const auto& g = tensor.grad();
        auto& w = tensor.raw();
        if (m.size() != w.size()) m.assign(w.size(), 0.0);
        if (v.size() != w.size()) v.assign(w.size(), 0.0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

}  // namespace fdct::nn
