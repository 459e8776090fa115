#include "fdct/nn/params.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct::nn {

Tensor& ParamStore::add(const std::string& name, const Shape& shape, Init init,
                        std::int64_t fan_in) {
    auto it = params_.find(name);
    if (it != params_.end()) {
        if (it->second.shape() != shape)
            throw ShapeError("param " + name + " re-registered with different shape");
        return it->second;
    }
    if (init == Init::kaiming_uniform && fan_in <= 0)
        throw DomainError("param " + name + ": kaiming init needs fan_in");
    auto [ins, ok] = params_.emplace(name, Tensor::zeros(shape, /*requires_grad=*/true));
    meta_.emplace(name, Meta{init, fan_in});
    return ins->second;
}

Tensor& ParamStore::get(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw DomainError("unknown parameter: " + name);
    return it->second;
}

const Tensor& ParamStore::get(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw DomainError("unknown parameter: " + name);
    return it->second;
}

void ParamStore::initialize(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& [name, tensor] : params_) {
        const Meta& meta = meta_.at(name);
        auto& data = tensor.raw();
        switch (meta.init) {
            case Init::zero:
                std::fill(data.begin(), data.end(), 0.0);
                break;
            case Init::one:
                std::fill(data.begin(), data.end(), 1.0);
                break;
            case Init::kaiming_uniform: {
                const double bound = std::sqrt(3.0 / static_cast<double>(meta.fan_in));
                for (auto& v : data) v = rng.uniform(-bound, bound);
                break;
            }
            case Init::small_normal:
                for (auto& v : data) v = rng.normal(0.0, 0.02);
                break;
        }
    }
}

void ParamStore::zero_grad() {
    for (auto& [name, tensor] : params_) tensor.zero_grad();
}

}  // namespace fdct::nn
