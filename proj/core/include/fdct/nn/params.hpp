#pragma once

#include <map>
#include <string>

#include "fdct/nn/tensor.hpp"
#include "fdct/rng.hpp"

namespace fdct::nn {

enum class Init {
    zero,
    one,
    kaiming_uniform,  // U(-a, a) with a = sqrt(3 / fan_in)
    small_normal      // N(0, 0.02), embedding tables
};

// Named learnable tensors. Registration order is irrelevant: initialization
// and serialization iterate in name order so runs are reproducible.
class ParamStore {
public:
    // Registers (or returns an existing) parameter. fan_in is required for
    // kaiming_uniform.
    Tensor& add(const std::string& name, const Shape& shape, Init init, std::int64_t fan_in = 0);
    Tensor& get(const std::string& name);
    const Tensor& get(const std::string& name) const;
    bool has(const std::string& name) const { return params_.count(name) > 0; }

    // Draws every parameter's initial values from one seeded stream, in name
    // order.
    void initialize(std::uint64_t seed);

    void zero_grad();

    std::map<std::string, Tensor>& map() { return params_; }
    const std::map<std::string, Tensor>& map() const { return params_; }
    std::size_t size() const { return params_.size(); }

private:
    struct Meta {
        Init init;
        std::int64_t fan_in;
    };
    std::map<std::string, Tensor> params_;
    std::map<std::string, Meta> meta_;
};

}  // namespace fdct::nn
