#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fdct/nn/params.hpp"

namespace fdct::nn {

struct AdamConfig {
    double lr = 2e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second moment accumulators per parameter plus the shared step count.
struct AdamState {
    std::map<std::string, std::vector<double>> m;
    std::map<std::string, std::vector<double>> v;
    std::int64_t step = 0;
};

// One bias-corrected Adam update over every parameter in the store, reading
// gradients accumulated on the tensors. Missing accumulators are created
// zero-initialized.
void adam_step(ParamStore& params, AdamState& state, const AdamConfig& cfg);

}  // namespace fdct::nn
