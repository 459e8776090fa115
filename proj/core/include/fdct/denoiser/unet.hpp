#pragma once

#include "fdct/denoiser/config.hpp"
#include "fdct/nn/ops.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

void register_unet_params(nn::ParamStore& P, const std::string& prefix, const UnetConfig& cfg);

// Encoder/decoder with skip concatenations; a sinusoidal timestep embedding
// feeds per-stage channel biases on the way down. Output = input + learned
// correction. H and W must be divisible by 2^depth.
nn::Tensor unet_forward(const nn::Tensor& x, std::int64_t t, const nn::ParamStore& P,
                        const std::string& prefix, const UnetConfig& cfg);

// Fixed sinusoidal embedding of a timestep (no gradient).
nn::Tensor sinusoidal_time_embedding(std::int64_t t, std::int64_t dim);

}  // namespace fdct
