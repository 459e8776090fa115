#pragma once

#include "fdct/denoiser/config.hpp"
#include "fdct/nn/ops.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

void register_ldf_params(nn::ParamStore& P, const std::string& prefix, const LdfConfig& cfg);

// Learned fusion of the three denoised frequency branches: channel-stack
// (high, low, full), then n_layers convolutions with a nonlinearity between
// and a final linear 1-channel conv.
nn::Tensor ldf_fuse(const nn::Tensor& g_high, const nn::Tensor& g_low, const nn::Tensor& g_full,
                    const nn::ParamStore& P, const std::string& prefix, const LdfConfig& cfg);

}  // namespace fdct
