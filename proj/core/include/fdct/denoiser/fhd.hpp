#pragma once

#include "fdct/denoiser/config.hpp"
#include "fdct/nn/ops.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

void register_fhd_params(nn::ParamStore& P, const std::string& prefix, const FhdConfig& cfg,
                         std::int64_t total_steps);

// High-frequency denoiser: patch-embed the [H, W] input, run the configured
// MHSA/MHDA module sequence (a learned time token joins every MHSA sequence;
// MHDA sees the timestep as an additive grid bias), merge skip links, and
// un-patch. Output = input + learned correction. H and W must be divisible
// by patch_size.
nn::Tensor fhd_forward(const nn::Tensor& g_high, std::int64_t t, const nn::ParamStore& P,
                       const std::string& prefix, const FhdConfig& cfg);

}  // namespace fdct
