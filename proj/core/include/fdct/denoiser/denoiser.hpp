#pragma once

#include "fdct/denoiser/config.hpp"
#include "fdct/grid.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

// Registers every parameter of the configured restoration network (high/low/
// full-frequency branches plus fusion) into the store.
void register_denoiser_params(nn::ParamStore& P, const DenoiserConfig& cfg);

// Restoration operator on a graph tensor: frequency-decouple x_t, run the
// active branches conditioned on t, fuse. Differentiable w.r.t. parameters.
nn::Tensor denoise_t(const Sinogram& x_t, std::int64_t t, const nn::ParamStore& P,
                     const DenoiserConfig& cfg);

// Inference wrapper: same computation, no graph recorded.
Sinogram denoise(const Sinogram& x_t, std::int64_t t, const nn::ParamStore& P,
                 const DenoiserConfig& cfg);

Sinogram tensor_to_sinogram(const nn::Tensor& t);
nn::Tensor sinogram_to_tensor(const Sinogram& s);

}  // namespace fdct
