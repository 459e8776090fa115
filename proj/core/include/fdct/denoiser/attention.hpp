#pragma once

#include <string>
#include <vector>

#include "fdct/nn/ops.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

// q/k/v/out projection weights and biases under `prefix`.
void register_attention_params(nn::ParamStore& P, const std::string& prefix, std::int64_t dim);
// Pre-norm feed-forward sublayer (2-layer, 4x expansion, GELU) under `prefix`.
void register_ff_params(nn::ParamStore& P, const std::string& prefix, std::int64_t dim);

// y + W2 gelu(W1 LN(y)) on token rows; works on any [..., D] layout.
nn::Tensor feed_forward(const nn::Tensor& x, const nn::ParamStore& P, const std::string& prefix);

// Multi-head self-attention over a token sequence [N, D]: softmax(QK^T/sqrt(d))V
// per head, heads concatenated, output projection, residual added.
nn::Tensor mhsa(const nn::Tensor& tokens, const nn::ParamStore& P, const std::string& prefix,
                std::int64_t n_heads);
// Same without the residual; used inside pre-norm transformer wrappers.
nn::Tensor mhsa_no_residual(const nn::Tensor& tokens, const nn::ParamStore& P,
                            const std::string& prefix, std::int64_t n_heads);

// Sliding sparse local attention over a token grid [H, W, D]: each position
// attends to the omega x omega window dilated by r; out-of-bounds taps get
// -inf logits. Projection + residual as in mhsa.
nn::Tensor ssla(const nn::Tensor& grid, const nn::ParamStore& P, const std::string& prefix,
                std::int64_t n_heads, int omega, int r);

// MHDA block on a token grid: heads partitioned across the dilation rates,
// each partition running sliding sparse local attention with its rate;
// partitions concatenated, output-projected, residual added, then the
// feed-forward sublayer. Head count must divide evenly across the rates.
nn::Tensor mhda_block(const nn::Tensor& grid, const nn::ParamStore& P, const std::string& prefix,
                      std::int64_t n_heads, int omega, const std::vector<int>& dilations);

}  // namespace fdct
