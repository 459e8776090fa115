#pragma once

#include <utility>

#include "fdct/nn/tensor.hpp"

namespace fdct::nn {

// Elementwise with numpy-style right-aligned broadcasting.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor divide(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

Tensor relu(const Tensor& a);
Tensor gelu(const Tensor& a);
// |x| with sign subgradient (0 at the kink).
Tensor absval(const Tensor& a);

// Stable (max-subtracted) softmax along an axis; negative axes allowed.
Tensor softmax(const Tensor& a, int axis);

// Normalization over the last axis with learned gain/shift.
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

// [..., M, K] x [..., K, N] with broadcastable leading dims. Accumulation in
// 64-bit, fixed order.
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor reshape(const Tensor& a, const Shape& s);
Tensor permute(const Tensor& a, const std::vector<int>& perm);
Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t len);
Tensor concat(const std::vector<Tensor>& parts, int axis);

Tensor reduce_sum(const Tensor& a, int axis, bool keepdim);
Tensor reduce_mean(const Tensor& a, int axis, bool keepdim);
Tensor sum_all(const Tensor& a);
Tensor mean_all(const Tensor& a);

// 2-D convolution on [Cin, H, W] with weight [Cout, Cin, k, k], stride 1,
// zero padding preserving shape; bias [Cout] optional (undefined Tensor to
// skip). k odd.
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias);

// [C, H, W] -> [C, H/2, W/2]; H, W even.
Tensor avg_pool2(const Tensor& x);
// Nearest-neighbor x2 upsampling, [C, H, W] -> [C, 2H, 2W].
Tensor upsample2(const Tensor& x);

// Dilated sliding-window gather on a token grid [H, W, D]: result
// [H, W, k*k, D] plus a constant validity mask [H, W, k*k] (1 inside, 0 for
// zero-filled out-of-bounds taps). Window offsets are p*r for
// p in [-k/2, k/2]. k odd, r >= 1.
std::pair<Tensor, Tensor> unfold(const Tensor& x, int k, int r);

// Row lookup: table [R, D] -> [D]. Gradient accumulates into that row.
Tensor select_row(const Tensor& table, std::int64_t row);

}  // namespace fdct::nn
