#pragma once

#include "fdct/grid.hpp"

namespace fdct {

double mse(const Grid2& a, const Grid2& b);
// 10 log10(data_range^2 / mse), capped at 99 dB when mse < 1e-12.
double psnr(const Grid2& a, const Grid2& b, double data_range);
// Windowed SSIM: 11x11 Gaussian window (sigma 1.5), K1 = 0.01, K2 = 0.03,
// mean over fully interior windows. The window shrinks for tiny inputs.
double ssim(const Grid2& a, const Grid2& b, double data_range);

// max - min of the reference image, the data_range convention used by the
// reconstruction report.
double data_range_of(const Grid2& reference);

}  // namespace fdct
