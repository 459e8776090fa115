#pragma once

#include "fdct/grid.hpp"

namespace fdct {

// Gaussian low-pass gains in the 2-D Fourier domain, stored in DFT index
// order (DC at bin [0,0]). Frequencies are centered and normalized to
// [-0.5, 0.5) cycles per sample.
struct SpectrumMask {
    std::int64_t height = 0;
    std::int64_t width = 0;
    double sigma = 0.0;
    std::vector<double> gains;  // row-major, height x width

    double gain(std::int64_t u, std::int64_t v) const {
        return gains[static_cast<std::size_t>(u * width + v)];
    }
};

// Low/high/full split of a sinogram; low + high reproduces full exactly.
struct FrequencyTriple {
    Sinogram low;
    Sinogram high;
    Sinogram full;
};

// gain(u,v) = exp(-(fu^2 + fv^2) / (2 sigma^2)) with centered normalized
// frequencies; sigma > 0.
SpectrumMask gaussian_mask(std::int64_t h, std::int64_t w, double sigma);

// G_L = IDFT(DFT(x) . K_sigma); G_H = x - G_L; G_F = x. Forward transform is
// unnormalized, the inverse carries the 1/(hw) factor.
FrequencyTriple decompose(const Sinogram& x, double sigma);

// Low-pass only (the G_L part of decompose).
Sinogram gaussian_lowpass(const Sinogram& x, double sigma);

}  // namespace fdct
