#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fdct/config.hpp"
#include "fdct/grid.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

struct TvConfig {
    double alpha = 0.05;
    std::int64_t iterations = 2;
    double epsilon = 1e-8;
};

// Smoothed total-variation seminorm: sum over sites of
// sqrt(dh^2 + dw^2 + eps^2) - eps, forward differences, replicate boundary.
double tv_seminorm(const Grid2& x, double epsilon = 1e-8);
// Gradient of the smoothed seminorm.
Grid2 tv_subgradient(const Grid2& x, double epsilon = 1e-8);
// cfg.iterations normalized-subgradient descent steps of length alpha.
Grid2 tv_step(const Grid2& x, const TvConfig& cfg);

struct PwlsConfig {
    double eta = 22000.0;
    double mu = 5e5;
    PwlsMode mode = PwlsMode::corrected;
};

// Statistical weights w_i = I0 * exp(-x_i / eta): inverse of the
// Poisson-propagated variance of the line integrals.
Grid2 pwls_weights(const Grid2& x, double photon_count, double eta);

// corrected: x + (w (y - x) - mu g) / (w + mu)   [residual form]
// literal:   (w (y - x) + mu g) / (w + mu)       [the printed update]
Grid2 pwls_update(const Grid2& x_tilde, const Grid2& y, const Grid2& w, double mu,
                  const Grid2& prior_grad, PwlsMode mode);

struct StepDiagnostics {
    std::int64_t t;
    double fidelity_residual;  // ||x_{t-1} - y||
    double tv_value;
};

struct ReconReport {
    std::optional<double> psnr;
    std::optional<double> ssim;
    std::optional<double> mse;
    std::vector<StepDiagnostics> steps;
};

// Reverse-diffusion reconstruction: from the noisy sinogram x_T (y stays
// fixed to it), for t = T..1 denoise, apply the PWLS fidelity update and TV
// descent, then filtered back-projection. Metrics are filled when ground
// truth is supplied.
std::pair<Image, ReconReport> reconstruct(const Sinogram& ldct, const nn::ParamStore& params,
                                          const RunConfig& cfg,
                                          const Image* ground_truth = nullptr);
// Image input: forward-projects first (the acquisition step).
std::pair<Image, ReconReport> reconstruct(const Image& ldct_image, const nn::ParamStore& params,
                                          const RunConfig& cfg,
                                          const Image* ground_truth = nullptr);

}  // namespace fdct
