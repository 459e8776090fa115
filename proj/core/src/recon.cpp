#include "fdct/recon.hpp"

#include <cmath>

#include "fdct/denoiser/denoiser.hpp"
#include "fdct/diffusion.hpp"
#include "fdct/errors.hpp"
#include "fdct/fbp.hpp"
#include "fdct/metrics.hpp"
#include "fdct/projector.hpp"

namespace fdct {

namespace {
Sinogram as_sinogram(const Grid2& g) {
    Sinogram s(g.rows, g.cols);
    s.v = g.v;
    return s;
}
}  // namespace

std::pair<Image, ReconReport> reconstruct(const Sinogram& ldct, const nn::ParamStore& params,
                                          const RunConfig& cfg, const Image* ground_truth) {
    const FanGeometry geom = make_geometry(cfg);
    if (ldct.n_views() != geom.n_views || ldct.n_detectors() != geom.n_detectors)
        throw ShapeError("reconstruct: sinogram does not match the configured geometry");
    if (!ldct.all_finite()) throw NumericError("reconstruct: non-finite input");

    const std::int64_t total_steps = cfg.schedule.steps;
    const DenoiserConfig dcfg = make_denoiser_config(cfg);
    const TvConfig tvcfg{cfg.tv.alpha, cfg.tv.iterations, cfg.tv.epsilon};
    const PwlsMode mode = pwls_mode(cfg);

    const Sinogram& y = ldct;  // the measurement stays the fidelity anchor
    Sinogram x = ldct;
    ReconReport report;

    DiffusionSchedule sched;
    if (total_steps >= 1) sched = make_schedule(total_steps);
    for (std::int64_t t = total_steps; t >= 1; --t) {
        const Sinogram denoised = denoise(x, t, params, dcfg);
        if (!denoised.all_finite())
            throw NumericError("reconstruct: non-finite denoiser output at t=" +
                               std::to_string(t));
        Grid2 next;
        if (cfg.pwls.enabled) {
            const Grid2& weight_source = cfg.pwls.freeze_weights ? static_cast<const Grid2&>(y)
                                                                 : static_cast<const Grid2&>(denoised);
            const Grid2 w = pwls_weights(weight_source, cfg.dose.photon_count, cfg.pwls.eta);
            const Grid2 g = cfg.pwls.prior_in_update ? tv_subgradient(denoised, cfg.tv.epsilon)
                                                     : Grid2(denoised.rows, denoised.cols);
            next = pwls_update(denoised, y, w, cfg.pwls.mu, g, mode);
        } else {
            next = denoised;
        }
        if (cfg.tv.enabled) next = tv_step(next, tvcfg);
        if (cfg.recon.renoise && t >= 1) next = perturb(as_sinogram(next), y, t - 1, sched);
        if (!next.all_finite())
            throw NumericError("reconstruct: non-finite iterate at t=" + std::to_string(t));
        x = as_sinogram(next);

        const Grid2 resid = x - y;
        report.steps.push_back({t, resid.norm(), tv_seminorm(x, cfg.tv.epsilon)});
    }

    FbpOptions fopts;
    fopts.image_size = cfg.geometry.image_size;
    fopts.window = cfg.recon.fbp_window == "ramp" ? RampWindow::ramp : RampWindow::hann;
    Image img = fbp(x, geom, fopts);

    if (ground_truth) {
        const double range = data_range_of(*ground_truth);
        report.mse = mse(img, *ground_truth);
        report.psnr = psnr(img, *ground_truth, range);
        report.ssim = ssim(img, *ground_truth, range);
    }
    return {std::move(img), std::move(report)};
}

std::pair<Image, ReconReport> reconstruct(const Image& ldct_image, const nn::ParamStore& params,
                                          const RunConfig& cfg, const Image* ground_truth) {
    const Sinogram x_T = forward_project(ldct_image, make_geometry(cfg));
    return reconstruct(x_T, params, cfg, ground_truth);
}

}  // namespace fdct
