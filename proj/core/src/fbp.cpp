#include "fdct/fbp.hpp"

#include <fftw3.h>

#include <bit>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

#include "fdct/errors.hpp"

namespace fdct {

namespace {

// FFTW plan creation is not thread-safe; execution of a private plan is.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// Frequency response of the band-limited ramp kernel on a length-M circle,
// optionally apodized. Returned as M/2+1 real gains (the response is real
// and even).
std::vector<double> ramp_response(std::size_t m, double ds, RampWindow window) {
    std::vector<double> kern(m, 0.0);
    const double pi = std::numbers::pi;
    kern[0] = 1.0 / (4.0 * ds * ds);
    for (std::size_t i = 1; i < m / 2 + 1; ++i) {
        if (i % 2 == 1) {
            const double v = -1.0 / (pi * pi * static_cast<double>(i) * static_cast<double>(i) * ds * ds);
            kern[i] = v;
            kern[m - i] = v;
        }
    }
    std::vector<double> resp(m / 2 + 1, 0.0);
    // Real-even input: response[k] = sum_j kern[j] cos(2 pi j k / m).
    std::vector<std::complex<double>> out(m / 2 + 1);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(m), kern.data(),
                                              reinterpret_cast<fftw_complex*>(out.data()),
                                              FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
    }
    for (std::size_t k = 0; k < resp.size(); ++k) {
        double g = out[k].real();
        if (window == RampWindow::hann) {
            const double f = static_cast<double>(k) / static_cast<double>(m / 2);
            g *= 0.5 * (1.0 + std::cos(pi * f));
        }
        resp[k] = g;
    }
    return resp;
}

}  // namespace

Image fbp(const Sinogram& sino, const FanGeometry& geom, const FbpOptions& opts) {
    geom.validate();
    if (sino.n_views() != geom.n_views || sino.n_detectors() != geom.n_detectors)
        throw ShapeError("fbp: sinogram dimensions do not match geometry");

    const std::int64_t n = opts.image_size > 0 ? opts.image_size : geom.n_detectors / 2;
    if (n < 1) throw DomainError("fbp: image size must be >= 1");

    const std::int64_t nd = geom.n_detectors;
    const std::int64_t nv = geom.n_views;
    const double px = geom.pixel_size_for(n);
    // All lengths below are in pixel units so the output matches the
    // projector's attenuation-per-pixel-length convention.
    const double dist = geom.source_to_center / px;
    const double ds =
        geom.detector_cell_width() * geom.source_to_center / geom.source_to_detector() / px;

    const std::size_t m = std::bit_ceil(static_cast<std::size_t>(2 * nd));
    const auto resp = ramp_response(m, ds, opts.window);

    // Cosine-weight and ramp-filter every view row.
    std::vector<double> filtered(static_cast<std::size_t>(nv * nd));
    {
        std::vector<double> row(m);
        std::vector<std::complex<double>> spec(m / 2 + 1);
        fftw_plan fwd, bwd;
        {
            std::lock_guard<std::mutex> lock(fftw_mutex());
            fwd = fftw_plan_dft_r2c_1d(static_cast<int>(m), row.data(),
                                       reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_1d(static_cast<int>(m),
                                       reinterpret_cast<fftw_complex*>(spec.data()), row.data(),
                                       FFTW_ESTIMATE);
        }
        for (std::int64_t v = 0; v < nv; ++v) {
            std::fill(row.begin(), row.end(), 0.0);
            for (std::int64_t d = 0; d < nd; ++d) {
                const double s = (static_cast<double>(d) + 0.5 - static_cast<double>(nd) / 2.0) * ds;
                row[static_cast<std::size_t>(d)] =
                    sino.at(v, d) * dist / std::sqrt(dist * dist + s * s);
            }
            fftw_execute(fwd);
            for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= resp[k];
            fftw_execute(bwd);
            const double scale = ds / static_cast<double>(m);  // conv step x inverse-FFT norm
            for (std::int64_t d = 0; d < nd; ++d)
                filtered[static_cast<std::size_t>(v * nd + d)] = row[static_cast<std::size_t>(d)] * scale;
        }
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    // Distance-weighted back-projection.
    Image img(n, n);
    img.pixel_size = px;
    const double dbeta = geom.angular_range / static_cast<double>(nv);
    const double half = static_cast<double>(n) / 2.0;
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < n; ++r) {
        const double y = half - (static_cast<double>(r) + 0.5);
        for (std::int64_t c = 0; c < n; ++c) {
            const double x = (static_cast<double>(c) + 0.5) - half;
            double acc = 0.0;
            for (std::int64_t v = 0; v < nv; ++v) {
                const double beta = geom.view_angle(v);
                const double cb = std::cos(beta), sb = std::sin(beta);
                const double depth = dist - (x * cb + y * sb);
                if (depth <= 1e-9) continue;
                const double off = -x * sb + y * cb;
                const double s_virt = off * dist / depth;
                const double di = s_virt / ds + static_cast<double>(nd) / 2.0 - 0.5;
                const std::int64_t d0 = static_cast<std::int64_t>(std::floor(di));
                if (d0 < -1 || d0 > nd - 1) continue;
                const double frac = di - static_cast<double>(d0);
                const double p0 = d0 >= 0 ? filtered[static_cast<std::size_t>(v * nd + d0)] : 0.0;
                const double p1 =
                    d0 + 1 < nd ? filtered[static_cast<std::size_t>(v * nd + d0 + 1)] : 0.0;
                const double val = p0 + frac * (p1 - p0);
                acc += val * dist * dist / (depth * depth);
            }
            img.at(r, c) = acc * dbeta / 2.0;
        }
    }
    return img;
}

}  // namespace fdct
