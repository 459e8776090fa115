#include "fdct/frequency.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include "fdct/errors.hpp"

namespace fdct {

namespace {
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

double centered_freq(std::int64_t idx, std::int64_t n) {
    const std::int64_t signed_idx = idx <= n / 2 ? idx : idx - n;
    return static_cast<double>(signed_idx) / static_cast<double>(n);
}
}  // namespace

SpectrumMask gaussian_mask(std::int64_t h, std::int64_t w, double sigma) {
    if (h < 1 || w < 1) throw DomainError("gaussian_mask: dimensions must be >= 1");
    if (!(sigma > 0.0)) throw DomainError("gaussian_mask: sigma must be > 0");
    SpectrumMask mask;
    mask.height = h;
    mask.width = w;
    mask.sigma = sigma;
    mask.gains.resize(static_cast<std::size_t>(h * w));
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (std::int64_t u = 0; u < h; ++u) {
        const double fu = centered_freq(u, h);
        for (std::int64_t v = 0; v < w; ++v) {
            const double fv = centered_freq(v, w);
            mask.gains[static_cast<std::size_t>(u * w + v)] = std::exp(-(fu * fu + fv * fv) * inv);
        }
    }
    return mask;
}

Sinogram gaussian_lowpass(const Sinogram& x, double sigma) {
    if (!x.all_finite()) throw NumericError("decompose: input has non-finite values");
    const std::int64_t h = x.rows, w = x.cols;
    const SpectrumMask mask = gaussian_mask(h, w, sigma);

    // Real-to-complex transform keeps the inverse exactly real; the
    // Gaussian gains are even so Hermitian symmetry is preserved.
    const std::int64_t wc = w / 2 + 1;
    std::vector<double> buf(x.v);
    std::vector<std::complex<double>> spec(static_cast<std::size_t>(h * wc));
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fwd = fftw_plan_dft_r2c_2d(static_cast<int>(h), static_cast<int>(w), buf.data(),
                                   reinterpret_cast<fftw_complex*>(spec.data()), FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(static_cast<int>(h), static_cast<int>(w),
                                   reinterpret_cast<fftw_complex*>(spec.data()), buf.data(),
                                   FFTW_ESTIMATE);
    }
    fftw_execute(fwd);
    for (std::int64_t u = 0; u < h; ++u)
        for (std::int64_t v = 0; v < wc; ++v)
            spec[static_cast<std::size_t>(u * wc + v)] *= mask.gain(u, v);
    fftw_execute(bwd);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }

    Sinogram low(h, w);
    const double norm = 1.0 / static_cast<double>(h * w);
    for (std::size_t i = 0; i < low.v.size(); ++i) low.v[i] = buf[i] * norm;
    return low;
}

FrequencyTriple decompose(const Sinogram& x, double sigma) {
    FrequencyTriple t;
    t.low = gaussian_lowpass(x, sigma);
    // High band as the exact complement so low + high == full bit-for-bit
    // up to a single subtraction.
    t.high = Sinogram(x.rows, x.cols);
    for (std::size_t i = 0; i < x.v.size(); ++i) t.high.v[i] = x.v[i] - t.low.v[i];
    t.full = x;
    return t;
}

}  // namespace fdct
