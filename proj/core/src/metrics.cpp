#include "fdct/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fdct/errors.hpp"

namespace fdct {

double mse(const Grid2& a, const Grid2& b) {
    if (!a.same_shape(b)) throw ShapeError("mse: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double d = a.v[i] - b.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.v.size());
}

double psnr(const Grid2& a, const Grid2& b, double data_range) {
    if (!(data_range > 0.0)) throw DomainError("psnr: data_range must be > 0");
    const double m = mse(a, b);
    if (m < 1e-12) return 99.0;
    return 10.0 * std::log10(data_range * data_range / m);
}

double ssim(const Grid2& a, const Grid2& b, double data_range) {
    if (!a.same_shape(b)) throw ShapeError("ssim: shape mismatch");
    if (!(data_range > 0.0)) throw DomainError("ssim: data_range must be > 0");
    std::int64_t win = 11;
    const std::int64_t min_dim = std::min(a.rows, a.cols);
    if (win > min_dim) win = min_dim % 2 == 0 ? min_dim - 1 : min_dim;
    if (win < 1) throw ShapeError("ssim: image too small");
    const std::int64_t half = win / 2;
    const double sigma = 1.5;

    std::vector<double> kernel(static_cast<std::size_t>(win * win));
    double ksum = 0.0;
    for (std::int64_t i = 0; i < win; ++i)
        for (std::int64_t j = 0; j < win; ++j) {
            const double dy = static_cast<double>(i - half);
            const double dx = static_cast<double>(j - half);
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            kernel[static_cast<std::size_t>(i * win + j)] = v;
            ksum += v;
        }
    for (auto& v : kernel) v /= ksum;

    const double c1 = (0.01 * data_range) * (0.01 * data_range);
    const double c2 = (0.03 * data_range) * (0.03 * data_range);

    double acc = 0.0;
    std::int64_t count = 0;
    for (std::int64_t r = half; r < a.rows - half; ++r) {
        for (std::int64_t c = half; c < a.cols - half; ++c) {
            double mu_a = 0.0, mu_b = 0.0;
            for (std::int64_t i = 0; i < win; ++i)
                for (std::int64_t j = 0; j < win; ++j) {
                    const double k = kernel[static_cast<std::size_t>(i * win + j)];
                    mu_a += k * a.at(r + i - half, c + j - half);
                    mu_b += k * b.at(r + i - half, c + j - half);
                }
            double var_a = 0.0, var_b = 0.0, cov = 0.0;
            for (std::int64_t i = 0; i < win; ++i)
                for (std::int64_t j = 0; j < win; ++j) {
                    const double k = kernel[static_cast<std::size_t>(i * win + j)];
                    const double da = a.at(r + i - half, c + j - half) - mu_a;
                    const double db = b.at(r + i - half, c + j - half) - mu_b;
                    var_a += k * da * da;
                    var_b += k * db * db;
                    cov += k * da * db;
                }
            const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
            const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
            acc += num / den;
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

double data_range_of(const Grid2& reference) {
    if (reference.v.empty()) throw ShapeError("data_range_of: empty grid");
    double lo = reference.v[0], hi = reference.v[0];
    for (double v : reference.v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi > lo ? hi - lo : 1.0;
}

}  // namespace fdct
