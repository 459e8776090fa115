// Independent reference implementations used only by tests. These stay
// deliberately naive (per-pixel clipping, O(n^4) DFTs, explicit pairwise
// attention loops) so they share no code path with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "fdct/geometry.hpp"
#include "fdct/grid.hpp"
#include "fdct/nn/ops.hpp"
#include "fdct/nn/params.hpp"

namespace oracles {

// Length of the segment [a,b] inside an axis-aligned box, via slab clipping.
inline double segment_box_length(fdct::Vec2 a, fdct::Vec2 b, double x0, double y0, double x1,
                                 double y1) {
    const double dx = b.x - a.x, dy = b.y - a.y;
    double tmin = 0.0, tmax = 1.0;
    auto clip = [&](double p, double d, double lo, double hi) {
        if (d == 0.0) return p >= lo && p <= hi;
        double t0 = (lo - p) / d, t1 = (hi - p) / d;
        if (t0 > t1) std::swap(t0, t1);
        tmin = std::max(tmin, t0);
        tmax = std::min(tmax, t1);
        return true;
    };
    if (!clip(a.x, dx, x0, x1) || !clip(a.y, dy, y0, y1)) return 0.0;
    if (tmin >= tmax) return 0.0;
    return (tmax - tmin) * std::hypot(dx, dy);
}

// Brute-force line integral: clip the ray against every pixel rectangle.
inline double ray_integral_bruteforce(const fdct::Image& img, fdct::Vec2 a, fdct::Vec2 b) {
    double acc = 0.0;
    for (std::int64_t r = 0; r < img.height(); ++r)
        for (std::int64_t c = 0; c < img.width(); ++c) {
            const double len = segment_box_length(
                a, b, static_cast<double>(c), static_cast<double>(r),
                static_cast<double>(c + 1), static_cast<double>(r + 1));
            acc += len * img.at(r, c);
        }
    return acc;
}

// Dense O(n^4) DFT low-pass: forward transform, elementwise gain, inverse.
inline fdct::Grid2 dft_lowpass_naive(const fdct::Grid2& x,
                                     const std::function<double(std::int64_t, std::int64_t)>& gain) {
    using cd = std::complex<double>;
    const std::int64_t h = x.rows, w = x.cols;
    const double two_pi = 2.0 * 3.14159265358979323846;
    std::vector<cd> spec(static_cast<std::size_t>(h * w));
    for (std::int64_t u = 0; u < h; ++u)
        for (std::int64_t v = 0; v < w; ++v) {
            cd acc{0.0, 0.0};
            for (std::int64_t r = 0; r < h; ++r)
                for (std::int64_t c = 0; c < w; ++c) {
                    const double ang = -two_pi * (static_cast<double>(u * r) / h +
                                                  static_cast<double>(v * c) / w);
                    acc += x.at(r, c) * cd{std::cos(ang), std::sin(ang)};
                }
            spec[static_cast<std::size_t>(u * w + v)] = acc * gain(u, v);
        }
    fdct::Grid2 out(h, w);
    for (std::int64_t r = 0; r < h; ++r)
        for (std::int64_t c = 0; c < w; ++c) {
            cd acc{0.0, 0.0};
            for (std::int64_t u = 0; u < h; ++u)
                for (std::int64_t v = 0; v < w; ++v) {
                    const double ang = two_pi * (static_cast<double>(u * r) / h +
                                                 static_cast<double>(v * c) / w);
                    acc += spec[static_cast<std::size_t>(u * w + v)] * cd{std::cos(ang), std::sin(ang)};
                }
            out.at(r, c) = acc.real() / static_cast<double>(h * w);
        }
    return out;
}

// Explicit pairwise multi-head attention with per-head slicing, mirroring
// softmax(QK^T/sqrt(dk))V + output projection + residual.
inline std::vector<double> mhsa_pairwise_oracle(const std::vector<double>& tokens, std::int64_t n,
                                                std::int64_t d, std::int64_t heads,
                                                const fdct::nn::ParamStore& P,
                                                const std::string& prefix) {
    const std::int64_t dk = d / heads;
    auto matvec = [&](const std::string& wname, const std::string& bname,
                      const std::vector<double>& in) {
        const auto& w = P.get(wname).data();
        const auto& bias = P.get(bname).data();
        std::vector<double> out(static_cast<std::size_t>(n * d));
        for (std::int64_t i = 0; i < n; ++i)
            for (std::int64_t j = 0; j < d; ++j) {
                double acc = bias[static_cast<std::size_t>(j)];
                for (std::int64_t k = 0; k < d; ++k)
                    acc += in[static_cast<std::size_t>(i * d + k)] *
                           w[static_cast<std::size_t>(k * d + j)];
                out[static_cast<std::size_t>(i * d + j)] = acc;
            }
        return out;
    };
    const auto q = matvec(prefix + ".wq", prefix + ".bq", tokens);
    const auto k = matvec(prefix + ".wk", prefix + ".bk", tokens);
    const auto v = matvec(prefix + ".wv", prefix + ".bv", tokens);

    std::vector<double> ctx(static_cast<std::size_t>(n * d), 0.0);
    for (std::int64_t head = 0; head < heads; ++head) {
        const std::int64_t off = head * dk;
        for (std::int64_t i = 0; i < n; ++i) {
            std::vector<double> logits(static_cast<std::size_t>(n));
            double mx = -1e300;
            for (std::int64_t j = 0; j < n; ++j) {
                double dot = 0.0;
                for (std::int64_t e = 0; e < dk; ++e)
                    dot += q[static_cast<std::size_t>(i * d + off + e)] *
                           k[static_cast<std::size_t>(j * d + off + e)];
                logits[static_cast<std::size_t>(j)] = dot / std::sqrt(static_cast<double>(dk));
                mx = std::max(mx, logits[static_cast<std::size_t>(j)]);
            }
            double denom = 0.0;
            for (auto& l : logits) {
                l = std::exp(l - mx);
                denom += l;
            }
            for (std::int64_t j = 0; j < n; ++j)
                for (std::int64_t e = 0; e < dk; ++e)
                    ctx[static_cast<std::size_t>(i * d + off + e)] +=
                        logits[static_cast<std::size_t>(j)] / denom *
                        v[static_cast<std::size_t>(j * d + off + e)];
        }
    }
    auto out = matvec(prefix + ".wo", prefix + ".bo", ctx);
    for (std::int64_t i = 0; i < n * d; ++i) out[static_cast<std::size_t>(i)] += tokens[static_cast<std::size_t>(i)];
    return out;
}

// From-scratch windowed SSIM with an explicit double loop.
inline double ssim_oracle(const fdct::Grid2& a, const fdct::Grid2& b, double range) {
    const std::int64_t win = 11, half = 5;
    const double sigma = 1.5;
    std::vector<double> kern(121);
    double ksum = 0.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
            const double v = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2.0 * sigma * sigma));
            kern[static_cast<std::size_t>(i * 11 + j)] = v;
            ksum += v;
        }
    for (auto& v : kern) v /= ksum;
    const double c1 = 0.01 * range * 0.01 * range;
    const double c2 = 0.03 * range * 0.03 * range;
    double acc = 0.0;
    std::int64_t count = 0;
    for (std::int64_t r = half; r < a.rows - half; ++r)
        for (std::int64_t c = half; c < a.cols - half; ++c) {
            double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double k = kern[static_cast<std::size_t>(i * 11 + j)];
                    ma += k * a.at(r + i - half, c + j - half);
                    mb += k * b.at(r + i - half, c + j - half);
                }
            for (int i = 0; i < win; ++i)
                for (int j = 0; j < win; ++j) {
                    const double k = kern[static_cast<std::size_t>(i * 11 + j)];
                    const double da = a.at(r + i - half, c + j - half) - ma;
                    const double db = b.at(r + i - half, c + j - half) - mb;
                    va += k * da * da;
                    vb += k * db * db;
                    cov += k * da * db;
                }
            acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            ++count;
        }
    return acc / static_cast<double>(count);
}

// Central finite differences through an arbitrary scalar-valued functional of
// one leaf tensor; compares against the analytic gradient already stored on
// the leaf. Returns the worst relative error over the probed coordinates.
inline double fd_gradient_error(fdct::nn::Tensor& leaf,
                                const std::function<double()>& forward_loss,
                                const std::vector<double>& analytic_grad,
                                const std::vector<std::size_t>& coords, double h = 1e-4) {
    double worst = 0.0;
    for (std::size_t c : coords) {
        const double keep = leaf.raw()[c];
        leaf.raw()[c] = keep + h;
        const double up = forward_loss();
        leaf.raw()[c] = keep - h;
        const double down = forward_loss();
        leaf.raw()[c] = keep;
        const double numeric = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(numeric), std::abs(analytic_grad[c]), 1e-8});
        worst = std::max(worst, std::abs(numeric - analytic_grad[c]) / denom);
    }
    return worst;
}

}  // namespace oracles
