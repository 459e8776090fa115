#include "fdct/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fdct/errors.hpp"

namespace fdct::nn {

namespace {

constexpr std::int64_t kParallelCutoff = 1 << 14;

int normalize_axis(int axis, int ndim) {
    if (axis < 0) axis += ndim;
    if (axis < 0 || axis >= ndim) throw ShapeError("axis out of range");
    return axis;
}

// Broadcast plan: output shape plus per-input element strides aligned to the
// output dims (stride 0 where an input dim is broadcast).
struct Bcast {
    Shape out;
    std::vector<std::int64_t> sa, sb;
};

Bcast broadcast_shapes(const Shape& a, const Shape& b) {
    const int nd = static_cast<int>(std::max(a.size(), b.size()));
    Bcast bc;
    bc.out.resize(nd);
    bc.sa.assign(nd, 0);
    bc.sb.assign(nd, 0);
    const auto stra = shape_strides(a);
    const auto strb = shape_strides(b);
    for (int i = 0; i < nd; ++i) {
        const int ia = static_cast<int>(a.size()) - nd + i;
        const int ib = static_cast<int>(b.size()) - nd + i;
        const std::int64_t da = ia >= 0 ? a[static_cast<std::size_t>(ia)] : 1;
        const std::int64_t db = ib >= 0 ? b[static_cast<std::size_t>(ib)] : 1;
        if (da != db && da != 1 && db != 1)
            throw ShapeError("broadcast mismatch: " + shape_str(a) + " vs " + shape_str(b));
        bc.out[static_cast<std::size_t>(i)] = std::max(da, db);
        bc.sa[static_cast<std::size_t>(i)] = (ia >= 0 && da != 1) ? stra[static_cast<std::size_t>(ia)] : 0;
        bc.sb[static_cast<std::size_t>(i)] = (ib >= 0 && db != 1) ? strb[static_cast<std::size_t>(ib)] : 0;
    }
    return bc;
}

// Visit every output element with the two mapped input offsets.
template <class F>
void for_each_bcast(const Shape& out, const std::vector<std::int64_t>& sa,
                    const std::vector<std::int64_t>& sb, F&& f) {
    const std::int64_t total = shape_numel(out);
    const int nd = static_cast<int>(out.size());
    if (nd == 0) {
        f(0, 0, 0);
        return;
    }
    std::vector<std::int64_t> idx(static_cast<std::size_t>(nd), 0);
    std::int64_t ia = 0, ib = 0;
    for (std::int64_t i = 0;;) {
        f(i, ia, ib);
        if (++i == total) break;
        for (int d = nd - 1; d >= 0; --d) {
            idx[static_cast<std::size_t>(d)]++;
            ia += sa[static_cast<std::size_t>(d)];
            ib += sb[static_cast<std::size_t>(d)];
            if (idx[static_cast<std::size_t>(d)] < out[static_cast<std::size_t>(d)]) break;
            ia -= sa[static_cast<std::size_t>(d)] * out[static_cast<std::size_t>(d)];
            ib -= sb[static_cast<std::size_t>(d)] * out[static_cast<std::size_t>(d)];
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }
}

bool same_shape(const Shape& a, const Shape& b) { return a == b; }

using BinFwd = double (*)(double, double);

template <BinFwd FWD, class BackA, class BackB>
Tensor binary_op(const Tensor& a, const Tensor& b, BackA&& back_a, BackB&& back_b) {
    auto an = a.node();
    auto bn = b.node();
    if (same_shape(an->shape, bn->shape)) {
        std::vector<double> out(an->value.size());
        const double* pa = an->value.data();
        const double* pb = bn->value.data();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = FWD(pa[i], pb[i]);
        return make_op(an->shape, std::move(out), {an, bn},
                       [an, bn, back_a, back_b](Node& n) {
                           const std::size_t sz = n.value.size();
                           if (an->requires_grad) {
                               an->ensure_grad();
                               for (std::size_t i = 0; i < sz; ++i)
                                   an->grad[i] += back_a(n.grad[i], an->value[i], bn->value[i], n.value[i]);
                           }
                           if (bn->requires_grad) {
                               bn->ensure_grad();
                               for (std::size_t i = 0; i < sz; ++i)
                                   bn->grad[i] += back_b(n.grad[i], an->value[i], bn->value[i], n.value[i]);
                           }
                       });
    }
    Bcast bc = broadcast_shapes(an->shape, bn->shape);
    std::vector<double> out(static_cast<std::size_t>(shape_numel(bc.out)));
    const double* pa = an->value.data();
    const double* pb = bn->value.data();
    for_each_bcast(bc.out, bc.sa, bc.sb, [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
        out[static_cast<std::size_t>(i)] = FWD(pa[static_cast<std::size_t>(ia)], pb[static_cast<std::size_t>(ib)]);
    });
    return make_op(bc.out, std::move(out), {an, bn},
                   [an, bn, bc, back_a, back_b](Node& n) {
                       if (an->requires_grad) an->ensure_grad();
                       if (bn->requires_grad) bn->ensure_grad();
                       for_each_bcast(bc.out, bc.sa, bc.sb,
                                      [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
                                          const double g = n.grad[static_cast<std::size_t>(i)];
                                          const double av = an->value[static_cast<std::size_t>(ia)];
                                          const double bv = bn->value[static_cast<std::size_t>(ib)];
                                          const double ov = n.value[static_cast<std::size_t>(i)];
                                          if (an->requires_grad)
                                              an->grad[static_cast<std::size_t>(ia)] += back_a(g, av, bv, ov);
                                          if (bn->requires_grad)
                                              bn->grad[static_cast<std::size_t>(ib)] += back_b(g, av, bv, ov);
                                      });
                   });
}

double fwd_add(double x, double y) { return x + y; }
double fwd_sub(double x, double y) { return x - y; }
double fwd_mul(double x, double y) { return x * y; }
double fwd_div(double x, double y) { return x / y; }

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    return binary_op<fwd_add>(
        a, b, [](double g, double, double, double) { return g; },
        [](double g, double, double, double) { return g; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
    return binary_op<fwd_sub>(
        a, b, [](double g, double, double, double) { return g; },
        [](double g, double, double, double) { return -g; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
    return binary_op<fwd_mul>(
        a, b, [](double g, double, double bv, double) { return g * bv; },
        [](double g, double av, double, double) { return g * av; });
}

Tensor divide(const Tensor& a, const Tensor& b) {
    return binary_op<fwd_div>(
        a, b, [](double g, double, double bv, double) { return g / bv; },
        [](double g, double, double bv, double ov) { return -g * ov / bv; });
}

Tensor scale(const Tensor& a, double s) {
    auto an = a.node();
    std::vector<double> out(an->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = an->value[i] * s;
    return make_op(an->shape, std::move(out), {an}, [an, s](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i] * s;
    });
}

Tensor add_scalar(const Tensor& a, double s) {
    auto an = a.node();
    std::vector<double> out(an->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = an->value[i] + s;
    return make_op(an->shape, std::move(out), {an}, [an](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i];
    });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor relu(const Tensor& a) {
    auto an = a.node();
    std::vector<double> out(an->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = an->value[i] > 0.0 ? an->value[i] : 0.0;
    return make_op(an->shape, std::move(out), {an}, [an](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i)
            if (an->value[i] > 0.0) an->grad[i] += n.grad[i];
    });
}

Tensor absval(const Tensor& a) {
    auto an = a.node();
    std::vector<double> out(an->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::abs(an->value[i]);
    return make_op(an->shape, std::move(out), {an}, [an](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const double x = an->value[i];
            if (x > 0.0)
                an->grad[i] += n.grad[i];
            else if (x < 0.0)
                an->grad[i] -= n.grad[i];
        }
    });
}

Tensor gelu(const Tensor& a) {
    auto an = a.node();
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    std::vector<double> out(an->value.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = an->value[i];
        out[i] = 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
    }
    return make_op(an->shape, std::move(out), {an}, [an, inv_sqrt2](Node& n) {
        an->ensure_grad();
        const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
        for (std::size_t i = 0; i < n.grad.size(); ++i) {
            const double x = an->value[i];
            const double cdf = 0.5 * (1.0 + std::erf(x * inv_sqrt2));
            const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
            an->grad[i] += n.grad[i] * (cdf + x * pdf);
        }
    });
}

namespace {
// Decompose a shape around an axis into (outer, len, inner) extents.
struct AxisSplit {
    std::int64_t outer, len, inner;
};
AxisSplit split_axis(const Shape& s, int axis) {
    AxisSplit sp{1, s[static_cast<std::size_t>(axis)], 1};
    for (int i = 0; i < axis; ++i) sp.outer *= s[static_cast<std::size_t>(i)];
    for (int i = axis + 1; i < static_cast<int>(s.size()); ++i) sp.inner *= s[static_cast<std::size_t>(i)];
    return sp;
}
}  // namespace

Tensor softmax(const Tensor& a, int axis) {
    auto an = a.node();
    const int ax = normalize_axis(axis, static_cast<int>(an->shape.size()));
    const AxisSplit sp = split_axis(an->shape, ax);
    std::vector<double> out(an->value.size());
    const double* px = an->value.data();
    for (std::int64_t o = 0; o < sp.outer; ++o) {
        for (std::int64_t in = 0; in < sp.inner; ++in) {
            const std::int64_t base = o * sp.len * sp.inner + in;
            double mx = -std::numeric_limits<double>::infinity();
            for (std::int64_t l = 0; l < sp.len; ++l)
                mx = std::max(mx, px[base + l * sp.inner]);
            double sum = 0.0;
            for (std::int64_t l = 0; l < sp.len; ++l) {
                const double e = std::exp(px[base + l * sp.inner] - mx);
                out[static_cast<std::size_t>(base + l * sp.inner)] = e;
                sum += e;
            }
            const double inv = 1.0 / sum;
            for (std::int64_t l = 0; l < sp.len; ++l)
                out[static_cast<std::size_t>(base + l * sp.inner)] *= inv;
        }
    }
    return make_op(an->shape, std::move(out), {an}, [an, sp](Node& n) {
        an->ensure_grad();
        for (std::int64_t o = 0; o < sp.outer; ++o) {
            for (std::int64_t in = 0; in < sp.inner; ++in) {
                const std::int64_t base = o * sp.len * sp.inner + in;
                double dot = 0.0;
                for (std::int64_t l = 0; l < sp.len; ++l) {
                    const std::size_t i = static_cast<std::size_t>(base + l * sp.inner);
                    dot += n.grad[i] * n.value[i];
                }
                for (std::int64_t l = 0; l < sp.len; ++l) {
                    const std::size_t i = static_cast<std::size_t>(base + l * sp.inner);
                    an->grad[i] += n.value[i] * (n.grad[i] - dot);
                }
            }
        }
    });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
    auto xn = x.node();
    auto gn = gamma.node();
    auto bn = beta.node();
    const std::int64_t d = xn->shape.back();
    if (gn->shape != Shape{d} || bn->shape != Shape{d})
        throw ShapeError("layer_norm: gamma/beta must be [last_dim]");
    const std::int64_t rows = shape_numel(xn->shape) / d;

    std::vector<double> out(xn->value.size());
    std::vector<double> inv_std(static_cast<std::size_t>(rows));
    std::vector<double> xhat(xn->value.size());
    for (std::int64_t r = 0; r < rows; ++r) {
        const double* px = xn->value.data() + r * d;
        double mean = 0.0;
        for (std::int64_t j = 0; j < d; ++j) mean += px[j];
        mean /= static_cast<double>(d);
        double var = 0.0;
        for (std::int64_t j = 0; j < d; ++j) {
            const double c = px[j] - mean;
            var += c * c;
        }
        var /= static_cast<double>(d);
        const double is = 1.0 / std::sqrt(var + eps);
        inv_std[static_cast<std::size_t>(r)] = is;
        for (std::int64_t j = 0; j < d; ++j) {
            const double h = (px[j] - mean) * is;
            xhat[static_cast<std::size_t>(r * d + j)] = h;
            out[static_cast<std::size_t>(r * d + j)] = gn->value[static_cast<std::size_t>(j)] * h +
                                                       bn->value[static_cast<std::size_t>(j)];
        }
    }
    return make_op(xn->shape, std::move(out), {xn, gn, bn},
                   [xn, gn, bn, rows, d, xhat = std::move(xhat),
                    inv_std = std::move(inv_std)](Node& n) {
                       if (xn->requires_grad) xn->ensure_grad();
                       if (gn->requires_grad) gn->ensure_grad();
                       if (bn->requires_grad) bn->ensure_grad();
                       for (std::int64_t r = 0; r < rows; ++r) {
                           const double* g = n.grad.data() + r * d;
                           const double* xh = xhat.data() + r * d;
                           if (gn->requires_grad || bn->requires_grad) {
                               for (std::int64_t j = 0; j < d; ++j) {
                                   if (gn->requires_grad) gn->grad[static_cast<std::size_t>(j)] += g[j] * xh[j];
                                   if (bn->requires_grad) bn->grad[static_cast<std::size_t>(j)] += g[j];
                               }
                           }
                           if (xn->requires_grad) {
                               double mean_h = 0.0, mean_hx = 0.0;
                               for (std::int64_t j = 0; j < d; ++j) {
                                   const double h = gn->value[static_cast<std::size_t>(j)] * g[j];
                                   mean_h += h;
                                   mean_hx += h * xh[j];
                               }
                               mean_h /= static_cast<double>(d);
                               mean_hx /= static_cast<double>(d);
                               const double is = inv_std[static_cast<std::size_t>(r)];
                               for (std::int64_t j = 0; j < d; ++j) {
                                   const double h = gn->value[static_cast<std::size_t>(j)] * g[j];
                                   xn->grad[static_cast<std::size_t>(r * d + j)] +=
                                       (h - mean_h - xh[j] * mean_hx) * is;
                               }
                           }
                       }
                   });
}

namespace {

// Batched matmul bookkeeping: leading dims broadcast, last two multiply.
struct MatmulPlan {
    Shape out;
    std::int64_t m, k, n, batches;
    std::vector<std::int64_t> a_off, b_off;  // per-batch element offsets
};

MatmulPlan matmul_plan(const Shape& a, const Shape& b) {
    if (a.size() < 2 || b.size() < 2) throw ShapeError("matmul: inputs must be at least 2-D");
    MatmulPlan p;
    p.m = a[a.size() - 2];
    p.k = a[a.size() - 1];
    const std::int64_t bk = b[b.size() - 2];
    p.n = b[b.size() - 1];
    if (p.k != bk)
        throw ShapeError("matmul: inner dims differ: " + shape_str(a) + " x " + shape_str(b));
    Shape abatch(a.begin(), a.end() - 2), bbatch(b.begin(), b.end() - 2);
    Bcast bc = broadcast_shapes(abatch, bbatch);
    p.out = bc.out;
    p.out.push_back(p.m);
    p.out.push_back(p.n);
    p.batches = shape_numel(bc.out);
    p.a_off.resize(static_cast<std::size_t>(p.batches));
    p.b_off.resize(static_cast<std::size_t>(p.batches));
    const std::int64_t a_mat = p.m * p.k, b_mat = p.k * p.n;
    for_each_bcast(bc.out, bc.sa, bc.sb, [&](std::int64_t i, std::int64_t ia, std::int64_t ib) {
        p.a_off[static_cast<std::size_t>(i)] = ia * a_mat;
        p.b_off[static_cast<std::size_t>(i)] = ib * b_mat;
    });
    return p;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
    auto an = a.node();
    auto bn = b.node();
    MatmulPlan p = matmul_plan(an->shape, bn->shape);
    std::vector<double> out(static_cast<std::size_t>(p.batches * p.m * p.n), 0.0);
    const double* pa = an->value.data();
    const double* pb = bn->value.data();
    double* po = out.data();
    const std::int64_t rows_total = p.batches * p.m;
#pragma omp parallel for schedule(static) if (rows_total * p.n * p.k > kParallelCutoff)
    for (std::int64_t rm = 0; rm < rows_total; ++rm) {
        const std::int64_t batch = rm / p.m;
        const std::int64_t i = rm % p.m;
        const double* arow = pa + p.a_off[static_cast<std::size_t>(batch)] + i * p.k;
        const double* bmat = pb + p.b_off[static_cast<std::size_t>(batch)];
        double* orow = po + rm * p.n;
        for (std::int64_t kk = 0; kk < p.k; ++kk) {
            const double av = arow[kk];
            const double* brow = bmat + kk * p.n;
            for (std::int64_t j = 0; j < p.n; ++j) orow[j] += av * brow[j];
        }
    }
    return make_op(p.out, std::move(out), {an, bn}, [an, bn, p](Node& nd) {
        const double* pg = nd.grad.data();
        if (an->requires_grad) {
            an->ensure_grad();
            // dA[i,k] += sum_j g[i,j] B[k,j is column]  (B row k contiguous)
            for (std::int64_t batch = 0; batch < p.batches; ++batch) {
                const double* bmat = bn->value.data() + p.b_off[static_cast<std::size_t>(batch)];
                const double* gmat = pg + batch * p.m * p.n;
                double* da = an->grad.data() + p.a_off[static_cast<std::size_t>(batch)];
                for (std::int64_t i = 0; i < p.m; ++i) {
                    const double* grow = gmat + i * p.n;
                    double* darow = da + i * p.k;
                    for (std::int64_t kk = 0; kk < p.k; ++kk) {
                        const double* brow = bmat + kk * p.n;
                        double acc = 0.0;
                        for (std::int64_t j = 0; j < p.n; ++j) acc += grow[j] * brow[j];
                        darow[kk] += acc;
                    }
                }
            }
        }
        if (bn->requires_grad) {
            bn->ensure_grad();
            for (std::int64_t batch = 0; batch < p.batches; ++batch) {
                const double* amat = an->value.data() + p.a_off[static_cast<std::size_t>(batch)];
                const double* gmat = pg + batch * p.m * p.n;
                double* db = bn->grad.data() + p.b_off[static_cast<std::size_t>(batch)];
                for (std::int64_t i = 0; i < p.m; ++i) {
                    const double* arow = amat + i * p.k;
                    const double* grow = gmat + i * p.n;
                    for (std::int64_t kk = 0; kk < p.k; ++kk) {
                        const double av = arow[kk];
                        double* dbrow = db + kk * p.n;
                        for (std::int64_t j = 0; j < p.n; ++j) dbrow[j] += av * grow[j];
                    }
                }
            }
        }
    });
}

Tensor reshape(const Tensor& a, const Shape& s) {
    auto an = a.node();
    if (shape_numel(s) != a.numel())
        throw ShapeError("reshape: cannot view " + shape_str(an->shape) + " as " + shape_str(s));
    std::vector<double> out(an->value);
    return make_op(s, std::move(out), {an}, [an](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i) an->grad[i] += n.grad[i];
    });
}

Tensor permute(const Tensor& a, const std::vector<int>& perm) {
    auto an = a.node();
    const int nd = static_cast<int>(an->shape.size());
    if (static_cast<int>(perm.size()) != nd) throw ShapeError("permute: wrong rank");
    Shape out_shape(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) out_shape[static_cast<std::size_t>(i)] = an->shape[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
    const auto in_strides = shape_strides(an->shape);
    std::vector<std::int64_t> gather(static_cast<std::size_t>(nd));
    for (int i = 0; i < nd; ++i) gather[static_cast<std::size_t>(i)] = in_strides[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];

    const std::int64_t total = a.numel();
    std::vector<double> out(static_cast<std::size_t>(total));
    std::vector<std::int64_t> src_index(static_cast<std::size_t>(total));
    std::vector<std::int64_t> idx(static_cast<std::size_t>(nd), 0);
    std::int64_t src = 0;
    for (std::int64_t i = 0;;) {
        out[static_cast<std::size_t>(i)] = an->value[static_cast<std::size_t>(src)];
        src_index[static_cast<std::size_t>(i)] = src;
        if (++i == total) break;
        for (int d = nd - 1; d >= 0; --d) {
            idx[static_cast<std::size_t>(d)]++;
            src += gather[static_cast<std::size_t>(d)];
            if (idx[static_cast<std::size_t>(d)] < out_shape[static_cast<std::size_t>(d)]) break;
            src -= gather[static_cast<std::size_t>(d)] * out_shape[static_cast<std::size_t>(d)];
            idx[static_cast<std::size_t>(d)] = 0;
        }
    }
    return make_op(out_shape, std::move(out), {an}, [an, src_index = std::move(src_index)](Node& n) {
        an->ensure_grad();
        for (std::size_t i = 0; i < n.grad.size(); ++i)
            an->grad[static_cast<std::size_t>(src_index[i])] += n.grad[i];
    });
}

Tensor slice(const Tensor& a, int axis, std::int64_t start, std::int64_t len) {
    auto an = a.node();
    const int ax = normalize_axis(axis, static_cast<int>(an->shape.size()));
    const std::int64_t extent = an->shape[static_cast<std::size_t>(ax)];
    if (start < 0 || len < 0 || start + len > extent) throw ShapeError("slice: out of range");
    const AxisSplit sp = split_axis(an->shape, ax);
    Shape out_shape = an->shape;
    out_shape[static_cast<std::size_t>(ax)] = len;
    std::vector<double> out(static_cast<std::size_t>(sp.outer * len * sp.inner));
    for (std::int64_t o = 0; o < sp.outer; ++o)
        for (std::int64_t l = 0; l < len; ++l)
            std::copy_n(an->value.data() + (o * extent + start + l) * sp.inner, sp.inner,
                        out.data() + (o * len + l) * sp.inner);
    return make_op(out_shape, std::move(out), {an}, [an, sp, start, len, extent](Node& n) {
        an->ensure_grad();
        for (std::int64_t o = 0; o < sp.outer; ++o)
            for (std::int64_t l = 0; l < len; ++l) {
                const double* g = n.grad.data() + (o * len + l) * sp.inner;
                double* dst = an->grad.data() + (o * extent + start + l) * sp.inner;
                for (std::int64_t i = 0; i < sp.inner; ++i) dst[i] += g[i];
            }
    });
}

Tensor concat(const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    const int ax = normalize_axis(axis, parts[0].ndim());
    Shape out_shape = parts[0].shape();
    std::int64_t total_axis = 0;
    for (const auto& t : parts) {
        Shape s = t.shape();
        if (s.size() != out_shape.size()) throw ShapeError("concat: rank mismatch");
        for (int i = 0; i < static_cast<int>(s.size()); ++i)
            if (i != ax && s[static_cast<std::size_t>(i)] != out_shape[static_cast<std::size_t>(i)])
                throw ShapeError("concat: non-axis dims differ");
        total_axis += s[static_cast<std::size_t>(ax)];
    }
    out_shape[static_cast<std::size_t>(ax)] = total_axis;
    const AxisSplit sp = split_axis(out_shape, ax);

    std::vector<double> out(static_cast<std::size_t>(shape_numel(out_shape)));
    std::vector<NodePtr> nodes;
    std::vector<std::int64_t> lens;
    for (const auto& t : parts) {
        nodes.push_back(t.node());
        lens.push_back(t.shape()[static_cast<std::size_t>(ax)]);
    }
    for (std::int64_t o = 0; o < sp.outer; ++o) {
        std::int64_t pos = 0;
        for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
            const std::int64_t plen = lens[pi];
            std::copy_n(nodes[pi]->value.data() + o * plen * sp.inner, plen * sp.inner,
                        out.data() + (o * sp.len + pos) * sp.inner);
            pos += plen;
        }
    }
    return make_op(out_shape, std::move(out), nodes, [nodes, lens, sp](Node& n) {
        for (std::int64_t o = 0; o < sp.outer; ++o) {
            std::int64_t pos = 0;
            for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
                const std::int64_t plen = lens[pi];
                if (nodes[pi]->requires_grad) {
                    nodes[pi]->ensure_grad();
                    const double* g = n.grad.data() + (o * sp.len + pos) * sp.inner;
                    double* dst = nodes[pi]->grad.data() + o * plen * sp.inner;
                    for (std::int64_t i = 0; i < plen * sp.inner; ++i) dst[i] += g[i];
                }
                pos += plen;
            }
        }
    });
}

namespace {
Tensor reduce_impl(const Tensor& a, int axis, bool keepdim, bool mean) {
    auto an = a.node();
    const int ax = normalize_axis(axis, static_cast<int>(an->shape.size()));
    const AxisSplit sp = split_axis(an->shape, ax);
    Shape out_shape;
    for (int i = 0; i < static_cast<int>(an->shape.size()); ++i) {
        if (i == ax) {
            if (keepdim) out_shape.push_back(1);
        } else {
            out_shape.push_back(an->shape[static_cast<std::size_t>(i)]);
        }
    }
    if (out_shape.empty()) out_shape.push_back(1);
    const double denom = mean ? static_cast<double>(sp.len) : 1.0;
    std::vector<double> out(static_cast<std::size_t>(sp.outer * sp.inner), 0.0);
    for (std::int64_t o = 0; o < sp.outer; ++o)
        for (std::int64_t l = 0; l < sp.len; ++l) {
            const double* src = an->value.data() + (o * sp.len + l) * sp.inner;
            double* dst = out.data() + o * sp.inner;
            for (std::int64_t i = 0; i < sp.inner; ++i) dst[i] += src[i];
        }
    if (mean)
        for (auto& v : out) v /= denom;
    return make_op(out_shape, std::move(out), {an}, [an, sp, denom](Node& n) {
        an->ensure_grad();
        for (std::int64_t o = 0; o < sp.outer; ++o)
            for (std::int64_t l = 0; l < sp.len; ++l) {
                const double* g = n.grad.data() + o * sp.inner;
                double* dst = an->grad.data() + (o * sp.len + l) * sp.inner;
                for (std::int64_t i = 0; i < sp.inner; ++i) dst[i] += g[i] / denom;
            }
    });
}
}  // namespace

Tensor reduce_sum(const Tensor& a, int axis, bool keepdim) {
    return reduce_impl(a, axis, keepdim, false);
}
Tensor reduce_mean(const Tensor& a, int axis, bool keepdim) {
    return reduce_impl(a, axis, keepdim, true);
}

Tensor sum_all(const Tensor& a) {
    auto an = a.node();
    double s = 0.0;
    for (double v : an->value) s += v;
    return make_op({1}, {s}, {an}, [an](Node& n) {
        an->ensure_grad();
        const double g = n.grad[0];
        for (auto& gv : an->grad) gv += g;
    });
}

Tensor mean_all(const Tensor& a) {
    auto an = a.node();
    const double denom = static_cast<double>(a.numel());
    double s = 0.0;
    for (double v : an->value) s += v;
    return make_op({1}, {s / denom}, {an}, [an, denom](Node& n) {
        an->ensure_grad();
        const double g = n.grad[0] / denom;
        for (auto& gv : an->grad) gv += g;
    });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& bias) {
    auto xn = x.node();
    auto wn = w.node();
    if (xn->shape.size() != 3 || wn->shape.size() != 4)
        throw ShapeError("conv2d: expects x [Cin,H,W], w [Cout,Cin,k,k]");
    const std::int64_t ci = xn->shape[0], h = xn->shape[1], wd = xn->shape[2];
    const std::int64_t co = wn->shape[0], kk = wn->shape[2];
    if (wn->shape[1] != ci || wn->shape[3] != kk)
        throw ShapeError("conv2d: weight shape mismatch: " + shape_str(wn->shape));
    if (kk % 2 == 0) throw DomainError("conv2d: kernel size must be odd");
    NodePtr bnode = bias.defined() ? bias.node() : nullptr;
    if (bnode && bnode->shape != Shape{co}) throw ShapeError("conv2d: bias must be [Cout]");
    const std::int64_t c = kk / 2;

    std::vector<double> out(static_cast<std::size_t>(co * h * wd), 0.0);
#pragma omp parallel for schedule(static) if (co * ci * h * wd * kk * kk > kParallelCutoff)
    for (std::int64_t oc = 0; oc < co; ++oc) {
        double* oplane = out.data() + oc * h * wd;
        if (bnode) {
            const double bv = bnode->value[static_cast<std::size_t>(oc)];
            for (std::int64_t i = 0; i < h * wd; ++i) oplane[i] = bv;
        }
        for (std::int64_t icc = 0; icc < ci; ++icc) {
            const double* iplane = xn->value.data() + icc * h * wd;
            const double* wker = wn->value.data() + (oc * ci + icc) * kk * kk;
            for (std::int64_t p = 0; p < kk; ++p) {
                const std::int64_t dy = p - c;
                const std::int64_t y0 = std::max<std::int64_t>(0, -dy);
                const std::int64_t y1 = std::min(h, h - dy);
                for (std::int64_t q = 0; q < kk; ++q) {
                    const std::int64_t dx = q - c;
                    const double wv = wker[p * kk + q];
                    if (wv == 0.0) continue;
                    const std::int64_t x0 = std::max<std::int64_t>(0, -dx);
                    const std::int64_t x1 = std::min(wd, wd - dx);
                    for (std::int64_t y = y0; y < y1; ++y) {
                        double* orow = oplane + y * wd;
                        const double* irow = iplane + (y + dy) * wd + dx;
                        for (std::int64_t xx = x0; xx < x1; ++xx) orow[xx] += wv * irow[xx];
                    }
                }
            }
        }
    }
    std::vector<NodePtr> parents{xn, wn};
    if (bnode) parents.push_back(bnode);
    return make_op({co, h, wd}, std::move(out), std::move(parents),
                   [xn, wn, bnode, ci, co, h, wd, kk, c](Node& n) {
                       const double* g = n.grad.data();
                       if (xn->requires_grad) {
                           xn->ensure_grad();
#pragma omp parallel for schedule(static) if (co * ci * h * wd * kk * kk > kParallelCutoff)
                           for (std::int64_t icc = 0; icc < ci; ++icc) {
                               double* dplane = xn->grad.data() + icc * h * wd;
                               for (std::int64_t oc = 0; oc < co; ++oc) {
                                   const double* gplane = g + oc * h * wd;
                                   const double* wker = wn->value.data() + (oc * ci + icc) * kk * kk;
                                   for (std::int64_t p = 0; p < kk; ++p) {
                                       const std::int64_t dy = p - c;
                                       const std::int64_t y0 = std::max<std::int64_t>(0, -dy);
                                       const std::int64_t y1 = std::min(h, h - dy);
                                       for (std::int64_t q = 0; q < kk; ++q) {
                                           const std::int64_t dx = q - c;
                                           const double wv = wker[p * kk + q];
                                           if (wv == 0.0) continue;
                                           const std::int64_t x0 = std::max<std::int64_t>(0, -dx);
                                           const std::int64_t x1 = std::min(wd, wd - dx);
                                           for (std::int64_t y = y0; y < y1; ++y) {
                                               const double* grow = gplane + y * wd;
                                               double* drow = dplane + (y + dy) * wd + dx;
                                               for (std::int64_t xx = x0; xx < x1; ++xx)
                                                   drow[xx] += wv * grow[xx];
                                           }
                                       }
                                   }
                               }
                           }
                       }
                       if (wn->requires_grad) {
                           wn->ensure_grad();
#pragma omp parallel for schedule(static) if (co * ci * h * wd * kk * kk > kParallelCutoff)
                           for (std::int64_t oc = 0; oc < co; ++oc) {
                               const double* gplane = g + oc * h * wd;
                               for (std::int64_t icc = 0; icc < ci; ++icc) {
                                   const double* iplane = xn->value.data() + icc * h * wd;
                                   double* dker = wn->grad.data() + (oc * ci + icc) * kk * kk;
                                   for (std::int64_t p = 0; p < kk; ++p) {
                                       const std::int64_t dy = p - c;
                                       const std::int64_t y0 = std::max<std::int64_t>(0, -dy);
                                       const std::int64_t y1 = std::min(h, h - dy);
                                       for (std::int64_t q = 0; q < kk; ++q) {
                                           const std::int64_t dx = q - c;
                                           const std::int64_t x0 = std::max<std::int64_t>(0, -dx);
                                           const std::int64_t x1 = std::min(wd, wd - dx);
                                           double acc = 0.0;
                                           for (std::int64_t y = y0; y < y1; ++y) {
                                               const double* grow = gplane + y * wd;
                                               const double* irow = iplane + (y + dy) * wd + dx;
                                               for (std::int64_t xx = x0; xx < x1; ++xx)
                                                   acc += grow[xx] * irow[xx];
                                           }
                                           dker[p * kk + q] += acc;
                                       }
                                   }
                               }
                           }
                       }
                       if (bnode && bnode->requires_grad) {
                           bnode->ensure_grad();
                           for (std::int64_t oc = 0; oc < co; ++oc) {
                               const double* gplane = g + oc * h * wd;
                               double acc = 0.0;
                               for (std::int64_t i = 0; i < h * wd; ++i) acc += gplane[i];
                               bnode->grad[static_cast<std::size_t>(oc)] += acc;
                           }
                       }
                   });
}

Tensor avg_pool2(const Tensor& x) {
    auto xn = x.node();
    if (xn->shape.size() != 3) throw ShapeError("avg_pool2: expects [C,H,W]");
    const std::int64_t ch = xn->shape[0], h = xn->shape[1], w = xn->shape[2];
    if (h % 2 != 0 || w % 2 != 0) throw ShapeError("avg_pool2: H and W must be even");
    const std::int64_t oh = h / 2, ow = w / 2;
    std::vector<double> out(static_cast<std::size_t>(ch * oh * ow));
    for (std::int64_t cch = 0; cch < ch; ++cch) {
        const double* ip = xn->value.data() + cch * h * w;
        double* op = out.data() + cch * oh * ow;
        for (std::int64_t y = 0; y < oh; ++y)
            for (std::int64_t xx = 0; xx < ow; ++xx)
                op[y * ow + xx] = 0.25 * (ip[(2 * y) * w + 2 * xx] + ip[(2 * y) * w + 2 * xx + 1] +
                                          ip[(2 * y + 1) * w + 2 * xx] +
                                          ip[(2 * y + 1) * w + 2 * xx + 1]);
    }
    return make_op({ch, oh, ow}, std::move(out), {xn}, [xn, ch, h, w, oh, ow](Node& n) {
        xn->ensure_grad();
        for (std::int64_t cch = 0; cch < ch; ++cch) {
            double* dp = xn->grad.data() + cch * h * w;
            const double* gp = n.grad.data() + cch * oh * ow;
            for (std::int64_t y = 0; y < oh; ++y)
                for (std::int64_t xx = 0; xx < ow; ++xx) {
                    const double gq = 0.25 * gp[y * ow + xx];
                    dp[(2 * y) * w + 2 * xx] += gq;
                    dp[(2 * y) * w + 2 * xx + 1] += gq;
                    dp[(2 * y + 1) * w + 2 * xx] += gq;
                    dp[(2 * y + 1) * w + 2 * xx + 1] += gq;
                }
        }
    });
}

Tensor upsample2(const Tensor& x) {
    auto xn = x.node();
    if (xn->shape.size() != 3) throw ShapeError("upsample2: expects [C,H,W]");
    const std::int64_t ch = xn->shape[0], h = xn->shape[1], w = xn->shape[2];
    const std::int64_t oh = 2 * h, ow = 2 * w;
    std::vector<double> out(static_cast<std::size_t>(ch * oh * ow));
    for (std::int64_t cch = 0; cch < ch; ++cch) {
        const double* ip = xn->value.data() + cch * h * w;
        double* op = out.data() + cch * oh * ow;
        for (std::int64_t y = 0; y < oh; ++y)
            for (std::int64_t xx = 0; xx < ow; ++xx) op[y * ow + xx] = ip[(y / 2) * w + xx / 2];
    }
    return make_op({ch, oh, ow}, std::move(out), {xn}, [xn, ch, h, w, oh, ow](Node& n) {
        xn->ensure_grad();
        for (std::int64_t cch = 0; cch < ch; ++cch) {
            double* dp = xn->grad.data() + cch * h * w;
            const double* gp = n.grad.data() + cch * oh * ow;
            for (std::int64_t y = 0; y < oh; ++y)
                for (std::int64_t xx = 0; xx < ow; ++xx)
                    dp[(y / 2) * w + xx / 2] += gp[y * ow + xx];
        }
    });
}

std::pair<Tensor, Tensor> unfold(const Tensor& x, int k, int r) {
    auto xn = x.node();
    if (xn->shape.size() != 3) throw ShapeError("unfold: expects [H,W,D]");
    if (k % 2 == 0) throw DomainError("unfold: window size must be odd");
    if (k < 1 || r < 1) throw DomainError("unfold: k and r must be >= 1");
    const std::int64_t h = xn->shape[0], w = xn->shape[1], d = xn->shape[2];
    const std::int64_t taps = static_cast<std::int64_t>(k) * k;
    const std::int64_t half = k / 2;

    std::vector<double> out(static_cast<std::size_t>(h * w * taps * d), 0.0);
    std::vector<double> mask(static_cast<std::size_t>(h * w * taps), 0.0);
    for (std::int64_t m = 0; m < h; ++m)
        for (std::int64_t n = 0; n < w; ++n)
            for (std::int64_t p = -half; p <= half; ++p)
                for (std::int64_t q = -half; q <= half; ++q) {
                    const std::int64_t mm = m + p * r;
                    const std::int64_t nn = n + q * r;
                    const std::int64_t tap = (p + half) * k + (q + half);
                    const std::int64_t oi = ((m * w + n) * taps + tap);
                    if (mm < 0 || mm >= h || nn < 0 || nn >= w) continue;
                    mask[static_cast<std::size_t>(oi)] = 1.0;
                    std::copy_n(xn->value.data() + (mm * w + nn) * d, d, out.data() + oi * d);
                }
    Tensor mask_t = Tensor::from_data({h, w, taps}, std::move(mask));
    Tensor vals = make_op({h, w, taps, d}, std::move(out), {xn}, [xn, h, w, d, k, r, taps, half](Node& n) {
        xn->ensure_grad();
        for (std::int64_t m = 0; m < h; ++m)
            for (std::int64_t nn0 = 0; nn0 < w; ++nn0)
                for (std::int64_t p = -half; p <= half; ++p)
                    for (std::int64_t q = -half; q <= half; ++q) {
                        const std::int64_t mm = m + p * r;
                        const std::int64_t nn = nn0 + q * r;
                        if (mm < 0 || mm >= h || nn < 0 || nn >= w) continue;
                        const std::int64_t tap = (p + half) * k + (q + half);
                        const double* g = n.grad.data() + ((m * w + nn0) * taps + tap) * d;
                        double* dst = xn->grad.data() + (mm * w + nn) * d;
                        for (std::int64_t j = 0; j < d; ++j) dst[j] += g[j];
                    }
    });
    return {vals, mask_t};
}

Tensor select_row(const Tensor& table, std::int64_t row) {
    auto tn = table.node();
    if (tn->shape.size() != 2) throw ShapeError("select_row: expects [R,D]");
    const std::int64_t rows = tn->shape[0], d = tn->shape[1];
    if (row < 0 || row >= rows) throw DomainError("select_row: row out of range");
    std::vector<double> out(tn->value.data() + row * d, tn->value.data() + (row + 1) * d);
    return make_op({d}, std::move(out), {tn}, [tn, row, d](Node& n) {
        tn->ensure_grad();
        double* dst = tn->grad.data() + row * d;
        for (std::int64_t j = 0; j < d; ++j) dst[j] += n.grad[static_cast<std::size_t>(j)];
    });
}

}  // namespace fdct::nn
