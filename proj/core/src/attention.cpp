#include "fdct/denoiser/attention.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct {

using nn::ParamStore;
using nn::Tensor;

void register_attention_params(ParamStore& P, const std::string& prefix, std::int64_t dim) {
    for (const char* name : {"wq", "wk", "wv", "wo"})
        P.add(prefix + "." + name, {dim, dim}, nn::Init::kaiming_uniform, dim);
    for (const char* name : {"bq", "bk", "bv", "bo"})
        P.add(prefix + "." + name, {dim}, nn::Init::zero);
}

void register_ff_params(ParamStore& P, const std::string& prefix, std::int64_t dim) {
    P.add(prefix + ".ln.g", {dim}, nn::Init::one);
    P.add(prefix + ".ln.b", {dim}, nn::Init::zero);
    P.add(prefix + ".w1", {dim, 4 * dim}, nn::Init::kaiming_uniform, dim);
    P.add(prefix + ".b1", {4 * dim}, nn::Init::zero);
    P.add(prefix + ".w2", {4 * dim, dim}, nn::Init::kaiming_uniform, 4 * dim);
    P.add(prefix + ".b2", {dim}, nn::Init::zero);
}

Tensor feed_forward(const Tensor& x, const ParamStore& P, const std::string& prefix) {
    const std::int64_t d = x.dim(-1);
    const std::int64_t rows = x.numel() / d;
    Tensor flat = nn::reshape(x, {rows, d});
    Tensor h = nn::layer_norm(flat, P.get(prefix + ".ln.g"), P.get(prefix + ".ln.b"));
    h = nn::add(nn::matmul(h, P.get(prefix + ".w1")), P.get(prefix + ".b1"));
    h = nn::gelu(h);
    h = nn::add(nn::matmul(h, P.get(prefix + ".w2")), P.get(prefix + ".b2"));
    return nn::reshape(nn::add(flat, h), x.shape());
}

namespace {

struct Qkv {
    Tensor q, k, v;
};

Qkv project_qkv(const Tensor& flat_tokens, const ParamStore& P, const std::string& prefix) {
    Qkv out;
    out.q = nn::add(nn::matmul(flat_tokens, P.get(prefix + ".wq")), P.get(prefix + ".bq"));
    out.k = nn::add(nn::matmul(flat_tokens, P.get(prefix + ".wk")), P.get(prefix + ".bk"));
    out.v = nn::add(nn::matmul(flat_tokens, P.get(prefix + ".wv")), P.get(prefix + ".bv"));
    return out;
}

// Scaled-dot-product attention over a local dilated window for a token grid
// whose channel block holds `heads` heads. q/k/v are [H, W, C].
Tensor local_window_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                              std::int64_t heads, int omega, int r) {
    const std::int64_t h = q.dim(0), w = q.dim(1), c = q.dim(2);
    const std::int64_t dk = c / heads;
    const std::int64_t taps = static_cast<std::int64_t>(omega) * omega;

    auto [ku, mask] = nn::unfold(k, omega, r);  // [H,W,taps,C], [H,W,taps]
    auto [vu, mask2] = nn::unfold(v, omega, r);
    (void)mask2;
    // [H,W,taps,C] -> [H,W,heads,taps,dk]
    Tensor kh = nn::permute(nn::reshape(ku, {h, w, taps, heads, dk}), {0, 1, 3, 2, 4});
    Tensor vh = nn::permute(nn::reshape(vu, {h, w, taps, heads, dk}), {0, 1, 3, 2, 4});
    Tensor qh = nn::reshape(q, {h, w, heads, 1, dk});

    Tensor logits = nn::reduce_sum(nn::mul(qh, kh), /*axis=*/4, /*keepdim=*/false);
    logits = nn::scale(logits, 1.0 / std::sqrt(static_cast<double>(dk)));  // [H,W,heads,taps]
    // Invalid taps get a -inf-like bias so softmax assigns them exactly zero.
    Tensor bias = nn::scale(nn::add_scalar(mask, -1.0), 1e30);
    logits = nn::add(logits, nn::reshape(bias, {h, w, 1, taps}));
    Tensor attn = nn::softmax(logits, -1);

    Tensor ctx = nn::reduce_sum(nn::mul(nn::reshape(attn, {h, w, heads, taps, 1}), vh),
                                /*axis=*/3, /*keepdim=*/false);  // [H,W,heads,dk]
    return nn::reshape(ctx, {h, w, c});
}

// Shared core so a single-rate MHDA partition and a standalone SSLA follow
// the exact same op sequence.
Tensor ssla_no_residual(const Tensor& grid, const ParamStore& P, const std::string& prefix,
                        std::int64_t n_heads, int omega, const std::vector<int>& dilations) {
    if (omega % 2 == 0) throw DomainError("ssla: window must be odd");
    if (dilations.empty()) throw ConfigError("dilations", "at least one dilation rate required");
    for (int r : dilations)
        if (r < 1) throw DomainError("ssla: dilation rate must be >= 1");
    const std::int64_t h = grid.dim(0), w = grid.dim(1), d = grid.dim(2);
    if (d % n_heads != 0) throw ConfigError("n_heads", "embed_dim must be divisible by n_heads");
    const std::int64_t groups = static_cast<std::int64_t>(dilations.size());
    if (n_heads % groups != 0)
        throw ConfigError("dilations", "head count must divide evenly across dilation rates");
    const std::int64_t heads_per_group = n_heads / groups;
    const std::int64_t dk = d / n_heads;

    Tensor flat = nn::reshape(grid, {h * w, d});
    Qkv p = project_qkv(flat, P, prefix);

    std::vector<Tensor> parts;
    for (std::int64_t g = 0; g < groups; ++g) {
        auto group_slice = [&](const Tensor& t) {
            if (groups == 1) return nn::reshape(t, {h, w, d});
            Tensor heads_view = nn::reshape(t, {h * w, n_heads, dk});
            Tensor sl = nn::slice(heads_view, 1, g * heads_per_group, heads_per_group);
            return nn::reshape(sl, {h, w, heads_per_group * dk});
        };
        Tensor qg = group_slice(p.q);
        Tensor kg = group_slice(p.k);
        Tensor vg = group_slice(p.v);
        parts.push_back(local_window_attention(qg, kg, vg, heads_per_group, omega,
                                               dilations[static_cast<std::size_t>(g)]));
    }
    Tensor ctx = groups == 1 ? parts[0] : nn::concat(parts, 2);
    Tensor out = nn::add(nn::matmul(nn::reshape(ctx, {h * w, d}), P.get(prefix + ".wo")),
                         P.get(prefix + ".bo"));
    return nn::reshape(out, {h, w, d});
}

}  // namespace

Tensor mhsa_no_residual(const Tensor& tokens, const ParamStore& P, const std::string& prefix,
                        std::int64_t n_heads) {
    const std::int64_t n = tokens.dim(0), d = tokens.dim(1);
    if (d % n_heads != 0) throw ConfigError("n_heads", "embed_dim must be divisible by n_heads");
    const std::int64_t dk = d / n_heads;
    Qkv p = project_qkv(tokens, P, prefix);

    auto heads_first = [&](const Tensor& t) {
        return nn::permute(nn::reshape(t, {n, n_heads, dk}), {1, 0, 2});  // [h,N,dk]
    };
    Tensor qh = heads_first(p.q);
    Tensor kh = heads_first(p.k);
    Tensor vh = heads_first(p.v);

    Tensor logits = nn::matmul(qh, nn::permute(kh, {0, 2, 1}));  // [h,N,N]
    logits = nn::scale(logits, 1.0 / std::sqrt(static_cast<double>(dk)));
    Tensor attn = nn::softmax(logits, -1);
    Tensor ctx = nn::matmul(attn, vh);                       // [h,N,dk]
    ctx = nn::reshape(nn::permute(ctx, {1, 0, 2}), {n, d});  // [N,D]
    return nn::add(nn::matmul(ctx, P.get(prefix + ".wo")), P.get(prefix + ".bo"));
}

Tensor mhsa(const Tensor& tokens, const ParamStore& P, const std::string& prefix,
            std::int64_t n_heads) {
    return nn::add(tokens, mhsa_no_residual(tokens, P, prefix, n_heads));
}

Tensor ssla(const Tensor& grid, const ParamStore& P, const std::string& prefix,
            std::int64_t n_heads, int omega, int r) {
    return nn::add(grid, ssla_no_residual(grid, P, prefix, n_heads, omega, {r}));
}

Tensor mhda_block(const Tensor& grid, const ParamStore& P, const std::string& prefix,
                  std::int64_t n_heads, int omega, const std::vector<int>& dilations) {
    Tensor y =
        nn::add(grid, ssla_no_residual(grid, P, prefix + ".attn", n_heads, omega, dilations));
    return feed_forward(y, P, prefix + ".ff");
}

}  // namespace fdct
