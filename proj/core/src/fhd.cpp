#include "fdct/denoiser/fhd.hpp"

#include "fdct/denoiser/attention.hpp"
#include "fdct/errors.hpp"

namespace fdct {

using nn::ParamStore;
using nn::Tensor;

namespace {
std::string module_prefix(const std::string& prefix, int j) {
    return prefix + ".m" + (j < 10 ? "0" : "") + std::to_string(j);
}
std::string skip_prefix(const std::string& prefix, int src, int tgt) {
    return prefix + ".skip." + std::to_string(src) + "_" + std::to_string(tgt);
}
}  // namespace

void register_fhd_params(ParamStore& P, const std::string& prefix, const FhdConfig& cfg,
                         std::int64_t total_steps) {
    cfg.validate();
    const std::int64_t d = cfg.embed_dim;
    const std::int64_t pp = cfg.patch_size * cfg.patch_size;
    P.add(prefix + ".patch.w", {pp, d}, nn::Init::kaiming_uniform, pp);
    P.add(prefix + ".patch.b", {d}, nn::Init::zero);
    P.add(prefix + ".unpatch.w", {d, pp}, nn::Init::kaiming_uniform, d);
    P.add(prefix + ".unpatch.b", {pp}, nn::Init::zero);
    P.add(prefix + ".time.table", {total_steps + 1, d}, nn::Init::small_normal);

    for (int j = 1; j <= static_cast<int>(cfg.module_layout.size()); ++j) {
        const std::string mp = module_prefix(prefix, j);
        register_attention_params(P, mp + ".attn", d);
        register_ff_params(P, mp + ".ff", d);
        if (cfg.module_layout[static_cast<std::size_t>(j - 1)] == AttnModuleKind::mhsa) {
            P.add(mp + ".ln1.g", {d}, nn::Init::one);
            P.add(mp + ".ln1.b", {d}, nn::Init::zero);
        } else {
            P.add(mp + ".time.w", {d, d}, nn::Init::kaiming_uniform, d);
            P.add(mp + ".time.b", {d}, nn::Init::zero);
        }
    }
    for (const auto& [src, tgt] : cfg.skip_links) {
        P.add(skip_prefix(prefix, src, tgt) + ".w", {2 * d, d}, nn::Init::kaiming_uniform, 2 * d);
        P.add(skip_prefix(prefix, src, tgt) + ".b", {d}, nn::Init::zero);
    }
}

Tensor fhd_forward(const Tensor& g_high, std::int64_t t, const ParamStore& P,
                   const std::string& prefix, const FhdConfig& cfg) {
    const std::int64_t h = g_high.dim(0), w = g_high.dim(1);
    const std::int64_t ps = cfg.patch_size;
    if (h % ps != 0 || w % ps != 0)
        throw ShapeError("fhd_forward: spatial dims must be divisible by patch_size");
    const std::int64_t ht = h / ps, wt = w / ps;
    const std::int64_t n = ht * wt;
    const std::int64_t d = cfg.embed_dim;

    // Patchify: [H,W] -> [Ht,ps,Wt,ps] -> [Ht,Wt,ps,ps] -> [N, ps*ps].
    Tensor x = nn::reshape(g_high, {ht, ps, wt, ps});
    x = nn::permute(x, {0, 2, 1, 3});
    x = nn::reshape(x, {n, ps * ps});
    x = nn::add(nn::matmul(x, P.get(prefix + ".patch.w")), P.get(prefix + ".patch.b"));

    Tensor time_tok =
        nn::reshape(nn::select_row(P.get(prefix + ".time.table"), t), {1, d});

    const int n_modules = static_cast<int>(cfg.module_layout.size());
    std::vector<Tensor> module_out(static_cast<std::size_t>(n_modules) + 1);
    for (int j = 1; j <= n_modules; ++j) {
        // Merge any skip link landing on this module's input.
        for (const auto& [src, tgt] : cfg.skip_links) {
            if (tgt != j) continue;
            Tensor merged = nn::concat({x, module_out[static_cast<std::size_t>(src)]}, 1);
            const std::string sp = skip_prefix(prefix, src, tgt);
            x = nn::add(nn::matmul(merged, P.get(sp + ".w")), P.get(sp + ".b"));
        }
        const std::string mp = module_prefix(prefix, j);
        if (cfg.module_layout[static_cast<std::size_t>(j - 1)] == AttnModuleKind::mhsa) {
            // The timestep joins the sequence as one extra token.
            Tensor seq = nn::concat({x, time_tok}, 0);  // [N+1, D]
            Tensor normed = nn::layer_norm(seq, P.get(mp + ".ln1.g"), P.get(mp + ".ln1.b"));
            seq = nn::add(seq, mhsa_no_residual(normed, P, mp + ".attn", cfg.n_heads));
            x = nn::slice(seq, 0, 0, n);
            x = feed_forward(x, P, mp + ".ff");
        } else {
            Tensor bias = nn::add(nn::matmul(time_tok, P.get(mp + ".time.w")),
                                  P.get(mp + ".time.b"));  // [1,D]
            x = nn::add(x, bias);
            Tensor grid = nn::reshape(x, {ht, wt, d});
            grid = mhda_block(grid, P, mp, cfg.n_heads, static_cast<int>(cfg.window),
                              cfg.dilations);
            x = nn::reshape(grid, {n, d});
        }
        module_out[static_cast<std::size_t>(j)] = x;
    }

    Tensor y = nn::add(nn::matmul(x, P.get(prefix + ".unpatch.w")), P.get(prefix + ".unpatch.b"));
    y = nn::reshape(y, {ht, wt, ps, ps});
    y = nn::permute(y, {0, 2, 1, 3});
    y = nn::reshape(y, {h, w});
    return nn::add(g_high, y);
}

}  // namespace fdct
