#include "fdct/denoiser/ldf.hpp"

#include "fdct/errors.hpp"

namespace fdct {

using nn::ParamStore;
using nn::Tensor;

void register_ldf_params(ParamStore& P, const std::string& prefix, const LdfConfig& cfg) {
    cfg.validate();
    for (std::int64_t i = 0; i < cfg.n_layers; ++i) {
        const std::int64_t in_ch = i == 0 ? 3 : cfg.hidden_channels;
        const std::int64_t out_ch = i == cfg.n_layers - 1 ? 1 : cfg.hidden_channels;
        const std::string name = prefix + ".l" + std::to_string(i);
        P.add(name + ".w", {out_ch, in_ch, cfg.kernel, cfg.kernel}, nn::Init::kaiming_uniform,
              in_ch * cfg.kernel * cfg.kernel);
        P.add(name + ".b", {out_ch}, nn::Init::zero);
    }
}

Tensor ldf_fuse(const Tensor& g_high, const Tensor& g_low, const Tensor& g_full,
                const ParamStore& P, const std::string& prefix, const LdfConfig& cfg) {
    if (g_high.shape() != g_low.shape() || g_low.shape() != g_full.shape())
        throw ShapeError("ldf_fuse: branch shapes differ");
    const std::int64_t h = g_high.dim(0), w = g_high.dim(1);
    Tensor x = nn::concat({nn::reshape(g_high, {1, h, w}), nn::reshape(g_low, {1, h, w}),
                           nn::reshape(g_full, {1, h, w})},
                          0);
    for (std::int64_t i = 0; i < cfg.n_layers; ++i) {
        const std::string name = prefix + ".l" + std::to_string(i);
        x = nn::conv2d(x, P.get(name + ".w"), P.get(name + ".b"));
        if (i < cfg.n_layers - 1) x = nn::gelu(x);
    }
    return nn::reshape(x, {h, w});
}

}  // namespace fdct
