#include "fdct/denoiser/unet.hpp"

#include <cmath>

#include "fdct/errors.hpp"

namespace fdct {

using nn::ParamStore;
using nn::Tensor;

namespace {
std::int64_t stage_channels(const UnetConfig& cfg, std::int64_t stage) {
    return cfg.base_channels << stage;
}

void register_conv(ParamStore& P, const std::string& name, std::int64_t out_ch, std::int64_t in_ch,
                   std::int64_t k) {
    P.add(name + ".w", {out_ch, in_ch, k, k}, nn::Init::kaiming_uniform, in_ch * k * k);
    P.add(name + ".b", {out_ch}, nn::Init::zero);
}

Tensor conv(const Tensor& x, const ParamStore& P, const std::string& name) {
    return nn::conv2d(x, P.get(name + ".w"), P.get(name + ".b"));
}
}  // namespace

Tensor sinusoidal_time_embedding(std::int64_t t, std::int64_t dim) {
    std::vector<double> emb(static_cast<std::size_t>(dim));
    const std::int64_t half = dim / 2;
    for (std::int64_t i = 0; i < half; ++i) {
        const double freq =
            std::exp(-std::log(10000.0) * static_cast<double>(i) / static_cast<double>(half));
        emb[static_cast<std::size_t>(2 * i)] = std::sin(static_cast<double>(t) * freq);
        emb[static_cast<std::size_t>(2 * i + 1)] = std::cos(static_cast<double>(t) * freq);
    }
    if (dim % 2 == 1) emb[static_cast<std::size_t>(dim - 1)] = 0.0;
    return Tensor::from_data({1, dim}, std::move(emb));
}

void register_unet_params(ParamStore& P, const std::string& prefix, const UnetConfig& cfg) {
    cfg.validate();
    for (std::int64_t s = 0; s <= cfg.depth; ++s) {
        const std::int64_t ch = stage_channels(cfg, s);
        const std::int64_t in_ch = s == 0 ? 1 : stage_channels(cfg, s - 1);
        const std::string sp = prefix + ".enc" + std::to_string(s);
        register_conv(P, sp + ".c1", ch, in_ch, 3);
        register_conv(P, sp + ".c2", ch, ch, 3);
        P.add(sp + ".time.w", {cfg.time_embed_dim, ch}, nn::Init::kaiming_uniform,
              cfg.time_embed_dim);
        P.add(sp + ".time.b", {ch}, nn::Init::zero);
    }
    for (std::int64_t s = cfg.depth - 1; s >= 0; --s) {
        const std::int64_t ch = stage_channels(cfg, s);
        const std::int64_t in_ch = stage_channels(cfg, s + 1) + ch;  // upsampled + skip
        const std::string sp = prefix + ".dec" + std::to_string(s);
        register_conv(P, sp + ".c1", ch, in_ch, 3);
        register_conv(P, sp + ".c2", ch, ch, 3);
    }
    register_conv(P, prefix + ".out", 1, cfg.base_channels, 3);
}

Tensor unet_forward(const Tensor& x, std::int64_t t, const ParamStore& P,
                    const std::string& prefix, const UnetConfig& cfg) {
    const std::int64_t h = x.dim(0), w = x.dim(1);
    const std::int64_t div = std::int64_t{1} << cfg.depth;
    if (h % div != 0 || w % div != 0)
        throw ShapeError("unet_forward: spatial dims must be divisible by 2^depth");

    Tensor temb = sinusoidal_time_embedding(t, cfg.time_embed_dim);  // [1,E]
    auto stage_bias = [&](const std::string& sp, std::int64_t ch) {
        Tensor b = nn::add(nn::matmul(temb, P.get(sp + ".time.w")), P.get(sp + ".time.b"));
        return nn::reshape(b, {ch, 1, 1});
    };

    Tensor hcur = nn::reshape(x, {1, h, w});
    std::vector<Tensor> skips;
    for (std::int64_t s = 0; s < cfg.depth; ++s) {
        const std::string sp = prefix + ".enc" + std::to_string(s);
        hcur = nn::gelu(conv(hcur, P, sp + ".c1"));
        hcur = nn::add(hcur, stage_bias(sp, stage_channels(cfg, s)));
        hcur = nn::gelu(conv(hcur, P, sp + ".c2"));
        skips.push_back(hcur);
        hcur = nn::avg_pool2(hcur);
    }
    {
        const std::string sp = prefix + ".enc" + std::to_string(cfg.depth);
        hcur = nn::gelu(conv(hcur, P, sp + ".c1"));
        hcur = nn::add(hcur, stage_bias(sp, stage_channels(cfg, cfg.depth)));
        hcur = nn::gelu(conv(hcur, P, sp + ".c2"));
    }
    for (std::int64_t s = cfg.depth - 1; s >= 0; --s) {
        const std::string sp = prefix + ".dec" + std::to_string(s);
        hcur = nn::upsample2(hcur);
        hcur = nn::concat({hcur, skips[static_cast<std::size_t>(s)]}, 0);
        hcur = nn::gelu(conv(hcur, P, sp + ".c1"));
        hcur = nn::gelu(conv(hcur, P, sp + ".c2"));
    }
    Tensor out = conv(hcur, P, prefix + ".out");
    return nn::add(x, nn::reshape(out, {h, w}));
}

}  // namespace fdct
