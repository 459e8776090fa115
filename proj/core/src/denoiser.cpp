#include "fdct/denoiser/denoiser.hpp"

#include "fdct/denoiser/fhd.hpp"
#include "fdct/denoiser/ldf.hpp"
#include "fdct/denoiser/unet.hpp"
#include "fdct/errors.hpp"
#include "fdct/frequency.hpp"
#include "fdct/nn/ops.hpp"

namespace fdct {

using nn::ParamStore;
using nn::Tensor;

std::vector<AttnModuleKind> FhdConfig::default_layout() {
    // MHSA at {1,4,5,6,9,10}, MHDA at {2,3,7,8}.
    using K = AttnModuleKind;
    return {K::mhsa, K::mhda, K::mhda, K::mhsa, K::mhsa,
            K::mhsa, K::mhda, K::mhda, K::mhsa, K::mhsa};
}

void FhdConfig::validate() const {
    if (patch_size < 1) throw ConfigError("fhd.patch_size", "must be >= 1");
    if (embed_dim < 1) throw ConfigError("fhd.embed_dim", "must be >= 1");
    if (n_heads < 1) throw ConfigError("fhd.n_heads", "must be >= 1");
    if (embed_dim % n_heads != 0)
        throw ConfigError("fhd.embed_dim", "must be divisible by n_heads");
    if (window < 1 || window % 2 == 0) throw ConfigError("fhd.window", "must be odd and >= 1");
    if (module_layout.empty()) throw ConfigError("fhd.layout", "module layout is empty");
    if (dilations.empty()) throw ConfigError("fhd.dilations", "need at least one dilation rate");
    for (int r : dilations)
        if (r < 1) throw ConfigError("fhd.dilations", "rates must be >= 1");
    bool has_mhda = false;
    for (auto k : module_layout)
        if (k == AttnModuleKind::mhda) has_mhda = true;
    if (has_mhda && n_heads % static_cast<std::int64_t>(dilations.size()) != 0)
        throw ConfigError("fhd.dilations", "head count must divide evenly across dilation rates");
    const int n_modules = static_cast<int>(module_layout.size());
    for (const auto& [src, tgt] : skip_links) {
        if (src < 1 || src > n_modules || tgt < 1 || tgt > n_modules || src >= tgt)
            throw ConfigError("fhd.skips", "links must satisfy 1 <= source < target <= modules");
    }
}

void UnetConfig::validate() const {
    if (depth < 1) throw ConfigError("unet.depth", "must be >= 1");
    if (base_channels < 1) throw ConfigError("unet.base_channels", "must be >= 1");
    if (time_embed_dim < 2) throw ConfigError("unet.time_embed_dim", "must be >= 2");
}

void LdfConfig::validate() const {
    if (hidden_channels < 1) throw ConfigError("ldf.hidden_channels", "must be >= 1");
    if (n_layers < 1) throw ConfigError("ldf.n_layers", "must be >= 1");
    if (kernel < 1 || kernel % 2 == 0) throw ConfigError("ldf.kernel", "must be odd and >= 1");
}

void DenoiserConfig::validate() const {
    fhd.validate();
    unet.validate();
    ldf.validate();
    if (!(sigma > 0.0)) throw ConfigError("frequency.sigma", "must be > 0");
    if (total_steps < 1) throw ConfigError("schedule.total_steps", "must be >= 1");
    // With a disabled branch the configured fusion is moot (the partial-path
    // rule applies), except sum_lh which explicitly needs both branches.
    if (fusion == FusionMode::sum_lh && (!use_fhd || !use_fld))
        throw ConfigError("denoiser.fusion", "sum_lh fusion needs both fhd and fld branches");
}

std::string to_string(AttnModuleKind k) {
    return k == AttnModuleKind::mhsa ? "mhsa" : "mhda";
}
std::string to_string(FusionMode m) { return m == FusionMode::ldf ? "ldf" : "sum_lh"; }

void register_denoiser_params(ParamStore& P, const DenoiserConfig& cfg) {
    cfg.validate();
    if (cfg.use_fhd) register_fhd_params(P, "fhd", cfg.fhd, cfg.total_steps);
    if (cfg.use_fld) register_unet_params(P, "fld", cfg.unet);
    register_unet_params(P, "ffd", cfg.unet);
    if (cfg.use_fhd && cfg.use_fld && cfg.fusion == FusionMode::ldf)
        register_ldf_params(P, "ldf", cfg.ldf);
}

Tensor sinogram_to_tensor(const Sinogram& s) {
    return Tensor::from_data({s.rows, s.cols}, s.v);
}

Sinogram tensor_to_sinogram(const Tensor& t) {
    if (t.ndim() != 2) throw ShapeError("tensor_to_sinogram: expects a 2-D tensor");
    Sinogram s(t.dim(0), t.dim(1));
    s.v = t.data();
    return s;
}

Tensor denoise_t(const Sinogram& x_t, std::int64_t t, const ParamStore& P,
                 const DenoiserConfig& cfg) {
    if (!x_t.all_finite()) throw NumericError("denoise: input has non-finite values");
    if (t < 0 || t > cfg.total_steps) throw DomainError("denoise: t out of schedule range");
    const FrequencyTriple triple = decompose(x_t, cfg.sigma);
    Tensor g_high = sinogram_to_tensor(triple.high);
    Tensor g_low = sinogram_to_tensor(triple.low);
    Tensor g_full = sinogram_to_tensor(triple.full);

    Tensor den_full = unet_forward(g_full, t, P, "ffd", cfg.unet);
    if (!cfg.use_fhd && !cfg.use_fld) return den_full;  // fusion bypassed

    if (cfg.use_fhd && cfg.use_fld) {
        Tensor den_high = fhd_forward(g_high, t, P, "fhd", cfg.fhd);
        Tensor den_low = unet_forward(g_low, t, P, "fld", cfg.unet);
        if (cfg.fusion == FusionMode::sum_lh) return nn::add(den_low, den_high);
        return ldf_fuse(den_high, den_low, den_full, P, "ldf", cfg.ldf);
    }
    // One auxiliary branch only: average the full-frequency estimate with the
    // partial reconstruction (denoised band plus the raw complement band).
    if (cfg.use_fld) {
        Tensor den_low = unet_forward(g_low, t, P, "fld", cfg.unet);
        return nn::scale(nn::add(den_full, nn::add(den_low, g_high)), 0.5);
    }
    Tensor den_high = fhd_forward(g_high, t, P, "fhd", cfg.fhd);
    return nn::scale(nn::add(den_full, nn::add(den_high, g_low)), 0.5);
}

Sinogram denoise(const Sinogram& x_t, std::int64_t t, const ParamStore& P,
                 const DenoiserConfig& cfg) {
    nn::NoGradGuard guard;
    return tensor_to_sinogram(denoise_t(x_t, t, P, cfg));
}

}  // namespace fdct
