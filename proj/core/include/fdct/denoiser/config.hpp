#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fdct {

enum class AttnModuleKind { mhsa, mhda };

// High-frequency transformer denoiser layout. The default module sequence
// places global attention at positions {1,4,5,6,9,10} and dilated local
// attention at {2,3,7,8}, with long skip links merging shallow outputs into
// the symmetric deep modules.
struct FhdConfig {
    std::int64_t patch_size = 4;
    std::int64_t embed_dim = 64;
    std::int64_t n_heads = 4;
    std::vector<AttnModuleKind> module_layout = default_layout();
    std::int64_t window = 3;  // odd
    std::vector<int> dilations = {1, 2};
    // 1-based (source module, target module): source output is concatenated
    // into the target input through a learned linear merge.
    std::vector<std::pair<int, int>> skip_links = {{1, 10}, {2, 9}, {3, 8}, {4, 7}};

    static std::vector<AttnModuleKind> default_layout();
    void validate() const;
    bool operator==(const FhdConfig&) const = default;
};

struct UnetConfig {
    std::int64_t depth = 2;
    std::int64_t base_channels = 16;
    std::int64_t time_embed_dim = 32;

    void validate() const;
    bool operator==(const UnetConfig&) const = default;
};

struct LdfConfig {
    std::int64_t hidden_channels = 32;
    std::int64_t n_layers = 3;
    std::int64_t kernel = 3;  // odd

    void validate() const;
    bool operator==(const LdfConfig&) const = default;
};

enum class FusionMode {
    ldf,    // learned convolutional fusion of the three branches
    sum_lh  // direct sum of denoised low and high branches, fusion bypassed
};

struct DenoiserConfig {
    FhdConfig fhd;
    UnetConfig unet;
    LdfConfig ldf;
    bool use_fhd = true;
    bool use_fld = true;
    FusionMode fusion = FusionMode::ldf;
    double sigma = 0.08;            // frequency-split bandwidth
    std::int64_t total_steps = 10;  // diffusion T; sizes the time table

    void validate() const;
    bool operator==(const DenoiserConfig&) const = default;
};

std::string to_string(AttnModuleKind k);
std::string to_string(FusionMode m);

}  // namespace fdct
