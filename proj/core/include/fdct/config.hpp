#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fdct/denoiser/config.hpp"
#include "fdct/geometry.hpp"

namespace fdct {

enum class LossNorm { l1, l2 };
enum class PwlsMode { corrected, literal };

// One validated document covering the whole pipeline. Parsing is strict:
// unknown sections or keys are errors, and every run persists the resolved
// snapshot next to its outputs.
struct RunConfig {
    struct Run {
        std::uint64_t seed = 1234;
    } run;

    struct Geometry {
        std::int64_t image_size = 64;
        std::int64_t n_views = 180;
        std::int64_t n_detectors = 128;
        double source_to_center = 40.0;
        double center_to_detector = 40.0;
        double detector_width = 41.3;
    } geometry;

    struct Dose {
        double photon_count = 1e5;  // "inf" disables noise
        double electronic_sigma = 0.0;
    } dose;

    struct Schedule {
        std::int64_t steps = 10;
        std::string kind = "linear";
    } schedule;

    struct Frequency {
        double sigma = 0.08;
    } frequency;

    FhdConfig fhd;
    UnetConfig unet;
    LdfConfig ldf;

    struct Denoiser {
        bool use_fhd = true;
        bool use_fld = true;
        std::string fusion = "ldf";
    } denoiser;

    struct Train {
        double learning_rate = 2e-4;
        std::int64_t iterations = 2000;
        std::int64_t batch_size = 1;
        std::string loss = "l2";
        std::int64_t checkpoint_interval = 500;
        std::int64_t pairs = 32;
        std::int64_t pair_views = 32;
        std::int64_t pair_detectors = 32;
        std::vector<double> pair_doses = {1e4, 5e4, 1e5};  // cycled over pairs
    } train;

    struct Pwls {
        bool enabled = true;
        double eta = 22000.0;
        double mu = 5e5;
        std::string mode = "corrected";
        bool freeze_weights = false;   // weights from y instead of the current estimate
        bool prior_in_update = true;   // keep the prior-gradient term inside the update
    } pwls;

    struct Tv {
        bool enabled = true;
        double alpha = 0.05;
        std::int64_t iterations = 2;
        double epsilon = 1e-8;
    } tv;

    struct Recon {
        bool renoise = false;
        std::string fbp_window = "hann";
    } recon;

    struct Ablate {
        std::int64_t iterations = 300;
        std::int64_t pairs = 16;
        std::int64_t eval_count = 3;
    } ablate;
};

// Strict parse; throws ConfigError naming section.key on any problem.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config_file(const std::string& path);
// Canonical full-document serialization of the resolved values.
std::string resolve_config(const RunConfig& cfg);
// Semantic validation beyond syntax (ranges, enums, cross-field rules).
void validate_config(const RunConfig& cfg);

// Field-by-field comparison of the architecture-relevant sections
// (schedule, frequency, fhd, unet, ldf, denoiser). Returns "section.key:
// a vs b" lines; empty when compatible.
std::vector<std::string> architecture_diff(const RunConfig& a, const RunConfig& b);

// Projections into the domain types.
FanGeometry make_geometry(const RunConfig& cfg);
FanGeometry make_pair_geometry(const RunConfig& cfg);  // training-pair acquisition
DenoiserConfig make_denoiser_config(const RunConfig& cfg);
LossNorm loss_norm(const RunConfig& cfg);
PwlsMode pwls_mode(const RunConfig& cfg);

}  // namespace fdct
