#include "fdct/ablation.hpp"

#include <fstream>

#include "fdct/denoiser/denoiser.hpp"
#include "fdct/errors.hpp"
#include "fdct/metrics.hpp"
#include "fdct/noise.hpp"
#include "fdct/phantom.hpp"
#include "fdct/projector.hpp"
#include "fdct/recon.hpp"
#include "fdct/training.hpp"

namespace fdct {

namespace {
constexpr std::uint64_t kEvalSalt = 0xAB1A7E;  // held out from the training stream

std::vector<std::string> axis_rows(const std::string& axis) {
    if (axis == "modules") return {"ffd", "ffd_fld", "full"};
    if (axis == "attention") return {"ga", "ssla_ga"};
    if (axis == "fusion") return {"ldf", "l_plus_h"};
    throw ConfigError("ablate.axis", "must be modules, attention or fusion");
}
}  // namespace

RunConfig ablation_variant(const RunConfig& cfg, const std::string& axis,
                           const std::string& row_name) {
    RunConfig v = cfg;
    // Rows train on the ablation budget and evaluate at the pair geometry.
    v.train.iterations = cfg.ablate.iterations;
    v.train.pairs = cfg.ablate.pairs;
    v.geometry.n_views = cfg.train.pair_views;
    v.geometry.n_detectors = cfg.train.pair_detectors;

    if (axis == "modules") {
        if (row_name == "ffd") {
            v.denoiser.use_fhd = false;
            v.denoiser.use_fld = false;
        } else if (row_name == "ffd_fld") {
            v.denoiser.use_fhd = false;
            v.denoiser.use_fld = true;
        } else if (row_name != "full") {
            throw ConfigError("ablate", "unknown modules row " + row_name);
        }
    } else if (axis == "attention") {
        if (row_name == "ga") {
            // Global attention only: every module is MHSA.
            for (auto& k : v.fhd.module_layout) k = AttnModuleKind::mhsa;
        } else if (row_name != "ssla_ga") {
            throw ConfigError("ablate", "unknown attention row " + row_name);
        }
    } else if (axis == "fusion") {
        if (row_name == "l_plus_h") {
            v.denoiser.fusion = "sum_lh";
        } else if (row_name != "ldf") {
            throw ConfigError("ablate", "unknown fusion row " + row_name);
        }
    } else {
        throw ConfigError("ablate.axis", "must be modules, attention or fusion");
    }
    validate_config(v);
    return v;
}

std::vector<AblationRow> run_ablation(const RunConfig& cfg, const std::string& axis) {
    std::vector<AblationRow> rows;
    for (const auto& name : axis_rows(axis)) {
        const RunConfig variant = ablation_variant(cfg, axis, name);
        const auto dataset = make_training_dataset(variant);
        const TrainResult trained = train(dataset, variant);

        nn::ParamStore params;
        register_denoiser_params(params, make_denoiser_config(variant));
        restore_params(trained.checkpoint, params);

        const FanGeometry geom = make_geometry(variant);
        AblationRow row{axis, name, 0.0, 0.0, 0.0};
        for (std::int64_t e = 0; e < cfg.ablate.eval_count; ++e) {
            const Image phantom = dataset_phantom(variant, e, kEvalSalt);
            const Sinogram clean = forward_project(phantom, geom);
            DoseModel dose = dataset_dose(variant, e, kEvalSalt);
            dose.photon_count = cfg.dose.photon_count;
            const Sinogram noisy = simulate_low_dose(clean, dose);
            auto [img, report] = reconstruct(noisy, params, variant, &phantom);
            row.psnr += *report.psnr;
            row.ssim += *report.ssim;
            row.mse += *report.mse;
        }
        const double n = static_cast<double>(cfg.ablate.eval_count);
        row.psnr /= n;
        row.ssim /= n;
        row.mse /= n;
        rows.push_back(row);
    }
    return rows;
}

void write_ablation_csv(const std::vector<AblationRow>& rows, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os << "axis,configuration,psnr,ssim,mse\n";
    for (const auto& r : rows)
        os << r.axis << "," << r.name << "," << r.psnr << "," << r.ssim << "," << r.mse << "\n";
    if (!os) throw IoError("write failed: " + path);
}

}  // namespace fdct
