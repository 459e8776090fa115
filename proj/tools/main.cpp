// Command-line front end: simulate / decompose / train / reconstruct /
// evaluate / ablate. Exit codes: 0 success, 2 configuration or validation
// problem (message names the offending field), 3 runtime numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "fdct/ablation.hpp"
#include "fdct/checkpoint.hpp"
#include "fdct/config.hpp"
#include "fdct/denoiser/denoiser.hpp"
#include "fdct/errors.hpp"
#include "fdct/fbp.hpp"
#include "fdct/frequency.hpp"
#include "fdct/metrics.hpp"
#include "fdct/noise.hpp"
#include "fdct/phantom.hpp"
#include "fdct/projector.hpp"
#include "fdct/recon.hpp"
#include "fdct/tensor_io.hpp"
#include "fdct/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::int64_t> seed;
    std::string out_dir = "out";
    std::optional<std::string> dose;
    std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file")->required();
    cmd->add_option("--seed", args.seed, "override [run].seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--dose", args.dose, "override [dose].photon_count (1e4|5e4|1e5|<count>|inf)");
    cmd->add_option("--mode", args.mode, "override [pwls].mode (corrected|literal)")
        ->check(CLI::IsMember({"corrected", "literal"}));
}

fdct::RunConfig load_effective_config(const CommonArgs& args) {
    fdct::RunConfig cfg = fdct::load_config_file(args.config_path);
    if (args.seed) cfg.run.seed = static_cast<std::uint64_t>(*args.seed);
    if (args.dose) {
        if (*args.dose == "inf")
            cfg.dose.photon_count = std::numeric_limits<double>::infinity();
        else {
            char* end = nullptr;
            cfg.dose.photon_count = std::strtod(args.dose->c_str(), &end);
            if (end == args.dose->c_str() || *end != '\0')
                throw fdct::ConfigError("dose.photon_count",
                                        "bad --dose value '" + *args.dose + "'");
        }
    }
    if (args.mode) cfg.pwls.mode = *args.mode;
    fdct::validate_config(cfg);
    return cfg;
}

void write_resolved(const fdct::RunConfig& cfg, const std::string& dir) {
    fs::create_directories(dir);
    std::ofstream os(dir + "/resolved.cfg");
    os << fdct::resolve_config(cfg);
}

std::string pair_stem(const std::string& dir, std::int64_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "pair_%04lld", static_cast<long long>(i));
    return dir + "/" + buf;
}

int cmd_simulate(const CommonArgs& args) {
    const auto cfg = load_effective_config(args);
    write_resolved(cfg, args.out_dir);
    fs::create_directories(args.out_dir + "/pairs");
    fs::create_directories(args.out_dir + "/previews");

    const fdct::FanGeometry geom = fdct::make_pair_geometry(cfg);
    json summary;
    summary["pairs"] = cfg.train.pairs;
    summary["n_views"] = geom.n_views;
    summary["n_detectors"] = geom.n_detectors;
    summary["image_size"] = cfg.geometry.image_size;
    json doses = json::array();
    for (std::int64_t i = 0; i < cfg.train.pairs; ++i) {
        const fdct::Image phantom = fdct::dataset_phantom(cfg, i);
        const fdct::Sinogram x0 = fdct::forward_project(phantom, geom);
        const fdct::DoseModel dose = fdct::dataset_dose(cfg, i);
        const fdct::Sinogram xT = fdct::simulate_low_dose(x0, dose);
        const std::string stem = pair_stem(args.out_dir + "/pairs", i);
        fdct::write_tensor(stem + ".img.ten", phantom);
        fdct::write_tensor(stem + ".x0.ten", x0);
        fdct::write_tensor(stem + ".xT.ten", xT);
        const std::string pstem = pair_stem(args.out_dir + "/previews", i);
        fdct::write_png(pstem + ".x0.png", x0);
        fdct::write_png(pstem + ".xT.png", xT);
        doses.push_back(dose.photon_count);
    }
    summary["photon_counts"] = doses;
    std::ofstream os(args.out_dir + "/summary.json");
    os << summary.dump(2) << "\n";
    std::cout << "simulate: wrote " << cfg.train.pairs << " pairs to " << args.out_dir << "\n";
    return 0;
}

int cmd_decompose(const CommonArgs& args, const std::string& input) {
    const auto cfg = load_effective_config(args);
    write_resolved(cfg, args.out_dir);
    const fdct::Sinogram x = fdct::read_sinogram(input);
    const fdct::FrequencyTriple triple = fdct::decompose(x, cfg.frequency.sigma);
    fdct::write_tensor(args.out_dir + "/low.ten", triple.low);
    fdct::write_tensor(args.out_dir + "/high.ten", triple.high);
    fdct::write_tensor(args.out_dir + "/full.ten", triple.full);
    fdct::write_png(args.out_dir + "/low.png", triple.low);
    fdct::write_png(args.out_dir + "/high.png", triple.high);
    fdct::write_png(args.out_dir + "/full.png", triple.full);
    std::cout << "decompose: sigma=" << cfg.frequency.sigma << " -> " << args.out_dir << "\n";
    return 0;
}

std::vector<fdct::TrainingPair> load_dataset(const std::string& dir) {
    std::vector<fdct::TrainingPair> ds;
    for (std::int64_t i = 0;; ++i) {
        const std::string stem = pair_stem(dir + "/pairs", i);
        if (!fs::exists(stem + ".x0.ten")) break;
        fdct::TrainingPair pair;
        pair.x0 = fdct::read_sinogram(stem + ".x0.ten");
        pair.xT = fdct::read_sinogram(stem + ".xT.ten");
        ds.push_back(std::move(pair));
    }
    if (ds.empty()) throw fdct::IoError("no pairs found under " + dir + "/pairs");
    return ds;
}

int cmd_train(const CommonArgs& args, const std::string& data_dir,
              const std::string& resume_path) {
    const auto cfg = load_effective_config(args);
    write_resolved(cfg, args.out_dir);
    const auto dataset = load_dataset(data_dir);
    std::optional<fdct::Checkpoint> resume;
    if (!resume_path.empty()) {
        resume = fdct::load_checkpoint(resume_path);
        const fdct::RunConfig ckpt_cfg = fdct::parse_config_text(resume->config_text);
        const auto diffs = fdct::architecture_diff(ckpt_cfg, cfg);
        if (!diffs.empty()) {
            std::string msg = "checkpoint architecture mismatch:";
            for (const auto& d : diffs) msg += "\n  " + d;
            throw fdct::ConfigError("checkpoint", msg);
        }
    }
    const fdct::TrainResult result =
        fdct::train(dataset, cfg, args.out_dir, resume ? &*resume : nullptr);
    std::cout << "train: " << result.loss_curve.size() << " iterations, final loss "
              << (result.loss_curve.empty() ? 0.0 : result.loss_curve.back().second) << "\n";
    return 0;
}

int cmd_reconstruct(const CommonArgs& args, const std::string& ckpt_path, const std::string& input,
                    const std::string& input_kind, const std::string& gt_path) {
    const auto cfg = load_effective_config(args);
    write_resolved(cfg, args.out_dir);

    const fdct::Checkpoint ckpt = fdct::load_checkpoint(ckpt_path);
    const fdct::RunConfig ckpt_cfg = fdct::parse_config_text(ckpt.config_text);
    const auto diffs = fdct::architecture_diff(ckpt_cfg, cfg);
    if (!diffs.empty()) {
        std::string msg = "checkpoint architecture mismatch:";
        for (const auto& d : diffs) msg += "\n  " + d;
        throw fdct::ConfigError("checkpoint", msg);
    }
    fdct::nn::ParamStore params;
    fdct::register_denoiser_params(params, fdct::make_denoiser_config(cfg));
    fdct::restore_params(ckpt, params);

    std::optional<fdct::Image> gt;
    if (!gt_path.empty()) gt = fdct::read_image(gt_path);

    std::pair<fdct::Image, fdct::ReconReport> result = [&] {
        if (input_kind == "image") {
            const fdct::Image img = fdct::read_image(input);
            return fdct::reconstruct(img, params, cfg, gt ? &*gt : nullptr);
        }
        const fdct::Sinogram sino = fdct::read_sinogram(input);
        return fdct::reconstruct(sino, params, cfg, gt ? &*gt : nullptr);
    }();

    fdct::write_tensor(args.out_dir + "/image.ten", result.first);
    fdct::write_png(args.out_dir + "/image.png", result.first);
    {
        std::ofstream os(args.out_dir + "/steps.csv");
        os << "t,fidelity_residual,tv_value\n";
        for (const auto& s : result.second.steps)
            os << s.t << "," << s.fidelity_residual << "," << s.tv_value << "\n";
    }
    if (gt) {
        json metrics;
        metrics["psnr"] = *result.second.psnr;
        metrics["ssim"] = *result.second.ssim;
        metrics["mse"] = *result.second.mse;
        std::ofstream os(args.out_dir + "/metrics.json");
        os << metrics.dump(2) << "\n";
        std::cout << "reconstruct: psnr=" << *result.second.psnr
                  << " ssim=" << *result.second.ssim << " mse=" << *result.second.mse << "\n";
    } else {
        std::cout << "reconstruct: wrote " << args.out_dir << "/image.ten\n";
    }
    return 0;
}

int cmd_evaluate(const CommonArgs& args, const std::vector<std::string>& preds,
                 const std::vector<std::string>& refs) {
    const auto cfg = load_effective_config(args);
    if (preds.size() != refs.size())
        throw fdct::ConfigError("evaluate", "--pred and --ref counts differ");
    write_resolved(cfg, args.out_dir);
    std::ofstream os(args.out_dir + "/metrics.csv");
    os << "pred,ref,psnr,ssim,mse\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const fdct::Grid2 a = fdct::read_tensor(preds[i]);
        const fdct::Grid2 b = fdct::read_tensor(refs[i]);
        const double range = fdct::data_range_of(b);
        os << preds[i] << "," << refs[i] << "," << fdct::psnr(a, b, range) << ","
           << fdct::ssim(a, b, range) << "," << fdct::mse(a, b) << "\n";
    }
    std::cout << "evaluate: " << preds.size() << " pairs -> " << args.out_dir << "/metrics.csv\n";
    return 0;
}

int cmd_ablate(const CommonArgs& args, const std::string& axis) {
    const auto cfg = load_effective_config(args);
    write_resolved(cfg, args.out_dir);
    const auto rows = fdct::run_ablation(cfg, axis);
    fdct::write_ablation_csv(rows, args.out_dir + "/ablation_" + axis + ".csv");
    for (const auto& r : rows)
        std::cout << "ablate " << r.axis << "/" << r.name << ": psnr=" << r.psnr
                  << " ssim=" << r.ssim << " mse=" << r.mse << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequency-decoupled diffusion pipeline for low-dose fan-beam CT"};
    app.require_subcommand(1);

    CommonArgs sim_args, dec_args, train_args, rec_args, eval_args, abl_args;
    std::string dec_input;
    std::string train_data, train_resume;
    std::string rec_ckpt, rec_input, rec_kind = "sinogram", rec_gt;
    std::vector<std::string> eval_preds, eval_refs;
    std::string abl_axis;

    auto* sim = app.add_subcommand("simulate", "generate phantom sinogram pairs");
    add_common(sim, sim_args);

    auto* dec = app.add_subcommand("decompose", "frequency-split a sinogram");
    add_common(dec, dec_args);
    dec->add_option("--input", dec_input, "input sinogram tensor file")->required();

    auto* trn = app.add_subcommand("train", "train the denoiser on a simulated dataset");
    add_common(trn, train_args);
    trn->add_option("--data", train_data, "dataset directory from `simulate`")->required();
    trn->add_option("--resume", train_resume, "checkpoint to resume from");

    auto* rec = app.add_subcommand("reconstruct", "reverse-diffusion reconstruction");
    add_common(rec, rec_args);
    rec->add_option("--checkpoint", rec_ckpt, "trained checkpoint")->required();
    rec->add_option("--input", rec_input, "LDCT input tensor file")->required();
    rec->add_option("--input-kind", rec_kind, "sinogram|image")
        ->check(CLI::IsMember({"sinogram", "image"}));
    rec->add_option("--ground-truth", rec_gt, "reference image for metrics");

    auto* evl = app.add_subcommand("evaluate", "metrics for image pairs");
    add_common(evl, eval_args);
    evl->add_option("--pred", eval_preds, "predicted image tensor file(s)")->required();
    evl->add_option("--ref", eval_refs, "reference image tensor file(s)")->required();

    auto* abl = app.add_subcommand("ablate", "module / attention / fusion comparisons");
    add_common(abl, abl_args);
    abl->add_option("--axis", abl_axis, "modules|attention|fusion")
        ->required()
        ->check(CLI::IsMember({"modules", "attention", "fusion"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (dec->parsed()) return cmd_decompose(dec_args, dec_input);
        if (trn->parsed()) return cmd_train(train_args, train_data, train_resume);
        if (rec->parsed()) return cmd_reconstruct(rec_args, rec_ckpt, rec_input, rec_kind, rec_gt);
        if (evl->parsed()) return cmd_evaluate(eval_args, eval_preds, eval_refs);
        if (abl->parsed()) return cmd_ablate(abl_args, abl_axis);
    } catch (const fdct::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const fdct::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {  // DomainError, ShapeError
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const fdct::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
