#include "fdct/training.hpp"

#include <filesystem>
#include <fstream>

#include "fdct/denoiser/denoiser.hpp"
#include "fdct/errors.hpp"
#include "fdct/noise.hpp"
#include "fdct/phantom.hpp"
#include "fdct/projector.hpp"

namespace fdct {

using nn::Tensor;

nn::Tensor restoration_loss_t(const Tensor& pred, const Tensor& target, LossNorm norm) {
    if (pred.shape() != target.shape())
        throw ShapeError("restoration_loss: prediction and target shapes differ");
    Tensor diff = nn::sub(pred, target);
    if (norm == LossNorm::l2) return nn::mean_all(nn::mul(diff, diff));
    return nn::mean_all(nn::absval(diff));
}

double restoration_loss(const Sinogram& pred, const Sinogram& target, LossNorm norm) {
    if (!pred.same_shape(target))
        throw ShapeError("restoration_loss: prediction and target shapes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.v.size(); ++i) {
        const double d = pred.v[i] - target.v[i];
        acc += norm == LossNorm::l2 ? d * d : std::abs(d);
    }
    return acc / static_cast<double>(pred.v.size());
}

double train_step(const TrainingPair& pair, std::int64_t t, nn::ParamStore& params,
                  nn::AdamState& opt_state, const DiffusionSchedule& sched,
                  const DenoiserConfig& dcfg, LossNorm norm, const nn::AdamConfig& adam) {
    if (!pair.x0.same_shape(pair.xT)) throw ShapeError("train_step: pair shapes differ");
    params.zero_grad();
    const Sinogram x_t = perturb(pair.x0, pair.xT, t, sched);
    Tensor pred = denoise_t(x_t, t, params, dcfg);
    Tensor loss = restoration_loss_t(pred, sinogram_to_tensor(pair.x0), norm);
    nn::backward(loss);
    adam_step(params, opt_state, adam);
    return loss.item();
}

namespace {
std::uint64_t index_seed(std::uint64_t base, std::uint64_t salt, std::int64_t index,
                         std::uint64_t stream) {
    // splitmix64-style mix keeps per-index streams disjoint.
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(index) + 1) +
                      0xBF58476D1CE4E5B9ull * salt + 0x94D049BB133111EBull * stream;
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}
}  // namespace

Image dataset_phantom(const RunConfig& cfg, std::int64_t index, std::uint64_t salt) {
    return make_phantom(PhantomKind::random_ellipses, cfg.geometry.image_size,
                        index_seed(cfg.run.seed, salt, index, 1));
}

DoseModel dataset_dose(const RunConfig& cfg, std::int64_t index, std::uint64_t salt) {
    DoseModel dose;
    dose.photon_count =
        cfg.train.pair_doses[static_cast<std::size_t>(index) % cfg.train.pair_doses.size()];
    dose.electronic_sigma = cfg.dose.electronic_sigma;
    dose.seed = index_seed(cfg.run.seed, salt, index, 2);
    return dose;
}

std::vector<TrainingPair> make_training_dataset(const RunConfig& cfg, std::int64_t count,
                                                std::uint64_t salt) {
    const std::int64_t n = count > 0 ? count : cfg.train.pairs;
    const FanGeometry geom = make_pair_geometry(cfg);
    std::vector<TrainingPair> ds;
    ds.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        TrainingPair pair;
        pair.x0 = forward_project(dataset_phantom(cfg, i, salt), geom);
        pair.xT = simulate_low_dose(pair.x0, dataset_dose(cfg, i, salt));
        ds.push_back(std::move(pair));
    }
    return ds;
}

TrainResult train(const std::vector<TrainingPair>& dataset, const RunConfig& cfg,
                  const std::string& out_dir, const Checkpoint* resume) {
    if (dataset.empty()) throw DomainError("train: dataset is empty");
    const DenoiserConfig dcfg = make_denoiser_config(cfg);
    const DiffusionSchedule sched = make_schedule(cfg.schedule.steps);
    const LossNorm norm = loss_norm(cfg);
    nn::AdamConfig adam;
    adam.lr = cfg.train.learning_rate;

    nn::ParamStore params;
    register_denoiser_params(params, dcfg);

    nn::AdamState opt_state;
    Rng rng(cfg.run.seed);
    std::int64_t start_iter = 0;
    if (resume) {
        restore_params(*resume, params);
        opt_state = resume->adam;
        rng.set_state(resume->rng_state);
        start_iter = resume->iteration;
    } else {
        params.initialize(index_seed(cfg.run.seed, 0, 0, 3));
    }

    const std::string resolved = resolve_config(cfg);
    const bool writes = !out_dir.empty();
    std::ofstream loss_csv;
    if (writes) {
        std::filesystem::create_directories(out_dir);
        loss_csv.open(out_dir + "/loss.csv");
        loss_csv << "iteration,loss\n";
    }

    auto snapshot = [&](std::int64_t iter) {
        Checkpoint ckpt;
        ckpt.config_text = resolved;
        ckpt.iteration = iter;
        ckpt.rng_state = rng.state();
        ckpt.adam = opt_state;
        capture_params(ckpt, params);
        return ckpt;
    };

    TrainResult result;
    const std::int64_t n_pairs = static_cast<std::int64_t>(dataset.size());
    for (std::int64_t iter = start_iter; iter < cfg.train.iterations; ++iter) {
        double loss_value = 0.0;
        if (cfg.train.batch_size == 1) {
            const TrainingPair& pair = dataset[static_cast<std::size_t>(iter % n_pairs)];
            const std::int64_t t = sample_step(rng, sched.total_steps);
            loss_value =
                train_step(pair, t, params, opt_state, sched, dcfg, norm, adam);
        } else {
            // Sequential gradient accumulation over consecutive pairs.
            params.zero_grad();
            for (std::int64_t b = 0; b < cfg.train.batch_size; ++b) {
                const TrainingPair& pair =
                    dataset[static_cast<std::size_t>((iter * cfg.train.batch_size + b) % n_pairs)];
                const std::int64_t t = sample_step(rng, sched.total_steps);
                const Sinogram x_t = perturb(pair.x0, pair.xT, t, sched);
                Tensor pred = denoise_t(x_t, t, params, dcfg);
                Tensor loss = restoration_loss_t(pred, sinogram_to_tensor(pair.x0), norm);
                Tensor scaled = nn::scale(loss, 1.0 / static_cast<double>(cfg.train.batch_size));
                nn::backward(scaled);
                loss_value += scaled.item();
            }
            adam_step(params, opt_state, adam);
        }
        result.loss_curve.emplace_back(iter + 1, loss_value);
        if (writes) loss_csv << (iter + 1) << "," << loss_value << "\n";
        const bool at_interval = (iter + 1) % cfg.train.checkpoint_interval == 0;
        const bool last = iter + 1 == cfg.train.iterations;
        if (writes && (at_interval || last)) {
            char name[64];
            std::snprintf(name, sizeof(name), "checkpoint_%06lld.ckpt",
                          static_cast<long long>(iter + 1));
            save_checkpoint(snapshot(iter + 1), out_dir + "/" + name);
        }
    }
    result.checkpoint = snapshot(cfg.train.iterations);
    if (writes) save_checkpoint(result.checkpoint, out_dir + "/checkpoint_final.ckpt");
    return result;
}

}  // namespace fdct
