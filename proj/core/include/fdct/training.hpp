#pragma once

#include <string>
#include <vector>

#include "fdct/checkpoint.hpp"
#include "fdct/config.hpp"
#include "fdct/diffusion.hpp"
#include "fdct/grid.hpp"
#include "fdct/nn/adam.hpp"
#include "fdct/nn/ops.hpp"

namespace fdct {

// l2: mean squared difference; l1: mean absolute difference.
nn::Tensor restoration_loss_t(const nn::Tensor& pred, const nn::Tensor& target, LossNorm norm);
double restoration_loss(const Sinogram& pred, const Sinogram& target, LossNorm norm);

// One optimizer step on a single pair at timestep t: perturb, denoise,
// loss, backward, Adam. Returns the loss value.
double train_step(const TrainingPair& pair, std::int64_t t, nn::ParamStore& params,
                  nn::AdamState& opt_state, const DiffusionSchedule& sched,
                  const DenoiserConfig& dcfg, LossNorm norm, const nn::AdamConfig& adam);

struct TrainResult {
    std::vector<std::pair<std::int64_t, double>> loss_curve;  // (iteration, loss)
    Checkpoint checkpoint;
};

// Full training loop per config: cyclic pairs, uniform timesteps, periodic
// checkpoints plus a loss CSV under out_dir (no files when out_dir empty).
// Passing a resume checkpoint continues bit-exactly where it stopped.
TrainResult train(const std::vector<TrainingPair>& dataset, const RunConfig& cfg,
                  const std::string& out_dir = "", const Checkpoint* resume = nullptr);

// Deterministic synthetic dataset: every pair projects a random-ellipse
// phantom through the training-pair geometry and degrades it with the
// per-pair dose (pair_doses cycled). Per-index seeds derive from cfg.run.seed.
std::vector<TrainingPair> make_training_dataset(const RunConfig& cfg, std::int64_t count = -1,
                                                std::uint64_t salt = 0);

// Phantom underlying dataset entry `index` (the recon ground truth).
Image dataset_phantom(const RunConfig& cfg, std::int64_t index, std::uint64_t salt = 0);
DoseModel dataset_dose(const RunConfig& cfg, std::int64_t index, std::uint64_t salt = 0);

}  // namespace fdct
