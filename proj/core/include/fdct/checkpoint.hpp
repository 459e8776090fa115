#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fdct/nn/adam.hpp"
#include "fdct/nn/params.hpp"

namespace fdct {

// Everything needed to resume training or run reconstruction: the resolved
// config snapshot, parameter tensors, optimizer state, iteration counter and
// RNG state. Single little-endian file of length-prefixed named sections
// with a trailing CRC; saving is canonical so save/load/save is
// byte-identical.
struct Checkpoint {
    std::string config_text;
    std::int64_t iteration = 0;
    std::string rng_state;
    std::map<std::string, std::pair<nn::Shape, std::vector<double>>> tensors;
    nn::AdamState adam;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Copy the store's parameters into / out of a checkpoint. Loading requires
// every registered parameter to be present with a matching shape.
void capture_params(Checkpoint& ckpt, const nn::ParamStore& params);
void restore_params(const Checkpoint& ckpt, nn::ParamStore& params);

}  // namespace fdct
