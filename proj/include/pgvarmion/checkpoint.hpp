#pragma once

#include "pgvarmion/operator_models.hpp"
#include "pgvarmion/training.hpp"

#include <cstdint>
#include <string>

namespace pgvarmion {

// Versioned checkpoint: magic, version, a JSON metadata block (problem,
// model kind, layer dims, activation, cut-off p, seed, training config
// echo), then 64-bit float blocks: the parameters in operator_model order
// and, for transformed bases, the basis transform row-major.
struct checkpoint {
  operator_model model;
  std::uint64_t seed = 0;
  train_config config;
  int epochs_done = 0;
  std::string metadata; // raw JSON block
};

std::string serialize(const checkpoint& c);
checkpoint deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const checkpoint& c, const std::string& path);
checkpoint load_checkpoint(const std::string& path);

} // namespace pgvarmion
