#pragma once

#include "pgvarmion/operator_models.hpp"
#include "pgvarmion/training.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pgvarmion {

// Experiment configuration. Profile defaults are applied first, then the
// values present in the file, then command-line overrides.
struct run_config {
  problem_tag problem = problem_tag::diffusion1d;
  std::optional<model_kind> model;
  std::string profile = "paper";
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 0;         // model initialization and training
  std::uint64_t dataset_seed = 1; // forcing draws
  train_config train;
  profile_sizes sizes;
  std::vector<int> sweep_sizes{100, 250, 500, 1000, 2000, 3000, 4000};

  // Re-derive train/sizes from problem and profile.
  void apply_profile();
};

// JSON document; unknown keys raise config_error.
run_config parse_run_config(const std::string& text);
run_config load_run_config(const std::string& path);
std::string to_json(const run_config& c, int indent = 2);
std::string to_json(const train_config& c);
train_config train_config_from_json(const std::string& text);

} // namespace pgvarmion
