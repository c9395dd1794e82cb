#pragma once

#include "pgvarmion/dataset.hpp"
#include "pgvarmion/operator_models.hpp"
#include "pgvarmion/optimizer.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pgvarmion {

enum class batch_unit : std::uint8_t { points = 0, functions = 1 };

struct train_config {
  int epochs = 1000;
  int batch_size = 8000;
  batch_unit unit = batch_unit::points;
  int n_r = 20;
  step_schedule schedule;
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  int checkpoint_every = 100;

  // Settings of the paper tables for each problem.
  static train_config paper(problem_tag p);
  // Reduced settings for quick runs; identical to paper() for the 1D
  // problems except for the epoch count.
  static train_config desk(problem_tag p);
};

struct profile_sizes {
  int train = 4000;
  int test = 2000;
  static profile_sizes paper(problem_tag p);
  static profile_sizes desk(problem_tag p);
};

struct epoch_record {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;
};

struct train_result {
  std::vector<epoch_record> history;
  double seconds = 0.0;
};

// Called after every epoch with the epoch index (0-based); training stops
// early if it returns false.
using epoch_callback = std::function<bool(int epoch, const operator_model&, const epoch_record&)>;

train_result train(operator_model& model, const labeled_dataset& data, const train_config& config,
                   const epoch_callback& on_epoch = {});

// The N_r nodes of each function for one epoch (sorted per function).
std::vector<std::vector<int>> draw_nodes(int n_functions, int n_o, int n_r, std::uint64_t seed, int epoch);

struct sweep_row {
  int size = 0;
  model_kind model = model_kind::pg_varmion;
  split_tag split = split_tag::test1;
  double mean_error = 0.0;   // mean of per-sample relative errors, percent
  double table_error = 0.0;  // pooled relative error, percent
};

// Trains a fresh model per (size, kind) on prefixes of `train_data` and
// evaluates each on every test set.
std::vector<sweep_row> training_size_sweep(problem_tag p, const labeled_dataset& train_data,
                                           const std::vector<labeled_dataset>& tests,
                                           const std::vector<int>& sizes,
                                           const std::vector<model_kind>& kinds,
                                           const train_config& config);

void write_history_csv(const train_result& r, const std::string& path);
void write_sweep_csv(const std::vector<sweep_row>& rows, const std::string& path);

} // namespace pgvarmion
