#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/forcing.hpp"
#include "pgvarmion/operator_models.hpp"
#include "pgvarmion/reference.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pgvarmion {

enum class split_tag : std::uint8_t { train = 0, test1 = 1, test2 = 2, test3 = 3 };

std::string to_string(split_tag s);
split_tag parse_split(const std::string& s);
// DATASET 1..3 naming used in reports.
std::string display_name(split_tag s);

// Splits available for a problem (the 2D problem has no GRF splits).
std::vector<split_tag> test_splits(problem_tag p);

// Solves the problem's PDE for any forcing; the 2D spectral system is
// factored once per process and shared.
class reference_solver {
public:
  explicit reference_solver(const problem_setup& setup, int resolution_2d = 64);

  reference_solution solve(const forcing_sample& f) const;
  // Adjoint weighting functions for the setup's trial basis.
  std::vector<ScalarField> adjoint_psi() const;
  const collocation_solver_2d* solver_2d() const { return solver2d_.get(); }

private:
  problem_setup setup_;
  std::shared_ptr<const collocation_solver_2d> solver2d_;
};

// Forcing seed of sample `index`: disjoint ranges per (base seed, split).
std::uint64_t forcing_seed(std::uint64_t base, split_tag split, std::uint64_t index);

forcing_sample draw_forcing(problem_tag p, split_tag split, std::uint64_t seed);

struct labeled_dataset {
  problem_tag problem = problem_tag::diffusion1d;
  split_tag split = split_tag::train;
  std::uint64_t seed = 0;
  rule_spec sensor_spec;
  rule_spec output_spec;
  std::vector<forcing_sample> forcings;
  Matrix f;      // N_s x N_f
  Matrix labels; // N_o x N_f

  int size() const { return static_cast<int>(f.cols()); }
  labeled_dataset prefix(int n) const;
};

labeled_dataset build_dataset(problem_tag p, split_tag split, int count, std::uint64_t seed);
// Labels for explicitly given forcings.
labeled_dataset build_dataset(const problem_setup& setup, split_tag split,
                              std::vector<forcing_sample> forcings, std::uint64_t seed = 0);

std::string serialize(const labeled_dataset& d);
labeled_dataset deserialize_dataset(const std::string& bytes);
void save_dataset(const labeled_dataset& d, const std::string& path);
labeled_dataset load_dataset(const std::string& path);
std::string dataset_digest(const labeled_dataset& d);
// One row per sample: index, forcing family, seed, then F and labels.
void export_dataset_csv(const labeled_dataset& d, const std::string& path);

} // namespace pgvarmion
