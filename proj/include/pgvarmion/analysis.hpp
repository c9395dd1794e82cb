#pragma once

#include "pgvarmion/dataset.hpp"
#include "pgvarmion/operator_models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pgvarmion {

// 100 sqrt(sum w (u - u_hat)^2) / sqrt(sum w u^2). Throws when ||u|| = 0.
double relative_l2_error(const Vector& u_hat, const Vector& u, const Vector& weights);

struct error_summary {
  double mean = 0.0;
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

error_summary summarize(const std::vector<double>& values);

// Relative errors of a model (or the projection alone) on one dataset,
// measured in the discrete norm of the output rule. The projection is the
// discrete best approximation in that same norm, so the per-sample floor
// ||u - u_hat|| >= ||u - u_bar|| is exact up to rounding.
struct error_report {
  std::string model_tag; // "projection" when no model was evaluated
  problem_tag problem = problem_tag::diffusion1d;
  split_tag split = split_tag::test1;
  std::string dataset_digest;
  std::uint64_t dataset_seed = 0;

  std::vector<double> model_error;      // percent, per sample
  std::vector<double> projection_error; // percent, per sample
  std::vector<double> e, e_phi, e_psi;  // absolute norms, per sample
  double sum_u2 = 0.0, sum_model2 = 0.0, sum_projection2 = 0.0;
  int floor_violations = 0;

  bool has_model() const { return !model_error.empty(); }
  error_summary summary() const { return summarize(model_error); }
  error_summary projection_summary() const { return summarize(projection_error); }
  // Pooled relative error over the whole split, percent.
  double table_error() const;
  double projection_table_error() const;
};

error_report evaluate_model(const operator_model& model, const labeled_dataset& data);
error_report evaluate_projection(const problem_setup& setup, const labeled_dataset& data);

// Fine rule used for the decomposition and psi errors: 400-point GL in 1D,
// 80 x 80 GL in 2D.
quadrature_rule analysis_rule(int dim);

struct decomposition {
  double e = 0.0, e_phi = 0.0, e_psi = 0.0;
  double residual = 0.0; // |E^2 - E_phi^2 - E_psi^2| / E^2
  bool ok = true;        // residual <= 1e-6
};

// E = ||u - u_hat||, E_phi = ||u - u_bar||, E_psi = ||u_bar - u_hat|| on the
// analysis rule, with u_bar the best approximation in the same inner product.
decomposition error_decomposition(const operator_model& model, const Vector& f,
                                  const reference_solution& u, const quadrature_rule& rule);
decomposition error_decomposition(const Vector& u_hat, const Vector& u, const Matrix& phi,
                                  const Vector& weights);

// Central difference (one-sided within h of the domain ends).
double fd_derivative(const std::function<double(double)>& fn, double x, double h);

struct psi_mode_error {
  int index = 0;
  double l2 = 0.0, l2_relative = 0.0;
  double h1 = 0.0, h1_relative = 0.0;
};

struct psi_report {
  std::vector<psi_mode_error> modes;
  double mean_l2_relative(int first, int last) const; // 1-based inclusive
};

// L2 on the analysis rule; the H1 seminorm from central differences of
// both fields with step h1_step.
psi_report psi_error_report(const std::vector<ScalarField>& psi_hat, const std::vector<ScalarField>& psi,
                            int dim, double h1_step = 1e-4);
psi_report psi_error_report(const operator_model& model, const std::vector<ScalarField>& psi,
                            double h1_step = 1e-4);

// psi_i = sqrt(2) sin(i pi x) / (kappa i^2 pi^2).
std::vector<ScalarField> diffusion_psi_closed_form(int n, double kappa);

struct bound_record {
  double e = 0.0, e_phi = 0.0, e_psi = 0.0;
  double ell_gap = 0.0;    // ||l_Psi - l_{Psi_hat,h}||_2
  double bound = 0.0;      // E_phi + ell_gap / sqrt(lambda_min)
  double psi_term = 0.0;   // ||f|| sum_i ||psi_i - psi_hat_i|| / sqrt(lambda_min)
  double rayleigh_low = 0.0, rayleigh_high = 0.0; // gap^2/lambda_max, gap^2/lambda_min
  bool holds = false;      // E <= bound
  bool sandwich = false;   // rayleigh_low <= E_psi^2 <= rayleigh_high (relative slack 1e-8)
};

struct bound_report {
  std::vector<bound_record> samples;
  double lambda_min = 1.0, lambda_max = 1.0;
  std::string constants_note = "C_Omega and C_Psi_hat: not evaluated";
  int violations() const;
};

// PG-VarMiON only. Reference solutions are recomputed from the stored
// forcing descriptors.
bound_report theorem_bound_report(const operator_model& model, const labeled_dataset& data,
                                  const std::vector<ScalarField>& true_psi, int max_samples = -1);

struct comparison_row {
  std::string name;
  std::vector<double> mean;  // per split, percent
  std::vector<double> table; // pooled, per split, percent
};

struct comparison_table {
  std::vector<split_tag> splits;
  std::vector<comparison_row> rows;

  std::string text() const;
  void write_csv(const std::string& path) const;
};

// Rows: Projection followed by one row per model, columns the datasets.
comparison_table make_comparison_table(const std::vector<const operator_model*>& models,
                                       const std::vector<const labeled_dataset*>& datasets);
comparison_table make_comparison_table(const std::vector<error_report>& projection,
                                       const std::vector<std::vector<error_report>>& per_model);

struct histogram {
  std::vector<double> edges;
  std::vector<int> counts;
  std::vector<double> values;
  double mean = 0.0;
};

histogram make_histogram(const std::vector<double>& values, int bins);
void write_histogram_csv(const histogram& h, const std::string& path);

// |v^T M^-1 Phi|^2 vs v^T M^-1 v in quad precision, both from the double
// basis values at the rule nodes. Returns the relative difference.
double lemma_identity_check(const Matrix& phi, const Vector& weights, const Vector& v);

// u and u_hat along x = y and x = 1 - y at n points including the corners.
struct slice_table {
  std::vector<double> t;
  std::vector<double> diag_ref, diag_model, anti_ref, anti_model;
};
slice_table diagonal_slices(const operator_model& model, const Vector& f, const reference_solution& u,
                            int n = 257);
void write_slices_csv(const slice_table& s, const std::string& path);

void write_report_csv(const error_report& r, const std::string& path);

} // namespace pgvarmion
