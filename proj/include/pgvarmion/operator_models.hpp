#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/kernels.hpp"
#include "pgvarmion/mlp.hpp"
#include "pgvarmion/quadrature.hpp"
#include "pgvarmion/reference.hpp"
#include "pgvarmion/trial_basis.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pgvarmion {

enum class problem_tag : std::uint8_t { diffusion1d = 1, advdiff1d = 2, advdiff2d = 3 };

std::string to_string(problem_tag p);
problem_tag parse_problem(const std::string& s);

// Everything fixed per experiment: PDE, trial basis and its mass matrix,
// sensor and output rules, and the network architecture shared by the
// PG-VarMiON net and the L-DeepONet trunk.
struct problem_setup {
  problem_tag tag = problem_tag::diffusion1d;
  pde_config pde;
  trial_basis basis;
  mass_matrix mass; // exactly the identity for orthonormal bases
  quadrature_rule sensor_rule;
  quadrature_rule output_rule;
  std::vector<int> hidden;
  bool final_bias = true;
  double cutoff_p = 100.0;
  int forcing_modes = 10;

  int dim() const { return pde.dim; }
  std::vector<int> layer_dims() const;
};

// The paper configurations. An explicit transform (from a checkpoint)
// replaces the freshly orthonormalized one for the boundary-layer basis.
problem_setup make_problem(problem_tag tag, const Matrix* basis_transform = nullptr);

enum class model_kind : std::uint8_t { pg_varmion = 1, bnet = 2, l_deeponet = 3 };

std::string to_string(model_kind k);
model_kind parse_model(const std::string& s);

class operator_model {
public:
  operator_model() = default;
  static operator_model pg_varmion(const problem_setup& setup, std::uint64_t seed);
  static operator_model bnet(const problem_setup& setup, std::uint64_t seed);
  static operator_model l_deeponet(const problem_setup& setup, std::uint64_t seed);
  static operator_model create(model_kind kind, const problem_setup& setup, std::uint64_t seed);

  model_kind kind() const { return kind_; }
  const problem_setup& setup() const { return setup_; }
  const trial_basis& basis() const { return setup_.basis; }
  const mass_matrix& mass() const { return setup_.mass; }
  const quadrature_rule& sensor_rule() const { return setup_.sensor_rule; }
  int sensor_count() const { return static_cast<int>(setup_.sensor_rule.size()); }
  // N for PG-VarMiON and BNet, q = N for L-DeepONet.
  int coefficient_dim() const { return setup_.basis.size(); }

  // PG-VarMiON net or L-DeepONet trunk.
  bool has_net() const { return kind_ != model_kind::bnet; }
  const mlp& net() const { return net_; }
  mlp& net() { return net_; }
  // BNet and L-DeepONet matrix B (N x N_s).
  const Matrix& b() const { return b_; }
  Matrix& b() { return b_; }

  // Net parameters first, then B row-major.
  Eigen::Index parameter_count() const;
  Vector parameters() const;
  void set_parameters(const Vector& theta);

  // Optional boundary sensors for the A^b G^b N term.
  void set_boundary_rule(quadrature_rule rule) { boundary_rule_ = std::move(rule); }
  const std::optional<quadrature_rule>& boundary_rule() const { return boundary_rule_; }

  // A_ij = N_i(x_j) at the sensor nodes (PG-VarMiON only).
  Matrix branch_matrix() const;
  // beta = A G F (+ A^b G^b N).
  Vector pg_branch(const Vector& f, const Vector* boundary = nullptr) const;

  // Coefficients for a batch of sensor vectors (columns): N x B.
  Matrix coefficients(const Matrix& f) const;
  // Phi (PG-VarMiON, BNet) or tau (L-DeepONet) at the points: N x P.
  Matrix features(const std::vector<Point>& points) const;
  // u_hat at the points for each sensor column: P x B.
  Matrix evaluate(const Matrix& f, const std::vector<Point>& points) const;
  Vector evaluate(const Vector& f, const std::vector<Point>& points) const;

  // psi_hat = M N(x); equals the net output for orthonormal bases.
  Matrix psi_values(const std::vector<Point>& points) const;
  std::vector<ScalarField> recover_psi() const;

private:
  model_kind kind_ = model_kind::pg_varmion;
  problem_setup setup_;
  mlp net_;
  Matrix b_;
  std::optional<quadrature_rule> boundary_rule_;
};

// A batch of (function, output node) pairs. Function j of the batch has
// sensor vector f.col(j); pair p uses function slot[p] at node[p].
struct training_batch {
  Matrix f;
  std::vector<int> slot;
  std::vector<int> node;
  Vector label;

  std::size_t pairs() const { return slot.size(); }
};

// Mean squared residual over the pairs. When grad is given it receives the
// gradient with respect to operator_model::parameters(). node_features may
// hold features() at all nodes for PG-VarMiON and BNet to skip re-evaluation.
double training_loss(const operator_model& model, const training_batch& batch,
                     const std::vector<Point>& nodes, Vector* grad = nullptr,
                     const Matrix* node_features = nullptr);

} // namespace pgvarmion
