#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/quadrature.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace pgvarmion {

enum class basis_kind : std::uint8_t {
  custom = 0,
  sine1d = 1,
  boundary_layer = 2,
  tensor_sine2d = 3,
};

// n-th boundary-layer function: sqrt(2) times the solution of
// -kappa u'' + c u' = sin(n pi x), u(0) = u(1) = 0. All exponentials are
// evaluated with non-positive arguments, so c/kappa = 1e3 is safe.
template <class T>
T boundary_layer_function(int n, T x, T c, T kappa) {
  using std::cos;
  using std::exp;
  using std::expm1;
  using std::sin;
  using std::sqrt;
  const T pi = T(M_PI);
  const T s = c / kappa;
  const T sign = (n % 2 == 0) ? T(1) : T(-1);
  T h;
  if (s > 0) {
    const T e1 = exp(-s * (T(1) - x));
    const T es = exp(-s);
    h = c * (sign * (e1 - es) + (T(1) - e1)) / (-expm1(-s));
  } else {
    const T e1 = exp(s * x);
    const T es = exp(s);
    h = c * (sign * (e1 - T(1)) + (es - e1)) / expm1(s);
  }
  const T pn = pi * T(n);
  const T num = pn * kappa * sin(pn * x) - c * cos(pn * x) + h;
  return sqrt(T(2)) * num / (pn * (pn * kappa * pn * kappa + c * c));
}

class trial_basis {
public:
  static trial_basis sine1d(int n);
  // First `n_sines` sines followed by `n_layer` boundary-layer functions.
  static trial_basis boundary_layer(double c, double kappa, int n_sines = 5, int n_layer = 10);
  // Components 2 sin(i pi x) sin(j pi y), index (i-1) m + (j-1).
  static trial_basis tensor_sine2d(int m);
  static trial_basis custom(std::vector<ScalarField> components, int spatial_dim);

  // Same raw components combined through `transform` (row i holds the
  // coefficients of output component i over the raw components).
  trial_basis with_transform(Matrix transform) const;

  int size() const { return transformed_ ? static_cast<int>(transform_.rows()) : raw_size(); }
  int raw_size() const;
  int spatial_dim() const { return spatial_dim_; }
  basis_kind kind() const { return kind_; }
  bool orthonormalized() const { return transformed_; }
  std::string tag() const;
  const Matrix& transform() const { return transform_; }

  int n_sines() const { return n_sines_; }
  int n_layer() const { return n_layer_; }
  int m() const { return m_; }
  double c() const { return c_; }
  double kappa() const { return kappa_; }

  void evaluate_raw(const Point& p, double* out) const;
  void evaluate(const Point& p, double* out) const;
  Vector operator()(const Point& p) const;
  // Columns are points: result is size() x points.size().
  Matrix evaluate(const std::vector<Point>& points) const;
  Matrix evaluate(const quadrature_rule& rule) const { return evaluate(rule.nodes()); }
  ScalarField component(int i) const;

private:
  basis_kind kind_ = basis_kind::custom;
  int spatial_dim_ = 1;
  int n_sines_ = 0;
  int n_layer_ = 0;
  int m_ = 0;
  double c_ = 0.0;
  double kappa_ = 0.0;
  std::vector<ScalarField> custom_;
  bool transformed_ = false;
  Matrix transform_;
};

enum class inner_product { l2 };

// Gram matrix of a basis under a discrete inner product, with its Cholesky
// factor and extreme eigenvalues.
struct mass_matrix {
  Matrix entries;
  Matrix lower;
  double lambda_min = 0.0;
  double lambda_max = 0.0;

  int size() const { return static_cast<int>(entries.rows()); }
  double condition() const { return lambda_max / lambda_min; }
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;
};

// Symmetrizes, checks positive definiteness and factors. Throws
// degenerate_basis_error when lambda_min <= 1e-14 lambda_max.
mass_matrix factor_mass(Matrix entries);

mass_matrix build_mass_matrix(const trial_basis& basis, const quadrature_rule& rule,
                              inner_product ip = inner_product::l2);

// Values-based form: phi is N x n (basis at the rule nodes).
mass_matrix build_mass_matrix(const Matrix& phi, const Vector& weights);

// Modified Gram-Schmidt with one reorthogonalization pass in the discrete
// inner product of `rule`.
trial_basis gram_schmidt(const trial_basis& basis, const quadrature_rule& rule);

// Best-approximation coefficients M^{-1} (u, phi_i) on the rule.
Vector project(const ScalarField& u, const trial_basis& basis, const mass_matrix& mass,
               const quadrature_rule& rule);
Vector project_values(const Vector& u, const Matrix& phi, const Vector& weights,
                      const mass_matrix& mass);

// Default rule for mass matrices and Gram-Schmidt of a basis.
quadrature_rule mass_rule(const trial_basis& basis);

// The orthonormalized boundary-layer basis of the 1D advection-diffusion
// experiment, built on mass_rule.
trial_basis orthonormal_boundary_layer_basis(double c, double kappa);

} // namespace pgvarmion
