#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/forcing.hpp"
#include "pgvarmion/quadrature.hpp"
#include "pgvarmion/trial_basis.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace pgvarmion {

struct pde_config {
  double kappa = 0.01;
  double c = 0.0; // constant velocity in 1D
  int dim = 1;
  bool vortex = false; // 2D vortex velocity of the experiments

  static pde_config diffusion_1d(double kappa = 0.01) { return {kappa, 0.0, 1, false}; }
  static pde_config advdiff_1d(double c = 0.1, double kappa = 1e-4) { return {kappa, c, 1, false}; }
  static pde_config vortex_2d(double kappa = 1e-3) { return {kappa, 0.0, 2, true}; }
};

// c = 5 e^{1/2} G(x) G(y) (-(y - 3/4), x - 3/4) with G(t) = exp(-12.5 (t - 3/4)^2).
struct vortex_field {
  static std::array<double, 2> velocity(const Point& p);
  // d c_i / d x_j, row-major.
  static std::array<double, 4> jacobian(const Point& p);
  static double divergence(const Point& p);
};

// Sum of alpha sin(omega x) + beta cos(omega x) terms plus a homogeneous
// solution A + B h(x), with h(x) = x (c = 0), e^{s (x - 1)} (s > 0) or
// e^{s x} (s < 0), s = c / kappa.
struct modal_solution_1d {
  std::vector<double> alpha, beta, omega;
  double a0 = 0.0, b0 = 0.0, s = 0.0;
  bool diffusion = true;

  template <class T>
  T value(T x) const {
    using std::cos;
    using std::exp;
    using std::sin;
    T u = T(a0);
    for (std::size_t i = 0; i < omega.size(); ++i)
      u += T(alpha[i]) * sin(T(omega[i]) * x) + T(beta[i]) * cos(T(omega[i]) * x);
    if (diffusion)
      u += T(b0) * x;
    else if (s > 0)
      u += T(b0) * exp(T(s) * (x - T(1)));
    else
      u += T(b0) * exp(T(s) * x);
    return u;
  }
};

// Exact solution of -kappa u'' + c u' = q for piecewise-cubic q. On cell i
// with t = x - knots[i]: u = p_i(t) + A_i + B_i g_i(t), p_i a quartic with
// p_i(0) = 0 (quintic when c = 0) and g_i a homogeneous solution with
// g_i(0) = 0.
struct piecewise_solution_1d {
  std::vector<double> knots;
  std::vector<std::array<double, 6>> poly; // p_0..p_5, p_0 == 0
  std::vector<double> a, b;
  double s = 0.0;

  std::size_t locate(double x) const;

  template <class T>
  T value(T x) const {
    using std::exp;
    using std::expm1;
    const auto i = locate(static_cast<double>(x));
    const T t = x - T(knots[i]);
    const T h = T(knots[i + 1] - knots[i]);
    const auto& p = poly[i];
    T u = T(p[0]) + t * (T(p[1]) + t * (T(p[2]) + t * (T(p[3]) + t * (T(p[4]) + t * T(p[5])))));
    T g;
    if (s == 0.0)
      g = t;
    else if (s > 0.0)
      g = (exp(T(s) * (t - h)) - exp(-T(s) * h)) / T(s);
    else
      g = expm1(T(s) * t) / T(s);
    return u + T(a[i]) + T(b[i]) * g;
  }
};

// Nodal values on the tensor Chebyshev-Gauss-Lobatto grid of degree n over
// [0, 1]^2 (boundary rows are zero), evaluated by barycentric interpolation.
struct chebyshev_solution_2d {
  int degree = 0;
  Vector nodes;     // n + 1 nodes, x_k = (1 - cos(k pi / n)) / 2
  RowMatrix values; // (n + 1) x (n + 1), values(i, j) = u(x_i, x_j)

  double value(const Point& p) const;
  // u on a tensor grid given by its 1D node vectors (row-major result).
  Vector grid_values(const Vector& xs, const Vector& ys) const;
};

class reference_solution {
public:
  enum class method { spectral_exact, piecewise_exact, galerkin, collocation };

  reference_solution() = default;
  explicit reference_solution(modal_solution_1d m, std::string resolution = "closed form");
  explicit reference_solution(piecewise_solution_1d p, std::string resolution);
  explicit reference_solution(chebyshev_solution_2d s);

  double operator()(const Point& p) const;
  double operator()(double x) const { return (*this)({x, 0.0}); }

  // Evaluation in any floating type (1D solutions only), used by the FD oracles.
  template <class T>
  T value_1d(T x) const {
    if (auto m = std::get_if<modal_solution_1d>(&data_)) return m->value(x);
    if (auto p = std::get_if<piecewise_solution_1d>(&data_)) return p->value(x);
    throw invalid_argument_error("value_1d: not a 1D solution");
  }

  Vector values(const quadrature_rule& rule) const;

  method method_tag() const { return method_; }
  std::string method_name() const;
  const std::string& resolution() const { return resolution_; }
  const std::string& warning() const { return warning_; }
  void set_warning(std::string w) { warning_ = std::move(w); }
  int spatial_dim() const { return std::holds_alternative<chebyshev_solution_2d>(data_) ? 2 : 1; }
  const chebyshev_solution_2d* chebyshev() const { return std::get_if<chebyshev_solution_2d>(&data_); }

private:
  std::variant<std::monostate, modal_solution_1d, piecewise_solution_1d, chebyshev_solution_2d> data_;
  method method_ = method::spectral_exact;
  std::string resolution_;
  std::string warning_;
};

// Closed-form per-mode solution of -kappa u'' + c u' = sum a_j sin(w_j x + b_j)
// with homogeneous Dirichlet conditions.
modal_solution_1d modal_solve_1d(const std::vector<double>& amplitude,
                                 const std::vector<double>& phase,
                                 const std::vector<double>& omega, double kappa, double c);

// Exact solve for a piecewise-cubic right-hand side given as a spline.
piecewise_solution_1d piecewise_solve_1d(const cubic_spline& q, double scale, double kappa,
                                         double c);

// Mesh with spacing h_max in the interior, refined geometrically (ratio
// 1.15) down to h_min towards both end points.
std::vector<double> graded_mesh(double h_max, double h_min);

// Forcing families with closed forms are solved exactly; GRF forcings use
// the exact piecewise solve of their spline; other fields are resampled on
// `mesh` (cubic not-a-knot) when `allow_fallback` is set.
reference_solution solve_diffusion_1d(const forcing_sample& f, double kappa,
                                      bool allow_fallback = true);
reference_solution solve_advdiff_1d(const forcing_sample& f, double kappa, double c,
                                    bool allow_fallback = true);
reference_solution solve_field_1d(const ScalarField& f, double kappa, double c,
                                  const std::vector<double>& mesh);

// Chebyshev collocation solver for the 2D vortex problem: the PDE is
// enforced at the interior nodes of the degree-n Gauss-Lobatto grid. The
// forward operator is factored on construction, the adjoint operator
// -kappa Lap psi - c . grad psi (c is divergence free) on first use.
class collocation_solver_2d {
public:
  collocation_solver_2d(const pde_config& config, int degree = 64);

  int degree() const { return n_; }
  const Vector& nodes() const { return x_; }
  // Interior unknowns, (n - 1)^2, ordered (i - 1)(n - 1) + (j - 1).
  Eigen::Index unknowns() const { return static_cast<Eigen::Index>(n_ - 1) * (n_ - 1); }
  const Matrix& system() const { return a_; }

  reference_solution solve(const forcing_sample& f) const;
  reference_solution solve(const ScalarField& f) const;
  reference_solution solve_adjoint(const ScalarField& g) const;
  // rhs at the interior nodes in unknown order.
  reference_solution solve_nodal(const Vector& rhs, bool adjoint = false) const;

private:
  Vector interior_values(const ScalarField& f) const;
  reference_solution wrap(const Vector& u) const;
  const Eigen::PartialPivLU<Matrix>& adjoint_lu() const;

  pde_config config_;
  int n_;
  Vector x_;
  Matrix d1_, d2_;
  Matrix a_;
  Eigen::PartialPivLU<Matrix> lu_;
  mutable std::shared_ptr<Eigen::PartialPivLU<Matrix>> adjoint_;
  mutable std::shared_ptr<std::once_flag> adjoint_once_ = std::make_shared<std::once_flag>();
};

// Adjoint weighting functions psi_i solving a(w, psi_i) = (w, phi_i) for the
// 1D problem: -kappa psi'' - c psi' = phi_i.
std::vector<ScalarField> solve_adjoint_psi_1d(const trial_basis& basis, const pde_config& config);

// The 2D variant; basis must be the tensor sine basis.
std::vector<ScalarField> solve_adjoint_psi_2d(const trial_basis& basis,
                                              const collocation_solver_2d& solver);

} // namespace pgvarmion
