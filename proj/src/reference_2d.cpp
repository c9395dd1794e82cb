#include "pgvarmion/reference.hpp"

#include <cmath>

namespace pgvarmion {

namespace {

double gauss(double t) { return std::exp(-12.5 * (t - 0.75) * (t - 0.75)); }

// 5 e^{1/2}
const double vortex_strength = 5.0 * std::exp(0.5);

} // namespace

std::array<double, 2> vortex_field::velocity(const Point& p) {
  const double e = vortex_strength * gauss(p.x) * gauss(p.y);
  return {-(p.y - 0.75) * e, (p.x - 0.75) * e};
}

std::array<double, 4> vortex_field::jacobian(const Point& p) {
  const double e = vortex_strength * gauss(p.x) * gauss(p.y);
  const double dx = p.x - 0.75, dy = p.y - 0.75;
  return {25.0 * dx * dy * e, e * (-1.0 + 25.0 * dy * dy), e * (1.0 - 25.0 * dx * dx),
          -25.0 * dx * dy * e};
}

double vortex_field::divergence(const Point& p) {
  const auto j = jacobian(p);
  return j[0] + j[3];
}

namespace {

// Barycentric interpolation row for the Gauss-Lobatto nodes at p.
Vector lobatto_row(const Vector& x, double p) {
  const Eigen::Index n = x.size() - 1;
  Vector w(n + 1);
  double sum = 0.0;
  for (Eigen::Index j = 0; j <= n; ++j) {
    const double dx = p - x[j];
    if (dx == 0.0) {
      w.setZero();
      w[j] = 1.0;
      return w;
    }
    double c = (j == 0 || j == n) ? 0.5 : 1.0;
    if (j % 2) c = -c;
    w[j] = c / dx;
    sum += w[j];
  }
  return w / sum;
}

Matrix lobatto_rows(const Vector& x, const Vector& ps) {
  Matrix l(ps.size(), x.size());
  for (Eigen::Index i = 0; i < ps.size(); ++i) l.row(i) = lobatto_row(x, ps[i]).transpose();
  return l;
}

} // namespace

double chebyshev_solution_2d::value(const Point& p) const {
  return lobatto_row(nodes, p.x).dot(values * lobatto_row(nodes, p.y));
}

Vector chebyshev_solution_2d::grid_values(const Vector& xs, const Vector& ys) const {
  RowMatrix g = lobatto_rows(nodes, xs) * values * lobatto_rows(nodes, ys).transpose();
  return Eigen::Map<const Vector>(g.data(), g.size());
}

collocation_solver_2d::collocation_solver_2d(const pde_config& config, int degree)
  : config_(config), n_(degree) {
  require(config.dim == 2 && config.vortex, "collocation_solver_2d: vortex_2d configuration required");
  require(config.kappa >= 1e-8, "collocation_solver_2d: kappa too small");
  require(degree >= 2, "collocation_solver_2d: degree must be at least 2");
  const int n = n_;
  // Trefethen's differentiation matrix on t in [-1, 1], mapped by
  // x = (1 - t) / 2, so d/dx = -2 d/dt.
  Vector t(n + 1), c(n + 1);
  for (int i = 0; i <= n; ++i) {
    t[i] = std::cos(M_PI * i / n);
    c[i] = (i == 0 || i == n) ? 2.0 : 1.0;
    if (i % 2) c[i] = -c[i];
  }
  d1_ = Matrix::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j)
      if (i != j) d1_(i, j) = c[i] / c[j] / (t[i] - t[j]);
  for (int i = 0; i <= n; ++i) d1_(i, i) = -d1_.row(i).sum();
  d1_ *= -2.0;
  d2_ = d1_ * d1_;
  x_ = (1.0 - t.array()) / 2.0;
  x_[0] = 0.0;
  x_[n] = 1.0;

  const int m = n - 1;
  a_ = Matrix::Zero(unknowns(), unknowns());
  const double k = config.kappa;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      const Eigen::Index row = (i - 1) * m + (j - 1);
      const auto v = vortex_field::velocity({x_[i], x_[j]});
      for (int l = 1; l < n; ++l) {
        a_(row, (l - 1) * m + (j - 1)) += -k * d2_(i, l) + v[0] * d1_(i, l);
        a_(row, (i - 1) * m + (l - 1)) += -k * d2_(j, l) + v[1] * d1_(j, l);
      }
    }
  lu_.compute(a_);
}

const Eigen::PartialPivLU<Matrix>& collocation_solver_2d::adjoint_lu() const {
  std::call_once(*adjoint_once_, [this] {
    // Same stencil with the advection sign flipped.
    const int n = n_, m = n - 1;
    Matrix b = Matrix::Zero(unknowns(), unknowns());
    const double k = config_.kappa;
    for (int i = 1; i < n; ++i)
      for (int j = 1; j < n; ++j) {
        const Eigen::Index row = (i - 1) * m + (j - 1);
        const auto v = vortex_field::velocity({x_[i], x_[j]});
        for (int l = 1; l < n; ++l) {
          b(row, (l - 1) * m + (j - 1)) += -k * d2_(i, l) - v[0] * d1_(i, l);
          b(row, (i - 1) * m + (l - 1)) += -k * d2_(j, l) - v[1] * d1_(j, l);
        }
      }
    adjoint_ = std::make_shared<Eigen::PartialPivLU<Matrix>>(b);
  });
  return *adjoint_;
}

Vector collocation_solver_2d::interior_values(const ScalarField& f) const {
  const int m = n_ - 1;
  Vector r(unknowns());
  for (int i = 1; i < n_; ++i)
    for (int j = 1; j < n_; ++j) r[(i - 1) * m + (j - 1)] = f({x_[i], x_[j]});
  return r;
}

reference_solution collocation_solver_2d::wrap(const Vector& u) const {
  if (!u.allFinite()) throw numeric_error("collocation_solver_2d: non-finite solution");
  chebyshev_solution_2d sol;
  sol.degree = n_;
  sol.nodes = x_;
  sol.values = RowMatrix::Zero(n_ + 1, n_ + 1);
  const int m = n_ - 1;
  for (int i = 1; i < n_; ++i)
    for (int j = 1; j < n_; ++j) sol.values(i, j) = u[(i - 1) * m + (j - 1)];
  return reference_solution(std::move(sol));
}

reference_solution collocation_solver_2d::solve_nodal(const Vector& rhs, bool adjoint) const {
  require(rhs.size() == unknowns(), "collocation_solver_2d: right-hand side size mismatch");
  return wrap(adjoint ? Vector(adjoint_lu().solve(rhs)) : Vector(lu_.solve(rhs)));
}

reference_solution collocation_solver_2d::solve(const forcing_sample& f) const {
  require(f.spatial_dim() == 2, "collocation_solver_2d: 2D forcing required");
  return solve_nodal(interior_values([&f](const Point& p) { return f(p); }));
}

reference_solution collocation_solver_2d::solve(const ScalarField& f) const {
  return solve_nodal(interior_values(f));
}

reference_solution collocation_solver_2d::solve_adjoint(const ScalarField& g) const {
  return solve_nodal(interior_values(g), true);
}

std::vector<ScalarField> solve_adjoint_psi_2d(const trial_basis& basis,
                                              const collocation_solver_2d& solver) {
  require(basis.spatial_dim() == 2, "solve_adjoint_psi_2d: 2D basis required");
  const int nr = basis.raw_size();
  const trial_basis plain = basis.orthonormalized() ? basis.with_transform(Matrix::Identity(nr, nr)) : basis;
  std::vector<std::shared_ptr<const reference_solution>> shared;
  for (int r = 0; r < nr; ++r)
    shared.push_back(std::make_shared<const reference_solution>(solver.solve_adjoint(plain.component(r))));
  const Matrix t = basis.orthonormalized() ? basis.transform() : Matrix(Matrix::Identity(nr, nr));
  std::vector<ScalarField> psi;
  for (int i = 0; i < basis.size(); ++i) {
    const Vector row = t.row(i).transpose();
    psi.emplace_back([shared, row](const Point& p) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < row.size(); ++k)
        if (row[k] != 0.0) s += row[k] * (*shared[static_cast<std::size_t>(k)])(p);
      return s;
    });
  }
  return psi;
}

} // namespace pgvarmion
