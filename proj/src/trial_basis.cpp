#include "pgvarmion/trial_basis.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace pgvarmion {

namespace {
constexpr double sqrt2 = 1.4142135623730950488;
}

trial_basis trial_basis::sine1d(int n) {
  require(n >= 1, "sine_basis_1d: N must be positive");
  trial_basis b;
  b.kind_ = basis_kind::sine1d;
  b.n_sines_ = n;
  return b;
}

trial_basis trial_basis::boundary_layer(double c, double kappa, int n_sines, int n_layer) {
  require(kappa > 0.0, "boundary_layer_basis: kappa must be positive");
  require(c != 0.0, "boundary_layer_basis: c must be nonzero");
  require(n_sines >= 0 && n_layer >= 1, "boundary_layer_basis: bad component counts");
  trial_basis b;
  b.kind_ = basis_kind::boundary_layer;
  b.n_sines_ = n_sines;
  b.n_layer_ = n_layer;
  b.c_ = c;
  b.kappa_ = kappa;
  return b;
}

trial_basis trial_basis::tensor_sine2d(int m) {
  require(m >= 1, "tensor_sine_basis_2d: m must be positive");
  trial_basis b;
  b.kind_ = basis_kind::tensor_sine2d;
  b.spatial_dim_ = 2;
  b.m_ = m;
  return b;
}

trial_basis trial_basis::custom(std::vector<ScalarField> components, int spatial_dim) {
  require(!components.empty(), "custom basis: no components");
  require(spatial_dim == 1 || spatial_dim == 2, "custom basis: dimension must be 1 or 2");
  trial_basis b;
  b.kind_ = basis_kind::custom;
  b.spatial_dim_ = spatial_dim;
  b.custom_ = std::move(components);
  return b;
}

trial_basis trial_basis::with_transform(Matrix transform) const {
  require(transform.cols() == raw_size(), "with_transform: column count must equal raw size");
  trial_basis b = *this;
  b.transformed_ = true;
  b.transform_ = std::move(transform);
  return b;
}

int trial_basis::raw_size() const {
  switch (kind_) {
  case basis_kind::sine1d:
    return n_sines_;
  case basis_kind::boundary_layer:
    return n_sines_ + n_layer_;
  case basis_kind::tensor_sine2d:
    return m_ * m_;
  case basis_kind::custom:
    return static_cast<int>(custom_.size());
  }
  return 0;
}

std::string trial_basis::tag() const {
  if (transformed_) return "orthonormalized";
  switch (kind_) {
  case basis_kind::sine1d:
    return "sine1d";
  case basis_kind::boundary_layer:
    return "boundary_layer";
  case basis_kind::tensor_sine2d:
    return "tensor_sine2d";
  case basis_kind::custom:
    return "custom";
  }
  return "custom";
}

void trial_basis::evaluate_raw(const Point& p, double* out) const {
  switch (kind_) {
  case basis_kind::sine1d:
    for (int j = 0; j < n_sines_; ++j) out[j] = sqrt2 * std::sin((j + 1) * M_PI * p.x);
    return;
  case basis_kind::boundary_layer:
    for (int j = 0; j < n_sines_; ++j) out[j] = sqrt2 * std::sin((j + 1) * M_PI * p.x);
    for (int n = 1; n <= n_layer_; ++n)
      out[n_sines_ + n - 1] = boundary_layer_function<double>(n, p.x, c_, kappa_);
    return;
  case basis_kind::tensor_sine2d: {
    double sx[64], sy[64];
    std::vector<double> hx, hy;
    double* px = sx;
    double* py = sy;
    if (m_ > 64) {
      hx.resize(m_);
      hy.resize(m_);
      px = hx.data();
      py = hy.data();
    }
    for (int i = 0; i < m_; ++i) {
      px[i] = std::sin((i + 1) * M_PI * p.x);
      py[i] = std::sin((i + 1) * M_PI * p.y);
    }
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j) out[i * m_ + j] = 2.0 * px[i] * py[j];
    return;
  }
  case basis_kind::custom:
    for (std::size_t j = 0; j < custom_.size(); ++j) out[j] = custom_[j](p);
    return;
  }
}

void trial_basis::evaluate(const Point& p, double* out) const {
  if (!transformed_) {
    evaluate_raw(p, out);
    return;
  }
  Vector raw(raw_size());
  evaluate_raw(p, raw.data());
  Eigen::Map<Vector>(out, size()) = transform_ * raw;
}

Vector trial_basis::operator()(const Point& p) const {
  Vector v(size());
  evaluate(p, v.data());
  return v;
}

Matrix trial_basis::evaluate(const std::vector<Point>& points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix raw(raw_size(), n);
  for (Eigen::Index k = 0; k < n; ++k) evaluate_raw(points[static_cast<std::size_t>(k)], raw.col(k).data());
  if (!transformed_) return raw;
  return transform_ * raw;
}

ScalarField trial_basis::component(int i) const {
  require(i >= 0 && i < size(), "trial_basis::component: index out of range");
  trial_basis copy = *this;
  return [copy, i](const Point& p) { return copy(p)[i]; };
}

Vector mass_matrix::solve(const Vector& b) const {
  Vector y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix mass_matrix::solve(const Matrix& b) const {
  Matrix y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix mass_matrix::inverse() const { return solve(Matrix(Matrix::Identity(size(), size()))); }

mass_matrix factor_mass(Matrix entries) {
  require(entries.rows() == entries.cols() && entries.rows() > 0, "mass matrix must be square");
  mass_matrix m;
  m.entries = 0.5 * (entries + entries.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m.entries, Eigen::EigenvaluesOnly);
  m.lambda_min = eig.eigenvalues().minCoeff();
  m.lambda_max = eig.eigenvalues().maxCoeff();
  if (!(m.lambda_max > 0.0) || m.lambda_min <= 1e-14 * m.lambda_max) {
    // Name the component whose Cholesky pivot collapses first.
    const auto n = m.entries.rows();
    Matrix l = Matrix::Zero(n, n);
    Eigen::Index worst = 0;
    double worst_ratio = INFINITY;
    for (Eigen::Index k = 0; k < n; ++k) {
      double d = m.entries(k, k) - l.row(k).head(k).squaredNorm();
      const double ratio = d / std::max(m.entries(k, k), 1e-300);
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst = k;
      }
      d = std::max(d, 1e-300);
      l(k, k) = std::sqrt(d);
      for (Eigen::Index i = k + 1; i < n; ++i)
        l(i, k) = (m.entries(i, k) - l.row(i).head(k).dot(l.row(k).head(k))) / l(k, k);
    }
    throw degenerate_basis_error("mass matrix is not positive definite (component " +
                                     std::to_string(worst) + " is dependent)",
                                 worst);
  }
  Eigen::LLT<Matrix> llt(m.entries);
  if (llt.info() != Eigen::Success)
    throw degenerate_basis_error("mass matrix Cholesky factorization failed", -1);
  m.lower = llt.matrixL();
  return m;
}

mass_matrix build_mass_matrix(const Matrix& phi, const Vector& weights) {
  require(phi.cols() == weights.size(), "build_mass_matrix: node count mismatch");
  return factor_mass(phi * weights.asDiagonal() * phi.transpose());
}

mass_matrix build_mass_matrix(const trial_basis& basis, const quadrature_rule& rule,
                              inner_product) {
  require(basis.spatial_dim() == rule.dim(), "build_mass_matrix: dimension mismatch");
  return build_mass_matrix(basis.evaluate(rule), rule.weights());
}

trial_basis gram_schmidt(const trial_basis& basis, const quadrature_rule& rule) {
  require(basis.spatial_dim() == rule.dim(), "gram_schmidt: dimension mismatch");
  const Matrix values = basis.evaluate(rule);
  const Vector& w = rule.weights();
  const int n = basis.size();
  Matrix q = values;
  Matrix t = Matrix::Identity(n, n);
  auto inner = [&w](const auto& a, const auto& b) { return (a.array() * b.array() * w.transpose().array()).sum(); };
  for (int i = 0; i < n; ++i) {
    const double original = std::sqrt(inner(values.row(i), values.row(i)));
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        const double p = inner(q.row(j), q.row(i));
        q.row(i) -= p * q.row(j);
        t.row(i) -= p * t.row(j);
      }
    }
    const double nrm = std::sqrt(inner(q.row(i), q.row(i)));
    if (!(nrm > 1e-10 * original))
      throw degenerate_basis_error("gram_schmidt: component " + std::to_string(i) +
                                       " is linearly dependent on its predecessors",
                                   i);
    q.row(i) /= nrm;
    t.row(i) /= nrm;
  }
  const Matrix total = basis.orthonormalized() ? Matrix(t * basis.transform()) : t;
  return basis.with_transform(total);
}

Vector project_values(const Vector& u, const Matrix& phi, const Vector& weights,
                      const mass_matrix& mass) {
  require(u.size() == phi.cols() && u.size() == weights.size(), "project: size mismatch");
  require(phi.rows() == mass.size(), "project: basis/mass size mismatch");
  const Vector moments = phi * u.cwiseProduct(weights);
  return mass.solve(moments);
}

Vector project(const ScalarField& u, const trial_basis& basis, const mass_matrix& mass,
               const quadrature_rule& rule) {
  return project_values(sample(u, rule), basis.evaluate(rule), rule.weights(), mass);
}

quadrature_rule mass_rule(const trial_basis& basis) {
  if (basis.spatial_dim() == 2) return tensor_rule(gauss_legendre(60), gauss_legendre(60));
  if (basis.kind() == basis_kind::boundary_layer) return gauss_legendre(1000);
  return gauss_legendre(200);
}

trial_basis orthonormal_boundary_layer_basis(double c, double kappa) {
  const auto raw = trial_basis::boundary_layer(c, kappa);
  return gram_schmidt(raw, mass_rule(raw));
}

} // namespace pgvarmion
