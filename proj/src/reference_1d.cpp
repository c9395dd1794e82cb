#include "pgvarmion/reference.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pgvarmion {

reference_solution::reference_solution(modal_solution_1d m, std::string resolution)
  : data_(std::move(m)), method_(method::spectral_exact), resolution_(std::move(resolution)) {}

reference_solution::reference_solution(piecewise_solution_1d p, std::string resolution)
  : data_(std::move(p)), method_(method::piecewise_exact), resolution_(std::move(resolution)) {}

reference_solution::reference_solution(chebyshev_solution_2d s)
  : data_(std::move(s)), method_(method::collocation) {
  resolution_ = "Chebyshev degree " + std::to_string(std::get<chebyshev_solution_2d>(data_).degree);
}

double reference_solution::operator()(const Point& p) const {
  if (auto m = std::get_if<modal_solution_1d>(&data_)) return m->value(p.x);
  if (auto w = std::get_if<piecewise_solution_1d>(&data_)) return w->value(p.x);
  if (auto s = std::get_if<chebyshev_solution_2d>(&data_)) return s->value(p);
  throw invalid_argument_error("reference_solution: empty");
}

Vector reference_solution::values(const quadrature_rule& rule) const {
  if (auto s = std::get_if<chebyshev_solution_2d>(&data_)) {
    const auto kind = rule.spec().kind;
    if (kind == rule_kind::tensor_gauss_legendre || kind == rule_kind::tensor_uniform_interior) {
      const int nx = rule.spec().nx, ny = rule.spec().ny;
      Vector xs(nx), ys(ny);
      for (int i = 0; i < nx; ++i) xs[i] = rule.node(static_cast<std::size_t>(i * ny)).x;
      for (int j = 0; j < ny; ++j) ys[j] = rule.node(static_cast<std::size_t>(j)).y;
      return s->grid_values(xs, ys);
    }
  }
  Vector v(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t k = 0; k < rule.size(); ++k) v[static_cast<Eigen::Index>(k)] = (*this)(rule.node(k));
  return v;
}

std::string reference_solution::method_name() const {
  switch (method_) {
  case method::spectral_exact:
    return "spectral_exact";
  case method::piecewise_exact:
    return "piecewise_exact";
  case method::galerkin:
    return "galerkin";
  case method::collocation:
    return "chebyshev_collocation";
  }
  return "";
}

modal_solution_1d modal_solve_1d(const std::vector<double>& amplitude,
                                 const std::vector<double>& phase,
                                 const std::vector<double>& omega, double kappa, double c) {
  require(kappa > 0.0, "modal_solve_1d: kappa must be positive");
  require(amplitude.size() == phase.size() && phase.size() == omega.size(),
          "modal_solve_1d: size mismatch");
  modal_solution_1d m;
  m.omega = omega;
  m.alpha.resize(omega.size());
  m.beta.resize(omega.size());
  double up0 = 0.0, up1 = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    const double w = omega[i];
    const double as = amplitude[i] * std::cos(phase[i]);
    const double ac = amplitude[i] * std::sin(phase[i]);
    // kappa w^2 alpha - c w beta = as,  c w alpha + kappa w^2 beta = ac
    const double kw2 = kappa * w * w, cw = c * w;
    const double det = kw2 * kw2 + cw * cw;
    m.alpha[i] = (kw2 * as + cw * ac) / det;
    m.beta[i] = (kw2 * ac - cw * as) / det;
    up0 += m.beta[i];
    up1 += m.alpha[i] * std::sin(w) + m.beta[i] * std::cos(w);
  }
  if (c == 0.0) {
    m.diffusion = true;
    m.a0 = -up0;
    m.b0 = up0 - up1;
    return m;
  }
  m.diffusion = false;
  m.s = c / kappa;
  if (m.s > 0.0) {
    m.b0 = (up0 - up1) / (-std::expm1(-m.s));
    m.a0 = -up1 - m.b0;
  } else {
    m.b0 = (up1 - up0) / (-std::expm1(m.s));
    m.a0 = -up0 - m.b0;
  }
  return m;
}

std::size_t piecewise_solution_1d::locate(double x) const {
  auto it = std::upper_bound(knots.begin(), knots.end(), x);
  std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
  return std::min(i, poly.size() - 1);
}

piecewise_solution_1d piecewise_solve_1d(const cubic_spline& q, double scale, double kappa,
                                         double c) {
  require(kappa > 0.0, "piecewise_solve_1d: kappa must be positive");
  const double s = c / kappa;
  require(s == 0.0 || std::abs(s) >= 1e-2,
          "piecewise_solve_1d: |c|/kappa in (0, 1e-2) is not supported, use c = 0");
  piecewise_solution_1d sol;
  sol.knots = q.knots();
  sol.s = s;
  const auto m = q.intervals();
  sol.poly.resize(m);
  sol.a.assign(m, 0.0);
  sol.b.assign(m, 0.0);

  for (std::size_t i = 0; i < m; ++i) {
    std::array<double, 4> qc = q.piece(i);
    for (auto& v : qc) v *= scale;
    auto& p = sol.poly[i];
    p.fill(0.0);
    if (s == 0.0) {
      for (int k = 0; k < 4; ++k) p[static_cast<std::size_t>(k + 2)] = -qc[static_cast<std::size_t>(k)] / ((k + 1.0) * (k + 2.0) * kappa);
    } else {
      p[4] = qc[3] / (4.0 * c);
      p[3] = (qc[2] + 12.0 * kappa * p[4]) / (3.0 * c);
      p[2] = (qc[1] + 6.0 * kappa * p[3]) / (2.0 * c);
      p[1] = (qc[0] + 2.0 * kappa * p[2]) / c;
    }
  }

  auto pval = [&](std::size_t i, double t) {
    const auto& p = sol.poly[i];
    return p[0] + t * (p[1] + t * (p[2] + t * (p[3] + t * (p[4] + t * p[5]))));
  };
  auto pder = [&](std::size_t i, double t) {
    const auto& p = sol.poly[i];
    return p[1] + t * (2.0 * p[2] + t * (3.0 * p[3] + t * (4.0 * p[4] + t * 5.0 * p[5])));
  };
  // g(h), g'(0), g'(h) of the homogeneous solution on a cell of width h.
  auto hom = [s](double h) {
    struct g3 {
      double gh, d0, dh;
    };
    if (s == 0.0) return g3{h, 1.0, 1.0};
    if (s > 0.0) return g3{-std::expm1(-s * h) / s, std::exp(-s * h), 1.0};
    return g3{std::expm1(s * h) / s, 1.0, std::exp(s * h)};
  };

  using triplet = Eigen::Triplet<double>;
  std::vector<triplet> e;
  const int n = static_cast<int>(2 * m);
  Vector rhs = Vector::Zero(n);
  e.emplace_back(0, 0, 1.0);
  int row = 1;
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double h = sol.knots[i + 1] - sol.knots[i];
    const double h1 = sol.knots[i + 2] - sol.knots[i + 1];
    const auto g = hom(h), g1 = hom(h1);
    const int ai = static_cast<int>(2 * i), bi = ai + 1, aj = ai + 2, bj = ai + 3;
    e.emplace_back(row, ai, 1.0);
    e.emplace_back(row, bi, g.gh);
    e.emplace_back(row, aj, -1.0);
    rhs[row] = -pval(i, h);
    ++row;
    e.emplace_back(row, bi, g.dh);
    e.emplace_back(row, bj, -g1.d0);
    rhs[row] = pder(i + 1, 0.0) - pder(i, h);
    ++row;
  }
  {
    const std::size_t i = m - 1;
    const double h = sol.knots[i + 1] - sol.knots[i];
    e.emplace_back(row, static_cast<int>(2 * i), 1.0);
    e.emplace_back(row, static_cast<int>(2 * i + 1), hom(h).gh);
    rhs[row] = -pval(i, h);
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(e.begin(), e.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw numeric_error("piecewise_solve_1d: singular system");
  const Vector x = lu.solve(rhs);
  for (std::size_t i = 0; i < m; ++i) {
    sol.a[i] = x[static_cast<Eigen::Index>(2 * i)];
    sol.b[i] = x[static_cast<Eigen::Index>(2 * i + 1)];
  }
  return sol;
}

std::vector<double> graded_mesh(double h_max, double h_min) {
  require(h_max > 0.0 && h_max <= 0.5 && h_min > 0.0, "graded_mesh: bad spacings");
  h_min = std::min(h_min, h_max);
  std::vector<double> steps;
  double total = 0.0;
  for (double h = h_min; h < h_max; h *= 1.15) {
    steps.push_back(h);
    total += h;
  }
  require(2.0 * total < 1.0, "graded_mesh: refinement zones overlap");
  const int n_mid = std::max(1, static_cast<int>(std::ceil((1.0 - 2.0 * total) / h_max)));
  const double h_mid = (1.0 - 2.0 * total) / n_mid;
  std::vector<double> x{0.0};
  for (double h : steps) x.push_back(x.back() + h);
  for (int i = 0; i < n_mid; ++i) x.push_back(x.back() + h_mid);
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) x.push_back(x.back() + *it);
  x.back() = 1.0;
  return x;
}

reference_solution solve_field_1d(const ScalarField& f, double kappa, double c,
                                  const std::vector<double>& mesh) {
  std::vector<double> v(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) v[i] = f({mesh[i], 0.0});
  const cubic_spline q(mesh, v);
  std::ostringstream res;
  res << "piecewise on " << mesh.size() - 1 << " cells";
  return reference_solution(piecewise_solve_1d(q, 1.0, kappa, c), res.str());
}

namespace {

std::vector<double> default_mesh(double kappa, double c) {
  const double h_max = 1.0 / 2048.0;
  if (c == 0.0) return graded_mesh(h_max, h_max);
  return graded_mesh(h_max, std::min(h_max, kappa / std::abs(c) / 200.0));
}

reference_solution solve_1d(const forcing_sample& f, double kappa, double c, bool fallback) {
  require(kappa > 0.0, "reference solve: kappa must be positive");
  require(f.spatial_dim() == 1, "reference solve: 1D forcing required");
  reference_solution r;
  if (f.family == forcing_family::fourier1d) {
    std::vector<double> amp(f.modes), ph(f.modes), om(f.modes);
    for (int j = 0; j < f.modes; ++j) {
      amp[j] = f.scale * f.a(j);
      ph[j] = f.b(j);
      om[j] = (j + 1) * M_PI;
    }
    r = reference_solution(modal_solve_1d(amp, ph, om, kappa, c));
  } else {
    if (!fallback)
      throw unsupported_forcing_error("no closed form for " + to_string(f.family) +
                                      " forcing and the fallback solver is disabled");
    if (f.family == forcing_family::grf) {
      r = reference_solution(piecewise_solve_1d(*f.spline, f.scale, kappa, c),
                             "exact on the 256-cell forcing spline");
    } else {
      r = solve_field_1d([&f](const Point& p) { return f(p); }, kappa, c, default_mesh(kappa, c));
    }
  }
  if (c != 0.0 && kappa / std::abs(c) < 1e-7)
    r.set_warning("boundary layer thinner than 1e-7: FD oracle cannot resolve it");
  return r;
}

} // namespace

reference_solution solve_diffusion_1d(const forcing_sample& f, double kappa, bool fallback) {
  return solve_1d(f, kappa, 0.0, fallback);
}

reference_solution solve_advdiff_1d(const forcing_sample& f, double kappa, double c,
                                    bool fallback) {
  return solve_1d(f, kappa, c, fallback);
}

std::vector<ScalarField> solve_adjoint_psi_1d(const trial_basis& basis, const pde_config& config) {
  require(basis.spatial_dim() == 1 && config.dim == 1, "solve_adjoint_psi_1d: 1D only");
  const double kappa = config.kappa, c = -config.c; // adjoint flips the advection
  std::vector<std::shared_ptr<const reference_solution>> raw;
  const int nr = basis.raw_size();
  const auto sines = basis.kind() == basis_kind::custom ? 0 : basis.n_sines();
  for (int r = 0; r < nr; ++r) {
    if (r < sines) {
      raw.push_back(std::make_shared<const reference_solution>(
          modal_solve_1d({std::sqrt(2.0)}, {0.0}, {(r + 1) * M_PI}, kappa, c)));
    } else {
      // Component r of the raw basis as a field.
      const trial_basis plain = basis.orthonormalized() ? basis.with_transform(Matrix::Identity(nr, nr)) : basis;
      auto comp = [plain, r](const Point& p) {
        Vector v(plain.raw_size());
        plain.evaluate_raw(p, v.data());
        return v[r];
      };
      const double width = c == 0.0 ? 1.0 : kappa / std::abs(c);
      const auto mesh = graded_mesh(1.0 / 4096.0, std::min(1.0 / 4096.0, width / 400.0));
      raw.push_back(std::make_shared<const reference_solution>(solve_field_1d(comp, kappa, c, mesh)));
    }
  }
  const Matrix t = basis.orthonormalized() ? basis.transform() : Matrix(Matrix::Identity(nr, nr));
  std::vector<ScalarField> psi;
  for (int i = 0; i < basis.size(); ++i) {
    const Vector row = t.row(i).transpose();
    psi.emplace_back([raw, row](const Point& p) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < row.size(); ++r)
        if (row[r] != 0.0) s += row[r] * (*raw[static_cast<std::size_t>(r)])(p);
      return s;
    });
  }
  return psi;
}

} // namespace pgvarmion
