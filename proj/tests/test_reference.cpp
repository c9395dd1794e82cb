#include "pgvarmion/reference.hpp"
#include "pgvarmion/rng.hpp"

#include <doctest.h>

#include <Eigen/Sparse>

#include <cmath>

using namespace pgvarmion;
using doctest::Approx;

namespace {

forcing_sample single_sine(int n, double phase = 0.0) {
  std::vector<double> a(static_cast<std::size_t>(n), 0.0), b(static_cast<std::size_t>(n), 0.0);
  a.back() = 1.0;
  b.back() = phase;
  return fourier_1d_from_coefficients(a, b, false, 1.0);
}

// Pointwise residual -kappa u'' + c u' - f with fourth-order central
// differences of spacing h, evaluated in extended precision.
long double fd_residual(const reference_solution& u, const forcing_sample& f, double kappa, double c, long double x,
                        long double h) {
  const long double um2 = u.value_1d(x - 2 * h), um1 = u.value_1d(x - h), u0 = u.value_1d(x),
                    up1 = u.value_1d(x + h), up2 = u.value_1d(x + 2 * h);
  const long double d2 = (-um2 + 16 * um1 - 30 * u0 + 16 * up1 - up2) / (12 * h * h);
  const long double d1 = (um2 - 8 * um1 + 8 * up1 - up2) / (12 * h);
  return -kappa * d2 + c * d1 - static_cast<long double>(f({static_cast<double>(x), 0.0}));
}

// Second-order FD solve of -kappa u'' + c u' = f on n interior points.
Vector fd_solve(const ScalarField& f, double kappa, double c, int n) {
  const double h = 1.0 / (n + 1);
  Eigen::SparseMatrix<double> a(n, n);
  std::vector<Eigen::Triplet<double>> t;
  Vector rhs(n);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, i, 2 * kappa / (h * h));
    if (i > 0) t.emplace_back(i, i - 1, -kappa / (h * h) - c / (2 * h));
    if (i + 1 < n) t.emplace_back(i, i + 1, -kappa / (h * h) + c / (2 * h));
    rhs[i] = f({(i + 1) * h, 0.0});
  }
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
  return lu.solve(rhs);
}

} // namespace

TEST_CASE("diffusion with a single sine mode") {
  const auto u = solve_diffusion_1d(single_sine(1), 0.01);
  CHECK(u(0.5) == Approx(1.0 / (0.01 * M_PI * M_PI)).epsilon(1e-13));
  CHECK(u(0.5) == Approx(10.13212).epsilon(1e-6));
  CHECK(std::abs(u(0.0)) < 1e-12);
  CHECK(std::abs(u(1.0)) < 1e-12);
}

TEST_CASE("zero forcing gives the zero solution") {
  const auto f = fourier_1d_from_coefficients(std::vector<double>(10, 0.0), std::vector<double>(10, 0.0), false);
  const auto u = solve_diffusion_1d(f, 0.01);
  const auto v = solve_advdiff_1d(f, 1e-4, 0.1);
  for (double x : {0.0, 0.2, 0.7, 0.9999}) {
    CHECK(u(x) == 0.0);
    CHECK(v(x) == 0.0);
  }
}

TEST_CASE("cosine forcing with the linear correction") {
  const auto f = single_sine(1, M_PI / 2);
  const auto u = solve_diffusion_1d(f, 0.01);
  CHECK(std::abs(u(0.0)) < 1e-12);
  CHECK(std::abs(u(1.0)) < 1e-12);
  const int n = 8191;
  const Vector fd = fd_solve([](const Point& p) { return std::cos(M_PI * p.x); }, 0.01, 0.0, n);
  // x = 0.25 is interior node 2048 of the 8193-point grid.
  CHECK(u(0.25) == Approx(fd[2047]).epsilon(1e-6));
}

TEST_CASE("diffusion residuals under the FD oracle") {
  const long double h = 1.0L / 4096;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = fourier_forcing_1d(seed);
    const auto u = solve_diffusion_1d(f, 0.01);
    long double worst = 0;
    for (int i = 2; i <= 4094; ++i) worst = std::max(worst, std::abs(fd_residual(u, f, 0.01, 0.0, i * h, h)));
    CHECK(static_cast<double>(worst) <= 1e-9);
  }
}

TEST_CASE("advection-diffusion residuals under the FD oracle") {
  // The layer has width kappa / c = 1e-3; a local stencil of spacing 1e-6
  // resolves it. Residuals are measured against the size of the terms.
  const double kappa = 1e-4, c = 0.1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = fourier_forcing_1d(seed);
    const auto u = solve_advdiff_1d(f, kappa, c);
    long double worst = 0;
    for (int i = 1; i < 4096; ++i) {
      long double x = i / 4096.0L;
      if (i > 4000) x = 1.0L - (4096 - i) * 2.5e-5L; // dense sampling inside the layer
      const long double h = 1e-6L;
      const long double r = fd_residual(u, f, kappa, c, x, h);
      const long double d1 = (u.value_1d(x + h) - u.value_1d(x - h)) / (2 * h);
      const long double scale = std::max<long double>(1.0L, std::abs(c * d1));
      worst = std::max(worst, std::abs(r) / scale);
    }
    CHECK(static_cast<double>(worst) <= 1e-9);
  }
}

TEST_CASE("advection-diffusion solutions reproduce the boundary-layer functions") {
  const auto basis = trial_basis::boundary_layer(0.1, 1e-4, 0, 10);
  for (int n = 1; n <= 10; ++n) {
    const auto u = solve_advdiff_1d(single_sine(n), 1e-4, 0.1);
    for (double x : {0.1, 0.5, 0.99, 0.999, 0.9999}) {
      const double phi = boundary_layer_function<double>(n, x, 0.1, 1e-4);
      CHECK(u(x) * std::sqrt(2.0) == Approx(phi).epsilon(1e-10));
    }
  }
}

TEST_CASE("zero velocity reduces to pure diffusion") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = fourier_forcing_1d(seed);
    const auto u = solve_diffusion_1d(f, 0.01);
    const auto v = solve_advdiff_1d(f, 0.01, 0.0);
    for (double x : {0.1, 0.45, 0.8}) CHECK(std::abs(u(x) - v(x)) <= 1e-12 * std::max(1.0, std::abs(u(x))));
  }
}

TEST_CASE("advection-diffusion against an FD solve") {
  const auto u = solve_advdiff_1d(single_sine(1), 0.01, 0.1);
  const int n = 16383;
  const Vector fd = fd_solve([](const Point& p) { return std::sin(M_PI * p.x); }, 0.01, 0.1, n);
  CHECK(u(0.5) == Approx(fd[8191]).epsilon(1e-5));
}

TEST_CASE("GRF forcings use the exact piecewise solve") {
  const auto f = grf_forcing(0.05, 4);
  for (double c : {0.0, 0.1}) {
    const double kappa = c == 0.0 ? 0.01 : 1e-4;
    const auto u = c == 0.0 ? solve_diffusion_1d(f, kappa) : solve_advdiff_1d(f, kappa, c);
    CHECK(u.method_tag() == reference_solution::method::piecewise_exact);
    CHECK(std::abs(u(0.0)) < 1e-10);
    CHECK(std::abs(u(1.0)) < 1e-10);
    long double worst = 0;
    for (int i = 1; i < 500; ++i) {
      const long double x = (i + 0.37L) / 501.0L; // keep the stencil away from spline knots
      const long double h = 1e-6L;
      const long double d1 = (u.value_1d(x + h) - u.value_1d(x - h)) / (2 * h);
      worst = std::max(worst, std::abs(fd_residual(u, f, kappa, c, x, h)) / std::max<long double>(1, std::abs(c * d1)));
    }
    CHECK(static_cast<double>(worst) <= 1e-6);
  }
}

TEST_CASE("custom fields need the fallback") {
  const auto f = field_forcing([](const Point& p) { return p.x; }, 1);
  CHECK_THROWS_AS(solve_diffusion_1d(f, 0.01, false), unsupported_forcing_error);
  const auto u = solve_diffusion_1d(f, 0.01, true);
  // -0.01 u'' = x: u = (x - x^3) / 0.06
  CHECK(u(0.5) == Approx((0.5 - 0.125) / 0.06).epsilon(1e-8));
}

TEST_CASE("vortex field is divergence free") {
  counter_rng rng(derive_key({31}));
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const Point p{rng.uniform(), rng.uniform()};
    worst = std::max(worst, std::abs(vortex_field::divergence(p)));
  }
  CHECK(worst <= 1e-10);
  // Jacobian against central differences.
  const Point p{0.6, 0.8};
  const auto j = vortex_field::jacobian(p);
  const double h = 1e-6;
  const auto vxp = vortex_field::velocity({p.x + h, p.y}), vxm = vortex_field::velocity({p.x - h, p.y});
  const auto vyp = vortex_field::velocity({p.x, p.y + h}), vym = vortex_field::velocity({p.x, p.y - h});
  CHECK(j[0] == Approx((vxp[0] - vxm[0]) / (2 * h)).epsilon(1e-7));
  CHECK(j[1] == Approx((vyp[0] - vym[0]) / (2 * h)).epsilon(1e-7));
  CHECK(j[2] == Approx((vxp[1] - vxm[1]) / (2 * h)).epsilon(1e-7));
  CHECK(j[3] == Approx((vyp[1] - vym[1]) / (2 * h)).epsilon(1e-7));
}

namespace {

double relative_l2(const ScalarField& a, const ScalarField& b, const quadrature_rule& rule) {
  double num = 0.0, den = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double e = a(rule.node(q)) - b(rule.node(q));
    num += rule.weight(q) * e * e;
    den += rule.weight(q) * b(rule.node(q)) * b(rule.node(q));
  }
  return std::sqrt(num / den);
}

const collocation_solver_2d& default_solver() {
  static const collocation_solver_2d solver(pde_config::vortex_2d());
  return solver;
}

} // namespace

TEST_CASE("2D collocation solver") {
  const auto cfg = pde_config::vortex_2d();
  const auto& solver = default_solver();
  const auto rule = tensor_rule(gauss_legendre(80), gauss_legendre(80));
  CHECK(solver.degree() == 64);

  SUBCASE("manufactured solution") {
    const double k = cfg.kappa;
    auto exact = [](const Point& p) { return std::sin(M_PI * p.x) * std::sin(M_PI * p.y); };
    auto rhs = [k](const Point& p) {
      const auto v = vortex_field::velocity(p);
      const double sx = std::sin(M_PI * p.x), sy = std::sin(M_PI * p.y);
      const double cx = std::cos(M_PI * p.x), cy = std::cos(M_PI * p.y);
      return 2 * k * M_PI * M_PI * sx * sy + v[0] * M_PI * cx * sy + v[1] * M_PI * sx * cy;
    };
    const auto u = solver.solve(ScalarField(rhs));
    CHECK(relative_l2([&](const Point& p) { return u(p); }, exact, rule) <= 1e-6);
  }

  SUBCASE("zero forcing") {
    const auto f = fourier_2d_from_coefficients(10, std::vector<double>(300, 0.0), false);
    const auto u = solver.solve(f);
    CHECK(u.chebyshev()->values.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("boundary values vanish") {
    const auto u = solver.solve(fourier_forcing_2d(9));
    for (double t : {0.0, 0.3, 0.77, 1.0}) {
      CHECK(u({t, 0.0}) == 0.0);
      CHECK(u({0.0, t}) == 0.0);
      CHECK(u({t, 1.0}) == 0.0);
      CHECK(u({1.0, t}) == 0.0);
    }
  }

  SUBCASE("grid evaluation matches pointwise evaluation") {
    const auto u = solver.solve(fourier_forcing_2d(4));
    const auto out = tensor_rule(uniform_interior(13), uniform_interior(13));
    const Vector g = u.values(out);
    for (std::size_t q = 0; q < out.size(); ++q)
      CHECK(g[static_cast<Eigen::Index>(q)] == Approx(u(out.node(q))).epsilon(1e-12));
  }

  SUBCASE("adjoint duality") {
    // (A^* psi, w) = (psi, A w) for collocation: with w the forward solution
    // for f and psi the adjoint solution for g, (f, psi) = (u, g).
    const auto basis = trial_basis::tensor_sine2d(10);
    const auto psi = solve_adjoint_psi_2d(basis, solver);
    const auto f = fourier_forcing_2d(3);
    const auto u = solver.solve(f);
    const auto fine = tensor_rule(gauss_legendre(120), gauss_legendre(120));
    const Matrix phi = basis.evaluate(fine);
    const Vector uq = u.values(fine);
    const Vector moments = phi * fine.weights().cwiseProduct(uq);
    for (int i : {0, 1, 10, 11, 55, 99}) {
      double rhs = 0.0;
      for (std::size_t q = 0; q < fine.size(); ++q)
        rhs += fine.weight(q) * f(fine.node(q)) * psi[static_cast<std::size_t>(i)](fine.node(q));
      CHECK(std::abs(moments[i] - rhs) <= 1e-7 * moments.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("2D self-convergence") {
  const auto cfg = pde_config::vortex_2d();
  const collocation_solver_2d finer(cfg, 80);
  const auto rule = tensor_rule(gauss_legendre(100), gauss_legendre(100));
  for (std::uint64_t seed : {1, 2}) {
    const auto f = fourier_forcing_2d(seed);
    const auto a = default_solver().solve(f), b = finer.solve(f);
    CHECK(relative_l2([&](const Point& p) { return a(p); }, [&](const Point& p) { return b(p); }, rule) < 1e-4);
  }
}

TEST_CASE("1D adjoint weighting functions") {
  SUBCASE("diffusion closed form") {
    const auto basis = trial_basis::sine1d(10);
    const auto psi = solve_adjoint_psi_1d(basis, pde_config::diffusion_1d());
    CHECK(psi[0]({0.5, 0.0}) == Approx(std::sqrt(2.0) * 100.0 / (M_PI * M_PI)).epsilon(1e-13));
    CHECK(psi[0]({0.5, 0.0}) == Approx(14.3290).epsilon(1e-5));
    for (int j = 1; j <= 10; ++j)
      for (double x : {0.1, 0.33, 0.77}) {
        const double exact = std::sqrt(2.0) * std::sin(j * M_PI * x) / (j * j * M_PI * M_PI * 0.01);
        CHECK(std::abs(psi[static_cast<std::size_t>(j - 1)]({x, 0.0}) - exact) <= 1e-8);
      }
  }
  SUBCASE("symmetrized form for diffusion") {
    const auto basis = trial_basis::sine1d(10);
    const auto psi = solve_adjoint_psi_1d(basis, pde_config::diffusion_1d());
    const auto rule = gauss_legendre(200);
    const Matrix phi = basis.evaluate(rule);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto f = fourier_forcing_1d(seed);
      const auto u = solve_diffusion_1d(f, 0.01);
      const Vector moments = phi * rule.weights().cwiseProduct(u.values(rule));
      for (int i = 0; i < 10; ++i) {
        const double rhs = integrate([&](const Point& p) { return f(p) * psi[static_cast<std::size_t>(i)](p); }, rule);
        CHECK(std::abs(moments[i] - rhs) <= 1e-7 * moments.cwiseAbs().maxCoeff());
      }
    }
  }
  SUBCASE("symmetrized form for advection-diffusion") {
    const auto basis = orthonormal_boundary_layer_basis(0.1, 1e-4);
    const auto psi = solve_adjoint_psi_1d(basis, pde_config::advdiff_1d());
    const auto rule = gauss_legendre(2000);
    const Matrix phi = basis.evaluate(rule);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto f = fourier_forcing_1d(seed);
      const auto u = solve_advdiff_1d(f, 1e-4, 0.1);
      const Vector moments = phi * rule.weights().cwiseProduct(u.values(rule));
      for (int i = 0; i < basis.size(); ++i) {
        const double rhs = integrate([&](const Point& p) { return f(p) * psi[static_cast<std::size_t>(i)](p); }, rule);
        CHECK(std::abs(moments[i] - rhs) <= 1e-7 * moments.cwiseAbs().maxCoeff());
      }
    }
  }
}

TEST_CASE("projection residual is orthogonal") {
  const auto basis = trial_basis::sine1d(10);
  const auto rule = gauss_legendre(200);
  const Matrix phi = basis.evaluate(rule);
  const auto m = build_mass_matrix(phi, rule.weights());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Vector u = solve_diffusion_1d(grf_forcing(0.1, seed), 0.01).values(rule);
    const Vector c = project_values(u, phi, rule.weights(), m);
    const Vector r = u - phi.transpose() * c;
    CHECK((phi * rule.weights().cwiseProduct(r)).cwiseAbs().maxCoeff() <= 1e-8 * u.cwiseAbs().maxCoeff());
  }
}
