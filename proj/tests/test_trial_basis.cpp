#include "pgvarmion/analysis.hpp"
#include "pgvarmion/rng.hpp"
#include "pgvarmion/trial_basis.hpp"

#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>

using namespace pgvarmion;
using doctest::Approx;

namespace {

double max_abs_identity_gap(const Matrix& m) {
  return (m - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

} // namespace

TEST_CASE("sine basis values and mass") {
  const auto b = trial_basis::sine1d(10);
  CHECK(b.size() == 10);
  const Vector v = b({0.5, 0.0});
  CHECK(v[0] == Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(std::abs(v[1]) < 1e-15);
  const auto m = build_mass_matrix(b, mass_rule(b));
  CHECK(max_abs_identity_gap(m.entries) < 1e-12);
  CHECK(m.lambda_min == Approx(1.0).epsilon(1e-12));
  CHECK(m.lambda_max == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(trial_basis::sine1d(0), invalid_argument_error);
}

TEST_CASE("boundary-layer basis") {
  const auto b = trial_basis::boundary_layer(0.1, 1e-4);
  CHECK(b.size() == 15);
  const Vector v0 = b({0.0, 0.0});
  const Vector v1 = b({1.0, 0.0});
  CHECK(v0.cwiseAbs().maxCoeff() <= 1e-8);
  CHECK(v1.cwiseAbs().maxCoeff() <= 1e-8);
  const Vector mid = b({0.999, 0.0});
  CHECK(mid.allFinite());

  // High-precision oracle for the closed form at the endpoints and inside
  // the layer.
  using quad = boost::multiprecision::cpp_bin_float_50;
  for (int n = 1; n <= 10; ++n) {
    for (double x : {0.0, 0.3, 0.9995, 1.0}) {
      const double ref = static_cast<double>(boundary_layer_function<quad>(n, quad(x), quad(0.1), quad(1e-4)));
      const double got = boundary_layer_function<double>(n, x, 0.1, 1e-4);
      CHECK(std::abs(got - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
    }
  }

  const auto raw = build_mass_matrix(b, mass_rule(b));
  CHECK(raw.condition() > 1e6);
  CHECK_THROWS_AS(trial_basis::boundary_layer(0.1, 0.0), invalid_argument_error);
  CHECK_THROWS_AS(trial_basis::boundary_layer(0.0, 1e-4), invalid_argument_error);
}

TEST_CASE("tensor sine basis") {
  const auto b = trial_basis::tensor_sine2d(10);
  CHECK(b.size() == 100);
  CHECK(b.spatial_dim() == 2);
  const Vector v = b({0.5, 0.5});
  CHECK(v[0] == Approx(2.0).epsilon(1e-15));
  // index (i-1) m + (j-1) holds 2 sin(i pi x) sin(j pi y)
  const Point p{0.3, 0.7};
  const Vector w = b(p);
  CHECK(w[1 * 10 + 2] == Approx(2.0 * std::sin(2 * M_PI * 0.3) * std::sin(3 * M_PI * 0.7)).epsilon(1e-14));
  // A 20x20 GL rule cannot integrate sin^2(10 pi x) exactly; the m = 5
  // basis stays within its reach, m = 10 needs the default mass rule.
  const auto m5 = build_mass_matrix(trial_basis::tensor_sine2d(5), tensor_rule(gauss_legendre(20), gauss_legendre(20)));
  CHECK(max_abs_identity_gap(m5.entries) < 1e-12);
  const auto m = build_mass_matrix(b, mass_rule(b));
  CHECK(max_abs_identity_gap(m.entries) < 1e-12);
}

TEST_CASE("Gram-Schmidt") {
  SUBCASE("idempotent on an orthonormal basis") {
    const auto b = trial_basis::sine1d(10);
    const auto rule = gauss_legendre(200);
    const auto g = gram_schmidt(b, rule);
    const Matrix pb = b.evaluate(rule), pg = g.evaluate(rule);
    for (int i = 0; i < 10; ++i) {
      const double sign = pb.row(i).dot(pg.row(i)) >= 0 ? 1.0 : -1.0;
      CHECK((pb.row(i) - sign * pg.row(i)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("boundary-layer basis becomes orthonormal") {
    const auto g = orthonormal_boundary_layer_basis(0.1, 1e-4);
    CHECK(g.orthonormalized());
    const auto m = build_mass_matrix(g, mass_rule(g));
    CHECK(max_abs_identity_gap(m.entries) < 1e-10);
  }
  SUBCASE("two-function hand example") {
    auto s1 = [](const Point& p) { return std::sin(M_PI * p.x); };
    auto s12 = [](const Point& p) { return std::sin(M_PI * p.x) + std::sin(2 * M_PI * p.x); };
    const auto b = trial_basis::custom({s1, s12}, 1);
    const auto rule = gauss_legendre(200);
    const auto g = gram_schmidt(b, rule);
    const Matrix pg = g.evaluate(rule);
    double sign = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double s2 = std::sin(2 * M_PI * rule.node(k).x);
      if (std::abs(s2) > 0.1) {
        if (sign == 0.0) sign = pg(1, static_cast<Eigen::Index>(k)) / (std::sqrt(2.0) * s2);
        CHECK(pg(1, static_cast<Eigen::Index>(k)) == Approx(sign * std::sqrt(2.0) * s2).epsilon(1e-10));
      }
    }
    CHECK(std::abs(std::abs(sign) - 1.0) < 1e-10);
  }
  SUBCASE("rank deficiency is reported") {
    auto s1 = [](const Point& p) { return std::sin(M_PI * p.x); };
    const auto b = trial_basis::custom({s1, s1}, 1);
    try {
      gram_schmidt(b, gauss_legendre(200));
      FAIL("expected degenerate_basis_error");
    } catch (const degenerate_basis_error& e) {
      CHECK(e.index() == 1);
    }
  }
  SUBCASE("span preservation") {
    const auto raw = trial_basis::boundary_layer(0.1, 1e-4);
    const auto g = orthonormal_boundary_layer_basis(0.1, 1e-4);
    const auto rule = mass_rule(g);
    const Matrix phi = g.evaluate(rule);
    const auto m = build_mass_matrix(phi, rule.weights());
    const Matrix raw_vals = raw.evaluate(rule);
    for (int i = 0; i < raw.size(); ++i) {
      const Vector u = raw_vals.row(i).transpose();
      const Vector c = project_values(u, phi, rule.weights(), m);
      const Vector r = u - phi.transpose() * c;
      const double rel = std::sqrt(rule.weights().dot(r.cwiseAbs2()) / rule.weights().dot(u.cwiseAbs2()));
      CHECK(rel <= 1e-8);
    }
  }
}

TEST_CASE("singular mass matrices") {
  auto s1 = [](const Point& p) { return std::sin(M_PI * p.x); };
  auto s2 = [](const Point& p) { return std::sin(2 * M_PI * p.x); };
  const auto rule = gauss_legendre(200);
  CHECK_THROWS_AS(build_mass_matrix(trial_basis::custom({s1, s1}, 1), rule), degenerate_basis_error);
  auto a = [&](const Point& p) { return std::sqrt(2.0) * s1(p); };
  auto b = [&](const Point& p) { return std::sqrt(2.0) * s2(p); };
  auto sum = [&](const Point& p) { return (a(p) + b(p)) / std::sqrt(2.0); };
  CHECK_THROWS_AS(build_mass_matrix(trial_basis::custom({a, b, sum}, 1), rule), degenerate_basis_error);
}

TEST_CASE("projection") {
  const auto b = trial_basis::sine1d(10);
  const auto rule = gauss_legendre(200);
  const auto m = build_mass_matrix(b, rule);

  SUBCASE("basis component is reproduced") {
    const Vector c = project(b.component(0), b, m, rule);
    CHECK(c[0] == Approx(1.0).epsilon(1e-13));
    CHECK(c.tail(9).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("scaled first mode") {
    const double k = 0.01;
    const Vector c = project([&](const Point& p) { return std::sin(M_PI * p.x) / (k * M_PI * M_PI); }, b, m, rule);
    CHECK(c[0] == Approx(1.0 / (std::sqrt(2.0) * k * M_PI * M_PI)).epsilon(1e-13));
    CHECK(c[0] == Approx(7.1645).epsilon(1e-4));
    CHECK(c.tail(9).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("x(1-x) against its analytic sine series") {
    auto u = [](const Point& p) { return p.x * (1.0 - p.x); };
    const Vector c = project(u, b, m, rule);
    // x(1-x) = sum_{j odd} 8/(j pi)^3 sin(j pi x); in the sqrt2-normalized
    // basis the coefficient is that value over sqrt2.
    for (int j = 1; j <= 10; ++j) {
      const double exact = (j % 2 == 1) ? 8.0 / std::pow(j * M_PI, 3) / std::sqrt(2.0) : 0.0;
      CHECK(std::abs(c[j - 1] - exact) < 1e-13);
    }
    // Tail energy: ||u||^2 = 1/30, Parseval gives the projection error.
    double kept = c.squaredNorm();
    double tail = 0.0;
    for (int j = 11; j < 200001; j += 2) tail += 0.5 * std::pow(8.0 / std::pow(j * M_PI, 3), 2);
    const Vector uv = sample(u, rule);
    const Vector r = uv - b.evaluate(rule).transpose() * c;
    const double err2 = rule.weights().dot(r.cwiseAbs2());
    CHECK(err2 == Approx(tail).epsilon(1e-6));
    CHECK(kept + tail == Approx(1.0 / 30.0).epsilon(1e-10));
  }
  SUBCASE("residual is orthogonal to every component") {
    auto u = [](const Point& p) { return std::exp(p.x) * std::sin(7 * p.x); };
    const Vector c = project(u, b, m, rule);
    const Matrix phi = b.evaluate(rule);
    const Vector r = sample(u, rule) - phi.transpose() * c;
    const Vector moments = phi * rule.weights().cwiseProduct(r);
    CHECK(moments.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Pythagoras for the discrete projection") {
  const auto b = trial_basis::sine1d(10);
  const auto rule = gauss_legendre(200);
  const auto m = build_mass_matrix(b, rule);
  const Matrix phi = b.evaluate(rule);
  counter_rng rng(derive_key({21}));
  for (int trial = 0; trial < 20; ++trial) {
    const double s = rng.uniform(1, 20), t = rng.uniform(-1, 1);
    const Vector u = sample([&](const Point& p) { return std::sin(s * p.x + t) * p.x; }, rule);
    const Vector ubar = phi.transpose() * project_values(u, phi, rule.weights(), m);
    Vector c(10);
    for (auto& x : c) x = rng.normal();
    const Vector vbar = phi.transpose() * c;
    auto n2 = [&](const Vector& x) { return rule.weights().dot(x.cwiseAbs2()); };
    const double lhs = n2(u - vbar), rhs = n2(u - ubar) + n2(ubar - vbar);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * lhs);
  }
}

TEST_CASE("mass matrix identity for the inverse-weighted basis") {
  counter_rng rng(derive_key({22}));
  const auto raw = trial_basis::boundary_layer(0.1, 1e-4);
  const auto rule = mass_rule(raw);
  const Matrix phi = raw.evaluate(rule);
  for (int trial = 0; trial < 5; ++trial) {
    Vector v(raw.size());
    for (auto& x : v) x = rng.normal();
    const double chk = lemma_identity_check(phi, rule.weights(), v);
    CHECK(chk <= 1e-9);
  }
}
