#include "pgvarmion/quadrature.hpp"

#include <cmath>

namespace pgvarmion {

bool box::contains_strictly(const Point& p) const {
  if (!(p.x > x0 && p.x < x1)) return false;
  return dim == 1 || (p.y > y0 && p.y < y1);
}

quadrature_rule::quadrature_rule(std::vector<Point> nodes, Vector weights, box domain,
                                 rule_spec spec)
  : nodes_(std::move(nodes)), weights_(std::move(weights)), domain_(domain), spec_(spec) {
  require(static_cast<Eigen::Index>(nodes_.size()) == weights_.size(),
          "quadrature rule: node and weight counts differ");
  require(!nodes_.empty(), "quadrature rule: no nodes");
  for (Eigen::Index k = 0; k < weights_.size(); ++k)
    require(weights_[k] > 0.0, "quadrature rule: non-positive weight");
  if (spec_.kind != rule_kind::boundary) {
    for (const auto& p : nodes_)
      require(domain_.contains_strictly(p), "quadrature rule: node outside domain");
  }
}

namespace {

// Newton iteration on P_n from Chebyshev guesses. Returns nodes in
// ascending order on [-1, 1] together with their weights.
void legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (int k = 1; k < n; ++k) {
        const double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = z;
        p0 = 1.0;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) <= 1e-15) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0, p1 = z;
    for (int k = 1; k < n; ++k) {
      const double p2 = ((2.0 * k + 1.0) * z * p1 - k * p0) / (k + 1.0);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[n - 1 - i] = z;
    x[i] = -z;
    w[i] = w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
}

} // namespace

quadrature_rule gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: n must be positive");
  require(a < b, "gauss_legendre: empty interval");
  std::vector<double> t, w;
  legendre_nodes(n, t, w);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  std::vector<Point> nodes(n);
  Vector weights(n);
  for (int i = 0; i < n; ++i) {
    nodes[i].x = mid + half * t[i];
    weights[i] = half * w[i];
  }
  box dom{1, a, b};
  return quadrature_rule(std::move(nodes), std::move(weights), dom,
                         rule_spec{rule_kind::gauss_legendre, n, 0, dom});
}

quadrature_rule tensor_rule(const quadrature_rule& rule_x, const quadrature_rule& rule_y) {
  require(rule_x.dim() == 1 && rule_y.dim() == 1, "tensor_rule: both rules must be 1D");
  const auto nx = rule_x.size(), ny = rule_y.size();
  std::vector<Point> nodes(nx * ny);
  Vector weights(static_cast<Eigen::Index>(nx * ny));
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      nodes[i * ny + j] = Point{rule_x.node(i).x, rule_y.node(j).x};
      weights[static_cast<Eigen::Index>(i * ny + j)] = rule_x.weight(i) * rule_y.weight(j);
    }
  box dom{2, rule_x.domain().x0, rule_x.domain().x1, rule_y.domain().x0, rule_y.domain().x1};
  rule_spec spec{rule_kind::custom, static_cast<int>(nx), static_cast<int>(ny), dom};
  const auto kx = rule_x.spec().kind, ky = rule_y.spec().kind;
  if (kx == rule_kind::gauss_legendre && ky == rule_kind::gauss_legendre)
    spec.kind = rule_kind::tensor_gauss_legendre;
  else if (kx == rule_kind::uniform_interior && ky == rule_kind::uniform_interior)
    spec.kind = rule_kind::tensor_uniform_interior;
  return quadrature_rule(std::move(nodes), std::move(weights), dom, spec);
}

quadrature_rule uniform_interior(int n, double a, double b) {
  require(n >= 1, "uniform_interior: n must be positive");
  require(a < b, "uniform_interior: empty interval");
  const double h = (b - a) / (n + 1);
  std::vector<Point> nodes(n);
  Vector weights = Vector::Constant(n, h);
  for (int i = 0; i < n; ++i) nodes[i].x = a + (i + 1) * h;
  box dom{1, a, b};
  return quadrature_rule(std::move(nodes), std::move(weights), dom,
                         rule_spec{rule_kind::uniform_interior, n, 0, dom});
}

quadrature_rule boundary_rule(const box& domain, int n_per_edge) {
  rule_spec spec{rule_kind::boundary, n_per_edge, 0, domain};
  if (domain.dim == 1) {
    std::vector<Point> nodes{{domain.x0, 0.0}, {domain.x1, 0.0}};
    return quadrature_rule(std::move(nodes), Vector::Ones(2), domain, spec);
  }
  require(n_per_edge >= 1, "boundary_rule: n_per_edge must be positive");
  const auto gx = gauss_legendre(n_per_edge, domain.x0, domain.x1);
  const auto gy = gauss_legendre(n_per_edge, domain.y0, domain.y1);
  std::vector<Point> nodes;
  std::vector<double> w;
  for (std::size_t k = 0; k < gx.size(); ++k) {
    nodes.push_back({gx.node(k).x, domain.y0});
    w.push_back(gx.weight(k));
  }
  for (std::size_t k = 0; k < gy.size(); ++k) {
    nodes.push_back({domain.x1, gy.node(k).x});
    w.push_back(gy.weight(k));
  }
  for (std::size_t k = 0; k < gx.size(); ++k) {
    nodes.push_back({gx.node(gx.size() - 1 - k).x, domain.y1});
    w.push_back(gx.weight(gx.size() - 1 - k));
  }
  for (std::size_t k = 0; k < gy.size(); ++k) {
    nodes.push_back({domain.x0, gy.node(gy.size() - 1 - k).x});
    w.push_back(gy.weight(gy.size() - 1 - k));
  }
  return quadrature_rule(std::move(nodes), Eigen::Map<Vector>(w.data(), w.size()), domain, spec);
}

quadrature_rule make_rule(const rule_spec& s) {
  const auto& d = s.domain;
  switch (s.kind) {
  case rule_kind::gauss_legendre:
    return gauss_legendre(s.nx, d.x0, d.x1);
  case rule_kind::tensor_gauss_legendre:
    return tensor_rule(gauss_legendre(s.nx, d.x0, d.x1), gauss_legendre(s.ny, d.y0, d.y1));
  case rule_kind::uniform_interior:
    return uniform_interior(s.nx, d.x0, d.x1);
  case rule_kind::tensor_uniform_interior:
    return tensor_rule(uniform_interior(s.nx, d.x0, d.x1), uniform_interior(s.ny, d.y0, d.y1));
  case rule_kind::boundary:
    return boundary_rule(d, s.nx);
  case rule_kind::custom:
    break;
  }
  throw invalid_argument_error("make_rule: custom rules cannot be rebuilt from a spec");
}

double integrate(const ScalarField& fn, const quadrature_rule& rule) {
  double s = 0.0;
  for (std::size_t k = 0; k < rule.size(); ++k) s += rule.weight(k) * fn(rule.node(k));
  return s;
}

double integrate(const Vector& values, const quadrature_rule& rule) {
  require(values.size() == rule.weights().size(), "integrate: value count mismatch");
  return values.dot(rule.weights());
}

Vector sample(const ScalarField& fn, const quadrature_rule& rule) {
  Vector v(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t k = 0; k < rule.size(); ++k) v[static_cast<Eigen::Index>(k)] = fn(rule.node(k));
  return v;
}

} // namespace pgvarmion
