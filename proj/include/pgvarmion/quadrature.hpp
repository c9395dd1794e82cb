#pragma once

#include "pgvarmion/common.hpp"

#include <cstdint>
#include <vector>

namespace pgvarmion {

// Axis-aligned box. For dim == 1 only the x interval is meaningful.
struct box {
  int dim = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;

  double measure() const { return dim == 1 ? x1 - x0 : (x1 - x0) * (y1 - y0); }
  bool contains_strictly(const Point& p) const;
  bool operator==(const box&) const = default;
};

enum class rule_kind : std::uint8_t {
  custom = 0,
  gauss_legendre = 1,
  tensor_gauss_legendre = 2,
  uniform_interior = 3,
  tensor_uniform_interior = 4,
  boundary = 5,
};

// Enough information to rebuild a rule exactly; stored in dataset and
// checkpoint headers instead of raw node tables.
struct rule_spec {
  rule_kind kind = rule_kind::custom;
  int nx = 0;
  int ny = 0;
  box domain;
  bool operator==(const rule_spec&) const = default;
};

class quadrature_rule {
public:
  quadrature_rule() = default;
  quadrature_rule(std::vector<Point> nodes, Vector weights, box domain,
                  rule_spec spec = {});

  int dim() const { return domain_.dim; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Point>& nodes() const { return nodes_; }
  const Point& node(std::size_t k) const { return nodes_[k]; }
  const Vector& weights() const { return weights_; }
  double weight(std::size_t k) const { return weights_[static_cast<Eigen::Index>(k)]; }
  const box& domain() const { return domain_; }
  const rule_spec& spec() const { return spec_; }

private:
  std::vector<Point> nodes_;
  Vector weights_;
  box domain_;
  rule_spec spec_;
};

// n-point Gauss-Legendre rule on [a, b].
quadrature_rule gauss_legendre(int n, double a = 0.0, double b = 1.0);

// Cartesian product of two 1D rules; node (i, j) is stored at i * ny + j.
quadrature_rule tensor_rule(const quadrature_rule& rule_x, const quadrature_rule& rule_y);

// n equispaced interior nodes a + i (b - a)/(n + 1), i = 1..n, with the
// trapezoid weight (b - a)/(n + 1). Exact for the trapezoid rule applied to
// integrands that vanish at both ends.
quadrature_rule uniform_interior(int n, double a = 0.0, double b = 1.0);

// Rule on the boundary of `domain`: the two end points (unit weights) in
// 1D, an n-point GL rule on each edge in 2D.
quadrature_rule boundary_rule(const box& domain, int n_per_edge);

quadrature_rule make_rule(const rule_spec& spec);

double integrate(const ScalarField& fn, const quadrature_rule& rule);
double integrate(const Vector& values, const quadrature_rule& rule);

Vector sample(const ScalarField& fn, const quadrature_rule& rule);

} // namespace pgvarmion
