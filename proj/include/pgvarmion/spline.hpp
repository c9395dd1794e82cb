#pragma once

#include "pgvarmion/common.hpp"

#include <array>
#include <vector>

namespace pgvarmion {

// Not-a-knot cubic interpolant through (knots[i], values[i]). Each piece is
// stored as a polynomial in the local coordinate t = x - knots[i].
class cubic_spline {
public:
  cubic_spline() = default;
  cubic_spline(std::vector<double> knots, const std::vector<double>& values);

  double operator()(double x) const;
  double derivative(double x) const;

  std::size_t intervals() const { return coeffs_.size(); }
  const std::vector<double>& knots() const { return knots_; }
  // Coefficients c0..c3 of piece i in powers of t.
  const std::array<double, 4>& piece(std::size_t i) const { return coeffs_[i]; }
  std::size_t locate(double x) const;

private:
  std::vector<double> knots_;
  std::vector<std::array<double, 4>> coeffs_;
};

} // namespace pgvarmion
