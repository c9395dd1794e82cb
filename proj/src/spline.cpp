#include "pgvarmion/spline.hpp"

#include <Eigen/Sparse>

#include <algorithm>

namespace pgvarmion {

cubic_spline::cubic_spline(std::vector<double> knots, const std::vector<double>& values)
  : knots_(std::move(knots)) {
  const auto n = knots_.size();
  require(n >= 4 && values.size() == n, "cubic_spline: need at least 4 matching knots/values");
  for (std::size_t i = 0; i + 1 < n; ++i)
    require(knots_[i + 1] > knots_[i], "cubic_spline: knots must increase");

  // Unknowns are the second derivatives m_i at the knots.
  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = knots_[i + 1] - knots_[i];

  using triplet = Eigen::Triplet<double>;
  std::vector<triplet> entries;
  Vector rhs = Vector::Zero(static_cast<Eigen::Index>(n));
  const auto I = [](std::size_t i) { return static_cast<int>(i); };

  // Third derivative continuous across the second and second-to-last knots.
  entries.emplace_back(0, 0, h[1]);
  entries.emplace_back(0, 1, -(h[0] + h[1]));
  entries.emplace_back(0, 2, h[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    entries.emplace_back(I(i), I(i - 1), h[i - 1]);
    entries.emplace_back(I(i), I(i), 2.0 * (h[i - 1] + h[i]));
    entries.emplace_back(I(i), I(i + 1), h[i]);
    rhs[I(i)] = 6.0 * ((values[i + 1] - values[i]) / h[i] - (values[i] - values[i - 1]) / h[i - 1]);
  }
  const auto last = n - 1;
  entries.emplace_back(I(last), I(last - 2), h[last - 1]);
  entries.emplace_back(I(last), I(last - 1), -(h[last - 2] + h[last - 1]));
  entries.emplace_back(I(last), I(last), h[last - 2]);

  Eigen::SparseMatrix<double> A(I(n), I(n));
  A.setFromTriplets(entries.begin(), entries.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw numeric_error("cubic_spline: singular system");
  const Vector m = lu.solve(rhs);

  coeffs_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double hi = h[i];
    const double mi = m[I(i)], mj = m[I(i + 1)];
    coeffs_[i] = {values[i], (values[i + 1] - values[i]) / hi - hi * (2.0 * mi + mj) / 6.0,
                  0.5 * mi, (mj - mi) / (6.0 * hi)};
  }
}

std::size_t cubic_spline::locate(double x) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
  return std::min(i, coeffs_.size() - 1);
}

double cubic_spline::operator()(double x) const {
  const auto i = locate(x);
  const double t = x - knots_[i];
  const auto& c = coeffs_[i];
  return c[0] + t * (c[1] + t * (c[2] + t * c[3]));
}

double cubic_spline::derivative(double x) const {
  const auto i = locate(x);
  const double t = x - knots_[i];
  const auto& c = coeffs_[i];
  return c[1] + t * (2.0 * c[2] + t * 3.0 * c[3]);
}

} // namespace pgvarmion
