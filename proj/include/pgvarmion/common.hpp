#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace pgvarmion {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A point in the unit interval or the unit square. In 1D only x is used.
struct Point {
  double x = 0.0;
  double y = 0.0;
};

using ScalarField = std::function<double(const Point&)>;

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class invalid_argument_error : public error {
public:
  using error::error;
};

class degenerate_basis_error : public error {
public:
  degenerate_basis_error(const std::string& what, std::ptrdiff_t index)
    : error(what), index_(index) {}
  std::ptrdiff_t index() const { return index_; }

private:
  std::ptrdiff_t index_;
};

class unsupported_forcing_error : public error {
public:
  using error::error;
};

class covariance_error : public error {
public:
  using error::error;
};

// NaN losses, singular systems and similar numerical breakdowns.
class numeric_error : public error {
public:
  using error::error;
};

class data_error : public error {
public:
  using error::error;
};

class config_error : public error {
public:
  using error::error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw invalid_argument_error(message);
}

} // namespace pgvarmion
