#pragma once

#include "pgvarmion/common.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace pgvarmion {

// sigma(z) = ReLU(z) - ReLU(2z - 2) + ReLU(z - 2): zero outside [0, 2],
// peak 1 at z = 1.
inline double hat(double z) {
  return std::max(z, 0.0) - std::max(2.0 * z - 2.0, 0.0) + std::max(z - 2.0, 0.0);
}

// Derivative with ReLU'(0) = 0 at the kinks.
inline double hat_derivative(double z) {
  if (z <= 0.0) return 0.0;
  if (z <= 1.0) return 1.0;
  if (z <= 2.0) return -1.0;
  return 0.0;
}

// g(x) = 1 + (e^{px} + e^{-p(x-1)}) / (1 - e^p), rewritten with
// non-positive exponents: 1 - (e^{p(x-1)} + e^{-px}) / (1 - e^{-p}).
inline double cutoff_1d(double x, double p) {
  return 1.0 - (std::exp(p * (x - 1.0)) + std::exp(-p * x)) / (-std::expm1(-p));
}

// Product extension g(x) g(y) in 2D.
inline double cutoff(const Point& x, int dim, double p) {
  return dim == 1 ? cutoff_1d(x.x, p) : cutoff_1d(x.x, p) * cutoff_1d(x.y, p);
}

enum class activation : std::uint8_t { hat = 1 };

// Fully connected network d -> hidden... -> N with hat activations on the
// hidden layers, identity output, optional final bias and optional output
// cut-off. Parameters live in one flat vector; layer l stores its weight
// (out x in, row-major) followed by its bias.
class mlp {
public:
  mlp() = default;
  mlp(std::vector<int> dims, bool final_bias = true, double cutoff_p = 0.0);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  int layers() const { return static_cast<int>(dims_.size()) - 1; }
  bool final_bias() const { return final_bias_; }
  bool has_cutoff() const { return cutoff_p_ > 0.0; }
  double cutoff_p() const { return cutoff_p_; }
  activation act() const { return activation::hat; }

  Eigen::Index parameter_count() const { return theta_.size(); }
  static Eigen::Index count_parameters(const std::vector<int>& dims, bool final_bias);

  Vector& parameters() { return theta_; }
  const Vector& parameters() const { return theta_; }

  // Views into the flat parameter vector.
  Eigen::Map<const RowMatrix> weight(int layer) const;
  Eigen::Map<RowMatrix> weight(int layer);
  bool has_bias(int layer) const { return layer < layers() - 1 || final_bias_; }
  Eigen::Map<const Vector> bias(int layer) const;
  Eigen::Map<Vector> bias(int layer);
  Eigen::Index weight_offset(int layer) const { return offsets_[static_cast<std::size_t>(layer)]; }

  // U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases.
  void initialize(std::uint64_t seed);

  double cutoff_at(const Point& x) const { return has_cutoff() ? cutoff(x, input_dim(), cutoff_p_) : 1.0; }

  Vector forward(const Point& x) const;

private:
  std::vector<int> dims_;
  bool final_bias_ = true;
  double cutoff_p_ = 0.0;
  Vector theta_;
  std::vector<Eigen::Index> offsets_;
};

} // namespace pgvarmion
