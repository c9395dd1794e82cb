#include "pgvarmion/mlp.hpp"
#include "pgvarmion/rng.hpp"

namespace pgvarmion {

Eigen::Index mlp::count_parameters(const std::vector<int>& dims, bool final_bias) {
  Eigen::Index n = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    n += static_cast<Eigen::Index>(dims[l]) * dims[l + 1];
    if (l + 2 < dims.size() || final_bias) n += dims[l + 1];
  }
  return n;
}

mlp::mlp(std::vector<int> dims, bool final_bias, double cutoff_p)
  : dims_(std::move(dims)), final_bias_(final_bias), cutoff_p_(cutoff_p) {
  require(dims_.size() >= 2, "mlp: need at least input and output dimensions");
  for (int d : dims_) require(d >= 1, "mlp: layer widths must be positive");
  require(dims_.front() == 1 || dims_.front() == 2, "mlp: input dimension must be 1 or 2");
  require(cutoff_p >= 0.0, "mlp: cut-off p must be non-negative");
  Eigen::Index off = 0;
  for (int l = 0; l < layers(); ++l) {
    offsets_.push_back(off);
    off += static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1];
    if (has_bias(l)) off += dims_[l + 1];
  }
  theta_ = Vector::Zero(off);
}

Eigen::Map<const RowMatrix> mlp::weight(int l) const {
  return {theta_.data() + offsets_[static_cast<std::size_t>(l)], dims_[l + 1], dims_[l]};
}

Eigen::Map<RowMatrix> mlp::weight(int l) {
  return {theta_.data() + offsets_[static_cast<std::size_t>(l)], dims_[l + 1], dims_[l]};
}

Eigen::Map<const Vector> mlp::bias(int l) const {
  require(has_bias(l), "mlp: layer has no bias");
  return {theta_.data() + offsets_[static_cast<std::size_t>(l)] + static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1],
          dims_[l + 1]};
}

Eigen::Map<Vector> mlp::bias(int l) {
  require(has_bias(l), "mlp: layer has no bias");
  return {theta_.data() + offsets_[static_cast<std::size_t>(l)] + static_cast<Eigen::Index>(dims_[l]) * dims_[l + 1],
          dims_[l + 1]};
}

void mlp::initialize(std::uint64_t seed) {
  for (int l = 0; l < layers(); ++l) {
    counter_rng rng(derive_key({seed, 0x4D4C50ULL, static_cast<std::uint64_t>(l)}));
    const double bound = 1.0 / std::sqrt(double(dims_[l]));
    auto w = weight(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-bound, bound);
    if (has_bias(l)) {
      auto b = bias(l);
      for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = rng.uniform(-bound, bound);
    }
  }
}

Vector mlp::forward(const Point& x) const {
  Vector h(input_dim());
  h[0] = x.x;
  if (input_dim() == 2) h[1] = x.y;
  for (int l = 0; l < layers(); ++l) {
    Vector z = weight(l) * h;
    if (has_bias(l)) z += bias(l);
    if (l + 1 < layers())
      h = z.unaryExpr([](double v) { return hat(v); });
    else
      h = z;
  }
  return h * cutoff_at(x);
}

} // namespace pgvarmion
