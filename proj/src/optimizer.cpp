#include "pgvarmion/optimizer.hpp"

namespace pgvarmion {

void adamw::reset(Eigen::Index n) {
  t_ = 0;
  m_ = Vector::Zero(n);
  v_ = Vector::Zero(n);
}

void adamw::restore(long t, Vector m, Vector v) {
  require(m.size() == v.size(), "adamw: moment sizes differ");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

void adamw::step(Vector& params, const Vector& grad, double lr) {
  require(params.size() == grad.size(), "adamw: gradient size mismatch");
  if (m_.size() != params.size()) reset(params.size());
  ++t_;
  const double c1 = 1.0 - std::pow(beta1, double(t_));
  const double c2 = 1.0 - std::pow(beta2, double(t_));
  for (Eigen::Index i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    params[i] -= lr * weight_decay * params[i];
    m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
    v_[i] = beta2 * v_[i] + (1.0 - beta2) * g * g;
    params[i] -= lr * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps);
  }
}

} // namespace pgvarmion
