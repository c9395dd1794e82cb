#pragma once

#include "pgvarmion/common.hpp"

#include <cmath>

namespace pgvarmion {

// lr(epoch) = initial * gamma^floor(epoch / interval)
struct step_schedule {
  double initial = 1e-3;
  int interval = 100;
  double gamma = 0.75;

  double lr(int epoch) const { return initial * std::pow(gamma, epoch / interval); }
};

// Adam with decoupled weight decay and bias correction.
class adamw {
public:
  double beta1 = 0.5;
  double beta2 = 0.9;
  double eps = 1e-8;
  double weight_decay = 0.0;

  adamw() = default;
  explicit adamw(Eigen::Index n) { reset(n); }

  void reset(Eigen::Index n);
  void step(Vector& params, const Vector& grad, double lr);

  long steps() const { return t_; }
  const Vector& first_moment() const { return m_; }
  const Vector& second_moment() const { return v_; }
  void restore(long t, Vector m, Vector v);

private:
  long t_ = 0;
  Vector m_, v_;
};

} // namespace pgvarmion
