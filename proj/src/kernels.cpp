#include "pgvarmion/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <mutex>

namespace pgvarmion {

Matrix to_input(const std::vector<Point>& points, int dim) {
  Matrix x(dim, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    x(0, static_cast<Eigen::Index>(i)) = points[i].x;
    if (dim == 2) x(1, static_cast<Eigen::Index>(i)) = points[i].y;
  }
  return x;
}

namespace {

void check_input(const mlp& net, const Matrix& x) {
  require(x.rows() == net.input_dim(), "mlp forward: input dimension mismatch");
  require(net.parameter_count() > 0, "mlp forward: network not constructed");
}

Vector cutoff_column(const mlp& net, const Matrix& x) {
  Vector cut = Vector::Ones(x.cols());
  if (!net.has_cutoff()) return cut;
  for (Eigen::Index b = 0; b < x.cols(); ++b)
    cut[b] = cutoff({x(0, b), x.rows() > 1 ? x(1, b) : 0.0}, net.input_dim(), net.cutoff_p());
  return cut;
}

void check_tape(const mlp& net, const mlp_tape& tape, const Matrix& cot) {
  require(static_cast<int>(tape.act.size()) == net.layers(), "mlp backward: tape does not match network");
  require(cot.rows() == net.output_dim() && cot.cols() == tape.act[0].cols(),
          "mlp backward: cotangent shape mismatch");
}

} // namespace

namespace kernels {

namespace serial {

Matrix forward(const mlp& net, const Matrix& x, mlp_tape* tape) {
  check_input(net, x);
  const Eigen::Index nb = x.cols();
  const int nl = net.layers();
  Matrix h = x;
  if (tape) {
    tape->act.assign(1, x);
    tape->pre.clear();
  }
  for (int l = 0; l < nl; ++l) {
    const auto w = net.weight(l);
    Matrix z(w.rows(), nb);
    for (Eigen::Index b = 0; b < nb; ++b)
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        double s = net.has_bias(l) ? net.bias(l)[i] : 0.0;
        for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * h(j, b);
        z(i, b) = s;
      }
    if (l + 1 < nl) {
      h.resize(z.rows(), nb);
      for (Eigen::Index b = 0; b < nb; ++b)
        for (Eigen::Index i = 0; i < z.rows(); ++i) h(i, b) = hat(z(i, b));
      if (tape) {
        tape->pre.push_back(z);
        tape->act.push_back(h);
      }
    } else {
      h = z;
    }
  }
  const Vector cut = cutoff_column(net, x);
  if (tape) tape->cut = cut;
  for (Eigen::Index b = 0; b < nb; ++b)
    for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, b) *= cut[b];
  return h;
}

Vector backward(const mlp& net, const mlp_tape& tape, const Matrix& cot) {
  check_tape(net, tape, cot);
  const Eigen::Index nb = cot.cols();
  Vector grad = Vector::Zero(net.parameter_count());
  Matrix delta(cot.rows(), nb);
  for (Eigen::Index b = 0; b < nb; ++b)
    for (Eigen::Index i = 0; i < cot.rows(); ++i) delta(i, b) = cot(i, b) * tape.cut[b];
  for (int l = net.layers() - 1; l >= 0; --l) {
    const auto w = net.weight(l);
    const Matrix& in = tape.act[static_cast<std::size_t>(l)];
    const Eigen::Index off = net.weight_offset(l);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index b = 0; b < nb; ++b) s += delta(i, b) * in(j, b);
        grad[off + i * w.cols() + j] += s;
      }
    if (net.has_bias(l)) {
      const Eigen::Index boff = off + w.rows() * w.cols();
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        for (Eigen::Index b = 0; b < nb; ++b) s += delta(i, b);
        grad[boff + i] += s;
      }
    }
    if (l == 0) break;
    const Matrix& z = tape.pre[static_cast<std::size_t>(l - 1)];
    Matrix next(w.cols(), nb);
    for (Eigen::Index b = 0; b < nb; ++b)
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < w.rows(); ++i) s += w(i, j) * delta(i, b);
        next(j, b) = s * hat_derivative(z(j, b));
      }
    delta = std::move(next);
  }
  return grad;
}

} // namespace serial

namespace {

Eigen::Index chunk_count(Eigen::Index n) { return (n + chunk - 1) / chunk; }

} // namespace

Matrix forward(const mlp& net, const Matrix& x, mlp_tape* tape) {
  check_input(net, x);
  const Eigen::Index nb = x.cols();
  const int nl = net.layers();
  Matrix out(net.output_dim(), nb);
  if (tape) {
    tape->act.assign(static_cast<std::size_t>(nl), Matrix());
    tape->pre.assign(static_cast<std::size_t>(nl - 1), Matrix());
    tape->act[0] = x;
    for (int l = 0; l + 1 < nl; ++l) {
      tape->pre[static_cast<std::size_t>(l)].resize(net.dims()[static_cast<std::size_t>(l + 1)], nb);
      tape->act[static_cast<std::size_t>(l + 1)].resize(net.dims()[static_cast<std::size_t>(l + 1)], nb);
    }
  }
  const Vector cut = cutoff_column(net, x);
  const Eigen::Index nc = chunk_count(nb);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b0 = c * chunk, w = std::min(chunk, nb - b0);
    Matrix h = x.middleCols(b0, w);
    for (int l = 0; l < nl; ++l) {
      Matrix z = net.weight(l) * h;
      if (net.has_bias(l)) z.colwise() += net.bias(l);
      if (l + 1 < nl) {
        h = z.unaryExpr([](double v) { return hat(v); });
        if (tape) {
          tape->pre[static_cast<std::size_t>(l)].middleCols(b0, w) = z;
          tape->act[static_cast<std::size_t>(l + 1)].middleCols(b0, w) = h;
        }
      } else {
        out.middleCols(b0, w) = z * cut.segment(b0, w).asDiagonal();
      }
    }
  }
  if (tape) tape->cut = cut;
  return out;
}

Vector backward(const mlp& net, const mlp_tape& tape, const Matrix& cot) {
  check_tape(net, tape, cot);
  const Eigen::Index nb = cot.cols();
  const Eigen::Index nc = chunk_count(nb);
  const Eigen::Index np = net.parameter_count();
  Matrix partial = Matrix::Zero(np, nc);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < nc; ++c) {
    const Eigen::Index b0 = c * chunk, w = std::min(chunk, nb - b0);
    auto g = partial.col(c);
    Matrix delta = cot.middleCols(b0, w) * tape.cut.segment(b0, w).asDiagonal();
    for (int l = net.layers() - 1; l >= 0; --l) {
      const auto wt = net.weight(l);
      const Eigen::Index off = net.weight_offset(l);
      const RowMatrix gw = delta * tape.act[static_cast<std::size_t>(l)].middleCols(b0, w).transpose();
      g.segment(off, gw.size()) = Eigen::Map<const Vector>(gw.data(), gw.size());
      if (net.has_bias(l)) g.segment(off + gw.size(), wt.rows()) = delta.rowwise().sum();
      if (l == 0) break;
      const auto z = tape.pre[static_cast<std::size_t>(l - 1)].middleCols(b0, w);
      Matrix next = wt.transpose() * delta;
      for (Eigen::Index b = 0; b < w; ++b)
        for (Eigen::Index j = 0; j < next.rows(); ++j) next(j, b) *= hat_derivative(z(j, b));
      delta = std::move(next);
    }
  }
  Vector grad = Vector::Zero(np);
  for (Eigen::Index c = 0; c < nc; ++c) grad += partial.col(c);
  return grad;
}

void set_threads(int n) {
  require(n >= 1, "threads must be positive");
  omp_set_num_threads(n);
}

int threads() { return omp_get_max_threads(); }

void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& fn) {
  std::exception_ptr first;
  std::ptrdiff_t first_index = n;
  std::mutex m;
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
      std::lock_guard<std::mutex> lock(m);
      if (i < first_index) {
        first_index = i;
        first = std::current_exception();
      }
    }
  }
  if (first) std::rethrow_exception(first);
}

} // namespace kernels

} // namespace pgvarmion
