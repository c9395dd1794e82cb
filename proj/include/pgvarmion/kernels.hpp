#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/mlp.hpp"

#include <functional>
#include <vector>

namespace pgvarmion {

// Intermediate values of a batched forward pass, kept for backward.
struct mlp_tape {
  std::vector<Matrix> act; // act[0]: inputs (d x B); act[l]: hidden layer l output
  std::vector<Matrix> pre; // pre-activations of the hidden layers
  Vector cut;              // cut-off factor per column (ones without cut-off)
};

// Inputs as a d x B matrix, one point per column.
Matrix to_input(const std::vector<Point>& points, int dim);

namespace kernels {

// Batch width of one parallel work item. Gradients are reduced over chunks
// in chunk order, so results do not depend on the thread count.
constexpr Eigen::Index chunk = 128;

// Reference implementations: plain loops, no BLAS, no threads.
namespace serial {
Matrix forward(const mlp& net, const Matrix& x, mlp_tape* tape = nullptr);
// Gradient of sum_{i,b} cot(i, b) out(i, b) with respect to the parameters.
Vector backward(const mlp& net, const mlp_tape& tape, const Matrix& cot);
} // namespace serial

// OpenMP over column chunks, Eigen products inside a chunk.
Matrix forward(const mlp& net, const Matrix& x, mlp_tape* tape = nullptr);
Vector backward(const mlp& net, const mlp_tape& tape, const Matrix& cot);

// Worker-count control shared by every parallel region of the library.
void set_threads(int n);
int threads();

// Runs fn(i) for i in [0, n) on the configured workers. fn must only write
// to slots owned by i.
void parallel_for(std::ptrdiff_t n, const std::function<void(std::ptrdiff_t)>& fn);

} // namespace kernels

} // namespace pgvarmion
