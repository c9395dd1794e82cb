#pragma once

#include "pgvarmion/common.hpp"
#include "pgvarmion/quadrature.hpp"
#include "pgvarmion/spline.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pgvarmion {

enum class forcing_family : std::uint8_t {
  custom = 0,
  fourier1d = 1,
  fourier2d = 2,
  grf = 3,
};

std::string to_string(forcing_family f);

// One forcing function f. The coefficient layout depends on the family:
//   fourier1d: a_1..a_n, then b_1..b_n           f = D sum a_j sin(j pi x + b_j)
//   fourier2d: a, b, c blocks, entry (j-1) n + (k-1)
//              f = D sum a_jk sin(j pi x + b_jk) sin(k pi y + c_jk)
//   grf:       the 257 raw grid values on [0, 1]; f = D * spline(x)
struct forcing_sample {
  forcing_family family = forcing_family::custom;
  std::uint64_t seed = 0;
  double length_scale = 0.0;
  double scale = 1.0; // D
  std::vector<double> coeffs;
  int modes = 0;
  std::shared_ptr<const cubic_spline> spline;
  ScalarField field;

  int dim = 1;

  int spatial_dim() const { return dim; }
  double operator()(const Point& p) const;
  // The unscaled sum (before multiplying by D).
  double raw(const Point& p) const;

  // Fourier coefficient accessors.
  double a(int j) const { return coeffs[static_cast<std::size_t>(j)]; }
  double b(int j) const { return coeffs[static_cast<std::size_t>(modes + j)]; }
  double a2(int j, int k) const { return coeffs[static_cast<std::size_t>(j * modes + k)]; }
  double b2(int j, int k) const { return coeffs[static_cast<std::size_t>(modes * modes + j * modes + k)]; }
  double c2(int j, int k) const {
    return coeffs[static_cast<std::size_t>(2 * modes * modes + j * modes + k)];
  }

};

constexpr int grf_grid_points = 257;

forcing_sample fourier_forcing_1d(std::uint64_t seed, int modes = 10);
forcing_sample fourier_forcing_2d(std::uint64_t seed, int modes = 10);
forcing_sample grf_forcing(double length_scale, std::uint64_t seed);

// Explicit-coefficient constructors (tests, deserialization). With
// normalize = false the scale D is taken as given.
forcing_sample fourier_1d_from_coefficients(std::vector<double> a, std::vector<double> b,
                                            bool normalize = true, double scale = 1.0);
forcing_sample fourier_2d_from_coefficients(int modes, std::vector<double> coeffs,
                                            bool normalize = true, double scale = 1.0);
forcing_sample grf_from_values(std::vector<double> values, double length_scale,
                               bool normalize = true, double scale = 1.0);
forcing_sample field_forcing(ScalarField f, int spatial_dim);

// Rebuild a sample from its serialized descriptor.
forcing_sample forcing_from_descriptor(forcing_family family, std::uint64_t seed,
                                       double length_scale, double scale, int modes,
                                       std::vector<double> coeffs);

// Sensor vector: f at the rule nodes in node order.
Vector sensor_vector(const forcing_sample& f, const quadrature_rule& rule);

// Max |f| over the family's normalization grid (2001 points in 1D, 201^2
// in 2D, the 257 GRF grid points).
double normalization_max(const forcing_sample& f);

// Total variation of f on an n-point uniform grid over [0, 1].
double total_variation(const forcing_sample& f, int n = 2001);

// Cholesky factor of the jittered squared-exponential covariance on the
// GRF grid. Cached per length scale.
std::shared_ptr<const Matrix> grf_cholesky(double length_scale);

} // namespace pgvarmion
