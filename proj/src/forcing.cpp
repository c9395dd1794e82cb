#include "pgvarmion/forcing.hpp"
#include "pgvarmion/rng.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace pgvarmion {

std::string to_string(forcing_family f) {
  switch (f) {
  case forcing_family::fourier1d:
    return "fourier1d";
  case forcing_family::fourier2d:
    return "fourier2d";
  case forcing_family::grf:
    return "grf";
  case forcing_family::custom:
    return "custom";
  }
  return "custom";
}

double forcing_sample::raw(const Point& p) const {
  switch (family) {
  case forcing_family::fourier1d: {
    double s = 0.0;
    for (int j = 0; j < modes; ++j) s += a(j) * std::sin((j + 1) * M_PI * p.x + b(j));
    return s;
  }
  case forcing_family::fourier2d: {
    double s = 0.0;
    for (int j = 0; j < modes; ++j)
      for (int k = 0; k < modes; ++k)
        s += a2(j, k) * std::sin((j + 1) * M_PI * p.x + b2(j, k)) *
             std::sin((k + 1) * M_PI * p.y + c2(j, k));
    return s;
  }
  case forcing_family::grf:
    return (*spline)(p.x);
  case forcing_family::custom:
    return field(p);
  }
  return 0.0;
}

double forcing_sample::operator()(const Point& p) const { return scale * raw(p); }

namespace {

constexpr std::uint64_t stream_fourier1d = 0x46311;
constexpr std::uint64_t stream_fourier2d = 0x46322;
constexpr std::uint64_t stream_grf = 0x47524;

// Max of |sum| over the family grid, computed separably in 2D.
double raw_grid_max(const forcing_sample& f) {
  double m = 0.0;
  switch (f.family) {
  case forcing_family::fourier1d:
    for (int i = 0; i <= 2000; ++i) m = std::max(m, std::abs(f.raw({i / 2000.0, 0.0})));
    return m;
  case forcing_family::fourier2d: {
    const int g = 201, n = f.modes;
    Matrix grid = Matrix::Zero(g, g);
    Vector sx(g), sy(g);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < g; ++i) {
          const double t = i / 200.0;
          sx[i] = std::sin((j + 1) * M_PI * t + f.b2(j, k));
          sy[i] = std::sin((k + 1) * M_PI * t + f.c2(j, k));
        }
        grid.noalias() += f.a2(j, k) * sx * sy.transpose();
      }
    return grid.cwiseAbs().maxCoeff();
  }
  case forcing_family::grf:
    for (double v : f.coeffs) m = std::max(m, std::abs(v));
    return m;
  case forcing_family::custom:
    break;
  }
  throw invalid_argument_error("normalization grid undefined for custom forcing");
}

void normalize(forcing_sample& f) {
  const double m = raw_grid_max(f);
  if (!(m >= 1e-12)) throw numeric_error("forcing: degenerate draw");
  f.scale = 1.0 / m;
}

} // namespace

double normalization_max(const forcing_sample& f) { return f.scale * raw_grid_max(f); }

forcing_sample fourier_1d_from_coefficients(std::vector<double> a, std::vector<double> b,
                                            bool norm, double scale) {
  require(a.size() == b.size() && !a.empty(), "fourier forcing: coefficient size mismatch");
  forcing_sample f;
  f.family = forcing_family::fourier1d;
  f.modes = static_cast<int>(a.size());
  f.coeffs = std::move(a);
  f.coeffs.insert(f.coeffs.end(), b.begin(), b.end());
  f.scale = scale;
  if (norm) normalize(f);
  return f;
}

forcing_sample fourier_forcing_1d(std::uint64_t seed, int modes) {
  require(modes >= 1, "fourier_forcing_1d: modes must be positive");
  for (std::uint64_t s = seed;; ++s) {
    counter_rng rng(derive_key({s, stream_fourier1d}));
    std::vector<double> a(modes), b(modes);
    for (int j = 0; j < modes; ++j) {
      a[j] = rng.uniform(-2.0, 2.0);
      b[j] = rng.uniform(-1.0, 1.0);
    }
    try {
      auto f = fourier_1d_from_coefficients(std::move(a), std::move(b));
      f.seed = s;
      return f;
    } catch (const numeric_error&) {
    }
  }
}

forcing_sample fourier_2d_from_coefficients(int modes, std::vector<double> coeffs, bool norm,
                                            double scale) {
  require(modes >= 1 && coeffs.size() == static_cast<std::size_t>(3 * modes * modes),
          "fourier forcing 2d: coefficient size mismatch");
  forcing_sample f;
  f.family = forcing_family::fourier2d;
  f.dim = 2;
  f.modes = modes;
  f.coeffs = std::move(coeffs);
  f.scale = scale;
  if (norm) normalize(f);
  return f;
}

forcing_sample fourier_forcing_2d(std::uint64_t seed, int modes) {
  require(modes >= 1, "fourier_forcing_2d: modes must be positive");
  const auto nn = static_cast<std::size_t>(modes * modes);
  for (std::uint64_t s = seed;; ++s) {
    counter_rng rng(derive_key({s, stream_fourier2d}));
    std::vector<double> c(3 * nn);
    for (std::size_t i = 0; i < nn; ++i) {
      c[i] = rng.uniform(-2.0, 2.0);
      c[nn + i] = rng.uniform(-1.0, 1.0);
      c[2 * nn + i] = rng.uniform(-1.0, 1.0);
    }
    try {
      auto f = fourier_2d_from_coefficients(modes, std::move(c));
      f.seed = s;
      return f;
    } catch (const numeric_error&) {
    }
  }
}

std::shared_ptr<const Matrix> grf_cholesky(double ell) {
  require(ell > 0.0 && ell <= 1.0, "grf: length scale must lie in (0, 1]");
  static std::mutex mutex;
  static std::map<double, std::shared_ptr<const Matrix>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(ell); it != cache.end()) return it->second;

  const int n = grf_grid_points;
  Matrix k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = (i - j) / double(n - 1);
      k(i, j) = std::exp(-d * d / (2.0 * ell * ell));
    }
  for (double jitter = 1e-10; jitter <= 1e-6 * 1.0001; jitter *= 10.0) {
    Matrix kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(kj);
    if (llt.info() == Eigen::Success) {
      auto l = std::make_shared<const Matrix>(llt.matrixL());
      cache.emplace(ell, l);
      return l;
    }
  }
  throw covariance_error("grf: covariance Cholesky failed after jitter escalation to 1e-6");
}

forcing_sample grf_from_values(std::vector<double> values, double ell, bool norm, double scale) {
  require(values.size() == static_cast<std::size_t>(grf_grid_points), "grf: expected 257 grid values");
  forcing_sample f;
  f.family = forcing_family::grf;
  f.length_scale = ell;
  std::vector<double> knots(values.size());
  for (std::size_t i = 0; i < knots.size(); ++i) knots[i] = double(i) / double(knots.size() - 1);
  f.spline = std::make_shared<const cubic_spline>(std::move(knots), values);
  f.coeffs = std::move(values);
  f.scale = scale;
  if (norm) normalize(f);
  return f;
}

forcing_sample grf_forcing(double ell, std::uint64_t seed) {
  const auto l = grf_cholesky(ell);
  for (std::uint64_t s = seed;; ++s) {
    counter_rng rng(derive_key({s, stream_grf}));
    Vector z(grf_grid_points);
    for (int i = 0; i < grf_grid_points; ++i) z[i] = rng.normal();
    const Vector v = l->triangularView<Eigen::Lower>() * z;
    try {
      auto f = grf_from_values(std::vector<double>(v.data(), v.data() + v.size()), ell);
      f.seed = s;
      return f;
    } catch (const numeric_error&) {
    }
  }
}

forcing_sample field_forcing(ScalarField fn, int spatial_dim) {
  require(spatial_dim == 1 || spatial_dim == 2, "field_forcing: dimension must be 1 or 2");
  forcing_sample f;
  f.family = forcing_family::custom;
  f.field = std::move(fn);
  f.dim = spatial_dim;
  return f;
}

forcing_sample forcing_from_descriptor(forcing_family family, std::uint64_t seed, double ell,
                                       double scale, int modes, std::vector<double> coeffs) {
  forcing_sample f;
  switch (family) {
  case forcing_family::fourier1d: {
    require(coeffs.size() == static_cast<std::size_t>(2 * modes), "descriptor: bad fourier1d size");
    std::vector<double> a(coeffs.begin(), coeffs.begin() + modes);
    std::vector<double> b(coeffs.begin() + modes, coeffs.end());
    f = fourier_1d_from_coefficients(std::move(a), std::move(b), false, scale);
    break;
  }
  case forcing_family::fourier2d:
    f = fourier_2d_from_coefficients(modes, std::move(coeffs), false, scale);
    break;
  case forcing_family::grf:
    f = grf_from_values(std::move(coeffs), ell, false, scale);
    break;
  case forcing_family::custom:
    throw data_error("descriptor: custom forcings are not serializable");
  }
  f.seed = seed;
  return f;
}

Vector sensor_vector(const forcing_sample& f, const quadrature_rule& rule) {
  require(f.spatial_dim() == rule.dim(), "sensor_vector: dimension mismatch");
  if (f.family == forcing_family::fourier2d &&
      (rule.spec().kind == rule_kind::tensor_gauss_legendre ||
       rule.spec().kind == rule_kind::tensor_uniform_interior)) {
    // Separable evaluation on tensor grids.
    const int nx = rule.spec().nx, ny = rule.spec().ny, n = f.modes;
    Vector xs(nx), ys(ny);
    for (int i = 0; i < nx; ++i) xs[i] = rule.node(static_cast<std::size_t>(i * ny)).x;
    for (int j = 0; j < ny; ++j) ys[j] = rule.node(static_cast<std::size_t>(j)).y;
    RowMatrix grid = RowMatrix::Zero(nx, ny);
    Vector sx(nx), sy(ny);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        for (int i = 0; i < nx; ++i) sx[i] = std::sin((j + 1) * M_PI * xs[i] + f.b2(j, k));
        for (int i = 0; i < ny; ++i) sy[i] = std::sin((k + 1) * M_PI * ys[i] + f.c2(j, k));
        grid.noalias() += f.a2(j, k) * sx * sy.transpose();
      }
    return f.scale * Eigen::Map<const Vector>(grid.data(), grid.size());
  }
  Vector v(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t k = 0; k < rule.size(); ++k) v[static_cast<Eigen::Index>(k)] = f(rule.node(k));
  return v;
}

double total_variation(const forcing_sample& f, int n) {
  require(n >= 2, "total_variation: need at least two points");
  double tv = 0.0, prev = f({0.0, 0.0});
  for (int i = 1; i < n; ++i) {
    const double v = f({double(i) / (n - 1), 0.0});
    tv += std::abs(v - prev);
    prev = v;
  }
  return tv;
}

} // namespace pgvarmion
