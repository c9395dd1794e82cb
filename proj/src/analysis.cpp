#include "pgvarmion/analysis.hpp"
#include "pgvarmion/kernels.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace pgvarmion {

double relative_l2_error(const Vector& u_hat, const Vector& u, const Vector& weights) {
  require(u_hat.size() == u.size() && u.size() == weights.size(), "relative_l2_error: length mismatch");
  const double nu = u.cwiseAbs2().dot(weights);
  if (!(nu > 0.0)) throw numeric_error("relative_l2_error: reference has zero norm");
  return 100.0 * std::sqrt((u - u_hat).cwiseAbs2().dot(weights) / nu);
}

error_summary summarize(const std::vector<double>& values) {
  error_summary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::vector<double> v = values;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
  const std::size_t h = v.size() / 2;
  s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  return s;
}

double error_report::table_error() const { return 100.0 * std::sqrt(sum_model2 / sum_u2); }
double error_report::projection_table_error() const { return 100.0 * std::sqrt(sum_projection2 / sum_u2); }

namespace {

error_report evaluate_impl(const problem_setup& setup, const operator_model* model, const labeled_dataset& data) {
  require(data.problem == setup.tag, "evaluate: dataset belongs to a different problem");
  require(data.output_spec == setup.output_rule.spec(), "evaluate: output rule mismatch");
  error_report r;
  r.model_tag = model ? to_string(model->kind()) : "projection";
  r.problem = data.problem;
  r.split = data.split;
  r.dataset_digest = dataset_digest(data);
  r.dataset_seed = data.seed;
  if (data.size() == 0) return r;

  const auto& rule = setup.output_rule;
  const Vector& w = rule.weights();
  const Matrix phi = setup.basis.evaluate(rule);
  const mass_matrix m = build_mass_matrix(phi, w);
  const Matrix& u = data.labels;
  const Matrix ubar = phi.transpose() * m.solve(Matrix(phi * w.asDiagonal() * u));
  Matrix uhat;
  if (model) uhat = model->evaluate(data.f, rule.nodes());

  for (int j = 0; j < data.size(); ++j) {
    const double nu2 = u.col(j).cwiseAbs2().dot(w);
    if (!(nu2 > 0.0)) throw numeric_error("evaluate: sample " + std::to_string(j) + " has a zero solution");
    const double ep2 = (u.col(j) - ubar.col(j)).cwiseAbs2().dot(w);
    r.sum_u2 += nu2;
    r.sum_projection2 += ep2;
    r.projection_error.push_back(100.0 * std::sqrt(ep2 / nu2));
    r.e_phi.push_back(std::sqrt(ep2));
    if (!model) continue;
    const double e2 = (u.col(j) - uhat.col(j)).cwiseAbs2().dot(w);
    r.sum_model2 += e2;
    r.model_error.push_back(100.0 * std::sqrt(e2 / nu2));
    r.e.push_back(std::sqrt(e2));
    r.e_psi.push_back(std::sqrt((ubar.col(j) - uhat.col(j)).cwiseAbs2().dot(w)));
    // Rounding slack: the two norms agree to ~1e-16 ||u|| when u_hat = u_bar.
    if (std::sqrt(e2) < std::sqrt(ep2) - 1e-12 * std::sqrt(nu2)) ++r.floor_violations;
  }
  return r;
}

} // namespace

error_report evaluate_model(const operator_model& model, const labeled_dataset& data) {
  return evaluate_impl(model.setup(), &model, data);
}

error_report evaluate_projection(const problem_setup& setup, const labeled_dataset& data) {
  return evaluate_impl(setup, nullptr, data);
}

quadrature_rule analysis_rule(int dim) {
  if (dim == 2) return tensor_rule(gauss_legendre(80), gauss_legendre(80));
  return gauss_legendre(400);
}

decomposition error_decomposition(const Vector& u_hat, const Vector& u, const Matrix& phi, const Vector& weights) {
  const mass_matrix m = build_mass_matrix(phi, weights);
  const Vector ubar = phi.transpose() * project_values(u, phi, weights, m);
  decomposition d;
  d.e = std::sqrt((u - u_hat).cwiseAbs2().dot(weights));
  d.e_phi = std::sqrt((u - ubar).cwiseAbs2().dot(weights));
  d.e_psi = std::sqrt((ubar - u_hat).cwiseAbs2().dot(weights));
  const double e2 = d.e * d.e;
  d.residual = e2 > 0.0 ? std::abs(e2 - d.e_phi * d.e_phi - d.e_psi * d.e_psi) / e2 : 0.0;
  d.ok = d.residual <= 1e-6;
  return d;
}

decomposition error_decomposition(const operator_model& model, const Vector& f, const reference_solution& u,
                                  const quadrature_rule& rule) {
  return error_decomposition(model.evaluate(f, rule.nodes()), u.values(rule), model.basis().evaluate(rule),
                             rule.weights());
}

double fd_derivative(const std::function<double(double)>& fn, double x, double h) {
  const double lo = std::max(0.0, x - h), hi = std::min(1.0, x + h);
  return (fn(hi) - fn(lo)) / (hi - lo);
}

double psi_report::mean_l2_relative(int first, int last) const {
  require(first >= 1 && last >= first && last <= static_cast<int>(modes.size()), "mean_l2_relative: bad range");
  double s = 0.0;
  for (int i = first; i <= last; ++i) s += modes[static_cast<std::size_t>(i - 1)].l2_relative;
  return s / double(last - first + 1);
}

namespace {

// Analysis nodes followed by the FD stencil points (+x, -x, then +y, -y).
struct stencil {
  quadrature_rule rule;
  std::vector<Point> points;
  std::vector<double> span; // (hi - lo) per node and direction
  int dim = 1;
};

stencil make_stencil(int dim, double h) {
  stencil s;
  s.dim = dim;
  s.rule = analysis_rule(dim);
  const auto& nodes = s.rule.nodes();
  s.points = nodes;
  for (int d = 0; d < dim; ++d) {
    std::vector<Point> plus, minus;
    for (const auto& p : nodes) {
      Point a = p, b = p;
      double& ca = d == 0 ? a.x : a.y;
      double& cb = d == 0 ? b.x : b.y;
      ca = std::min(1.0, ca + h);
      cb = std::max(0.0, cb - h);
      s.span.push_back(ca - cb);
      plus.push_back(a);
      minus.push_back(b);
    }
    s.points.insert(s.points.end(), plus.begin(), plus.end());
    s.points.insert(s.points.end(), minus.begin(), minus.end());
  }
  return s;
}

Matrix sample_fields(const std::vector<ScalarField>& fields, const std::vector<Point>& points) {
  Matrix v(static_cast<Eigen::Index>(fields.size()), static_cast<Eigen::Index>(points.size()));
  kernels::parallel_for(static_cast<std::ptrdiff_t>(fields.size()), [&](std::ptrdiff_t i) {
    for (std::size_t k = 0; k < points.size(); ++k) v(i, static_cast<Eigen::Index>(k)) = fields[static_cast<std::size_t>(i)](points[k]);
  });
  return v;
}

psi_report psi_report_from_values(const stencil& s, const Matrix& hat, const Matrix& truth) {
  psi_report rep;
  const auto n = static_cast<Eigen::Index>(s.rule.size());
  const Vector& w = s.rule.weights();
  for (Eigen::Index i = 0; i < hat.rows(); ++i) {
    const Vector diff = hat.row(i).head(n) - truth.row(i).head(n);
    const Vector ref = truth.row(i).head(n);
    double l2 = diff.cwiseAbs2().dot(w), l2r = ref.cwiseAbs2().dot(w);
    double semi = 0.0, semir = 0.0;
    for (int d = 0; d < s.dim; ++d) {
      const Eigen::Index plus = n * (1 + 2 * d), minus = plus + n;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double span = s.span[static_cast<std::size_t>(d * n + k)];
        const double dt = (truth(i, plus + k) - truth(i, minus + k)) / span;
        const double dh = (hat(i, plus + k) - hat(i, minus + k)) / span;
        semi += w[k] * (dh - dt) * (dh - dt);
        semir += w[k] * dt * dt;
      }
    }
    psi_mode_error e;
    e.index = static_cast<int>(i) + 1;
    e.l2 = std::sqrt(l2);
    e.l2_relative = l2r > 0.0 ? std::sqrt(l2 / l2r) : 0.0;
    e.h1 = std::sqrt(l2 + semi);
    e.h1_relative = (l2r + semir) > 0.0 ? std::sqrt((l2 + semi) / (l2r + semir)) : 0.0;
    rep.modes.push_back(e);
  }
  return rep;
}

} // namespace

psi_report psi_error_report(const std::vector<ScalarField>& psi_hat, const std::vector<ScalarField>& psi, int dim,
                            double h1_step) {
  require(psi_hat.size() == psi.size(), "psi_error_report: mode count mismatch");
  const auto s = make_stencil(dim, h1_step);
  return psi_report_from_values(s, sample_fields(psi_hat, s.points), sample_fields(psi, s.points));
}

psi_report psi_error_report(const operator_model& model, const std::vector<ScalarField>& psi, double h1_step) {
  require(static_cast<int>(psi.size()) == model.coefficient_dim(), "psi_error_report: mode count mismatch");
  const auto s = make_stencil(model.setup().dim(), h1_step);
  return psi_report_from_values(s, model.psi_values(s.points), sample_fields(psi, s.points));
}

std::vector<ScalarField> diffusion_psi_closed_form(int n, double kappa) {
  std::vector<ScalarField> psi;
  for (int i = 1; i <= n; ++i)
    psi.emplace_back([i, kappa](const Point& p) {
      return std::sqrt(2.0) * std::sin(i * M_PI * p.x) / (kappa * i * i * M_PI * M_PI);
    });
  return psi;
}

int bound_report::violations() const {
  return static_cast<int>(std::count_if(samples.begin(), samples.end(), [](const bound_record& r) { return !r.holds; }));
}

bound_report theorem_bound_report(const operator_model& model, const labeled_dataset& data,
                                  const std::vector<ScalarField>& true_psi, int max_samples) {
  require(model.kind() == model_kind::pg_varmion, "theorem_bound_report: PG-VarMiON only");
  require(static_cast<int>(true_psi.size()) == model.coefficient_dim(), "theorem_bound_report: mode count mismatch");
  const auto& setup = model.setup();
  const quadrature_rule rule = analysis_rule(setup.dim());
  const Vector& w = rule.weights();
  const Matrix phi = setup.basis.evaluate(rule);
  const Matrix psi = sample_fields(true_psi, rule.nodes());
  const Matrix psi_hat = model.psi_values(rule.nodes());
  double psi_gap_sum = 0.0;
  for (Eigen::Index i = 0; i < psi.rows(); ++i)
    psi_gap_sum += std::sqrt((psi.row(i) - psi_hat.row(i)).cwiseAbs2().dot(w.transpose()));

  bound_report rep;
  rep.lambda_min = setup.mass.lambda_min;
  rep.lambda_max = setup.mass.lambda_max;
  const int n = max_samples < 0 ? data.size() : std::min(max_samples, data.size());
  rep.samples.resize(static_cast<std::size_t>(n));
  const reference_solver solver(setup);
  const Matrix beta = model.coefficients(data.f.leftCols(n));
  const Matrix uhat = phi.transpose() * beta;
  kernels::parallel_for(n, [&](std::ptrdiff_t j) {
    const auto& fj = data.forcings[static_cast<std::size_t>(j)];
    const Vector u = solver.solve(fj).values(rule);
    const Vector fv = sample(fj, rule);
    const auto d = error_decomposition(uhat.col(j), u, phi, w);
    const Vector ell = psi * fv.cwiseProduct(w);
    const Vector ell_hat = setup.mass.entries * beta.col(j);
    bound_record& r = rep.samples[static_cast<std::size_t>(j)];
    r.e = d.e;
    r.e_phi = d.e_phi;
    r.e_psi = d.e_psi;
    r.ell_gap = (ell - ell_hat).norm();
    r.bound = r.e_phi + r.ell_gap / std::sqrt(rep.lambda_min);
    r.psi_term = std::sqrt(fv.cwiseAbs2().dot(w)) * psi_gap_sum / std::sqrt(rep.lambda_min);
    r.rayleigh_low = r.ell_gap * r.ell_gap / rep.lambda_max;
    r.rayleigh_high = r.ell_gap * r.ell_gap / rep.lambda_min;
    r.holds = r.e <= r.bound;
    const double ep2 = r.e_psi * r.e_psi, slack = 1e-8 * std::max(ep2, r.rayleigh_high) + 1e-28;
    r.sandwich = r.rayleigh_low - slack <= ep2 && ep2 <= r.rayleigh_high + slack;
  });
  return rep;
}

comparison_table make_comparison_table(const std::vector<error_report>& projection,
                                       const std::vector<std::vector<error_report>>& per_model) {
  comparison_table t;
  comparison_row proj{"Projection", {}, {}};
  for (const auto& r : projection) {
    t.splits.push_back(r.split);
    proj.mean.push_back(r.projection_summary().mean);
    proj.table.push_back(r.projection_table_error());
  }
  t.rows.push_back(proj);
  for (const auto& reports : per_model) {
    require(reports.size() == projection.size(), "comparison table: split count mismatch");
    comparison_row row;
    row.name = reports.empty() ? "" : reports.front().model_tag;
    for (const auto& r : reports) {
      row.mean.push_back(r.summary().mean);
      row.table.push_back(r.table_error());
    }
    t.rows.push_back(row);
  }
  return t;
}

comparison_table make_comparison_table(const std::vector<const operator_model*>& models,
                                       const std::vector<const labeled_dataset*>& datasets) {
  require(!datasets.empty(), "comparison table: no datasets");
  const problem_setup& setup = models.empty() ? make_problem(datasets.front()->problem) : models.front()->setup();
  std::vector<error_report> proj;
  for (const auto* d : datasets) proj.push_back(evaluate_projection(setup, *d));
  std::vector<std::vector<error_report>> per_model;
  for (const auto* m : models) {
    per_model.emplace_back();
    for (const auto* d : datasets) per_model.back().push_back(evaluate_model(*m, *d));
  }
  return make_comparison_table(proj, per_model);
}

std::string comparison_table::text() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  const auto block = [&](const char* title, bool pooled) {
    os << title << '\n' << std::left << std::setw(14) << "";
    for (auto s : splits) os << std::right << std::setw(12) << display_name(s);
    os << '\n';
    for (const auto& r : rows) {
      os << std::left << std::setw(14) << r.name;
      const auto& v = pooled ? r.table : r.mean;
      for (double x : v) os << std::right << std::setw(12) << x;
      os << '\n';
    }
  };
  block("Pooled relative L2 error (%)", true);
  block("Mean of per-sample relative L2 errors (%)", false);
  return os.str();
}

void comparison_table::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "row,split,mean_error_percent,table_error_percent\n" << std::setprecision(17);
  for (const auto& r : rows)
    for (std::size_t k = 0; k < splits.size(); ++k)
      out << r.name << ',' << to_string(splits[k]) << ',' << r.mean[k] << ',' << r.table[k] << '\n';
}

histogram make_histogram(const std::vector<double>& values, int bins) {
  if (values.empty()) throw invalid_argument_error("histogram: no values");
  require(bins >= 1, "histogram: need at least one bin");
  histogram h;
  h.values = values;
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it;
  const double width = *hi_it > lo ? (*hi_it - lo) / bins : 1.0;
  for (int b = 0; b <= bins; ++b) h.edges.push_back(lo + b * width);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    auto b = static_cast<int>((v - lo) / width);
    ++h.counts[static_cast<std::size_t>(std::clamp(b, 0, bins - 1))];
  }
  h.mean = std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
  return h;
}

void write_histogram_csv(const histogram& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << std::setprecision(17) << "# mean," << h.mean << "\nkind,left,right,value\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    out << "bin," << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
  for (double v : h.values) out << "sample,,," << v << '\n';
}

double lemma_identity_check(const Matrix& phi, const Vector& weights, const Vector& v) {
  using quad = boost::multiprecision::cpp_bin_float_quad;
  require(phi.cols() == weights.size() && phi.rows() == v.size(), "lemma_identity_check: shape mismatch");
  const auto n = phi.rows(), nq = phi.cols();
  std::vector<quad> m(static_cast<std::size_t>(n * n), quad(0));
  const auto at = [n](Eigen::Index i, Eigen::Index j) { return static_cast<std::size_t>(i * n + j); };
  for (Eigen::Index k = 0; k < nq; ++k) {
    const quad wk = weights[k];
    for (Eigen::Index i = 0; i < n; ++i) {
      const quad wi = wk * quad(phi(i, k));
      for (Eigen::Index j = 0; j <= i; ++j) m[at(i, j)] += wi * quad(phi(j, k));
    }
  }
  // Cholesky in place (lower triangle).
  for (Eigen::Index j = 0; j < n; ++j) {
    quad d = m[at(j, j)];
    for (Eigen::Index k = 0; k < j; ++k) d -= m[at(j, k)] * m[at(j, k)];
    if (d <= 0) throw degenerate_basis_error("lemma_identity_check: mass matrix not positive definite", j);
    m[at(j, j)] = sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      quad s = m[at(i, j)];
      for (Eigen::Index k = 0; k < j; ++k) s -= m[at(i, k)] * m[at(j, k)];
      m[at(i, j)] = s / m[at(j, j)];
    }
  }
  std::vector<quad> x(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    quad s = v[i];
    for (Eigen::Index k = 0; k < i; ++k) s -= m[at(i, k)] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / m[at(i, i)];
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    quad s = x[static_cast<std::size_t>(i)];
    for (Eigen::Index k = i + 1; k < n; ++k) s -= m[at(k, i)] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / m[at(i, i)];
  }
  quad lhs = 0, rhs = 0;
  for (Eigen::Index k = 0; k < nq; ++k) {
    quad s = 0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[static_cast<std::size_t>(i)] * quad(phi(i, k));
    lhs += quad(weights[k]) * s * s;
  }
  for (Eigen::Index i = 0; i < n; ++i) rhs += quad(v[i]) * x[static_cast<std::size_t>(i)];
  return static_cast<double>(abs(lhs - rhs) / abs(rhs));
}

slice_table diagonal_slices(const operator_model& model, const Vector& f, const reference_solution& u, int n) {
  require(model.setup().dim() == 2 && u.spatial_dim() == 2, "diagonal_slices: 2D model and solution required");
  require(n >= 2, "diagonal_slices: need at least two points");
  slice_table s;
  std::vector<Point> diag, anti;
  for (int k = 0; k < n; ++k) {
    const double t = double(k) / (n - 1);
    s.t.push_back(t);
    diag.push_back({t, t});
    anti.push_back({t, 1.0 - t});
  }
  const Vector md = model.evaluate(f, diag), ma = model.evaluate(f, anti);
  for (int k = 0; k < n; ++k) {
    s.diag_ref.push_back(u(diag[static_cast<std::size_t>(k)]));
    s.anti_ref.push_back(u(anti[static_cast<std::size_t>(k)]));
    s.diag_model.push_back(md[k]);
    s.anti_model.push_back(ma[k]);
  }
  return s;
}

void write_slices_csv(const slice_table& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "t,diag_reference,diag_model,anti_reference,anti_model\n" << std::setprecision(17);
  for (std::size_t k = 0; k < s.t.size(); ++k)
    out << s.t[k] << ',' << s.diag_ref[k] << ',' << s.diag_model[k] << ',' << s.anti_ref[k] << ','
        << s.anti_model[k] << '\n';
}

void write_report_csv(const error_report& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << std::setprecision(17) << "# model," << r.model_tag << "\n# problem," << to_string(r.problem)
      << "\n# split," << to_string(r.split) << "\n# dataset_sha256," << r.dataset_digest << "\n# dataset_seed,"
      << r.dataset_seed << "\n# norm,discrete L2 on the output rule\n";
  if (r.has_model()) {
    const auto s = r.summary();
    out << "# model_mean," << s.mean << "\n# model_median," << s.median << "\n# model_max," << s.max
        << "\n# model_table_error," << r.table_error() << '\n';
  }
  const auto p = r.projection_summary();
  out << "# projection_mean," << p.mean << "\n# projection_median," << p.median << "\n# projection_max," << p.max
      << "\n# projection_table_error," << r.projection_table_error() << "\n# floor_violations,"
      << r.floor_violations << '\n';
  out << "sample,model_error_percent,projection_error_percent,E,E_phi,E_psi\n";
  for (std::size_t j = 0; j < r.projection_error.size(); ++j) {
    out << j << ',';
    if (r.has_model()) out << r.model_error[j];
    out << ',' << r.projection_error[j] << ',';
    if (r.has_model()) out << r.e[j];
    out << ',' << r.e_phi[j] << ',';
    if (r.has_model()) out << r.e_psi[j];
    out << '\n';
  }
}

} // namespace pgvarmion
