#include "pgvarmion/operator_models.hpp"
#include "pgvarmion/rng.hpp"

#include <algorithm>

namespace pgvarmion {

std::string to_string(problem_tag p) {
  switch (p) {
  case problem_tag::diffusion1d: return "diffusion1d";
  case problem_tag::advdiff1d: return "advdiff1d";
  case problem_tag::advdiff2d: return "advdiff2d";
  }
  return "unknown";
}

problem_tag parse_problem(const std::string& s) {
  if (s == "diffusion1d") return problem_tag::diffusion1d;
  if (s == "advdiff1d") return problem_tag::advdiff1d;
  if (s == "advdiff2d") return problem_tag::advdiff2d;
  throw config_error("unknown problem '" + s + "' (expected diffusion1d, advdiff1d or advdiff2d)");
}

std::string to_string(model_kind k) {
  switch (k) {
  case model_kind::pg_varmion: return "pg-varmion";
  case model_kind::bnet: return "bnet";
  case model_kind::l_deeponet: return "l-deeponet";
  }
  return "unknown";
}

model_kind parse_model(const std::string& s) {
  if (s == "pg-varmion") return model_kind::pg_varmion;
  if (s == "bnet") return model_kind::bnet;
  if (s == "l-deeponet") return model_kind::l_deeponet;
  throw config_error("unknown model '" + s + "' (expected pg-varmion, bnet or l-deeponet)");
}

std::vector<int> problem_setup::layer_dims() const {
  std::vector<int> d{dim()};
  d.insert(d.end(), hidden.begin(), hidden.end());
  d.push_back(basis.size());
  return d;
}

problem_setup make_problem(problem_tag tag, const Matrix* basis_transform) {
  problem_setup s;
  s.tag = tag;
  switch (tag) {
  case problem_tag::diffusion1d:
    s.pde = pde_config::diffusion_1d();
    s.basis = trial_basis::sine1d(10);
    s.sensor_rule = gauss_legendre(40);
    s.output_rule = gauss_legendre(200);
    s.hidden = {10, 20, 30};
    s.cutoff_p = 100.0;
    break;
  case problem_tag::advdiff1d: {
    s.pde = pde_config::advdiff_1d();
    if (basis_transform)
      s.basis = trial_basis::boundary_layer(s.pde.c, s.pde.kappa).with_transform(*basis_transform);
    else
      s.basis = orthonormal_boundary_layer_basis(s.pde.c, s.pde.kappa);
    s.sensor_rule = gauss_legendre(40);
    s.output_rule = gauss_legendre(200);
    s.hidden = {10, 20, 30, 40, 30};
    s.cutoff_p = 400.0;
    break;
  }
  case problem_tag::advdiff2d:
    s.pde = pde_config::vortex_2d();
    s.basis = trial_basis::tensor_sine2d(10);
    s.sensor_rule = tensor_rule(gauss_legendre(40), gauss_legendre(40));
    s.output_rule = tensor_rule(uniform_interior(67), uniform_interior(67));
    s.hidden = {50, 100};
    s.final_bias = false;
    s.cutoff_p = 100.0;
    break;
  }
  // All three bases are orthonormal (the boundary-layer one after
  // Gram-Schmidt), so M = I and the net output is psi_hat itself.
  const int n = s.basis.size();
  s.mass = factor_mass(Matrix::Identity(n, n));
  return s;
}

operator_model operator_model::pg_varmion(const problem_setup& setup, std::uint64_t seed) {
  operator_model m;
  m.kind_ = model_kind::pg_varmion;
  m.setup_ = setup;
  m.net_ = mlp(setup.layer_dims(), setup.final_bias, setup.cutoff_p);
  m.net_.initialize(seed);
  return m;
}

namespace {

Matrix init_b(int rows, int cols, std::uint64_t seed) {
  counter_rng rng(derive_key({seed, 0x424D4154ULL}));
  const double bound = 1.0 / std::sqrt(double(cols));
  Matrix b(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) b(i, j) = rng.uniform(-bound, bound);
  return b;
}

} // namespace

operator_model operator_model::bnet(const problem_setup& setup, std::uint64_t seed) {
  operator_model m;
  m.kind_ = model_kind::bnet;
  m.setup_ = setup;
  m.b_ = init_b(setup.basis.size(), static_cast<int>(setup.sensor_rule.size()), seed);
  return m;
}

operator_model operator_model::l_deeponet(const problem_setup& setup, std::uint64_t seed) {
  operator_model m;
  m.kind_ = model_kind::l_deeponet;
  m.setup_ = setup;
  m.net_ = mlp(setup.layer_dims(), setup.final_bias, setup.cutoff_p);
  m.net_.initialize(seed);
  m.b_ = init_b(setup.basis.size(), static_cast<int>(setup.sensor_rule.size()), seed);
  return m;
}

operator_model operator_model::create(model_kind kind, const problem_setup& setup, std::uint64_t seed) {
  switch (kind) {
  case model_kind::pg_varmion: return pg_varmion(setup, seed);
  case model_kind::bnet: return bnet(setup, seed);
  case model_kind::l_deeponet: return l_deeponet(setup, seed);
  }
  throw config_error("unknown model kind");
}

Eigen::Index operator_model::parameter_count() const {
  return (has_net() ? net_.parameter_count() : 0) + b_.size();
}

Vector operator_model::parameters() const {
  Vector theta(parameter_count());
  Eigen::Index off = 0;
  if (has_net()) {
    theta.head(net_.parameter_count()) = net_.parameters();
    off = net_.parameter_count();
  }
  if (b_.size() > 0) {
    const RowMatrix br = b_;
    theta.segment(off, br.size()) = Eigen::Map<const Vector>(br.data(), br.size());
  }
  return theta;
}

void operator_model::set_parameters(const Vector& theta) {
  require(theta.size() == parameter_count(), "set_parameters: size mismatch");
  Eigen::Index off = 0;
  if (has_net()) {
    net_.parameters() = theta.head(net_.parameter_count());
    off = net_.parameter_count();
  }
  if (b_.size() > 0)
    b_ = Eigen::Map<const RowMatrix>(theta.data() + off, b_.rows(), b_.cols());
}

Matrix operator_model::branch_matrix() const {
  require(kind_ == model_kind::pg_varmion, "branch_matrix: PG-VarMiON only");
  return kernels::forward(net_, to_input(setup_.sensor_rule.nodes(), setup_.dim()));
}

Vector operator_model::pg_branch(const Vector& f, const Vector* boundary) const {
  require(kind_ == model_kind::pg_varmion, "pg_branch: PG-VarMiON only");
  require(f.size() == sensor_count(), "pg_branch: sensor vector length mismatch");
  Vector beta = branch_matrix() * f.cwiseProduct(setup_.sensor_rule.weights());
  if (boundary) {
    require(boundary_rule_.has_value(), "pg_branch: boundary data given but no boundary rule");
    require(boundary->size() == static_cast<Eigen::Index>(boundary_rule_->size()),
            "pg_branch: boundary vector length mismatch");
    const Matrix ab = kernels::forward(net_, to_input(boundary_rule_->nodes(), setup_.dim()));
    beta += ab * boundary->cwiseProduct(boundary_rule_->weights());
  }
  return beta;
}

Matrix operator_model::coefficients(const Matrix& f) const {
  require(f.rows() == sensor_count(), "coefficients: sensor vector length mismatch");
  if (kind_ == model_kind::pg_varmion)
    return branch_matrix() * (setup_.sensor_rule.weights().asDiagonal() * f);
  return b_ * f;
}

Matrix operator_model::features(const std::vector<Point>& points) const {
  if (kind_ == model_kind::l_deeponet) return kernels::forward(net_, to_input(points, setup_.dim()));
  return setup_.basis.evaluate(points);
}

Matrix operator_model::evaluate(const Matrix& f, const std::vector<Point>& points) const {
  return features(points).transpose() * coefficients(f);
}

Vector operator_model::evaluate(const Vector& f, const std::vector<Point>& points) const {
  return evaluate(Matrix(f), points).col(0);
}

Matrix operator_model::psi_values(const std::vector<Point>& points) const {
  require(kind_ == model_kind::pg_varmion, "psi_values: PG-VarMiON only");
  return setup_.mass.entries * kernels::forward(net_, to_input(points, setup_.dim()));
}

std::vector<ScalarField> operator_model::recover_psi() const {
  require(kind_ == model_kind::pg_varmion, "recover_psi: PG-VarMiON only");
  auto net = std::make_shared<const mlp>(net_);
  auto mass = std::make_shared<const Matrix>(setup_.mass.entries);
  std::vector<ScalarField> psi;
  for (int i = 0; i < coefficient_dim(); ++i)
    psi.emplace_back([net, mass, i](const Point& p) { return mass->row(i).dot(net->forward(p)); });
  return psi;
}

double training_loss(const operator_model& model, const training_batch& batch,
                     const std::vector<Point>& nodes, Vector* grad, const Matrix* node_features) {
  const std::size_t np = batch.pairs();
  if (np == 0) throw invalid_argument_error("training_loss: empty batch");
  require(batch.node.size() == np && static_cast<std::size_t>(batch.label.size()) == np,
          "training_loss: pair arrays differ in length");
  require(batch.f.rows() == model.sensor_count(), "training_loss: sensor vector length mismatch");
  const int n = model.coefficient_dim();
  const auto& weights = model.sensor_rule().weights();

  // Coefficients per function, keeping the tape for the PG branch net.
  Matrix gf, c;
  mlp_tape branch_tape;
  if (model.kind() == model_kind::pg_varmion) {
    gf = weights.asDiagonal() * batch.f;
    const Matrix a = kernels::forward(model.net(), to_input(model.sensor_rule().nodes(), model.setup().dim()),
                                      grad ? &branch_tape : nullptr);
    c = a * gf;
  } else {
    c = model.b() * batch.f;
  }

  // Features at the nodes used by this batch.
  Matrix feat;
  std::vector<int> column(nodes.size(), -1);
  std::vector<Point> used;
  mlp_tape trunk_tape;
  if (model.kind() == model_kind::l_deeponet || node_features == nullptr) {
    for (int l : batch.node) {
      require(l >= 0 && static_cast<std::size_t>(l) < nodes.size(), "training_loss: node index out of range");
      if (column[static_cast<std::size_t>(l)] < 0) {
        column[static_cast<std::size_t>(l)] = static_cast<int>(used.size());
        used.push_back(nodes[static_cast<std::size_t>(l)]);
      }
    }
    if (model.kind() == model_kind::l_deeponet)
      feat = kernels::forward(model.net(), to_input(used, model.setup().dim()), grad ? &trunk_tape : nullptr);
    else
      feat = model.basis().evaluate(used);
  } else {
    require(node_features->rows() == n && node_features->cols() == static_cast<Eigen::Index>(nodes.size()),
            "training_loss: node feature cache has the wrong shape");
    for (std::size_t l = 0; l < nodes.size(); ++l) column[l] = static_cast<int>(l);
    feat = *node_features;
  }

  double loss = 0.0;
  Matrix dc, dfeat;
  if (grad) {
    dc = Matrix::Zero(n, c.cols());
    if (model.kind() == model_kind::l_deeponet) dfeat = Matrix::Zero(n, feat.cols());
  }
  const double scale = 2.0 / double(np);
  for (std::size_t p = 0; p < np; ++p) {
    const int j = batch.slot[p];
    const int col = column[static_cast<std::size_t>(batch.node[p])];
    const double r = c.col(j).dot(feat.col(col)) - batch.label[static_cast<Eigen::Index>(p)];
    loss += r * r;
    if (grad) {
      dc.col(j) += (scale * r) * feat.col(col);
      if (model.kind() == model_kind::l_deeponet) dfeat.col(col) += (scale * r) * c.col(j);
    }
  }
  loss /= double(np);
  if (!std::isfinite(loss)) throw numeric_error("training_loss: non-finite loss");
  if (!grad) return loss;

  grad->resize(model.parameter_count());
  switch (model.kind()) {
  case model_kind::pg_varmion:
    *grad = kernels::backward(model.net(), branch_tape, dc * gf.transpose());
    break;
  case model_kind::bnet: {
    const RowMatrix db = dc * batch.f.transpose();
    *grad = Eigen::Map<const Vector>(db.data(), db.size());
    break;
  }
  case model_kind::l_deeponet: {
    const Eigen::Index nt = model.net().parameter_count();
    grad->head(nt) = kernels::backward(model.net(), trunk_tape, dfeat);
    const RowMatrix db = dc * batch.f.transpose();
    grad->tail(db.size()) = Eigen::Map<const Vector>(db.data(), db.size());
    break;
  }
  }
  return loss;
}

} // namespace pgvarmion
