#include "pgvarmion/training.hpp"
#include "pgvarmion/analysis.hpp"
#include "pgvarmion/rng.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace pgvarmion {

train_config train_config::paper(problem_tag p) {
  train_config c;
  switch (p) {
  case problem_tag::diffusion1d:
    c.epochs = 1000;
    c.batch_size = 8000;
    c.n_r = 20;
    break;
  case problem_tag::advdiff1d:
    c.epochs = 2000;
    c.batch_size = 12000;
    c.n_r = 30;
    break;
  case problem_tag::advdiff2d:
    c.epochs = 900;
    c.batch_size = 200;
    c.unit = batch_unit::points;
    c.n_r = 60;
    break;
  }
  return c;
}

train_config train_config::desk(problem_tag p) {
  train_config c = paper(p);
  c.epochs = 200;
  return c;
}

profile_sizes profile_sizes::paper(problem_tag) { return {4000, 2000}; }

profile_sizes profile_sizes::desk(problem_tag p) {
  if (p == problem_tag::advdiff2d) return {500, 200};
  return {1000, 500};
}

std::vector<std::vector<int>> draw_nodes(int n_functions, int n_o, int n_r, std::uint64_t seed, int epoch) {
  require(n_r >= 1 && n_r <= n_o, "N_r must lie in [1, N_o]");
  std::vector<std::vector<int>> nodes(static_cast<std::size_t>(n_functions));
  std::vector<int> perm(static_cast<std::size_t>(n_o));
  for (int j = 0; j < n_functions; ++j) {
    counter_rng rng(derive_key({seed, 0x4E4F4445ULL, static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(j)}));
    std::iota(perm.begin(), perm.end(), 0);
    for (int k = 0; k < n_r; ++k) {
      const auto pick = k + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_o - k)));
      std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(pick)]);
    }
    auto& out = nodes[static_cast<std::size_t>(j)];
    out.assign(perm.begin(), perm.begin() + n_r);
    std::sort(out.begin(), out.end());
  }
  return nodes;
}

namespace {

template <class T>
void shuffle(std::vector<T>& v, counter_rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

struct pair_ref {
  int function;
  int node;
};

training_batch make_batch(const labeled_dataset& data, const std::vector<pair_ref>& pairs, std::size_t begin,
                          std::size_t end) {
  training_batch b;
  std::vector<int> slot_of(static_cast<std::size_t>(data.size()), -1);
  std::vector<int> functions;
  for (std::size_t p = begin; p < end; ++p) {
    auto& s = slot_of[static_cast<std::size_t>(pairs[p].function)];
    if (s < 0) {
      s = static_cast<int>(functions.size());
      functions.push_back(pairs[p].function);
    }
  }
  b.f.resize(data.f.rows(), static_cast<Eigen::Index>(functions.size()));
  for (std::size_t j = 0; j < functions.size(); ++j) b.f.col(static_cast<Eigen::Index>(j)) = data.f.col(functions[j]);
  b.slot.reserve(end - begin);
  b.node.reserve(end - begin);
  b.label.resize(static_cast<Eigen::Index>(end - begin));
  for (std::size_t p = begin; p < end; ++p) {
    b.slot.push_back(slot_of[static_cast<std::size_t>(pairs[p].function)]);
    b.node.push_back(pairs[p].node);
    b.label[static_cast<Eigen::Index>(p - begin)] = data.labels(pairs[p].node, pairs[p].function);
  }
  return b;
}

} // namespace

train_result train(operator_model& model, const labeled_dataset& data, const train_config& config,
                   const epoch_callback& on_epoch) {
  require(data.split == split_tag::train, "train: dataset split must be train");
  require(data.problem == model.setup().tag, "train: dataset and model belong to different problems");
  require(data.size() > 0, "train: empty dataset");
  require(config.epochs >= 0 && config.batch_size >= 1, "train: bad epoch count or batch size");
  require(data.output_spec == model.setup().output_rule.spec(), "train: output rule mismatch");
  const auto start = std::chrono::steady_clock::now();

  const auto& nodes = model.setup().output_rule.nodes();
  const int n_o = static_cast<int>(nodes.size());
  Matrix cache;
  const Matrix* node_features = nullptr;
  if (model.kind() != model_kind::l_deeponet) {
    cache = model.features(nodes);
    node_features = &cache;
  }

  adamw opt(model.parameter_count());
  opt.beta1 = config.beta1;
  opt.beta2 = config.beta2;
  opt.eps = config.eps;
  opt.weight_decay = config.weight_decay;

  train_result result;
  Vector theta = model.parameters();
  Vector grad;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.schedule.lr(epoch);
    const auto picks = draw_nodes(data.size(), n_o, config.n_r, config.seed, epoch);
    counter_rng rng(derive_key({config.seed, 0x53485546ULL, static_cast<std::uint64_t>(epoch)}));

    // Batches as contiguous ranges of an ordered pair list.
    std::vector<pair_ref> pairs;
    pairs.reserve(static_cast<std::size_t>(data.size()) * static_cast<std::size_t>(config.n_r));
    std::vector<std::size_t> bounds{0};
    if (config.unit == batch_unit::points) {
      for (int j = 0; j < data.size(); ++j)
        for (int l : picks[static_cast<std::size_t>(j)]) pairs.push_back({j, l});
      shuffle(pairs, rng);
      for (std::size_t b = static_cast<std::size_t>(config.batch_size); b < pairs.size();
           b += static_cast<std::size_t>(config.batch_size))
        bounds.push_back(b);
    } else {
      std::vector<int> order(static_cast<std::size_t>(data.size()));
      std::iota(order.begin(), order.end(), 0);
      shuffle(order, rng);
      for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0 && k % static_cast<std::size_t>(config.batch_size) == 0) bounds.push_back(pairs.size());
        for (int l : picks[static_cast<std::size_t>(order[k])]) pairs.push_back({order[k], l});
      }
    }
    bounds.push_back(pairs.size());

    double total = 0.0;
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
      const auto batch = make_batch(data, pairs, bounds[b], bounds[b + 1]);
      double loss;
      try {
        loss = training_loss(model, batch, nodes, &grad, node_features);
      } catch (const numeric_error& e) {
        throw numeric_error("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(b) + ": " + e.what());
      }
      if (!grad.allFinite())
        throw numeric_error("non-finite gradient at epoch " + std::to_string(epoch) + ", batch " +
                            std::to_string(b));
      total += loss * double(batch.pairs());
      opt.step(theta, grad, lr);
      model.set_parameters(theta);
    }
    const epoch_record rec{epoch, lr, total / double(pairs.size())};
    result.history.push_back(rec);
    if (on_epoch && !on_epoch(epoch, model, rec)) break;
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::vector<sweep_row> training_size_sweep(problem_tag p, const labeled_dataset& train_data,
                                           const std::vector<labeled_dataset>& tests,
                                           const std::vector<int>& sizes,
                                           const std::vector<model_kind>& kinds,
                                           const train_config& config) {
  std::vector<sweep_row> rows;
  if (sizes.empty()) return rows;
  const problem_setup setup = make_problem(p);
  for (int n : sizes) {
    require(n >= 1 && n <= train_data.size(), "sweep: size exceeds the training set");
    const auto subset = train_data.prefix(n);
    for (model_kind k : kinds) {
      auto model = operator_model::create(k, setup, config.seed);
      train(model, subset, config);
      for (const auto& t : tests) {
        const auto rep = evaluate_model(model, t);
        rows.push_back({n, k, t.split, rep.summary().mean, rep.table_error()});
      }
    }
  }
  return rows;
}

void write_history_csv(const train_result& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "epoch,lr,loss\n" << std::setprecision(17);
  for (const auto& e : r.history) out << e.epoch << ',' << e.lr << ',' << e.loss << '\n';
}

void write_sweep_csv(const std::vector<sweep_row>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "size,model,split,mean_error_percent,table_error_percent\n" << std::setprecision(17);
  for (const auto& r : rows)
    out << r.size << ',' << to_string(r.model) << ',' << to_string(r.split) << ',' << r.mean_error << ','
        << r.table_error << '\n';
}

} // namespace pgvarmion
