// pgvarmion: dataset generation, training, evaluation and reports.

#include "pgvarmion/analysis.hpp"
#include "pgvarmion/checkpoint.hpp"
#include "pgvarmion/config.hpp"
#include "pgvarmion/dataset.hpp"
#include "pgvarmion/digest.hpp"
#include "pgvarmion/kernels.hpp"
#include "pgvarmion/training.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace fs = std::filesystem;
using namespace pgvarmion;
using nlohmann::json;

namespace {

constexpr const char* tool_version = "1.0.0";

enum exit_code { ok = 0, failure = 1, bad_config = 2, bad_data = 3, numeric_failure = 4 };

struct options {
  std::string config_path;
  std::string problem;
  std::string model;
  std::string profile;
  std::string data_dir;
  std::string out_dir;
  std::int64_t seed = -1;
  std::int64_t dataset_seed = -1;
  int threads = 0;
  bool deterministic = false;

  // gen-data
  std::string split = "all";
  int count = -1;
  bool csv = false;
  // train
  int epochs = -1;
  int train_count = -1;
  // eval / export / report
  std::vector<std::string> checkpoints;
  int bins = 30;
  // sweep
  std::vector<int> sizes;
  std::vector<std::string> models;
};

run_config resolve(const options& o) {
  // Problem and profile select the defaults, so they are merged into the
  // document before the file's own values are applied on top.
  json doc = json::object();
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw config_error("cannot open config '" + o.config_path + "'");
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw config_error(std::string("config is not valid JSON: ") + e.what());
    }
  }
  if (!o.problem.empty()) doc["problem"] = o.problem;
  if (!o.profile.empty()) doc["profile"] = o.profile;
  if (o.seed >= 0) doc["seed"] = o.seed;
  run_config c = parse_run_config(doc.dump());
  c.train.seed = c.seed;
  if (!o.model.empty()) c.model = parse_model(o.model);
  if (o.dataset_seed >= 0) c.dataset_seed = static_cast<std::uint64_t>(o.dataset_seed);
  if (!o.data_dir.empty())
    c.data_dir = o.data_dir;
  else if (c.data_dir.empty()) {
    const char* env = std::getenv("PGVARMION_DATA_DIR");
    c.data_dir = env ? env : "data";
  }
  if (!o.out_dir.empty()) c.out_dir = o.out_dir;
  if (c.out_dir.empty()) c.out_dir = "runs";
  if (o.epochs >= 0) c.train.epochs = o.epochs;
  if (o.train_count > 0) c.sizes.train = o.train_count;
  if (!o.sizes.empty()) c.sweep_sizes = o.sizes;
  return c;
}

void setup_threads(const options& o) {
  if (o.deterministic)
    kernels::set_threads(1);
  else if (o.threads > 0)
    kernels::set_threads(o.threads);
}

// Top-level manifest: versions, seeds and digests of everything written.
void record(const run_config& c, const std::string& dir, const std::string& command,
            const std::vector<std::string>& files) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / "manifest.json";
  json m = json::object();
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      m = json::parse(in);
    } catch (const json::exception&) {
      m = json::object();
    }
  }
  m["tool"] = "pgvarmion";
  m["version"] = tool_version;
  m["format_versions"] = {{"dataset", 1}, {"checkpoint", 1}};
  for (const auto& f : files) {
    const auto name = fs::path(f).filename().string();
    m["files"][name] = {{"sha256", sha256_file(f)}, {"command", command}, {"seed", c.seed},
                        {"dataset_seed", c.dataset_seed}, {"problem", to_string(c.problem)}};
  }
  m["last_config"] = json::parse(to_json(c));
  std::ofstream(path) << m.dump(2) << '\n';
}

std::string dataset_path(const run_config& c, split_tag s, int count) {
  return (fs::path(c.data_dir) / (to_string(c.problem) + "-" + to_string(s) + "-seed" + std::to_string(c.dataset_seed) +
                                  "-n" + std::to_string(count) + ".pgvd"))
      .string();
}

int split_count(const run_config& c, split_tag s) { return s == split_tag::train ? c.sizes.train : c.sizes.test; }

// Loads a cached dataset or generates and stores it.
labeled_dataset obtain(const run_config& c, split_tag s, int count, std::vector<std::string>* written = nullptr) {
  const auto path = dataset_path(c, s, count);
  if (fs::exists(path)) return load_dataset(path);
  std::cerr << "generating " << to_string(c.problem) << " " << to_string(s) << " (" << count << " samples)\n";
  auto d = build_dataset(c.problem, s, count, c.dataset_seed);
  fs::create_directories(c.data_dir);
  save_dataset(d, path);
  if (written) written->push_back(path);
  return d;
}

std::vector<split_tag> requested_splits(const run_config& c, const std::string& split) {
  if (split == "all") {
    auto s = test_splits(c.problem);
    s.insert(s.begin(), split_tag::train);
    return s;
  }
  if (split == "test") return test_splits(c.problem);
  return {parse_split(split)};
}

int cmd_gen_data(const options& o) {
  const auto c = resolve(o);
  std::vector<std::string> written;
  for (auto s : requested_splits(c, o.split)) {
    const int n = o.count >= 0 ? o.count : split_count(c, s);
    const auto path = dataset_path(c, s, n);
    auto d = build_dataset(c.problem, s, n, c.dataset_seed);
    fs::create_directories(c.data_dir);
    save_dataset(d, path);
    written.push_back(path);
    std::cout << path << "  " << d.size() << " records  sha256 " << sha256_file(path) << '\n';
    if (o.csv) {
      const auto csv = path.substr(0, path.size() - 5) + ".csv";
      export_dataset_csv(d, csv);
      written.push_back(csv);
    }
  }
  record(c, c.data_dir, "gen-data", written);
  return ok;
}

std::string checkpoint_path(const run_config& c, model_kind k) {
  return (fs::path(c.out_dir) / (to_string(c.problem) + "-" + to_string(k) + ".ckpt")).string();
}

int cmd_train(const options& o) {
  const auto c = resolve(o);
  if (!c.model) throw config_error("train: --model is required");
  std::vector<std::string> written;
  const auto data = obtain(c, split_tag::train, c.sizes.train, &written);
  const auto setup = make_problem(c.problem);
  auto model = operator_model::create(*c.model, setup, c.seed);
  fs::create_directories(c.out_dir);
  const auto ckpt = checkpoint_path(c, *c.model);
  std::cout << to_string(*c.model) << " on " << to_string(c.problem) << ": " << model.parameter_count()
            << " parameters, " << c.train.epochs << " epochs\n";
  const auto result = train(model, data, c.train, [&](int epoch, const operator_model& m, const epoch_record& r) {
    if (c.train.checkpoint_every > 0 && (epoch + 1) % c.train.checkpoint_every == 0) {
      save_checkpoint({m, c.seed, c.train, epoch + 1, {}}, ckpt);
      std::cout << "epoch " << epoch + 1 << "  lr " << r.lr << "  loss " << r.loss << '\n';
    }
    return true;
  });
  save_checkpoint({model, c.seed, c.train, static_cast<int>(result.history.size()), {}}, ckpt);
  const auto loss = (fs::path(c.out_dir) / (to_string(c.problem) + "-" + to_string(*c.model) + "-loss.csv")).string();
  write_history_csv(result, loss);
  written.push_back(ckpt);
  written.push_back(loss);
  std::cout << "wrote " << ckpt << " (" << result.seconds << " s)\n";
  record(c, c.out_dir, "train", written);
  return ok;
}

std::vector<checkpoint> load_checkpoints(const options& o, const run_config& c) {
  std::vector<checkpoint> out;
  for (const auto& p : o.checkpoints) {
    out.push_back(load_checkpoint(p));
    if (out.back().model.setup().tag != c.problem)
      throw config_error("checkpoint '" + p + "' belongs to problem " + to_string(out.back().model.setup().tag));
  }
  return out;
}

int cmd_eval(const options& o) {
  const auto c = resolve(o);
  const auto ckpts = load_checkpoints(o, c);
  std::vector<std::string> written;
  fs::create_directories(c.out_dir);
  const auto setup = ckpts.empty() ? make_problem(c.problem) : ckpts.front().model.setup();
  std::vector<error_report> proj;
  std::vector<std::vector<error_report>> per_model(ckpts.size());
  const std::string stem = (fs::path(c.out_dir) / to_string(c.problem)).string();
  for (auto s : test_splits(c.problem)) {
    const auto data = obtain(c, s, c.sizes.test);
    proj.push_back(evaluate_projection(setup, data));
    const auto pfile = stem + "-projection-" + to_string(s) + ".csv";
    write_report_csv(proj.back(), pfile);
    written.push_back(pfile);
    for (std::size_t m = 0; m < ckpts.size(); ++m) {
      per_model[m].push_back(evaluate_model(ckpts[m].model, data));
      const auto& r = per_model[m].back();
      const auto tag = to_string(ckpts[m].model.kind());
      const auto rfile = stem + "-" + tag + "-" + to_string(s) + ".csv";
      write_report_csv(r, rfile);
      const auto hfile = stem + "-" + tag + "-" + to_string(s) + "-hist.csv";
      write_histogram_csv(make_histogram(r.model_error, o.bins), hfile);
      written.push_back(rfile);
      written.push_back(hfile);
      if (r.floor_violations > 0)
        std::cerr << "warning: " << r.floor_violations << " projection-floor violations for " << tag << '\n';
    }
  }
  const auto table = make_comparison_table(proj, per_model);
  std::cout << table.text();
  const auto tfile = stem + "-comparison.csv";
  table.write_csv(tfile);
  written.push_back(tfile);
  record(c, c.out_dir, "eval", written);
  return ok;
}

int cmd_export_psi(const options& o) {
  const auto c = resolve(o);
  const auto ckpts = load_checkpoints(o, c);
  if (ckpts.size() != 1 || ckpts.front().model.kind() != model_kind::pg_varmion)
    throw config_error("export-psi: exactly one PG-VarMiON checkpoint is required");
  const auto& model = ckpts.front().model;
  const auto& setup = model.setup();
  fs::create_directories(c.out_dir);
  std::vector<std::string> written;
  const std::string stem = (fs::path(c.out_dir) / (to_string(c.problem) + "-psi")).string();

  std::vector<ScalarField> truth;
  if (c.problem == problem_tag::diffusion1d)
    truth = diffusion_psi_closed_form(setup.basis.size(), setup.pde.kappa);
  else
    truth = reference_solver(setup).adjoint_psi();

  std::vector<int> modes;
  std::vector<Point> grid;
  if (setup.dim() == 1) {
    for (int i = 0; i < setup.basis.size(); ++i) modes.push_back(i);
    for (int k = 0; k <= 400; ++k) grid.push_back({k / 400.0, 0.0});
  } else {
    const int m = setup.basis.m();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) modes.push_back(i * m + j);
    for (int i = 0; i <= 100; ++i)
      for (int j = 0; j <= 100; ++j) grid.push_back({i / 100.0, j / 100.0});
  }
  const Matrix hat = model.psi_values(grid);
  {
    std::ofstream out(stem + ".csv");
    out << std::setprecision(17) << (setup.dim() == 1 ? "x" : "x,y");
    for (int i : modes) out << ",psi_hat_" << i + 1;
    for (int i : modes) out << ",psi_" << i + 1;
    out << '\n';
    for (std::size_t k = 0; k < grid.size(); ++k) {
      out << grid[k].x;
      if (setup.dim() == 2) out << ',' << grid[k].y;
      for (int i : modes) out << ',' << hat(i, static_cast<Eigen::Index>(k));
      for (int i : modes) out << ',' << truth[static_cast<std::size_t>(i)](grid[k]);
      out << '\n';
    }
  }
  written.push_back(stem + ".csv");
  const auto rep = psi_error_report(model, truth);
  {
    std::ofstream out(stem + "-errors.csv");
    out << std::setprecision(17) << "mode,l2,l2_relative,h1,h1_relative\n";
    for (const auto& e : rep.modes)
      out << e.index << ',' << e.l2 << ',' << e.l2_relative << ',' << e.h1 << ',' << e.h1_relative << '\n';
  }
  written.push_back(stem + "-errors.csv");
  for (const auto& e : rep.modes)
    std::cout << "mode " << std::setw(3) << e.index << "  L2 rel " << std::setprecision(4) << e.l2_relative
              << "  H1 rel " << e.h1_relative << '\n';
  record(c, c.out_dir, "export-psi", written);
  return ok;
}

int cmd_sweep(const options& o) {
  const auto c = resolve(o);
  std::vector<model_kind> kinds;
  for (const auto& m : o.models) kinds.push_back(parse_model(m));
  if (kinds.empty()) kinds = {c.model.value_or(model_kind::pg_varmion)};
  int largest = 0;
  for (int s : c.sweep_sizes) largest = std::max(largest, s);
  const auto train_data = obtain(c, split_tag::train, std::max(largest, c.sizes.train));
  std::vector<labeled_dataset> tests;
  for (auto s : test_splits(c.problem)) tests.push_back(obtain(c, s, c.sizes.test));
  const auto rows = training_size_sweep(c.problem, train_data, tests, c.sweep_sizes, kinds, c.train);
  fs::create_directories(c.out_dir);
  const auto path = (fs::path(c.out_dir) / (to_string(c.problem) + "-sweep.csv")).string();
  write_sweep_csv(rows, path);
  for (const auto& r : rows)
    std::cout << std::setw(6) << r.size << "  " << std::setw(11) << to_string(r.model) << "  "
              << display_name(r.split) << "  " << std::fixed << std::setprecision(3) << r.mean_error << " %\n";
  record(c, c.out_dir, "sweep", {path});
  return ok;
}

int cmd_report(const options& o) {
  const auto c = resolve(o);
  const auto ckpts = load_checkpoints(o, c);
  fs::create_directories(c.out_dir);
  json rep;
  rep["problem"] = to_string(c.problem);
  rep["norm"] = "discrete L2 on the output rule; table = pooled over the split, mean = mean of per-sample errors";
  std::vector<std::string> written;
  const auto setup = ckpts.empty() ? make_problem(c.problem) : ckpts.front().model.setup();
  for (auto s : test_splits(c.problem)) {
    const auto data = obtain(c, s, c.sizes.test);
    const auto digest = dataset_digest(data);
    const auto p = evaluate_projection(setup, data);
    json& js = rep["splits"][to_string(s)];
    js["dataset_sha256"] = digest;
    js["projection"] = {{"mean", p.projection_summary().mean}, {"median", p.projection_summary().median},
                        {"max", p.projection_summary().max}, {"table", p.projection_table_error()}};
    for (const auto& ck : ckpts) {
      const auto r = evaluate_model(ck.model, data);
      const auto tag = to_string(ck.model.kind());
      js[tag] = {{"mean", r.summary().mean}, {"median", r.summary().median}, {"max", r.summary().max},
                 {"table", r.table_error()}, {"floor_violations", r.floor_violations}};
      if (ck.model.kind() == model_kind::pg_varmion && setup.dim() == 1) {
        const auto truth = c.problem == problem_tag::diffusion1d
                               ? diffusion_psi_closed_form(setup.basis.size(), setup.pde.kappa)
                               : reference_solver(setup).adjoint_psi();
        const auto b = theorem_bound_report(ck.model, data, truth, 100);
        int sandwich = 0;
        for (const auto& x : b.samples) sandwich += x.sandwich ? 0 : 1;
        js[tag]["bound_violations"] = b.violations();
        js[tag]["rayleigh_violations"] = sandwich;
        js[tag]["bound_samples"] = b.samples.size();
        js[tag]["constants"] = b.constants_note;
      }
      if (setup.dim() == 2 && s == split_tag::test1 && data.size() > 0) {
        const reference_solver solver(setup);
        const auto slices = diagonal_slices(ck.model, data.f.col(0), solver.solve(data.forcings.front()));
        const auto sfile = (fs::path(c.out_dir) / (to_string(c.problem) + "-" + tag + "-slices.csv")).string();
        write_slices_csv(slices, sfile);
        written.push_back(sfile);
      }
    }
  }
  for (const auto& p : o.checkpoints) rep["checkpoints"][fs::path(p).filename().string()] = sha256_file(p);
  const auto path = (fs::path(c.out_dir) / (to_string(c.problem) + "-report.json")).string();
  std::ofstream(path) << rep.dump(2) << '\n';
  written.push_back(path);
  std::cout << rep.dump(2) << '\n';
  record(c, c.out_dir, "report", written);
  return ok;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"PG-VarMiON operator networks for steady advection-diffusion"};
  app.require_subcommand(1);
  options o;
  app.add_option("--config", o.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--problem", o.problem, "diffusion1d | advdiff1d | advdiff2d");
  app.add_option("--model", o.model, "pg-varmion | bnet | l-deeponet");
  app.add_option("--profile", o.profile, "paper | desk");
  app.add_option("--data-dir", o.data_dir, "dataset directory (default $PGVARMION_DATA_DIR or ./data)");
  app.add_option("--out", o.out_dir, "output directory (default ./runs)");
  app.add_option("--seed", o.seed, "model and training seed");
  app.add_option("--dataset-seed", o.dataset_seed, "forcing seed");
  app.add_option("--threads", o.threads, "maximum worker threads");
  app.add_flag("--deterministic", o.deterministic, "single-threaded execution");

  auto* gen = app.add_subcommand("gen-data", "generate labeled datasets");
  gen->add_option("--split", o.split, "train | test1 | test2 | test3 | test | all");
  gen->add_option("--count", o.count, "number of samples (default from the profile)");
  gen->add_flag("--csv", o.csv, "also write a CSV export");

  auto* tr = app.add_subcommand("train", "train one model");
  tr->add_option("--epochs", o.epochs, "override the epoch count");
  tr->add_option("--train-count", o.train_count, "override the training-set size");

  auto* ev = app.add_subcommand("eval", "relative L2 errors on the test sets");
  ev->add_option("--checkpoint", o.checkpoints, "checkpoint file(s); none = projection only");
  ev->add_option("--bins", o.bins, "histogram bins");

  auto* ex = app.add_subcommand("export-psi", "export learned and exact weighting functions");
  ex->add_option("--checkpoint", o.checkpoints, "PG-VarMiON checkpoint")->required();

  auto* sw = app.add_subcommand("sweep", "training-set size sweep");
  sw->add_option("--sizes", o.sizes, "training-set sizes");
  sw->add_option("--models", o.models, "models to train");
  sw->add_option("--epochs", o.epochs, "override the epoch count");

  auto* rp = app.add_subcommand("report", "summary report with theory checks");
  rp->add_option("--checkpoint", o.checkpoints, "checkpoint file(s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : bad_config;
  }

  try {
    setup_threads(o);
    if (*gen) return cmd_gen_data(o);
    if (*tr) return cmd_train(o);
    if (*ev) return cmd_eval(o);
    if (*ex) return cmd_export_psi(o);
    if (*sw) return cmd_sweep(o);
    if (*rp) return cmd_report(o);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return bad_config;
  } catch (const invalid_argument_error& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return bad_config;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return bad_data;
  } catch (const numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  } catch (const degenerate_basis_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  } catch (const covariance_error& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return numeric_failure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return failure;
  }
  return failure;
}
