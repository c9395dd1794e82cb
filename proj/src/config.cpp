#include "pgvarmion/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace pgvarmion {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw config_error(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw config_error(where + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

json train_to_json(const train_config& c) {
  return {{"epochs", c.epochs},
          {"batch_size", c.batch_size},
          {"batch_unit", c.unit == batch_unit::points ? "points" : "functions"},
          {"n_r", c.n_r},
          {"lr", c.schedule.initial},
          {"lr_step", c.schedule.interval},
          {"lr_gamma", c.schedule.gamma},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"eps", c.eps},
          {"weight_decay", c.weight_decay},
          {"checkpoint_every", c.checkpoint_every}};
}

void train_from_json(const json& j, train_config& c) {
  reject_unknown(j, {"epochs", "batch_size", "batch_unit", "n_r", "lr", "lr_step", "lr_gamma", "beta1", "beta2",
                     "eps", "weight_decay", "checkpoint_every"},
                 "train");
  read(j, "epochs", c.epochs);
  read(j, "batch_size", c.batch_size);
  if (j.contains("batch_unit")) {
    const auto u = j.at("batch_unit").get<std::string>();
    if (u == "points")
      c.unit = batch_unit::points;
    else if (u == "functions")
      c.unit = batch_unit::functions;
    else
      throw config_error("batch_unit must be 'points' or 'functions'");
  }
  read(j, "n_r", c.n_r);
  read(j, "lr", c.schedule.initial);
  read(j, "lr_step", c.schedule.interval);
  read(j, "lr_gamma", c.schedule.gamma);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "eps", c.eps);
  read(j, "weight_decay", c.weight_decay);
  read(j, "checkpoint_every", c.checkpoint_every);
  if (c.epochs < 0 || c.batch_size < 1 || c.n_r < 1 || c.schedule.interval < 1 || !(c.schedule.initial > 0.0))
    throw config_error("train: values out of range");
}

} // namespace

void run_config::apply_profile() {
  if (profile == "paper") {
    train = train_config::paper(problem);
    sizes = profile_sizes::paper(problem);
  } else if (profile == "desk") {
    train = train_config::desk(problem);
    sizes = profile_sizes::desk(problem);
  } else {
    throw config_error("profile must be 'paper' or 'desk'");
  }
  train.seed = seed;
}

run_config parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(j, {"problem", "model", "profile", "data_dir", "out_dir", "seed", "dataset_seed", "train", "sizes",
                     "sweep_sizes"},
                 "config");
  run_config c;
  if (j.contains("problem")) c.problem = parse_problem(j.at("problem").get<std::string>());
  if (j.contains("model")) c.model = parse_model(j.at("model").get<std::string>());
  read(j, "profile", c.profile);
  read(j, "seed", c.seed);
  read(j, "dataset_seed", c.dataset_seed);
  c.apply_profile();
  read(j, "data_dir", c.data_dir);
  read(j, "out_dir", c.out_dir);
  if (j.contains("train")) train_from_json(j.at("train"), c.train);
  if (j.contains("sizes")) {
    reject_unknown(j.at("sizes"), {"train", "test"}, "sizes");
    read(j.at("sizes"), "train", c.sizes.train);
    read(j.at("sizes"), "test", c.sizes.test);
  }
  read(j, "sweep_sizes", c.sweep_sizes);
  return c;
}

run_config load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

std::string to_json(const run_config& c, int indent) {
  json j{{"problem", to_string(c.problem)},
         {"profile", c.profile},
         {"data_dir", c.data_dir},
         {"out_dir", c.out_dir},
         {"seed", c.seed},
         {"dataset_seed", c.dataset_seed},
         {"train", train_to_json(c.train)},
         {"sizes", {{"train", c.sizes.train}, {"test", c.sizes.test}}},
         {"sweep_sizes", c.sweep_sizes}};
  if (c.model) j["model"] = to_string(*c.model);
  return j.dump(indent);
}

std::string to_json(const train_config& c) {
  json j = train_to_json(c);
  j["seed"] = c.seed;
  return j.dump();
}

train_config train_config_from_json(const std::string& text) {
  json j = json::parse(text);
  train_config c;
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    j.erase("seed");
  }
  train_from_json(j, c);
  return c;
}

} // namespace pgvarmion
