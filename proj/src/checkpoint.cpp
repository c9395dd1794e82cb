#include "pgvarmion/checkpoint.hpp"
#include "pgvarmion/config.hpp"

#include "binary_io.hpp"

#include <json.hpp>

namespace pgvarmion {

using nlohmann::json;

namespace {

constexpr char magic[8] = {'P', 'G', 'V', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t version = 1;

} // namespace

std::string serialize(const checkpoint& c) {
  const auto& m = c.model;
  const auto& s = m.setup();
  json meta{{"problem", to_string(s.tag)},
            {"model", to_string(m.kind())},
            {"basis", s.basis.tag()},
            {"basis_size", s.basis.size()},
            {"sensors", m.sensor_count()},
            {"parameter_count", m.parameter_count()},
            {"seed", c.seed},
            {"epochs_done", c.epochs_done},
            {"train_config", json::parse(to_json(c.config))},
            {"has_transform", s.basis.orthonormalized()}};
  if (m.has_net()) {
    meta["layer_dims"] = m.net().dims();
    meta["activation"] = "hat";
    meta["final_bias"] = m.net().final_bias();
    meta["cutoff_p"] = m.net().cutoff_p();
  }
  if (m.b().size() > 0) meta["b_shape"] = {m.b().rows(), m.b().cols()};

  io::writer w;
  w.bytes(magic, sizeof magic);
  w.put<std::uint32_t>(version);
  w.string(meta.dump());
  const Vector theta = m.parameters();
  w.put<std::uint64_t>(static_cast<std::uint64_t>(theta.size()));
  w.doubles(theta.data(), static_cast<std::size_t>(theta.size()));
  if (s.basis.orthonormalized()) {
    const RowMatrix t = s.basis.transform();
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(t.cols()));
    w.doubles(t.data(), static_cast<std::size_t>(t.size()));
  }
  return w.data();
}

checkpoint deserialize_checkpoint(const std::string& bytes) {
  io::reader r(bytes);
  char mg[8];
  r.bytes(mg, sizeof mg);
  if (std::memcmp(mg, magic, sizeof mg) != 0) throw data_error("not a checkpoint file");
  if (r.get<std::uint32_t>() != version) throw data_error("unsupported checkpoint version");
  checkpoint c;
  c.metadata = r.string();
  json meta;
  try {
    meta = json::parse(c.metadata);
  } catch (const json::exception& e) {
    throw data_error(std::string("checkpoint metadata: ") + e.what());
  }
  const auto np = r.get<std::uint64_t>();
  Vector theta(static_cast<Eigen::Index>(np));
  r.doubles(theta.data(), np);
  Matrix transform;
  const bool has_transform = meta.value("has_transform", false);
  if (has_transform) {
    const auto rows = r.get<std::uint64_t>(), cols = r.get<std::uint64_t>();
    RowMatrix t(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    r.doubles(t.data(), static_cast<std::size_t>(t.size()));
    transform = t;
  }
  if (!r.done()) throw data_error("checkpoint: trailing bytes");

  const auto tag = parse_problem(meta.at("problem").get<std::string>());
  const auto kind = parse_model(meta.at("model").get<std::string>());
  // The non-orthonormalized bases are fixed; only the boundary-layer
  // transform travels with the checkpoint.
  const problem_setup setup = make_problem(tag, has_transform && tag == problem_tag::advdiff1d ? &transform : nullptr);
  c.seed = meta.at("seed").get<std::uint64_t>();
  c.epochs_done = meta.value("epochs_done", 0);
  c.config = train_config_from_json(meta.at("train_config").dump());
  c.model = operator_model::create(kind, setup, c.seed);
  if (c.model.has_net() && meta.at("layer_dims").get<std::vector<int>>() != c.model.net().dims())
    throw data_error("checkpoint: layer dimensions do not match the problem architecture");
  if (c.model.parameter_count() != static_cast<Eigen::Index>(np))
    throw data_error("checkpoint: parameter count mismatch");
  c.model.set_parameters(theta);
  return c;
}

void save_checkpoint(const checkpoint& c, const std::string& path) { io::write_file(path, serialize(c)); }

checkpoint load_checkpoint(const std::string& path) { return deserialize_checkpoint(io::read_file(path)); }

} // namespace pgvarmion
