#include "pgvarmion/dataset.hpp"
#include "pgvarmion/digest.hpp"
#include "pgvarmion/kernels.hpp"

#include "binary_io.hpp"

#include <fstream>
#include <iomanip>
#include <iterator>
#include <map>
#include <mutex>
#include <sstream>

namespace pgvarmion {

namespace io {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw data_error("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw data_error("write failed for '" + path + "'");
}

} // namespace io

std::string to_string(split_tag s) {
  switch (s) {
  case split_tag::train: return "train";
  case split_tag::test1: return "test1";
  case split_tag::test2: return "test2";
  case split_tag::test3: return "test3";
  }
  return "unknown";
}

split_tag parse_split(const std::string& s) {
  if (s == "train") return split_tag::train;
  if (s == "test1") return split_tag::test1;
  if (s == "test2") return split_tag::test2;
  if (s == "test3") return split_tag::test3;
  throw config_error("unknown split '" + s + "' (expected train, test1, test2 or test3)");
}

std::string display_name(split_tag s) {
  switch (s) {
  case split_tag::train: return "TRAIN";
  case split_tag::test1: return "DATASET 1";
  case split_tag::test2: return "DATASET 2";
  case split_tag::test3: return "DATASET 3";
  }
  return "unknown";
}

std::vector<split_tag> test_splits(problem_tag p) {
  if (p == problem_tag::advdiff2d) return {split_tag::test1};
  return {split_tag::test1, split_tag::test2, split_tag::test3};
}

namespace {

std::shared_ptr<const collocation_solver_2d> shared_solver(const pde_config& pde, int r) {
  static std::mutex m;
  static std::map<std::pair<double, int>, std::shared_ptr<const collocation_solver_2d>> cache;
  std::lock_guard<std::mutex> lock(m);
  auto& slot = cache[{pde.kappa, r}];
  if (!slot) slot = std::make_shared<const collocation_solver_2d>(pde, r);
  return slot;
}

} // namespace

reference_solver::reference_solver(const problem_setup& setup, int resolution_2d) : setup_(setup) {
  if (setup.dim() == 2) solver2d_ = shared_solver(setup.pde, resolution_2d);
}

reference_solution reference_solver::solve(const forcing_sample& f) const {
  if (setup_.dim() == 2) return solver2d_->solve(f);
  if (setup_.pde.c == 0.0) return solve_diffusion_1d(f, setup_.pde.kappa);
  return solve_advdiff_1d(f, setup_.pde.kappa, setup_.pde.c);
}

std::vector<ScalarField> reference_solver::adjoint_psi() const {
  if (setup_.dim() == 2) return solve_adjoint_psi_2d(setup_.basis, *solver2d_);
  return solve_adjoint_psi_1d(setup_.basis, setup_.pde);
}

std::uint64_t forcing_seed(std::uint64_t base, split_tag split, std::uint64_t index) {
  require(base < (1ULL << 30), "dataset seed must be below 2^30");
  require(index < (1ULL << 32), "sample index too large");
  return (base << 34) | (static_cast<std::uint64_t>(split) << 32) | index;
}

forcing_sample draw_forcing(problem_tag p, split_tag split, std::uint64_t seed) {
  if (p == problem_tag::advdiff2d) {
    if (split == split_tag::test2 || split == split_tag::test3)
      throw config_error("the 2D problem has no GRF test splits");
    return fourier_forcing_2d(seed);
  }
  switch (split) {
  case split_tag::train:
  case split_tag::test1: return fourier_forcing_1d(seed);
  case split_tag::test2: return grf_forcing(0.1, seed);
  case split_tag::test3: return grf_forcing(0.05, seed);
  }
  throw config_error("unknown split");
}

labeled_dataset build_dataset(const problem_setup& setup, split_tag split,
                              std::vector<forcing_sample> forcings, std::uint64_t seed) {
  labeled_dataset d;
  d.problem = setup.tag;
  d.split = split;
  d.seed = seed;
  d.sensor_spec = setup.sensor_rule.spec();
  d.output_spec = setup.output_rule.spec();
  const auto n = static_cast<Eigen::Index>(forcings.size());
  d.f.resize(static_cast<Eigen::Index>(setup.sensor_rule.size()), n);
  d.labels.resize(static_cast<Eigen::Index>(setup.output_rule.size()), n);
  const reference_solver solver(setup);
  kernels::parallel_for(n, [&](std::ptrdiff_t j) {
    try {
      const auto& fj = forcings[static_cast<std::size_t>(j)];
      d.f.col(j) = sensor_vector(fj, setup.sensor_rule);
      d.labels.col(j) = solver.solve(fj).values(setup.output_rule);
      if (!d.labels.col(j).allFinite() || !d.f.col(j).allFinite())
        throw numeric_error("non-finite values");
    } catch (const std::exception& e) {
      throw numeric_error("dataset sample " + std::to_string(j) + ": " + e.what());
    }
  });
  d.forcings = std::move(forcings);
  return d;
}

labeled_dataset build_dataset(problem_tag p, split_tag split, int count, std::uint64_t seed) {
  require(count >= 0, "build_dataset: negative count");
  const problem_setup setup = make_problem(p);
  std::vector<forcing_sample> forcings(static_cast<std::size_t>(count));
  kernels::parallel_for(count, [&](std::ptrdiff_t j) {
    forcings[static_cast<std::size_t>(j)] =
        draw_forcing(p, split, forcing_seed(seed, split, static_cast<std::uint64_t>(j)));
  });
  return build_dataset(setup, split, std::move(forcings), seed);
}

labeled_dataset labeled_dataset::prefix(int n) const {
  require(n >= 0 && n <= size(), "prefix: size out of range");
  labeled_dataset d = *this;
  d.forcings.resize(static_cast<std::size_t>(n));
  d.f = f.leftCols(n);
  d.labels = labels.leftCols(n);
  return d;
}

namespace {

constexpr char dataset_magic[8] = {'P', 'G', 'V', 'D', 'S', 'E', 'T', '\0'};
constexpr std::uint32_t dataset_version = 1;

} // namespace

std::string serialize(const labeled_dataset& d) {
  io::writer w;
  w.bytes(dataset_magic, sizeof dataset_magic);
  w.put<std::uint32_t>(dataset_version);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(d.problem));
  w.put<std::uint8_t>(static_cast<std::uint8_t>(d.split));
  w.put<std::uint64_t>(d.seed);
  w.rule(d.sensor_spec);
  w.rule(d.output_spec);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(d.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d.f.rows()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(d.labels.rows()));
  for (int j = 0; j < d.size(); ++j) {
    const auto& fj = d.forcings[static_cast<std::size_t>(j)];
    w.put<std::uint8_t>(static_cast<std::uint8_t>(fj.family));
    w.put<std::uint64_t>(fj.seed);
    w.put(fj.length_scale);
    w.put(fj.scale);
    w.put<std::int32_t>(fj.modes);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(fj.coeffs.size()));
    w.doubles(fj.coeffs.data(), fj.coeffs.size());
    w.doubles(d.f.col(j).data(), static_cast<std::size_t>(d.f.rows()));
    w.doubles(d.labels.col(j).data(), static_cast<std::size_t>(d.labels.rows()));
  }
  return w.data();
}

labeled_dataset deserialize_dataset(const std::string& bytes) {
  io::reader r(bytes);
  char magic[8];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, dataset_magic, sizeof magic) != 0) throw data_error("not a dataset file");
  if (r.get<std::uint32_t>() != dataset_version) throw data_error("unsupported dataset version");
  labeled_dataset d;
  const auto p = r.get<std::uint8_t>();
  if (p < 1 || p > 3) throw data_error("dataset: bad problem tag");
  d.problem = static_cast<problem_tag>(p);
  const auto s = r.get<std::uint8_t>();
  if (s > 3) throw data_error("dataset: bad split tag");
  d.split = static_cast<split_tag>(s);
  d.seed = r.get<std::uint64_t>();
  d.sensor_spec = r.rule();
  d.output_spec = r.rule();
  const auto n = static_cast<Eigen::Index>(r.get<std::uint64_t>());
  const auto ns = static_cast<Eigen::Index>(r.get<std::uint32_t>());
  const auto no = static_cast<Eigen::Index>(r.get<std::uint32_t>());
  d.f.resize(ns, n);
  d.labels.resize(no, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto family = static_cast<forcing_family>(r.get<std::uint8_t>());
    const auto seed = r.get<std::uint64_t>();
    const auto ell = r.get<double>();
    const auto scale = r.get<double>();
    const auto modes = r.get<std::int32_t>();
    std::vector<double> coeffs(r.get<std::uint32_t>());
    r.doubles(coeffs.data(), coeffs.size());
    d.forcings.push_back(forcing_from_descriptor(family, seed, ell, scale, modes, std::move(coeffs)));
    r.doubles(d.f.col(j).data(), static_cast<std::size_t>(ns));
    r.doubles(d.labels.col(j).data(), static_cast<std::size_t>(no));
  }
  if (!r.done()) throw data_error("dataset: trailing bytes");
  if (!d.labels.allFinite() || !d.f.allFinite()) throw data_error("dataset: non-finite values");
  return d;
}

void save_dataset(const labeled_dataset& d, const std::string& path) { io::write_file(path, serialize(d)); }

labeled_dataset load_dataset(const std::string& path) { return deserialize_dataset(io::read_file(path)); }

std::string dataset_digest(const labeled_dataset& d) { return sha256_hex(serialize(d)); }

void export_dataset_csv(const labeled_dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw data_error("cannot write '" + path + "'");
  out << "index,family,seed";
  for (Eigen::Index k = 0; k < d.f.rows(); ++k) out << ",F" << k;
  for (Eigen::Index l = 0; l < d.labels.rows(); ++l) out << ",u" << l;
  out << '\n' << std::setprecision(17);
  for (int j = 0; j < d.size(); ++j) {
    const auto& fj = d.forcings[static_cast<std::size_t>(j)];
    out << j << ',' << to_string(fj.family) << ',' << fj.seed;
    for (Eigen::Index k = 0; k < d.f.rows(); ++k) out << ',' << d.f(k, j);
    for (Eigen::Index l = 0; l < d.labels.rows(); ++l) out << ',' << d.labels(l, j);
    out << '\n';
  }
}

} // namespace pgvarmion
