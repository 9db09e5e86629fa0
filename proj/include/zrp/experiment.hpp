#pragma once

// Experiment runner behind the `zrp` command line tool: configuration parsing,
// replica seeding, and CSV emission for every mode.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "zrp/configuration.hpp"
#include "zrp/ensemble.hpp"
#include "zrp/error.hpp"
#include "zrp/kinetics.hpp"
#include "zrp/limits.hpp"
#include "zrp/model.hpp"
#include "zrp/observables.hpp"
#include "zrp/partition.hpp"
#include "zrp/rng.hpp"

namespace zrp {

inline constexpr const char* kVersion = "0.1.0";

enum class ExitCode : int { Success = 0, Usage = 1, CheckFailure = 2, ResourceLimit = 3 };

enum class TailScale {
  Cluster,  // C_L = sqrt((rho - rho_c) z(1) theta_eff)
  Mass,     // (rho - rho_c) L
  Particles // N
};

struct ExperimentConfig {
  std::string mode;  // exact | simulate | sample | gc-curve | tails | compare | recipe

  // model
  int A = 2;
  std::vector<double> bulk_rates;  // empty: unit rates
  AboveVariant variant = AboveVariant::ConstantOne;
  ThetaScaling scaling;
  std::optional<double> theta;  // explicit value overrides the scaling

  // system
  std::int64_t L = 0;
  std::optional<std::int64_t> N;
  std::optional<double> rho;

  // run
  GeometryKind geometry = GeometryKind::Complete;
  std::optional<std::uint64_t> events;
  std::optional<double> time;
  std::optional<std::uint64_t> burnin;
  std::int64_t samples = 1;
  std::optional<std::uint64_t> every;
  std::optional<std::uint64_t> seed;
  std::string sampler = "auto";  // auto | exact | kmc
  std::string output = "-";
  std::size_t mem_budget_mb = 2048;

  // grids
  double u_min = 0.05;
  double u_max = 10.0;
  double u_step = 0.05;
  double phi_max = 0.999;
  double rho_max = 2.0;
  std::int64_t points = 200;
  TailScale scale = TailScale::Cluster;

  // compare
  std::string input;
  std::string column = "sb_tail";
  std::string reference;
  double threshold = 0.05;

  // recipe
  std::string recipe;
  std::string out_dir = ".";

  std::int64_t particle_count() const {
    return N ? *N : static_cast<std::int64_t>(std::llround(*rho * static_cast<double>(L)));
  }
  double density() const { return static_cast<double>(particle_count()) / static_cast<double>(L); }

  ModelSpec model() const {
    std::vector<double> rates = bulk_rates.empty() ? std::vector<double>(A - 1, 1.0) : bulk_rates;
    const double th = theta ? *theta : scaling.theta_for(L, std::max<std::int64_t>(particle_count(), 1));
    return ModelSpec(A, std::move(rates), th, variant);
  }

  std::size_t mem_budget_bytes() const { return mem_budget_mb << 20; }

  bool stochastic() const { return mode == "simulate" || mode == "sample" || mode == "tails" || mode == "recipe"; }
  bool needs_system() const { return mode == "exact" || mode == "simulate" || mode == "sample" || mode == "tails"; }
};

namespace detail {

inline std::string describe(const ExperimentConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "zrp " << kVersion << " mode=" << c.mode << " A=" << c.A << " bulk=";
  if (c.bulk_rates.empty()) os << "unit";
  for (std::size_t i = 0; i < c.bulk_rates.size(); ++i) os << (i ? ";" : "") << c.bulk_rates[i];
  os << " variant=" << to_string(c.variant);
  if (c.theta)
    os << " theta=" << *c.theta;
  else
    os << " Theta=" << c.scaling.Theta << " gamma=" << c.scaling.gamma
       << " base=" << (c.scaling.base == ScalingBase::VolumeL ? "L" : "N");
  os << " L=" << c.L;
  if (c.N) os << " N=" << *c.N;
  if (c.rho) os << " rho=" << *c.rho;
  os << " geometry=" << (c.geometry == GeometryKind::Complete ? "complete" : "ring");
  if (c.events) os << " events=" << *c.events;
  if (c.time) os << " time=" << *c.time;
  if (c.burnin) os << " burnin=" << *c.burnin;
  os << " samples=" << c.samples;
  if (c.every) os << " every=" << *c.every;
  if (c.seed) os << " seed=" << *c.seed;
  os << " sampler=" << c.sampler << " u=" << c.u_min << ":" << c.u_max << ":" << c.u_step;
  os << " scale=" << (c.scale == TailScale::Cluster ? "cluster" : c.scale == TailScale::Mass ? "mass" : "N");
  return os.str();
}

inline void validate(const ExperimentConfig& c) {
  if (c.A < 2) throw ConfigError("A", "threshold must be >= 2");
  if (!c.bulk_rates.empty() && static_cast<int>(c.bulk_rates.size()) != c.A - 1)
    throw ConfigError("bulk-rates", "expected A-1 values");
  for (double g : c.bulk_rates)
    if (!(g > 0.0)) throw ConfigError("bulk-rates", "rates must be positive");
  if (c.theta && !(*c.theta > 0.0)) throw ConfigError("theta", "must be positive");
  if (!(c.scaling.Theta > 0.0)) throw ConfigError("Theta", "must be positive");
  if (!(c.scaling.gamma > 0.0)) throw ConfigError("gamma", "must be positive");

  if (c.mode == "compare") {
    if (c.input.empty()) throw ConfigError("input", "compare needs --input");
    if (c.reference.empty()) throw ConfigError("reference", "compare needs --reference");
    if (!(c.threshold > 0.0)) throw ConfigError("threshold", "must be positive");
    return;
  }
  if (c.mode == "recipe") {
    if (c.recipe.empty()) throw ConfigError("recipe", "name a recipe: fig1..fig5");
    if (!c.seed) throw ConfigError("seed", "required for stochastic modes");
    return;
  }
  if (c.L < 1) throw ConfigError("L", "must be >= 1");
  if (c.needs_system()) {
    if (c.N && c.rho) throw ConflictingDensitySpec();
    if (!c.N && !c.rho) throw ConfigError("N/rho", "one of --N or --rho is required");
    if (c.N && *c.N < 0) throw ConfigError("N", "must be nonnegative");
    if (c.rho && !(*c.rho >= 0.0)) throw ConfigError("rho", "must be nonnegative");
  }
  if (c.stochastic() && !c.seed) throw ConfigError("seed", "required for stochastic modes");
  if (!(c.u_step > 0.0) || !(c.u_max > c.u_min) || c.u_min < 0.0)
    throw ConfigError("u-grid", "grid must be ascending with a positive step");
  if (c.samples < 1) throw ConfigError("samples", "must be >= 1");
  if (c.points < 2) throw ConfigError("points", "must be >= 2");
  if (c.sampler != "auto" && c.sampler != "exact" && c.sampler != "kmc")
    throw ConfigError("sampler", "one of auto, exact, kmc");
  if (c.mode == "simulate" && c.L < 2) throw ConfigError("L", "dynamics need at least two sites");
}

}  // namespace detail

/**
 * Parses `zrp <mode> [flags]`. A `--config FILE` (INI/TOML, keys named like the
 * long flags) may supply any flag. Throws ConfigError naming the field.
 */
inline ExperimentConfig parse_config(int argc, const char* const* argv) {
  ExperimentConfig c;
  CLI::App app{"zero-range process with a fast rate: exact computations and simulation", "zrp"};
  app.set_config("--config", "", "INI/TOML file with the same keys as the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  std::string variant = "const";
  std::string geometry = "complete";
  std::string base = "L";
  std::string scale = "cluster";
  std::optional<std::uint64_t> seed;

  app.add_option("--A", c.A, "threshold occupation with the fast rate");
  app.add_option("--bulk-rates", c.bulk_rates, "g(1..A-1), default all 1")->delimiter(',');
  app.add_option("--variant", variant, "rates above A: const (1) or pd (n/(n-1))");
  app.add_option("--theta", c.theta, "fast rate; overrides Theta*size^gamma");
  app.add_option("--Theta", c.scaling.Theta, "prefactor of the fast rate");
  app.add_option("--gamma", c.scaling.gamma, "exponent of the fast rate");
  app.add_option("--base", base, "size the fast rate scales with: L or N");
  app.add_option("--L", c.L, "number of sites");
  app.add_option("--N", c.N, "number of particles");
  app.add_option("--rho", c.rho, "density N/L");
  app.add_option("--geometry", geometry, "complete or ring");
  app.add_option("--events", c.events, "event budget for the dynamics");
  app.add_option("--time", c.time, "time budget for the dynamics");
  app.add_option("--burnin", c.burnin, "burn-in events (default: 100 L slow jumps)");
  app.add_option("--samples", c.samples, "number of samples / realizations");
  app.add_option("--every", c.every, "events between dynamic snapshots (default L)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--sampler", c.sampler, "auto, exact or kmc");
  app.add_option("--out", c.output, "output CSV path, - for stdout");
  app.add_option("--mem-budget", c.mem_budget_mb, "memory budget for exact tables in MiB");
  app.add_option("--u-min", c.u_min, "first grid point of tail curves");
  app.add_option("--u-max", c.u_max, "last grid point of tail curves");
  app.add_option("--u-step", c.u_step, "grid spacing of tail curves");
  app.add_option("--phi-max", c.phi_max, "largest fugacity in gc-curve");
  app.add_option("--rho-max", c.rho_max, "largest density in gc-curve");
  app.add_option("--points", c.points, "grid points in gc-curve");
  app.add_option("--scale", scale, "tail scale: cluster, mass or N");
  app.add_option("--input", c.input, "tail CSV to compare");
  app.add_option("--column", c.column, "column of the tail CSV to compare");
  app.add_option("--reference", c.reference, "gamma21, exp, simplex:L, beta11");
  app.add_option("--threshold", c.threshold, "KS threshold for compare");
  app.add_option("--out-dir", c.out_dir, "directory for recipe outputs");

  for (const char* name : {"exact", "simulate", "sample", "gc-curve", "tails", "compare"})
    app.add_subcommand(name)->fallthrough();
  auto* recipe = app.add_subcommand("recipe", "figure reproductions: fig1..fig5")->fallthrough();
  recipe->add_option("name", c.recipe)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    throw ConfigError("help", app.help());
  } catch (const CLI::ParseError& e) {
    throw ConfigError("argv", e.what());
  }
  c.mode = app.get_subcommands().front()->get_name();
  c.seed = seed;

  if (variant == "const")
    c.variant = AboveVariant::ConstantOne;
  else if (variant == "pd")
    c.variant = AboveVariant::PdRatio;
  else
    throw ConfigError("variant", "expected const or pd");
  if (geometry == "complete")
    c.geometry = GeometryKind::Complete;
  else if (geometry == "ring")
    c.geometry = GeometryKind::Ring;
  else
    throw ConfigError("geometry", "expected complete or ring");
  if (base == "L")
    c.scaling.base = ScalingBase::VolumeL;
  else if (base == "N")
    c.scaling.base = ScalingBase::ParticlesN;
  else
    throw ConfigError("base", "expected L or N");
  if (scale == "cluster")
    c.scale = TailScale::Cluster;
  else if (scale == "mass")
    c.scale = TailScale::Mass;
  else if (scale == "N")
    c.scale = TailScale::Particles;
  else
    throw ConfigError("scale", "expected cluster, mass or N");

  detail::validate(c);
  return c;
}

inline ExperimentConfig parse_config(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"zrp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_config(static_cast<int>(argv.size()), argv.data());
}

/// Worker count from ZRP_THREADS, capped by the hardware.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ZRP_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) hw = std::min(hw, static_cast<unsigned>(v));
  }
  return hw;
}

/// Runs job(i) for i in [0, count) on a small pool; results are indexed by i.
inline void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& job) {
  const unsigned workers = static_cast<unsigned>(std::min<std::int64_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::int64_t i; (i = next++) < count;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// Default burn-in: at least 100 L jumps that did not leave a site at the fast occupation.
inline void burn_in(SimState& state, const ExperimentConfig& c, Rng& rng) {
  if (c.burnin) {
    state.run(Budget{*c.burnin, std::nullopt}, rng);
    return;
  }
  const std::uint64_t target = state.slow_events() + 100 * static_cast<std::uint64_t>(state.geometry().L);
  while (state.slow_events() < target) state.step(rng);
}

/**
 * Stationary configurations for the configured system. Exact draws when the
 * halving ladder fits the memory budget (or when forced), otherwise KMC
 * snapshots after burn-in, `every` events apart. Replica i uses stream (seed, i).
 */
inline std::vector<Configuration> draw_samples(const ExperimentConfig& c, std::ostream& diag) {
  const ModelSpec spec = c.model();
  const std::int64_t N = c.particle_count();
  bool exact = c.sampler != "kmc";
  std::optional<HalvingLadder> ladder;
  if (exact) {
    try {
      ladder.emplace(spec, c.L, N, c.mem_budget_bytes());
    } catch (const ResourceLimit& e) {
      if (c.sampler == "exact") throw;
      diag << "warning: " << e.what() << "; falling back to kinetic Monte Carlo\n";
      exact = false;
    }
  }
  std::vector<Configuration> out(static_cast<std::size_t>(c.samples));
  if (exact) {
    parallel_for(c.samples, [&](std::int64_t i) {
      Rng rng(*c.seed, static_cast<std::uint64_t>(i));
      out[i] = ladder->sample(rng);
    });
    return out;
  }
  if (c.L < 2) throw ConfigError("L", "dynamics need at least two sites");
  Rng rng(*c.seed, 0);
  SimState state(spec, Geometry{c.geometry, c.L}, Configuration::uniform(c.L, N));
  burn_in(state, c, rng);
  const std::uint64_t every = c.every ? *c.every : static_cast<std::uint64_t>(c.L);
  for (auto& s : out) {
    state.run(Budget{every, std::nullopt}, rng);
    s = state.config();
  }
  return out;
}

namespace detail {

inline void write_header(std::ostream& out, const ExperimentConfig& c, const std::string& columns) {
  out << "# " << describe(c) << "\n" << columns << "\n";
  out << std::setprecision(12);
}

inline double tail_scale(const ExperimentConfig& c, const ModelSpec& spec) {
  switch (c.scale) {
    case TailScale::Cluster:
      return cluster_scale(spec, c.density());
    case TailScale::Mass:
      return (c.density() - rho_c(spec)) * static_cast<double>(c.L);
    case TailScale::Particles:
      return static_cast<double>(c.particle_count());
  }
  return 1.0;
}

inline void emit_sample_records(std::ostream& out, const std::vector<Configuration>& samples, int A) {
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const auto& cfg = samples[s];
    const auto prof = integrated_profile(cfg);
    for (std::size_t x = 0; x < prof.size(); ++x) out << "profile," << s << "," << x + 1 << "," << prof[x] << "\n";
    out << "cluster_count," << s << ",0," << cluster_count(cfg, A) << "\n";
    const auto mx = max_site(cfg);
    out << "max_M," << s << ",0," << mx.M << "\n";
    for (auto x : mx.sites) out << "max_X," << s << "," << x << ",1\n";
  }
}

inline int run_exact(const ExperimentConfig& c, std::ostream& out) {
  const ModelSpec spec = c.model();
  const std::int64_t N = c.particle_count();
  if (c.L < 2) throw ConfigError("L", "exact marginals need L >= 2");
  const auto table = build_table(spec, c.L, N, TableLayout::Rolling, c.mem_budget_bytes());
  write_header(out, c, "quantity,n,rho,value");
  for (std::int64_t n = 1; n <= N; ++n)
    out << "current," << n << "," << static_cast<double>(n) / c.L << "," << canonical_current(table, c.L, n) << "\n";
  for (std::int64_t n = 0; n <= N; ++n)
    out << "marginal," << n << "," << c.density() << "," << occupation_marginal(table, c.L, N, n) << "\n";
  if (N >= 1) {
    const auto law = size_biased_marginal(table, c.L, N);
    for (std::int64_t n = 1; n <= N; ++n)
      out << "size_biased," << n << "," << c.density() << "," << law.prob(n) << "\n";
  }
  return 0;
}

inline int run_samples(const ExperimentConfig& c, std::ostream& out, std::ostream& diag) {
  const auto samples = draw_samples(c, diag);
  write_header(out, c, "record,sample,key,value");
  emit_sample_records(out, samples, c.A);
  return 0;
}

inline int run_simulate(const ExperimentConfig& c, std::ostream& out, std::ostream& diag) {
  const ModelSpec spec = c.model();
  std::vector<Configuration> samples;
  double event_rate = 0.0;
  {
    Rng rng(*c.seed, 0);
    SimState state(spec, Geometry{c.geometry, c.L}, Configuration::uniform(c.L, c.particle_count()));
    burn_in(state, c, rng);
    const std::uint64_t every = c.every ? *c.every : static_cast<std::uint64_t>(c.L);
    const double t0 = state.time();
    const auto e0 = state.events();
    for (std::int64_t s = 0; s < c.samples; ++s) {
      if (c.time && !c.events)
        state.run(Budget{std::nullopt, *c.time / static_cast<double>(c.samples)}, rng);
      else
        state.run(Budget{c.events ? *c.events / static_cast<std::uint64_t>(c.samples) : every, std::nullopt}, rng);
      samples.push_back(state.config());
    }
    event_rate = static_cast<double>(state.events() - e0) / (static_cast<double>(c.L) * (state.time() - t0));
    diag << "events=" << state.events() << " time=" << state.time() << "\n";
  }
  write_header(out, c, "record,sample,key,value");
  out << "event_rate_per_site,0,0," << event_rate << "\n";
  emit_sample_records(out, samples, c.A);
  if (c.density() > rho_c(spec) && c.scale == TailScale::Cluster) {
    const double C = tail_scale(c, spec);
    const auto grid = make_grid(c.u_min, c.u_max, c.u_step);
    const auto sb = empirical_sb_tail(samples, C, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out << "sb_tail,-1," << grid[i] << "," << sb.values[i] << "\n";
    try {
      const auto ct = cluster_tail(samples, c.A, C, grid);
      for (std::size_t i = 0; i < grid.size(); ++i) out << "cluster_tail,-1," << grid[i] << "," << ct.values[i] << "\n";
    } catch (const std::invalid_argument&) {
      diag << "no cluster sites observed; cluster_tail omitted\n";
    }
  }
  return 0;
}

inline int run_tails(const ExperimentConfig& c, std::ostream& out, std::ostream& diag) {
  const ModelSpec spec = c.model();
  const double C = tail_scale(c, spec);
  const auto samples = draw_samples(c, diag);
  const auto grid = make_grid(c.u_min, c.u_max, c.u_step);

  // fraction of sites above u C
  TailCurve site{grid, std::vector<double>(grid.size(), 0.0)};
  for (const auto& s : samples)
    for (auto n : s.occupations)
      for (std::size_t i = 0; i < grid.size() && static_cast<double>(n) > grid[i] * C; ++i) site.values[i] += 1.0;
  for (auto& v : site.values) v /= static_cast<double>(samples.size() * static_cast<std::size_t>(c.L));

  const auto sb = empirical_sb_tail(samples, C, grid);
  std::optional<TailCurve> ct, csb;
  try {
    ct = cluster_tail(samples, c.A, C, grid);
    csb = cluster_sb_tail(samples, c.A, C, grid);
  } catch (const std::invalid_argument&) {
    diag << "no cluster sites observed; cluster columns left empty\n";
  }
  write_header(out, c, "u,site_tail,sb_tail,cluster_tail,cluster_sb_tail");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << grid[i] << "," << site.values[i] << "," << sb.values[i] << ",";
    if (ct) out << ct->values[i];
    out << ",";
    if (csb) out << csb->values[i];
    out << "\n";
  }
  return 0;
}

inline int run_gc_curve(const ExperimentConfig& c, std::ostream& out, std::ostream& diag) {
  ExperimentConfig cc = c;
  if (!cc.N && !cc.rho) cc.N = cc.L;  // only used when theta scales with N
  const ModelSpec spec = cc.model();
  write_header(out, c, "curve,x,finite_L,limit,canonical");
  for (std::int64_t i = 0; i < c.points; ++i) {
    const double phi = c.phi_max * static_cast<double>(i) / static_cast<double>(c.points - 1);
    out << "density," << phi << "," << R_L(spec, phi) << "," << R_inf(spec, phi) << ",\n";
  }
  const double rc = rho_c(spec);
  std::optional<LogPartitionTable> table;
  const auto n_max = static_cast<std::int64_t>(std::ceil(c.rho_max * static_cast<double>(c.L)));
  try {
    table.emplace(spec, c.L, n_max, TableLayout::Rolling, c.mem_budget_bytes());
  } catch (const ResourceLimit& e) {
    diag << "warning: " << e.what() << "; canonical current omitted\n";
  }
  for (std::int64_t i = 1; i < c.points; ++i) {
    const double rho = c.rho_max * static_cast<double>(i) / static_cast<double>(c.points - 1);
    const double phi_L = solve_fugacity(spec, rho).phi;
    double phi_inf = 1.0;
    if (rho < rc) {
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (R_inf(spec, mid) < rho ? lo : hi) = mid;
      }
      phi_inf = 0.5 * (lo + hi);
    }
    out << "current," << rho << "," << phi_L << "," << phi_inf << ",";
    const auto n = static_cast<std::int64_t>(std::llround(rho * static_cast<double>(c.L)));
    if (table && n >= 1) out << canonical_current(*table, c.L, n);
    out << "\n";
  }
  return 0;
}

}  // namespace detail

/// Reads the u column and one value column of a tail CSV ('#' lines skipped).
inline TailCurve read_tail_csv(std::istream& in, const std::string& column) {
  std::string line;
  std::vector<std::string> header;
  TailCurve curve;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  std::size_t col = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      auto it = std::find(header.begin(), header.end(), column);
      if (it == header.end()) throw ConfigError("column", "no column named " + column);
      if (header.front() != "u") throw ConfigError("input", "first column must be u");
      col = static_cast<std::size_t>(it - header.begin());
      continue;
    }
    const auto f = split(line);
    if (f.size() <= col || f[col].empty()) continue;
    curve.grid.push_back(std::stod(f[0]));
    curve.values.push_back(std::stod(f[col]));
  }
  if (curve.grid.empty()) throw ConfigError("input", "no data rows for column " + column);
  return curve;
}

/// Reference survival function by name: gamma21 (needs rho, rho_c), exp, simplex:L, beta11.
inline std::function<double(double)> reference_tail(const std::string& name, double rho, double rc) {
  if (name == "gamma21") {
    if (!(rho > rc)) throw ConfigError("reference", "gamma21 needs a supercritical --rho");
    return [rho, rc](double u) { return 1.0 - gamma21_mixture_cdf(u, rho, rc); };
  }
  if (name == "exp") return exponential_cluster_tail;
  if (name == "beta11") return beta11_tail;
  if (name.rfind("simplex:", 0) == 0) {
    const long L = std::stol(name.substr(8));
    if (L < 2) throw ConfigError("reference", "simplex needs L >= 2");
    return [L](double u) { return 1.0 - simplex_marginal_cdf(u, L); };
  }
  throw ConfigError("reference", "unknown reference " + name);
}

namespace detail {

inline int run_compare(const ExperimentConfig& c, std::ostream& out) {
  std::ifstream in(c.input);
  if (!in) throw ConfigError("input", "cannot open " + c.input);
  const auto curve = read_tail_csv(in, c.column);
  std::vector<double> rates = c.bulk_rates.empty() ? std::vector<double>(c.A - 1, 1.0) : c.bulk_rates;
  const ModelSpec bulk(c.A, rates, 1.0, c.variant);
  const auto ref = reference_tail(c.reference, c.rho.value_or(0.0), rho_c(bulk));
  const double d = ks_distance(curve, ref);
  const bool pass = d <= c.threshold;
  out << "ks_distance=" << d << " threshold=" << c.threshold << " " << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? 0 : static_cast<int>(ExitCode::CheckFailure);
}

inline int run_recipe(const ExperimentConfig& c, std::ostream& diag);

}  // namespace detail

/**
 * Runs one configured experiment. CSV goes to `out` (the caller opens
 * c.output), progress and warnings to `diag`. Returns the process exit code.
 */
inline int run_experiment(const ExperimentConfig& c, std::ostream& out, std::ostream& diag) {
  if (c.mode == "exact") return detail::run_exact(c, out);
  if (c.mode == "sample") return detail::run_samples(c, out, diag);
  if (c.mode == "simulate") return detail::run_simulate(c, out, diag);
  if (c.mode == "tails") return detail::run_tails(c, out, diag);
  if (c.mode == "gc-curve") return detail::run_gc_curve(c, out, diag);
  if (c.mode == "compare") return detail::run_compare(c, out);
  if (c.mode == "recipe") return detail::run_recipe(c, diag);
  throw ConfigError("mode", "unknown mode " + c.mode);
}

/// Opens c.output ("-" is stdout) and runs; maps library errors onto exit codes.
inline int run_to_file(const ExperimentConfig& c, std::ostream& stdout_stream, std::ostream& diag) {
  try {
    if (c.output == "-" || c.mode == "compare" || c.mode == "recipe") return run_experiment(c, stdout_stream, diag);
    std::ofstream f(c.output);
    if (!f) throw ConfigError("out", "cannot open " + c.output);
    return run_experiment(c, f, diag);
  } catch (const ConfigError& e) {
    diag << "usage error: " << e.what() << "\n";
    return static_cast<int>(ExitCode::Usage);
  } catch (const ResourceLimit& e) {
    diag << "resource limit: " << e.what() << "\n";
    return static_cast<int>(ExitCode::ResourceLimit);
  }
}

namespace detail {

/// Figure reproductions at the parameters of the published captions.
inline int run_recipe(const ExperimentConfig& c, std::ostream& diag) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  std::vector<ExperimentConfig> jobs;
  auto base = [&](const std::string& mode, const std::string& file) {
    ExperimentConfig j;
    j.mode = mode;
    j.seed = c.seed;
    j.mem_budget_mb = c.mem_budget_mb;
    j.output = (fs::path(c.out_dir) / file).string();
    return j;
  };
  if (c.recipe == "fig1") {
    for (std::int64_t L : {64, 256, 1024}) {
      auto j = base("gc-curve", "fig1_L" + std::to_string(L) + ".csv");
      j.A = 2;
      j.L = L;
      j.scaling = {1.0, 1.0, ScalingBase::VolumeL};
      j.rho_max = 2.0;
      j.phi_max = 0.999;
      jobs.push_back(j);
    }
  } else if (c.recipe == "fig2") {
    for (double rho : {1.0, 3.0, 4.0})
      for (double Th : {0.1, 1.0, 10.0}) {
        std::ostringstream name;
        name << "fig2_rho" << rho << "_Theta" << Th << ".csv";
        auto j = base("sample", name.str());
        j.A = 5;
        j.L = 1024;
        j.rho = rho;
        j.scaling = {Th, 1.0, ScalingBase::VolumeL};
        j.samples = 1;
        jobs.push_back(j);
      }
  } else if (c.recipe == "fig3") {
    for (double Th : {0.1, 1.0, 10.0}) {
      std::ostringstream name;
      name << "fig3_A2_Theta" << Th << ".csv";
      auto j = base("tails", name.str());
      j.A = 2;
      j.L = 8192;
      j.rho = 1.0;
      j.scaling = {Th, 1.0, ScalingBase::VolumeL};
      j.samples = 10;
      jobs.push_back(j);
    }
  } else if (c.recipe == "fig4") {
    for (std::int64_t L : {2, 4, 8}) {
      auto j = base("tails", "fig4_L" + std::to_string(L) + ".csv");
      j.A = 2;
      j.L = L;
      j.N = 8192;
      j.scaling = {1.0, 0.5, ScalingBase::ParticlesN};
      j.scale = TailScale::Particles;
      j.u_min = 0.0;
      j.u_max = 1.0;
      j.u_step = 0.01;
      j.samples = 100;
      jobs.push_back(j);
    }
  } else if (c.recipe == "fig5") {
    auto cur = base("exact", "fig5_current.csv");
    cur.A = 2;
    cur.L = 2048;
    cur.rho = 3.0;
    cur.variant = AboveVariant::PdRatio;
    jobs.push_back(cur);
    auto t = base("tails", "fig5_tails.csv");
    t.A = 2;
    t.L = 2048;
    t.rho = 1.0;
    t.variant = AboveVariant::PdRatio;
    t.scale = TailScale::Mass;
    t.u_min = 0.01;
    t.u_max = 1.0;
    t.u_step = 0.01;
    t.samples = 100;
    jobs.push_back(t);
  } else {
    throw ConfigError("recipe", "unknown recipe " + c.recipe);
  }
  int status = 0;
  for (const auto& j : jobs) {
    validate(j);
    diag << "writing " << j.output << "\n";
    std::ofstream f(j.output);
    if (!f) throw ConfigError("out-dir", "cannot write " + j.output);
    status = std::max(status, run_experiment(j, f, diag));
  }
  return status;
}

}  // namespace detail

}  // namespace zrp
