#include "ncbm/cli.hpp"

#include "ncbm/densities.hpp"
#include "ncbm/format.hpp"
#include "ncbm/haar_hc.hpp"
#include "ncbm/parallel.hpp"
#include "ncbm/paths.hpp"
#include "ncbm/sde.hpp"
#include "ncbm/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncbm {

namespace {

using nlohmann::json;

struct Common {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 0;
  std::string out_path;
  std::string config_path;
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double d = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
    v.push_back(d);
  }
  return v;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config_path, "Flat key = value file; flags given on the command line take precedence");
  app->add_option("--seed", c.seed, "Master seed (default: NCBM_SEED or random, always echoed)");
  app->add_option("--threads", c.threads, "Worker threads (0: machine parallelism)")->capture_default_str();
  app->add_option("--out", c.out_path, "Output path");
}

// Fills options not given on the command line from a flat key = value file.
// Keys are option names without dashes; '_' and '-' are interchangeable.
void apply_config(CLI::App* app, const std::string& path) {
  for (const auto& item : CLI::ConfigTOML().from_file(path)) {
    if (!item.parents.empty()) throw std::invalid_argument("config: sections are not supported ('" + item.fullname() + "')");
    std::string key = item.name;
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw std::invalid_argument("config: nested config files are not supported");
    CLI::Option* opt = app->get_option_no_throw("--" + key);
    if (opt == nullptr) throw std::invalid_argument("config: unknown key '" + item.name + "'");
    if (opt->count() > 0) continue;
    opt->add_result(item.inputs);
    opt->run_callback();
  }
}

void finish_common(CLI::App* app, Common& c) {
  if (!c.config_path.empty()) apply_config(app, c.config_path);
  c.seed_given = app->count("--seed") > 0;
  if (!c.seed_given) c.seed = default_seed();
  set_thread_count(c.threads);
}

void echo_config(std::ostream& os, const json& cfg) {
  const std::string dump = cfg.dump();
  std::ostringstream digest;
  digest << std::hex << fnv1a(dump);
  os << "# config " << dump << "\n# digest " << digest.str() << '\n';
}

// Opens the declared output path, or returns the fallback stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw std::runtime_error("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

std::string replicate_path(const std::string& path, std::size_t r, std::size_t reps) {
  if (reps == 1) return path;
  const std::filesystem::path p(path);
  std::string name = p.stem().string() + "_" + std::to_string(r) + p.extension().string();
  return (p.parent_path() / name).string();
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  Common common;
  std::string model = "dyson";
  std::size_t n = 2;
  double horizon = 1.0;
  std::size_t steps = 1024;
  std::size_t reps = 1;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  if (a.n == 0 || a.steps == 0 || a.reps == 0 || !(a.horizon > 0.0)) {
    err << "simulate: n, steps, reps and horizon must be positive\n";
    return 2;
  }
  if (a.reps > 1 && a.common.out_path.empty()) {
    err << "simulate: --reps > 1 requires --out\n";
    return 2;
  }
  const json cfg = {{"command", "simulate"}, {"model", a.model}, {"n", a.n},         {"horizon", a.horizon},
                    {"steps", a.steps},      {"reps", a.reps},   {"seed", a.common.seed}, {"threads", thread_count()},
                    {"out", a.common.out_path}};
  echo_config(out, cfg);

  const bool sde = a.model == "dyson" || a.model == "noncolliding";
  SDEConfig sc;
  sc.n = a.n;
  sc.horizon = a.horizon;
  sc.dt = a.horizon / static_cast<double>(a.steps);
  const TimeGrid grid = TimeGrid::uniform(a.horizon, a.steps);
  MatrixModel mm = MatrixModel::GUE;
  if (a.model == "goe") mm = MatrixModel::GOE;
  if (a.model == "xit") mm = MatrixModel::XiT;

  std::size_t failed = 0;
  std::size_t halvings = 0;
  MeanAccumulator incr;
  for (std::size_t r = 0; r < a.reps; ++r) {
    RngStream rng(a.common.seed, r);
    Sink sink(a.common.out_path.empty() ? "" : replicate_path(a.common.out_path, r, a.reps), out);
    if (sde) {
      const Trajectory tr =
          a.model == "dyson" ? simulate_dyson(sc, a.horizon, rng) : simulate_noncolliding_T(sc, a.horizon, rng);
      failed += tr.failed ? 1 : 0;
      halvings += tr.halvings;
      if (a.n == 1) {
        for (std::size_t k = 1; k < tr.states.size(); ++k) {
          const double d = tr.states[k][0] - tr.states[k - 1][0];
          incr.add(d * d / (tr.times[k] - tr.times[k - 1]));
        }
      }
      write_trajectory_csv(sink.stream(), tr);
    } else {
      write_matrix_path_csv(sink.stream(), build_matrix_process(mm, a.n, grid, a.horizon, rng));
    }
  }
  out << "# summary reps=" << a.reps << " failed=" << failed << " guard_halvings=" << halvings << '\n';
  if (sde && a.n == 1) {
    const auto e = incr.estimate();
    out << "# increment variance / dt = " << format_double(e.mean) << " (se " << format_double(e.se)
        << ", expected 1)\n";
  }
  return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// density

struct DensityArgs {
  Common common;
  std::string name;
  std::size_t n = 0;
  double t = 1.0;
  double s = 0.0;
  double horizon = 0.0;
  std::vector<std::string> x;
  std::vector<std::string> y;
  std::string method = "pfaffian";
  std::size_t mc_paths = 100000;
  std::size_t mc_steps = 256;
};

int cmd_density(const DensityArgs& a, std::ostream& out, std::ostream& err) {
  static const std::map<std::string, int> names{{"f", 0},        {"survival", 1}, {"p", 2},
                                                {"g", 3},        {"gue", 4},      {"goe", 5}};
  if (a.name.empty()) {
    err << "density: --name is required\n";
    return 2;
  }
  const auto it = names.find(a.name);
  if (it == names.end()) {
    err << "density: unknown density '" << a.name << "' (expected f, survival, p, g, gue or goe)\n";
    return 2;
  }
  const int kind = it->second;
  // f, p and g take a start point --x and evaluation points --y; survival is evaluated
  // at start points --x; gue and goe at --y, or at --x when no --y is given
  const bool two_point = kind == 0 || kind == 2 || kind == 3;
  std::vector<std::vector<double>> starts, points;
  for (const auto& s : a.x) starts.push_back(parse_point(s));
  for (const auto& s : a.y) points.push_back(parse_point(s));
  const bool at_x = kind == 1 || (!two_point && points.empty());
  if (!two_point && !starts.empty() && !points.empty()) {
    err << "density: " << a.name << " takes points from --y or --x, not both\n";
    return 2;
  }
  if (at_x) {
    points = starts;
    starts.clear();
  }
  if (points.empty()) {
    err << "density: no evaluation points given\n";
    return 2;
  }
  if (two_point && starts.size() > 1) {
    err << "density: give at most one start point --x\n";
    return 2;
  }
  if (kind == 0 && starts.empty()) {
    err << "density: f requires --x\n";
    return 2;
  }
  const std::size_t n = a.n ? a.n : points.front().size();
  for (const auto& p : points) {
    if (p.size() != n) {
      err << "density: every point needs " << n << " coordinates\n";
      return 2;
    }
  }
  if (!starts.empty() && starts.front().size() != n) {
    err << "density: start point needs " << n << " coordinates\n";
    return 2;
  }
  const double horizon = a.horizon > 0.0 ? a.horizon : a.t;

  SurvivalMethod sm = SurvivalMethod::pfaffian();
  if (a.method == "quadrature") {
    sm = SurvivalMethod::quadrature_method(1e-8);
  } else if (a.method == "mc") {
    sm = SurvivalMethod::montecarlo(a.mc_paths, a.common.seed, a.mc_steps);
  } else if (a.method != "pfaffian") {
    err << "density: unknown method '" << a.method << "'\n";
    return 2;
  }

  json cfg = {{"command", "density"}, {"name", a.name}, {"n", n},          {"t", a.t},
              {"s", a.s},             {"horizon", horizon}, {"method", a.method}, {"seed", a.common.seed},
              {"out", a.common.out_path}};
  if (!starts.empty()) cfg["x"] = starts.front();
  if (kind == 1 && sm.kind == SurvivalMethodKind::MonteCarlo) {
    cfg["mc_paths"] = a.mc_paths;
    cfg["mc_steps"] = a.mc_steps;
  }
  cfg["threads"] = thread_count();
  echo_config(out, cfg);

  Sink sink(a.common.out_path, out);
  std::ostream& os = sink.stream();
  const char* col = at_x ? "x" : "y";
  for (std::size_t i = 0; i < n; ++i) os << col << i + 1 << ',';
  os << "value";
  if (kind == 1 && sm.kind != SurvivalMethodKind::Pfaffian) os << ",error";
  os << '\n';

  for (const auto& p : points) {
    double value = 0.0;
    double error = 0.0;
    const WeylVector pt = WeylVector::ordered(p);
    switch (kind) {
      case 0:
        value = f_N(a.t, WeylVector::strict(starts.front()), pt);
        break;
      case 1: {
        const auto r = survival_N(a.t, WeylVector::strict(p), sm);
        value = r.value;
        error = sm.kind == SurvivalMethodKind::MonteCarlo ? r.se : r.quad_error;
        break;
      }
      case 2:
        value = starts.empty() ? p_N_origin(a.t, p) : p_N(a.s, WeylVector::strict(starts.front()), a.t, pt).value;
        break;
      case 3:
        value = starts.empty() ? g_N_T_origin(horizon, a.t, p)
                               : g_N_T(horizon, a.s, WeylVector::strict(starts.front()), a.t, pt).value;
        break;
      case 4:
        value = eigen_density(Ensemble::GUE, pt, a.t);
        break;
      default:
        value = eigen_density(Ensemble::GOE, pt, a.t);
        break;
    }
    for (double v : p) os << format_double(v) << ',';
    os << format_double(value);
    if (kind == 1 && sm.kind != SurvivalMethodKind::Pfaffian) os << ',' << format_double(error);
    os << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  Common common;
  std::size_t n = 2;
  double horizon = 1.0;
  std::size_t steps = 1024;
  std::size_t reps = 10000;
  std::size_t samples = 100000;
  std::vector<double> sigmas{0.5, 1.0, 2.0};
  std::vector<double> times;
  double p_threshold = 0.01;
  double k_se = 3.0;
  bool no_retry = false;
  // densities
  std::size_t max_n = 4;
  std::size_t points = 20;
  std::size_t mc_paths = 100000;
  std::size_t mc_steps = 256;
  bool no_survival = false;
};

int emit_verify(const std::string& suite, const VerifyArgs& a, const json& cfg,
                const std::function<SuiteReport(std::uint64_t)>& run, std::ostream& out, std::ostream& err) {
  const std::vector<SuiteReport> runs =
      a.no_retry ? std::vector<SuiteReport>{run(a.common.seed)} : run_with_retry(run, a.common.seed);
  const bool green = runs.back().green();
  json j;
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "verify " + suite;
  j["seed"] = a.common.seed;
  j["config"] = cfg;
  j["green"] = green;
  j["runs"] = json::array();
  for (const auto& r : runs) j["runs"].push_back(r.to_json());

  Sink sink(a.common.out_path, out);
  sink.stream() << j.dump(2) << '\n';
  std::ostream& summary = sink.to_file() ? out : err;
  for (const auto& r : runs) {
    summary << "suite " << suite << " seed " << r.seed << ": " << (r.green() ? "GREEN" : "RED") << " ("
            << r.failures() << " of " << r.checks.size() << " checks failed, " << r.allowed_failures
            << " KS failures allowed)\n";
  }
  if (!green) err << "suite " << suite << " red; failing statistic: " << runs.back().first_failure() << '\n';
  return green ? 0 : 1;
}

int cmd_verify(const std::string& suite, const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  const StatThresholds th{a.p_threshold, a.k_se};
  SDEConfig sc;
  sc.n = a.n;
  sc.horizon = a.horizon;
  sc.dt = a.horizon / static_cast<double>(a.steps);
  json cfg = {{"suite", suite},           {"n", a.n},          {"seed", a.common.seed}, {"threads", thread_count()},
              {"p_threshold", a.p_threshold}, {"k_se", a.k_se}, {"retry", !a.no_retry}};

  if (suite == "hc") {
    HCSuiteOptions o;
    o.n = a.n;
    o.sigmas = a.sigmas;
    o.samples = a.samples;
    cfg["sigmas"] = a.sigmas;
    cfg["samples"] = a.samples;
    echo_config(err, cfg);
    return emit_verify(suite, a, cfg, [&](std::uint64_t s) { return hc_suite(o, s, th); }, out, err);
  }
  if (suite == "imhof") {
    cfg["horizon"] = a.horizon;
    cfg["steps"] = a.steps;
    cfg["reps"] = a.reps;
    echo_config(err, cfg);
    return emit_verify(suite, a, cfg, [&](std::uint64_t s) { return imhof_suite(sc, a.reps, s, th); }, out, err);
  }
  if (suite == "theorem22") {
    std::vector<double> times = a.times;
    if (times.empty()) times = {0.25 * a.horizon, 0.5 * a.horizon, 0.75 * a.horizon, a.horizon};
    cfg["horizon"] = a.horizon;
    cfg["steps"] = a.steps;
    cfg["reps"] = a.reps;
    cfg["times"] = times;
    echo_config(err, cfg);
    return emit_verify(suite, a, cfg, [&](std::uint64_t s) { return theorem22_suite(sc, times, a.reps, s, th); },
                       out, err);
  }
  if (suite == "dyson") {
    cfg["horizon"] = a.horizon;
    cfg["steps"] = a.steps;
    cfg["reps"] = a.reps;
    echo_config(err, cfg);
    return emit_verify(suite, a, cfg,
                       [&](std::uint64_t s) {
                         return dyson_suite(sc, {0.5 * a.horizon, a.horizon}, a.horizon, a.reps, s, th);
                       },
                       out, err);
  }
  if (suite == "densities") {
    DensitySuiteOptions o;
    o.max_n = a.max_n;
    o.points_per_n = a.points;
    o.mc_paths = a.mc_paths;
    o.mc_steps = a.mc_steps;
    o.survival = !a.no_survival;
    cfg["max_n"] = a.max_n;
    cfg["points"] = a.points;
    cfg["mc_paths"] = a.mc_paths;
    cfg["mc_steps"] = a.mc_steps;
    cfg["survival"] = o.survival;
    echo_config(err, cfg);
    return emit_verify(suite, a, cfg, [&](std::uint64_t s) { return densities_suite(o, s, th); }, out, err);
  }
  err << "verify: unknown suite '" << suite << "'\n";
  return 2;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noncolliding Brownian motions and finite-horizon matrix processes", "ncbm"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample paths to CSV (header time,x1..xN or matrix columns)");
  add_common(simulate, sim.common);
  simulate->add_option("--model", sim.model, "Process model")
      ->check(CLI::IsMember({"dyson", "noncolliding", "gue", "goe", "xit"}))
      ->capture_default_str();
  simulate->add_option("--n", sim.n, "Number of particles / matrix size")->capture_default_str();
  simulate->add_option("--horizon", sim.horizon, "Horizon T")->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Time steps on [0, T]")->capture_default_str();
  simulate->add_option("--reps", sim.reps, "Replicates (one file each)")->capture_default_str();

  DensityArgs den;
  auto* density = app.add_subcommand("density", "Evaluate a named density; CSV point...,value");
  add_common(density, den.common);
  density->add_option("--name", den.name, "f | survival | p | g | gue | goe (required)");
  density->add_option("--n", den.n, "Dimension (default: inferred from the points)");
  density->add_option("--t", den.t, "Time t")->capture_default_str();
  density->add_option("--s", den.s, "Start time s for p and g")->capture_default_str();
  density->add_option("--horizon", den.horizon, "Horizon T for g (default: t)");
  density->add_option("--x", den.x, "Start point x as comma list (f, p, g: one; survival, gue, goe: repeatable)");
  density->add_option("--y", den.y, "Evaluation point y as comma list; repeatable (f, p, g, gue, goe)");
  density->add_option("--method", den.method, "Survival method: pfaffian | quadrature | mc")->capture_default_str();
  density->add_option("--mc-paths", den.mc_paths, "Monte Carlo paths")->capture_default_str();
  density->add_option("--mc-steps", den.mc_steps, "Monte Carlo steps per path")->capture_default_str();

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Run a verification suite; exit 0 iff green");
  verify->require_subcommand(1);
  std::string suite;
  const std::vector<std::pair<const char*, const char*>> suites{
      {"hc", "Harish-Chandra identity: Haar Monte Carlo vs determinant closed form"},
      {"imhof", "Finite-horizon law vs Dyson law reweighted by 1/h_N(Y(T))"},
      {"theorem22", "Eigenvalues of the finite-horizon matrix process vs the SDE (KS)"},
      {"densities", "Pointwise density identities, normalizations and survival cross-checks"},
      {"dyson", "Dyson SDE: mean squared gaps and GUE marginal (KS)"}};
  for (const auto& [name, help] : suites) {
    auto* sub = verify->add_subcommand(name, help);
    add_common(sub, ver.common);
    sub->add_option("--p-threshold", ver.p_threshold, "Per-test KS threshold")->capture_default_str();
    sub->add_option("--k-se", ver.k_se, "Standard-error window")->capture_default_str();
    sub->add_flag("--no-retry", ver.no_retry, "Do not re-run with seed + 1 on failure");
    const std::string sname = name;
    if (sname == "densities") {
      sub->add_option("--max-n", ver.max_n, "Largest N for pointwise identities")->capture_default_str();
      sub->add_option("--points", ver.points, "Random points per N")->capture_default_str();
      sub->add_option("--mc-paths", ver.mc_paths, "Monte Carlo paths per survival point")->capture_default_str();
      sub->add_option("--mc-steps", ver.mc_steps, "Monte Carlo steps per path")->capture_default_str();
      sub->add_flag("--no-survival", ver.no_survival, "Skip survival-probability cross-checks");
    } else {
      sub->add_option("--n", ver.n, "Number of particles / matrix size")->capture_default_str();
    }
    if (sname == "hc") {
      sub->add_option("--samples", ver.samples, "Haar samples per query")->capture_default_str();
      sub->add_option("--sigmas", ver.sigmas, "Comma list of sigma values")->delimiter(',')->capture_default_str();
    }
    if (sname == "imhof" || sname == "theorem22" || sname == "dyson") {
      sub->add_option("--horizon", ver.horizon, "Horizon T")->capture_default_str();
      sub->add_option("--steps", ver.steps, "Time steps on [0, T]")->capture_default_str();
      sub->add_option("--reps", ver.reps, "Replicates")->capture_default_str();
    }
    if (sname == "theorem22") {
      sub->add_option("--times", ver.times, "Comma list of times (default T/4,T/2,3T/4,T)")->delimiter(',');
    }
    sub->callback([&suite, sname] { suite = sname; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      finish_common(simulate, sim.common);
      return cmd_simulate(sim, out, err);
    }
    if (density->parsed()) {
      finish_common(density, den.common);
      return cmd_density(den, out, err);
    }
    CLI::App* sub = verify->get_subcommand(suite);
    finish_common(sub, ver.common);
    if (ver.n == 0 || ver.steps == 0 || ver.reps == 0 || ver.samples == 0 || !(ver.horizon > 0.0)) {
      err << "verify: numeric options must be positive\n";
      return 2;
    }
    return cmd_verify(suite, ver, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace ncbm
