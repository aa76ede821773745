#include "dre/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <set>

#include "dre/acceptance.hpp"
#include "dre/csv.hpp"
#include "dre/diffusion.hpp"
#include "dre/environment.hpp"
#include "dre/extrema.hpp"
#include "dre/levy.hpp"
#include "dre/parallel.hpp"
#include "dre/renewal.hpp"
#include "dre/stats.hpp"

namespace dre {

namespace fs = std::filesystem;
using nlohmann::json;

ConfigError::ConfigError(std::string field, const std::string& what)
    : std::invalid_argument("config field '" + field + "': " + what), field_(std::move(field)) {}

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::env: return "env";
    case ExperimentKind::extrema: return "extrema";
    case ExperimentKind::diffuse: return "diffuse";
    case ExperimentKind::renewal: return "renewal";
    case ExperimentKind::levy: return "levy";
    case ExperimentKind::verify: return "verify";
  }
  return "unknown";
}

ExperimentKind kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::env, ExperimentKind::extrema, ExperimentKind::diffuse, ExperimentKind::renewal,
                 ExperimentKind::levy, ExperimentKind::verify}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("kind", "unknown kind '" + s + "' (env, extrema, diffuse, renewal, levy, verify)");
}

double ExperimentConfig::resolved_h_t() const {
  if (h_t) return *h_t;
  if (t) return std::log(*t) - std::pow(std::log(*t), beta);
  throw ConfigError("t", "one of t and h_t is required for kind " + to_string(kind));
}

double ExperimentConfig::resolved_delta() const { return delta < 0.0 ? default_delta(kappa) : delta; }

namespace {

void require_positive(double v, const char* field) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(field, "must be a positive number");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("kappa", "must lie in (0, 1)");
  if (t && h_t) throw ConfigError("t", "give only one of t and h_t");
  if (t) {
    if (!(*t > 1.0)) throw ConfigError("t", "must be > 1");
    if (!(resolved_h_t() > 1.0)) throw ConfigError("t", "derived h_t = log t - (log t)^beta must exceed 1");
  }
  if (h_t) require_positive(*h_t, "h_t");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta", "must lie in (0, 1)");
  if (delta >= 0.0 && !(delta > 0.0 && kappa * (1.0 + 3.0 * delta) < 1.0)) {
    throw ConfigError("delta", "must satisfy delta > 0 and kappa (1 + 3 delta) < 1 (negative selects the default)");
  }
  require_positive(dt, "dt");
  require_positive(dt_b, "dt_b");
  require_positive(dx, "dx");
  require_positive(bin_width, "bin_width");
  require_positive(L_cut, "L_cut");
  require_positive(stop_depth, "stop_depth");
  require_positive(eps_budget, "eps_budget");
  if (eps == 0.0 || !std::isfinite(eps)) throw ConfigError("eps", "must be positive (or negative for the budgeted cutoff)");
  if (replicas == 0) throw ConfigError("replicas", "must be >= 1");
  if (pool_size == 0) throw ConfigError("pool_size", "must be >= 1");
  require_positive(scale, "scale");
  for (int c : criteria) {
    if (c < 1 || c > kCriterionCount) throw ConfigError("criteria", "entries must lie in 1..10");
  }
  switch (kind) {
    case ExperimentKind::diffuse: {
      if (!t) throw ConfigError("t", "kind diffuse needs t");
      const double ratio = bin_width / dx;
      if (std::fabs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
        throw ConfigError("bin_width", "must be a whole multiple of dx");
      }
      if (!(dt < bin_width * bin_width)) throw ConfigError("dt", "must be smaller than bin_width^2");
      break;
    }
    case ExperimentKind::extrema:
    case ExperimentKind::renewal:
      resolved_h_t();
      break;
    default:
      break;
  }
}

namespace {

const std::set<std::string> kKnownKeys{"kind", "kappa", "t", "h_t", "delta", "beta", "dt", "dt_b", "dx",
                                       "bin_width", "eps", "eps_budget", "L_cut", "pool_size", "strict_marks",
                                       "stop_depth", "replicas", "base_seed", "output_dir", "criteria", "scale"};

template <class T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("wrong type: ") + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& doc) {
  const json& j = doc.contains("config") && doc.contains("schema_version") ? doc.at("config") : doc;
  if (!j.is_object()) throw ConfigError("(root)", "config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKnownKeys.count(key)) throw ConfigError(key, "unknown field");
  }
  if (!j.contains("kind")) throw ConfigError("kind", "missing");
  ExperimentConfig c;
  std::string kind;
  read_field(j, "kind", kind);
  c.kind = kind_from_string(kind);
  read_field(j, "kappa", c.kappa);
  if (j.contains("t") && !j.at("t").is_null()) {
    double t = 0.0;
    read_field(j, "t", t);
    c.t = t;
  }
  if (j.contains("h_t") && !j.at("h_t").is_null()) {
    double h = 0.0;
    read_field(j, "h_t", h);
    c.h_t = h;
  }
  read_field(j, "delta", c.delta);
  read_field(j, "beta", c.beta);
  read_field(j, "dt", c.dt);
  read_field(j, "dt_b", c.dt_b);
  read_field(j, "dx", c.dx);
  read_field(j, "bin_width", c.bin_width);
  read_field(j, "eps", c.eps);
  read_field(j, "eps_budget", c.eps_budget);
  read_field(j, "L_cut", c.L_cut);
  read_field(j, "pool_size", c.pool_size);
  read_field(j, "strict_marks", c.strict_marks);
  read_field(j, "stop_depth", c.stop_depth);
  read_field(j, "replicas", c.replicas);
  read_field(j, "base_seed", c.base_seed);
  read_field(j, "output_dir", c.output_dir);
  read_field(j, "criteria", c.criteria);
  read_field(j, "scale", c.scale);
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["kind"] = to_string(c.kind);
  j["kappa"] = c.kappa;
  j["t"] = c.t ? json(*c.t) : json(nullptr);
  j["h_t"] = c.h_t ? json(*c.h_t) : json(nullptr);
  j["delta"] = c.delta;
  j["beta"] = c.beta;
  j["dt"] = c.dt;
  j["dt_b"] = c.dt_b;
  j["dx"] = c.dx;
  j["bin_width"] = c.bin_width;
  j["eps"] = c.eps;
  j["eps_budget"] = c.eps_budget;
  j["L_cut"] = c.L_cut;
  j["pool_size"] = c.pool_size;
  j["strict_marks"] = c.strict_marks;
  j["stop_depth"] = c.stop_depth;
  j["replicas"] = c.replicas;
  j["base_seed"] = c.base_seed;
  j["output_dir"] = c.output_dir;
  j["criteria"] = c.criteria;
  j["scale"] = c.scale;
  return j;
}

ExperimentConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("(file)", "cannot open " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("(file)", std::string("invalid JSON: ") + e.what());
  }
  return config_from_json(j);
}

namespace {

struct Outputs {
  fs::path dir;
  std::vector<fs::path> files;

  std::ofstream open(const std::string& name) {
    const fs::path p = dir / name;
    files.push_back(p);
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    return os;
  }
};

BesselSimConfig bessel_config(const ExperimentConfig& c) {
  BesselSimConfig b;
  b.dt_b = c.dt_b;
  b.L_cut = c.L_cut;
  return b;
}

void run_env(const ExperimentConfig& c, Outputs& out, json& m) {
  ExtentPolicy policy;
  policy.stop_depth = c.stop_depth;
  struct Row {
    double a = 0.0, tail = 0.0, left = 0.0, right = 0.0;
    std::size_t points = 0;
  };
  std::vector<Row> rows(c.replicas);
  const RngStream base{c.base_seed, 0};
  parallel_for(c.replicas, [&](std::size_t i) {
    const PotentialPath p = sample_potential(c.kappa, c.dx, policy, base.child(i));
    const AInfinity a = a_infinity(p, c.stop_depth);
    rows[i] = {a.value, a.tail_weight, p.left_extent(), p.right_extent(), p.size()};
  });
  auto os = out.open("env.csv");
  CsvWriter w(os, {"replica", "a_infinity", "two_over_a_infinity", "tail_weight", "left_extent", "right_extent",
                   "points"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    w << static_cast<std::uint64_t>(i) << r.a << 2.0 / r.a << r.tail << r.left << r.right
      << static_cast<std::uint64_t>(r.points);
    w.end_row();
  }
  m["seeds"]["streams"] = "replica i: environment from (base_seed, 0).child(i)";
  m["bias_bounds"]["a_infinity_relative_tail"] = std::exp(-c.stop_depth);
}

void run_extrema(const ExperimentConfig& c, Outputs& out, json& m) {
  const double h_t = c.resolved_h_t();
  const double delta = c.resolved_delta();
  ExtentPolicy policy;
  policy.stop_depth = c.stop_depth;
  std::vector<std::vector<ValleyRecord>> valleys(c.replicas);
  std::vector<std::string> checks(c.replicas);
  const RngStream base{c.base_seed, 0};
  parallel_for(c.replicas, [&](std::size_t i) {
    const PotentialPath p = sample_potential(c.kappa, c.dx, policy, base.child(i));
    valleys[i] = build_valleys_all(p, h_t, delta);
    checks[i] = check_valley_invariants(p, valleys[i], h_t, delta);
  });
  auto os = out.open("extrema.csv");
  CsvWriter w(os, {"replica", "index", "l_sharp", "bottom", "tau", "l_plus", "top", "l_star", "l_exit", "l_minus",
                   "bottom_value", "top_value", "invariants"});
  std::size_t violations = 0;
  for (std::size_t i = 0; i < valleys.size(); ++i) {
    if (!checks[i].empty()) ++violations;
    for (const auto& v : valleys[i]) {
      w << static_cast<std::uint64_t>(i) << static_cast<std::uint64_t>(v.index) << v.l_sharp << v.bottom << v.tau
        << v.l_plus << v.top << v.l_star << v.l_exit << v.l_minus << v.bottom_value << v.top_value
        << std::string_view(checks[i].empty() ? "ok" : checks[i]);
      w.end_row();
    }
  }
  m["seeds"]["streams"] = "replica i: environment from (base_seed, 0).child(i)";
  m["summary"]["h_t"] = h_t;
  m["summary"]["delta"] = delta;
  m["summary"]["environments_with_violations"] = violations;
  m["bias_bounds"]["grid_tolerance"] = grid_tolerance(c.dx);
}

void run_diffuse(const ExperimentConfig& c, Outputs& out, json& m) {
  ReplicaSetup setup;
  setup.kappa = c.kappa;
  setup.grid_step = c.dx;
  setup.cfg.t_max = *c.t;
  setup.cfg.dt = c.dt;
  setup.cfg.phi_exponent = c.beta;
  setup.cfg.bin_width = c.bin_width;
  setup.delta = c.resolved_delta();
  setup.policy.stop_depth = c.stop_depth;
  std::vector<ReplicaResult> res(c.replicas);
  const RngStream base{c.base_seed, 0};
  parallel_for(c.replicas, [&](std::size_t i) { res[i] = run_replica(setup, base.child(i)); });
  std::vector<DiffusionSummary> rows;
  std::size_t ext = 0;
  for (const auto& r : res) {
    rows.push_back(r.summary);
    ext += r.extensions;
  }
  auto os = out.open("diffuse.csv");
  write_diffusion_csv(rows, os);
  m["seeds"]["streams"] =
      "replica i: (base_seed, 0).child(i); environment from its child(0), Brownian increments from its child(1)";
  m["summary"]["h_t"] = setup.cfg.h_t();
  m["summary"]["phi"] = setup.cfg.phi();
  m["summary"]["right_extensions"] = ext;
  m["bias_bounds"]["grid_tolerance"] = grid_tolerance(c.dx);
}

void run_renewal(const ExperimentConfig& c, Outputs& out, json& m) {
  const double h_t = c.resolved_h_t();
  const auto draws = sample_renewal_batch(c.kappa, h_t, c.replicas, bessel_config(c), RngStream{c.base_seed, 0});
  auto os = out.open("renewal.csv");
  write_draws_csv(draws, os);
  m["seeds"]["streams"] = "draw i: (base_seed, 0).child(i); constituents F+, G+, F-, F-, e from its child(0..4)";
  m["summary"]["h_t"] = h_t;
  m["bias_bounds"]["r_kappa_truncation"] = r_kappa_truncation_bound(c.kappa, c.L_cut);
}

void run_levy(const ExperimentConfig& c, Outputs& out, json& m) {
  const RngStream base{c.base_seed, 0};
  auto pool = std::make_shared<const std::vector<double>>(
      sample_r_kappa_batch(c.kappa, c.pool_size, bessel_config(c), base.child(0)));
  const MarkSource marks(pool, c.strict_marks ? MarkSource::Mode::strict : MarkSource::Mode::bootstrap);
  const double mean_rho = marks.mean_pow(1.0);
  const double mean_rho_k = marks.mean_pow(c.kappa);
  const double eps = c.eps > 0.0 ? c.eps : cutoff_for_budget(c.kappa, mean_rho, mean_rho_k, c.eps_budget);
  const LevyParams params{c.kappa, 0.0, eps};
  const LimitLawTable table = limit_law_samples(c.replicas, params, marks, base.child(1));
  auto os = out.open("levy.csv");
  write_reports_csv(table, os);
  const double c2 = params.c2_or_default();
  const double drift = mean_rho * missed_mass_rate(c.kappa, c2, eps);
  m["seeds"]["streams"] = "R_kappa pool from (base_seed, 0).child(0), sample j from its child(j); draw i from "
                          "(base_seed, 0).child(1).child(i)";
  m["summary"]["eps"] = eps;
  m["summary"]["c2"] = c2;
  m["summary"]["mean_rho"] = mean_rho;
  m["summary"]["mean_rho_kappa"] = mean_rho_k;
  m["summary"]["p_i1_below_i2"] = table.p_i1_below_i2;
  m["summary"]["tie_events"] = table.tie_events;
  m["summary"]["total_jumps"] = table.total_jumps;
  m["bias_bounds"]["missed_y1_mass_rate"] = missed_mass_rate(c.kappa, c2, eps);
  m["bias_bounds"]["missed_y2_drift_over_passage_scale"] =
      drift / (std::tgamma(1.0 - c.kappa) * c2 * mean_rho_k);
  m["bias_bounds"]["undershoot_resolution_mass"] =
      std::sin(std::numbers::pi * c.kappa) / (std::numbers::pi * c.kappa) * std::pow(eps * mean_rho, c.kappa);
  m["bias_bounds"]["r_kappa_truncation"] = r_kappa_truncation_bound(c.kappa, c.L_cut);
}

bool run_verify(const ExperimentConfig& c, Outputs& out, json& m) {
  std::vector<int> ids = c.criteria;
  if (ids.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
  }
  const AcceptanceOptions opts{c.base_seed, c.scale};
  json report = json::array();
  auto csv = out.open("acceptance.csv");
  CsvWriter w(csv, {"criterion", "name", "pass", "summary"});
  bool all = true;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, opts);
    all = all && r.pass;
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    report.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"summary", r.summary}, {"metrics", metrics}});
    w << r.id << std::string_view(r.name) << std::string_view(r.pass ? "pass" : "fail") << std::string_view(r.summary);
    w.end_row();
  }
  auto js = out.open("verify.json");
  js << json{{"all_pass", all}, {"criteria", report}}.dump(2) << '\n';
  m["seeds"]["streams"] = "criterion k uses streams (base_seed, 100 k + j)";
  m["summary"]["all_pass"] = all;
  return all;
}

}  // namespace

RunResult run(const ExperimentConfig& config) {
  config.validate();
  Outputs out;
  out.dir = config.output_dir;
  fs::create_directories(out.dir);
  json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["code_version"] = kCodeVersion;
  m["config"] = config_to_json(config);
  m["seeds"]["base_seed"] = config.base_seed;
  m["bias_bounds"] = json::object();
  m["summary"] = json::object();
  RunResult res;
  switch (config.kind) {
    case ExperimentKind::env: run_env(config, out, m); break;
    case ExperimentKind::extrema: run_extrema(config, out, m); break;
    case ExperimentKind::diffuse: run_diffuse(config, out, m); break;
    case ExperimentKind::renewal: run_renewal(config, out, m); break;
    case ExperimentKind::levy: run_levy(config, out, m); break;
    case ExperimentKind::verify: res.ok = run_verify(config, out, m); break;
  }
  json names = json::array();
  for (const auto& f : out.files) names.push_back(f.filename().string());
  m["outputs"] = names;
  auto os = out.open("manifest.json");
  os << m.dump(2) << '\n';
  res.files = out.files;
  return res;
}

CompareReport compare(const fs::path& file_a, const fs::path& file_b, const std::string& column_a,
                      const std::string& column_b) {
  const auto load = [](const fs::path& f, const std::string& col) {
    const CsvTable t = read_csv_file(f.string());
    std::vector<double> v;
    for (double x : t.numeric_column(col)) {
      if (!std::isnan(x)) v.push_back(x);
    }
    if (v.empty()) throw CsvError("column '" + col + "' of " + f.string() + " has no numeric values");
    return v;
  };
  CompareReport r;
  const Ecdf a(load(file_a, column_a));
  const Ecdf b(load(file_b, column_b));
  r.n_a = a.size();
  r.n_b = b.size();
  r.statistic = ks_two_sample(a.sorted(), b.sorted());
  std::merge(a.sorted().begin(), a.sorted().end(), b.sorted().begin(), b.sorted().end(), std::back_inserter(r.grid));
  r.grid.erase(std::unique(r.grid.begin(), r.grid.end()), r.grid.end());
  for (double x : r.grid) {
    r.ecdf_a.push_back(a(x));
    r.ecdf_b.push_back(b(x));
  }
  return r;
}

void write_compare_csv(const CompareReport& r, std::ostream& os) {
  CsvWriter w(os, {"x", "ecdf_a", "ecdf_b"});
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    w << r.grid[i] << r.ecdf_a[i] << r.ecdf_b[i];
    w.end_row();
  }
}

}  // namespace dre
