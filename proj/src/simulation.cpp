#include "hetvar/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hetvar/format.hpp"
#include "hetvar/special_functions.hpp"

namespace hetvar {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string policy_name(AdjustmentPolicy p) {
  return p == AdjustmentPolicy::OnlyIfZero ? "only" : "always";
}
}  // namespace

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.k < 3) throw std::invalid_argument("scenario: k must be >= 3");
  if (static_cast<int>(cfg.sizes.size()) != cfg.k) {
    throw std::invalid_argument("scenario: sizes must list exactly k study totals");
  }
  if (!(cfg.p_c > 0.0 && cfg.p_c < 1.0)) {
    throw std::invalid_argument("scenario: p_c must be in (0,1)");
  }
  if (!(cfg.tau2 >= 0.0)) throw std::invalid_argument("scenario: tau2 must be >= 0");
  if (cfg.reps < 1) throw std::invalid_argument("scenario: reps must be >= 1");
  for (int n : cfg.sizes) {
    const double arm = n * cfg.f;
    if (n < 2 || arm != std::floor(arm) || arm < 1.0) {
      throw std::invalid_argument("scenario: size " + std::to_string(n) +
                                  " with f = " + format_double(cfg.f) +
                                  " gives a non-integer or empty arm");
    }
  }
}

std::string scenario_key(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "k=" << cfg.k << "|sizes=" << cfg.sizes_label << "|p_c=" << format_double(cfg.p_c)
     << "|theta=" << format_double(cfg.theta) << "|tau2=" << format_double(cfg.tau2);
  return os.str();
}

std::optional<std::vector<Study2x2>> generate_replicate(const ScenarioConfig& cfg, Rng& rng) {
  const double tau = std::sqrt(cfg.tau2);
  const double alpha = logit(cfg.p_c);
  std::vector<Study2x2> tables;
  tables.reserve(cfg.k);
  for (int i = 0; i < cfg.k; ++i) {
    const int n_c = static_cast<int>(cfg.sizes[i] * cfg.f);
    const int n_t = cfg.sizes[i] - n_c;
    const double theta_i = cfg.theta + tau * rng.normal();
    const double p_t = expit(alpha + theta_i);
    Study2x2 s;
    s.x_c = rng.binomial(n_c, cfg.p_c);
    s.x_t = rng.binomial(n_t, p_t);
    s.n_c = n_c;
    s.n_t = n_t;
    if (is_double_zero(s) || is_double_n(s)) continue;
    tables.push_back(s);
  }
  if (static_cast<int>(tables.size()) < 3) return std::nullopt;
  return tables;
}

const std::vector<std::string>& point_estimator_ids() {
  static const std::vector<std::string> ids = {"dl",  "reml",      "mp",        "ssc",
                                               "ssu-model", "ssu-naive", "smc",
                                               "smu-model", "smu-naive", "kd"};
  return ids;
}

const std::vector<std::string>& interval_estimator_ids() {
  static const std::vector<std::string> ids = {"fpc", "fpu-model", "fpu-naive", "qp", "pl", "kd"};
  return ids;
}

bool is_point_estimator_id(const std::string& id) {
  const auto& ids = point_estimator_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool is_interval_estimator_id(const std::string& id) {
  const auto& ids = interval_estimator_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

TauPointResult run_point_estimator(const std::string& id, const MetaSample& sample) {
  if (id == "dl") return dl(sample);
  if (id == "reml") return reml(sample);
  if (id == "mp") return mp(sample);
  if (id == "ssc") return ssc(sample);
  if (id == "smc") return smc(sample);
  if (id == "ssu-model") return ssu(sample, resolve_model_mode(sample));
  if (id == "ssu-naive") return ssu(sample, PitEstimationMode::naive());
  if (id == "smu-model") return smu(sample, resolve_model_mode(sample));
  if (id == "smu-naive") return smu(sample, PitEstimationMode::naive());
  if (id == "kd") return kd(sample);
  throw std::invalid_argument("unknown point estimator: " + id);
}

TauInterval run_interval_estimator(const std::string& id, const MetaSample& sample, double level) {
  if (id == "fpc") return fpc(sample, level);
  if (id == "fpu-model") return fpu(sample, resolve_model_mode(sample), level);
  if (id == "fpu-naive") return fpu(sample, PitEstimationMode::naive(), level);
  if (id == "qp") return qp(sample, level);
  if (id == "pl") return pl(sample, level);
  if (id == "kd") return kd_interval(sample, level);
  throw std::invalid_argument("unknown interval estimator: " + id);
}

void validate_methods(const MethodSet& methods) {
  if (methods.estimators.empty() && methods.intervals.empty()) {
    throw std::invalid_argument("methods: at least one estimator or interval is required");
  }
  if (methods.policies.empty()) {
    throw std::invalid_argument("methods: at least one adjustment policy is required");
  }
  if (!(methods.level > 0.0 && methods.level < 1.0)) {
    throw std::invalid_argument("methods: level must be in (0,1)");
  }
  for (const auto& id : methods.estimators) {
    if (!is_point_estimator_id(id)) throw std::invalid_argument("unknown estimator: " + id);
    if (id == "kd" && !kd_estimator_registered()) {
      throw std::invalid_argument("estimator 'kd' requested but no implementation is registered");
    }
  }
  for (const auto& id : methods.intervals) {
    if (!is_interval_estimator_id(id)) throw std::invalid_argument("unknown interval: " + id);
    if (id == "kd" && !kd_interval_registered()) {
      throw std::invalid_argument("interval 'kd' requested but no implementation is registered");
    }
  }
}

int worker_count() {
  unsigned n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("HETVAR_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && cap < static_cast<long>(n)) n = static_cast<unsigned>(cap);
  }
  return static_cast<int>(n);
}

namespace {

struct PointJob {
  std::string id;
  AdjustmentPolicy policy;
};
struct IntervalJob {
  std::string id;
  AdjustmentPolicy policy;
};

struct PointOutcome {
  double tau2 = kNaN;
  bool error = false;
};
struct IntervalOutcome {
  double lower = kNaN;
  double upper = kNaN;
  bool capped = false;
  bool error = false;
};

struct ReplicateOutcome {
  bool discarded = true;
  std::vector<PointOutcome> points;
  std::vector<IntervalOutcome> intervals;
};

std::pair<std::vector<PointJob>, std::vector<IntervalJob>> build_jobs(const MethodSet& methods) {
  std::vector<PointJob> points;
  std::vector<IntervalJob> intervals;
  for (const auto& id : methods.estimators) {
    for (auto policy : methods.policies) points.push_back({id, policy});
  }
  std::set<std::string> fpu_done;
  for (const auto& id : methods.intervals) {
    if (id.rfind("fpu", 0) == 0) {
      // fpu is pinned to Always-adjusted counts
      if (fpu_done.insert(id).second) intervals.push_back({id, AdjustmentPolicy::Always});
      continue;
    }
    for (auto policy : methods.policies) intervals.push_back({id, policy});
  }
  return {points, intervals};
}

ReplicateOutcome run_replicate(const ScenarioConfig& cfg, std::uint64_t rep_seed,
                               const std::vector<PointJob>& point_jobs,
                               const std::vector<IntervalJob>& interval_jobs, double level) {
  ReplicateOutcome out;
  Rng rng(rep_seed);
  const auto tables = generate_replicate(cfg, rng);
  if (!tables) return out;
  out.discarded = false;
  out.points.resize(point_jobs.size());
  out.intervals.resize(interval_jobs.size());

  std::map<AdjustmentPolicy, MetaSample> samples;
  const auto sample_for = [&](AdjustmentPolicy p) -> const MetaSample& {
    auto it = samples.find(p);
    if (it == samples.end()) it = samples.emplace(p, make_meta_sample(*tables, p)).first;
    return it->second;
  };

  for (std::size_t j = 0; j < point_jobs.size(); ++j) {
    try {
      out.points[j].tau2 = run_point_estimator(point_jobs[j].id, sample_for(point_jobs[j].policy)).tau2_hat;
    } catch (const std::exception&) {
      out.points[j].error = true;
    }
  }
  for (std::size_t j = 0; j < interval_jobs.size(); ++j) {
    try {
      const TauInterval ci =
          run_interval_estimator(interval_jobs[j].id, sample_for(interval_jobs[j].policy), level);
      out.intervals[j] = {ci.lower, ci.upper, ci.upper_capped, false};
    } catch (const std::exception&) {
      out.intervals[j].error = true;
    }
  }
  return out;
}

}  // namespace

std::vector<MetricsRow> run_scenario(const ScenarioConfig& cfg, const MethodSet& methods) {
  validate_scenario(cfg);
  validate_methods(methods);
  const auto [point_jobs, interval_jobs] = build_jobs(methods);

  const std::uint64_t cell_hash = fnv1a64(scenario_key(cfg));
  std::vector<ReplicateOutcome> outcomes(cfg.reps);

  const int workers = std::min(worker_count(), cfg.reps);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int rep = w; rep < cfg.reps; rep += workers) {
        outcomes[rep] = run_replicate(cfg, derive_seed(cfg.seed, cell_hash, rep), point_jobs,
                                      interval_jobs, methods.level);
      }
    });
  }
  for (auto& t : pool) t.join();

  long effective = 0;
  for (const auto& o : outcomes) {
    if (!o.discarded) ++effective;
  }

  std::vector<MetricsRow> rows;
  rows.reserve(point_jobs.size() + interval_jobs.size());
  const auto base_row = [&](const std::string& method, AdjustmentPolicy policy) {
    MetricsRow row;
    row.k = cfg.k;
    row.sizes_label = cfg.sizes_label;
    row.p_c = cfg.p_c;
    row.theta = cfg.theta;
    row.tau2 = cfg.tau2;
    row.method = method;
    row.policy = policy_name(policy);
    row.bias = row.median_bias = row.coverage = row.miss_left = row.miss_right = kNaN;
    row.effective_reps = effective;
    return row;
  };

  for (std::size_t j = 0; j < point_jobs.size(); ++j) {
    MetricsRow row = base_row(point_jobs[j].id, point_jobs[j].policy);
    double sum = 0.0;
    long n = 0, ge = 0, le = 0, errors = 0;
    for (const auto& o : outcomes) {
      if (o.discarded) continue;
      if (o.points[j].error) {
        ++errors;
        continue;
      }
      const double t = o.points[j].tau2;
      sum += t;
      if (t >= cfg.tau2) ++ge;
      if (t <= cfg.tau2) ++le;
      ++n;
    }
    if (n > 0) {
      row.bias = sum / n - cfg.tau2;
      row.median_bias = static_cast<double>(ge - le) / n;
    }
    row.errors = errors;
    rows.push_back(std::move(row));
  }

  for (std::size_t j = 0; j < interval_jobs.size(); ++j) {
    MetricsRow row = base_row(interval_jobs[j].id, interval_jobs[j].policy);
    long n = 0, covered = 0, left = 0, right = 0, errors = 0;
    for (const auto& o : outcomes) {
      if (o.discarded) continue;
      if (o.intervals[j].error) {
        ++errors;
        continue;
      }
      const auto& ci = o.intervals[j];
      ++n;
      if (cfg.tau2 < ci.lower) {
        ++left;
      } else if (!ci.capped && cfg.tau2 > ci.upper) {
        ++right;
      } else {
        ++covered;
      }
    }
    if (n > 0) {
      row.coverage = static_cast<double>(covered) / n;
      row.miss_left = static_cast<double>(left) / n;
      row.miss_right = static_cast<double>(right) / n;
    }
    row.errors = errors;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<int> unequal_size_set(int nbar, int k) {
  static const std::map<int, std::vector<int>> base = {
      {30, {12, 16, 18, 20, 84}},
      {60, {24, 32, 36, 40, 168}},
      {100, {64, 72, 76, 80, 208}},
      {160, {124, 132, 136, 140, 268}},
  };
  const auto it = base.find(nbar);
  if (it == base.end()) {
    throw std::invalid_argument("nbar: unknown unequal-size set " + std::to_string(nbar) +
                                " (available: 30, 60, 100, 160)");
  }
  if (k % 5 != 0) {
    throw std::invalid_argument("k: unequal sizes require k to be a multiple of 5");
  }
  std::vector<int> sizes;
  sizes.reserve(k);
  for (int rep = 0; rep < k / 5; ++rep) {
    sizes.insert(sizes.end(), it->second.begin(), it->second.end());
  }
  return sizes;
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

GridConfig parse_grid_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!split_ws(line).empty()) {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": expected 'key = values'");
      }
      continue;
    }
    const auto key_toks = split_ws(line.substr(0, eq));
    if (key_toks.size() != 1) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": bad key");
    }
    kv[key_toks[0]] = line.substr(eq + 1);
  }

  static const std::set<std::string> known = {"k",    "n",    "nbar",       "p_c",
                                              "theta", "tau2", "reps",      "seed",
                                              "estimators", "intervals", "policies", "level"};
  for (const auto& [key, _] : kv) {
    if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);
  }
  const auto require = [&](const std::string& key) -> std::string {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing config key: " + key);
    return it->second;
  };
  const auto ints = [](const std::string& v) {
    std::vector<int> out;
    for (const auto& tok : split_ws(v)) out.push_back(std::stoi(tok));
    return out;
  };
  const auto doubles = [](const std::string& v) {
    std::vector<double> out;
    for (const auto& tok : split_ws(v)) out.push_back(parse_double(tok));
    return out;
  };

  GridConfig grid;
  grid.k_values = ints(require("k"));
  if (kv.count("n")) grid.equal_sizes = ints(kv["n"]);
  if (kv.count("nbar")) grid.unequal_nbar = ints(kv["nbar"]);
  if (grid.equal_sizes.empty() && grid.unequal_nbar.empty()) {
    throw std::invalid_argument("missing config key: n (or nbar)");
  }
  grid.p_c_values = doubles(require("p_c"));
  grid.theta_values = doubles(require("theta"));
  grid.tau2_values = doubles(require("tau2"));
  grid.reps = std::stoi(require("reps"));
  grid.seed = std::stoull(require("seed"));
  if (kv.count("estimators")) grid.methods.estimators = split_ws(kv["estimators"]);
  if (kv.count("intervals")) grid.methods.intervals = split_ws(kv["intervals"]);
  if (kv.count("policies")) {
    grid.methods.policies.clear();
    for (const auto& tok : split_ws(kv["policies"])) {
      if (tok == "only") {
        grid.methods.policies.push_back(AdjustmentPolicy::OnlyIfZero);
      } else if (tok == "always") {
        grid.methods.policies.push_back(AdjustmentPolicy::Always);
      } else {
        throw std::invalid_argument("policies: expected 'only' or 'always', got '" + tok + "'");
      }
    }
  }
  if (kv.count("level")) grid.methods.level = parse_double(kv["level"]);

  validate_methods(grid.methods);
  return grid;
}

GridConfig load_grid_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return parse_grid_config(in);
}

std::vector<ScenarioConfig> expand_grid(const GridConfig& grid) {
  std::vector<ScenarioConfig> cells;
  const auto push = [&](int k, std::vector<int> sizes, std::string label, double p_c,
                        double theta, double tau2) {
    ScenarioConfig cfg;
    cfg.k = k;
    cfg.sizes = std::move(sizes);
    cfg.sizes_label = std::move(label);
    cfg.p_c = p_c;
    cfg.theta = theta;
    cfg.tau2 = tau2;
    cfg.reps = grid.reps;
    cfg.seed = grid.seed;
    validate_scenario(cfg);
    cells.push_back(std::move(cfg));
  };
  for (int k : grid.k_values) {
    for (double p_c : grid.p_c_values) {
      for (double theta : grid.theta_values) {
        for (double tau2 : grid.tau2_values) {
          for (int n : grid.equal_sizes) {
            push(k, std::vector<int>(k, n), "n" + std::to_string(n), p_c, theta, tau2);
          }
          for (int nbar : grid.unequal_nbar) {
            push(k, unequal_size_set(nbar, k), "nbar" + std::to_string(nbar), p_c, theta, tau2);
          }
        }
      }
    }
  }
  return cells;
}

const char kMetricsCsvHeader[] =
    "k,sizes_label,p_c,theta,tau2,method,policy,bias,median_bias,coverage,miss_left,miss_right,"
    "effective_reps";

namespace {
std::string metric_field(double v) { return std::isnan(v) ? "" : format_double(v); }
}  // namespace

std::string metrics_row_csv(const MetricsRow& row) {
  std::ostringstream os;
  os << row.k << ',' << row.sizes_label << ',' << format_double(row.p_c) << ','
     << format_double(row.theta) << ',' << format_double(row.tau2) << ',' << row.method << ','
     << row.policy << ',' << metric_field(row.bias) << ',' << metric_field(row.median_bias) << ','
     << metric_field(row.coverage) << ',' << metric_field(row.miss_left) << ','
     << metric_field(row.miss_right) << ',' << row.effective_reps;
  return os.str();
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty metrics file: " + path);
  if (line != kMetricsCsvHeader) {
    throw std::runtime_error("metrics file has an unexpected header: " + path);
  }
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.push_back("");
    if (fields.size() != 13) {
      throw std::runtime_error("metrics line " + std::to_string(lineno) + ": expected 13 fields");
    }
    MetricsRow row;
    row.k = std::stoi(fields[0]);
    row.sizes_label = fields[1];
    row.p_c = parse_double(fields[2]);
    row.theta = parse_double(fields[3]);
    row.tau2 = parse_double(fields[4]);
    row.method = fields[5];
    row.policy = fields[6];
    const auto metric = [&](const std::string& f) { return f.empty() ? kNaN : parse_double(f); };
    row.bias = metric(fields[7]);
    row.median_bias = metric(fields[8]);
    row.coverage = metric(fields[9]);
    row.miss_left = metric(fields[10]);
    row.miss_right = metric(fields[11]);
    row.effective_reps = std::stol(fields[12]);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string row_cell_key(const MetricsRow& row) {
  return "k=" + std::to_string(row.k) + "|sizes=" + row.sizes_label +
         "|p_c=" + format_double(row.p_c) + "|theta=" + format_double(row.theta) +
         "|tau2=" + format_double(row.tau2);
}

std::set<std::string> expected_method_keys(const MethodSet& methods) {
  const auto [points, intervals] = build_jobs(methods);
  std::set<std::string> keys;
  for (const auto& j : points) keys.insert(j.id + "|" + policy_name(j.policy));
  for (const auto& j : intervals) keys.insert(j.id + "|" + policy_name(j.policy));
  return keys;
}

}  // namespace

void full_grid(const GridConfig& grid, const std::string& out_path, std::ostream* progress) {
  validate_methods(grid.methods);
  const std::vector<ScenarioConfig> cells = expand_grid(grid);
  const std::set<std::string> expected = expected_method_keys(grid.methods);

  // load complete cells from an earlier run; drop partial ones
  std::vector<MetricsRow> kept;
  std::set<std::string> done;
  {
    std::ifstream probe(out_path);
    if (probe.good()) {
      std::map<std::string, std::vector<MetricsRow>> by_cell;
      for (auto& row : read_metrics_csv(out_path)) {
        by_cell[row_cell_key(row)].push_back(std::move(row));
      }
      for (auto& [key, rows] : by_cell) {
        std::set<std::string> have;
        for (const auto& row : rows) have.insert(row.method + "|" + row.policy);
        if (std::includes(have.begin(), have.end(), expected.begin(), expected.end())) {
          done.insert(key);
          for (auto& row : rows) kept.push_back(std::move(row));
        }
      }
    }
  }

  std::ofstream out(out_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write metrics file: " + out_path);
  out << kMetricsCsvHeader << '\n';
  for (const auto& row : kept) out << metrics_row_csv(row) << '\n';
  out.flush();

  int index = 0;
  for (const auto& cfg : cells) {
    ++index;
    const std::string key = scenario_key(cfg);
    if (done.count(key)) {
      if (progress) {
        *progress << "[" << index << "/" << cells.size() << "] " << key << " (cached)\n";
      }
      continue;
    }
    if (progress) *progress << "[" << index << "/" << cells.size() << "] " << key << std::flush;
    const auto rows = run_scenario(cfg, grid.methods);
    for (const auto& row : rows) out << metrics_row_csv(row) << '\n';
    out.flush();
    if (progress) {
      *progress << "  effective_reps=" << (rows.empty() ? 0 : rows.front().effective_reps);
      for (const auto& row : rows) {
        if (row.errors > 0) {
          *progress << "  errors[" << row.method << "-" << row.policy << "]=" << row.errors;
        }
      }
      *progress << '\n';
    }
  }
}

}  // namespace hetvar
