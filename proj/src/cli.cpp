#include "qhist/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace qhist {

static std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

template <class T>
static T parse_one(const std::string& value, const std::string& key) {
  std::istringstream is(value);
  T out;
  is >> out;
  std::string rest;
  if (!is || (is >> rest, !rest.empty()))
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

static std::vector<double> parse_doubles(const std::string& value,
                                         const std::string& key) {
  std::istringstream is(value);
  std::vector<double> out;
  double x;
  while (is >> x) out.push_back(x);
  std::string rest;
  if (is >> rest, !rest.empty())
    throw ConfigError("bad value for " + key + ": '" + value + "'");
  return out;
}

static Vec3 parse_vec3(const std::string& value, const std::string& key) {
  std::vector<double> xs = parse_doubles(value, key);
  if (xs.size() != 3) throw ConfigError(key + " needs three components");
  return Vec3(xs[0], xs[1], xs[2]);
}

static bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "1" || value == "true" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "no") return false;
  throw ConfigError("bad value for " + key + ": '" + value + "'");
}

static void set_key(ExperimentConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (key == "model.n") {
    cfg.n = parse_one<int>(value, key);
    if (cfg.n < 1) throw ConfigError("model.n must be positive");
  } else if (key == "model.v") {
    cfg.v = parse_vec3(value, key);
  } else if (key == "model.seed") {
    cfg.model_seed = parse_one<std::uint64_t>(value, key);
  } else if (key.rfind("model.u", 0) == 0 && key.size() > 7) {
    int idx = parse_one<int>(key.substr(7), key);
    if (idx < 1 || idx > 64) throw ConfigError("direction index out of range: " + key);
    if (static_cast<int>(cfg.u.size()) < idx) cfg.u.resize(idx);
    cfg.u[idx - 1] = parse_vec3(value, key);
  } else if (key == "tolerances.consistency") {
    cfg.tol.consistency = parse_one<double>(value, key);
  } else if (key == "tolerances.genericity") {
    cfg.tol.genericity = parse_one<double>(value, key);
  } else if (key == "tolerances.degeneracy") {
    cfg.tol.degeneracy = parse_one<double>(value, key);
  } else if (key == "tolerances.weight") {
    cfg.tol.weight = parse_one<double>(value, key);
  } else if (key == "tolerances.p_min") {
    cfg.tol.p_min = parse_one<double>(value, key);
  } else if (key == "tolerances.tie") {
    cfg.tol.tie = parse_one<double>(value, key);
  } else if (key == "tolerances.axis") {
    cfg.tol.axis = parse_one<double>(value, key);
  } else if (key == "run.samples") {
    cfg.run.samples = parse_one<long long>(value, key);
  } else if (key == "run.seed") {
    cfg.run.seed = parse_one<std::uint64_t>(value, key);
  } else if (key == "run.grid") {
    cfg.run.grid = parse_one<int>(value, key);
  } else if (key == "run.omega_grid") {
    cfg.run.omega_grid = parse_one<int>(value, key);
  } else if (key == "run.threads") {
    cfg.run.threads = parse_one<int>(value, key);
  } else if (key == "run.max_times") {
    cfg.run.max_times = parse_one<int>(value, key);
  } else if (key == "run.use_brute") {
    cfg.run.use_brute = parse_bool(value, key);
  } else if (key == "run.criterion") {
    if (value != "medium" && value != "weak")
      throw ConfigError("run.criterion must be medium or weak");
    cfg.run.criterion = value;
  } else if (key == "run.format") {
    if (value != "csv" && value != "jsonl")
      throw ConfigError("run.format must be csv or jsonl");
    cfg.run.format = value;
  } else if (key == "run.output") {
    cfg.run.output = value;
  } else if (key == "run.times") {
    cfg.run.times = parse_doubles(value, key);
  } else if (key == "run.t") {
    cfg.run.t = parse_one<double>(value, key);
  } else if (key == "run.s") {
    cfg.run.s = parse_one<double>(value, key);
  } else {
    throw ConfigError("unknown config key: " + key);
  }
}

void parse_config_text(ExperimentConfig& cfg, std::istream& in,
                       const std::string& origin) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    try {
      set_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  ExperimentConfig cfg;
  parse_config_text(cfg, in, path);
  return cfg;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override needs key=value: " + assignment);
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

int ExperimentConfig::model_n() const {
  if (n > 0) return n;
  if (!u.empty()) return static_cast<int>(u.size());
  throw ConfigError("model.n is not set");
}

SpinModelConfig ExperimentConfig::build_model() const {
  int nn = model_n();
  if (!u.empty() && static_cast<int>(u.size()) != nn)
    throw ConfigError("model.n disagrees with the number of directions");
  bool complete = v.has_value() && static_cast<int>(u.size()) == nn;
  for (const auto& d : u) complete = complete && d.has_value();
  if (complete) {
    SpinModelConfig m;
    m.v = *v;
    for (const auto& d : u) m.u.push_back(*d);
    m.validate();
    return m;
  }
  if (model_seed) {
    SplitMix64 rng(*model_seed);
    return random_generic_config(nn, rng, tol.genericity);
  }
  throw ConfigError("model needs v and u1..un, or model.seed to draw one");
}

static std::string json_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

namespace {
class RowWriter {
 public:
  RowWriter(std::ostream& os, bool jsonl, std::vector<std::string> cols,
            std::vector<bool> numeric,
            const std::vector<std::pair<std::string, std::string>>& meta)
      : os_(os), jsonl_(jsonl), cols_(std::move(cols)), numeric_(std::move(numeric)) {
    if (jsonl_) {
      os_ << "{\"config\":{";
      for (size_t i = 0; i < meta.size(); ++i) {
        if (i) os_ << ",";
        os_ << '"' << json_escape(meta[i].first) << "\":\""
            << json_escape(meta[i].second) << '"';
      }
      os_ << "}}\n";
    } else {
      for (const auto& [k, v] : meta) os_ << "# " << k << " = " << v << "\n";
      for (size_t i = 0; i < cols_.size(); ++i)
        os_ << (i ? "," : "") << cols_[i];
      os_ << "\n";
    }
  }

  void row(const std::vector<std::string>& vals) {
    if (jsonl_) {
      os_ << "{";
      for (size_t i = 0; i < vals.size(); ++i) {
        if (i) os_ << ",";
        os_ << '"' << cols_[i] << "\":";
        if (numeric_[i])
          os_ << vals[i];
        else
          os_ << '"' << json_escape(vals[i]) << '"';
      }
      os_ << "}\n";
    } else {
      for (size_t i = 0; i < vals.size(); ++i) os_ << (i ? "," : "") << vals[i];
      os_ << "\n";
    }
  }

 private:
  std::ostream& os_;
  bool jsonl_;
  std::vector<std::string> cols_;
  std::vector<bool> numeric_;
};
}  // namespace

static std::string vec3_str(const Vec3& v) {
  return fmt17(v.x()) + " " + fmt17(v.y()) + " " + fmt17(v.z());
}

static std::string join_doubles(const std::vector<double>& xs) {
  std::string out;
  for (size_t i = 0; i < xs.size(); ++i) out += (i ? " " : "") + fmt17(xs[i]);
  return out;
}

static std::vector<std::pair<std::string, std::string>> base_meta(
    const ExperimentConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> m;
  m.emplace_back("model.n", std::to_string(cfg.model_n()));
  if (cfg.v) m.emplace_back("model.v", vec3_str(*cfg.v));
  for (size_t i = 0; i < cfg.u.size(); ++i)
    if (cfg.u[i])
      m.emplace_back("model.u" + std::to_string(i + 1), vec3_str(*cfg.u[i]));
  if (cfg.model_seed) m.emplace_back("model.seed", std::to_string(*cfg.model_seed));
  m.emplace_back("tolerances.consistency", fmt17(cfg.tol.consistency));
  m.emplace_back("tolerances.genericity", fmt17(cfg.tol.genericity));
  m.emplace_back("tolerances.degeneracy", fmt17(cfg.tol.degeneracy));
  m.emplace_back("tolerances.weight", fmt17(cfg.tol.weight));
  m.emplace_back("tolerances.p_min", fmt17(cfg.tol.p_min));
  m.emplace_back("tolerances.tie", fmt17(cfg.tol.tie));
  m.emplace_back("tolerances.axis", fmt17(cfg.tol.axis));
  return m;
}

static std::vector<double> required_times(const ExperimentConfig& cfg) {
  if (!cfg.run.times.empty()) return cfg.run.times;
  if (cfg.run.t) return {*cfg.run.t};
  throw ConfigError("run.times (or run.t) is required");
}

int run_schmidt(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  std::vector<double> times = required_times(cfg);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.times", join_doubles(times));
  RowWriter w(out, cfg.run.format == "jsonl",
              {"t", "N", "wx", "wy", "wz", "weight_plus", "weight_minus"},
              {true, true, true, true, true, true, true}, meta);
  for (double t : times) {
    SchmidtAxis ax = schmidt_axis(model, t, cfg.tol.axis);
    w.row({fmt17(t), fmt17(ax.N), fmt17(ax.w.x()), fmt17(ax.w.y()), fmt17(ax.w.z()),
           fmt17(0.5 * (1 + ax.N)), fmt17(0.5 * (1 - ax.N))});
  }
  return 0;
}

int run_evolve(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  std::vector<double> times = required_times(cfg);
  if (times.size() != 1) throw ConfigError("evolve takes exactly one time");
  StateVector psi = evolve(model, times[0]);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.t", fmt17(times[0]));
  meta.emplace_back("dim", std::to_string(model.dim()));
  RowWriter w(out, cfg.run.format == "jsonl", {"index", "re", "im"},
              {true, true, true}, meta);
  for (Eigen::Index i = 0; i < psi.amp.size(); ++i)
    w.row({std::to_string(i), fmt17(psi.amp(i).real()), fmt17(psi.amp(i).imag())});
  return 0;
}

static std::string sign_label(size_t leaf, int m) {
  std::string s;
  for (int i = 0; i < m; ++i)
    s += ((leaf >> (m - 1 - i)) & 1) ? '-' : '+';
  return s;
}

int run_dmatrix(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  std::vector<double> times = required_times(cfg);
  std::vector<TimedDecomposition> decs;
  for (double t : times)
    decs.push_back(schmidt_timed_decomposition(model, t, cfg.tol.degeneracy,
                                               cfg.tol.weight));
  HistorySet set = HistorySet::chain(std::move(decs));
  DecoherenceMatrix d =
      decoherence_matrix(set, initial_state(model), heisenberg_source(model));
  Criterion crit = cfg.run.criterion == "weak" ? Criterion::weak : Criterion::medium;
  ConsistencyReport rep = consistency_check(d, crit, cfg.tol.consistency);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.times", join_doubles(times));
  meta.emplace_back("run.criterion", cfg.run.criterion);
  meta.emplace_back("consistent", rep.consistent ? "1" : "0");
  meta.emplace_back("max_offdiag", fmt17(rep.max_offdiag));
  RowWriter w(out, cfg.run.format == "jsonl", {"row_alpha", "col_alpha", "re", "im"},
              {false, false, true, true}, meta);
  const int m = static_cast<int>(times.size());
  for (Eigen::Index a = 0; a < d.entries.rows(); ++a)
    for (Eigen::Index b = 0; b < d.entries.cols(); ++b)
      w.row({sign_label(a, m), sign_label(b, m), fmt17(d.entries(a, b).real()),
             fmt17(d.entries(a, b).imag())});
  return 0;
}

int run_classify(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  std::vector<PairRecord> recs =
      classify_pairs(model, cfg.run.grid, cfg.tol.consistency, cfg.run.use_brute);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.grid", std::to_string(cfg.run.grid));
  meta.emplace_back("run.use_brute", cfg.run.use_brute ? "1" : "0");
  RowWriter w(out, cfg.run.format == "jsonl",
              {"t", "s", "case_tag", "offdiag_abs", "consistent"},
              {true, true, false, true, true}, meta);
  for (const auto& r : recs)
    w.row({fmt17(r.t), fmt17(r.s), pair_case_name(r.tag), fmt17(r.offdiag_abs),
           r.consistent ? "1" : "0"});
  return 0;
}

int run_select(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  SelectionResult sel = max_info_select(model, SelectRoute::maximize, cfg.tol.tie);
  auto meta = base_meta(cfg);
  meta.emplace_back("chosen_k", std::to_string(sel.chosen_k));
  meta.emplace_back("optimal_t", fmt17(sel.optimal_t));
  meta.emplace_back("information", fmt17(sel.information));
  std::string ties;
  for (size_t i = 0; i < sel.ties.size(); ++i)
    ties += (i ? " " : "") + std::to_string(sel.ties[i]);
  meta.emplace_back("ties", ties);
  RowWriter w(out, cfg.run.format == "jsonl", {"k", "E_k", "t_star", "chosen"},
              {true, true, true, true}, meta);
  for (int k = 1; k <= model.n(); ++k)
    w.row({std::to_string(k), fmt17(sel.E_values[k - 1]), fmt17(sel.t_values[k - 1]),
           k == sel.chosen_k ? "1" : "0"});
  return 0;
}

int run_montecarlo(const ExperimentConfig& cfg, std::ostream& out) {
  int n = cfg.model_n();
  MonteCarloReport rep = montecarlo_stats(n, cfg.run.samples, cfg.run.seed,
                                          cfg.run.threads, cfg.tol.genericity);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.samples", std::to_string(rep.samples));
  meta.emplace_back("run.seed", std::to_string(rep.seed));
  meta.emplace_back("run.threads", std::to_string(rep.threads));
  meta.emplace_back("fraction_Sn", fmt17(rep.fraction_Sn));
  meta.emplace_back("stderr_Sn", fmt17(rep.stderr_Sn));
  meta.emplace_back("rejected", std::to_string(rep.rejected));
  RowWriter w(out, cfg.run.format == "jsonl", {"k", "count", "fraction"},
              {true, true, true}, meta);
  for (int k = 1; k <= n; ++k)
    w.row({std::to_string(k), std::to_string(rep.counts[k - 1]),
           fmt17(rep.fraction_by_k[k - 1])});
  return 0;
}

int run_compare_il(const ExperimentConfig& cfg, std::ostream& out) {
  SpinModelConfig model = cfg.build_model();
  ILResult il = min_il_select(model, cfg.run.max_times, cfg.run.omega_grid);
  auto meta = base_meta(cfg);
  meta.emplace_back("run.omega_grid", std::to_string(cfg.run.omega_grid));
  meta.emplace_back("minimizer_m", std::to_string(il.minimizer.m));
  meta.emplace_back("minimizer_S_prime", fmt17(il.minimizer.s_prime));
  meta.emplace_back("minimizer_omega", fmt17(il.minimizer.omega));
  meta.emplace_back("S_prime_second", fmt17(il.s_second));
  RowWriter w(out, cfg.run.format == "jsonl", {"m", "S_prime", "times"},
              {true, true, false}, meta);
  for (const auto& cand : il.best_by_m) {
    if (cand.m == 0) continue;
    w.row({std::to_string(cand.m), fmt17(cand.s_prime), join_doubles(cand.times)});
  }
  return 0;
}

// reduced-scale cross-checks between independent routes; every failure throws
int run_verify(const ExperimentConfig& cfg, std::ostream& out) {
  const std::uint64_t seed = cfg.run.seed;
  auto ok = [&](const std::string& name) { out << "ok: " << name << "\n"; };

  SpinModelConfig frozen;
  frozen.v = Vec3(0.6, 0.48, 0.64);
  frozen.u = {Vec3(0.8, 0.36, 0.48), Vec3(0.28, 0.96, 0.0), Vec3(0.6, 0.0, -0.8)};
  frozen.validate();

  for (double t : {0.45, 1.7, 2.37}) {
    StateVector psi = evolve(frozen, t);  // self-tests both evolution routes
    if (std::abs(psi.norm() - 1.0) > 1e-12)
      throw VerifyError("evolved state norm drifted at t = " + fmt17(t));
  }
  ok("structured evolution matches the product-sum route");

  for (double t : {0.3, 1.7, 2.9}) {
    StateVector psi = evolve(frozen, t);
    SchmidtDecomposition sd = schmidt_decompose(psi);
    SchmidtAxis ax = schmidt_axis(frozen, t, cfg.tol.axis);
    if (std::abs(sd.weights(0) - 0.5 * (1 + ax.N)) > 1e-12)
      throw VerifyError("schmidt weight disagrees with the axis norm");
    Eigen::Vector2cd b = sd.system_basis[0];
    if ((qubit_projector(ax.w) * b - b).norm() > 1e-10)
      throw VerifyError("schmidt basis disagrees with the axis direction");
  }
  ok("schmidt axis matches the dense decomposition");

  for (int rep = 0; rep < 3; ++rep) {
    SplitMix64 rng(mix64(seed, 100 + rep));
    SpinModelConfig m = random_generic_config(3, rng, cfg.tol.genericity);
    auto unif = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    int k = m.n();
    HistorySpec spec;
    for (int j = 1; j < k; ++j) spec.between.push_back(j);
    spec.interior = (k - 1) + 0.1 + 0.8 * unif();
    spec.final_k = k;
    std::vector<double> probs = analytic_probabilities(m, spec);
    CMat d = brute_decoherence(m, spec.times());
    for (size_t a = 0; a < probs.size(); ++a)
      if (std::abs(probs[a] - d(a, a).real()) > 1e-10)
        throw VerifyError("analytic probability disagrees with brute force");
    for (Eigen::Index a = 0; a < d.rows(); ++a)
      for (Eigen::Index b = 0; b < d.cols(); ++b)
        if (a != b && std::abs(d(a, b)) > 1e-10)
          throw VerifyError("allowed set is not consistent by brute force");
    double t = 0.2 + 0.6 * unif(), s = t + 0.2 + (m.n() - t - 0.2) * unif();
    CMat dp = brute_decoherence(m, {t, s});
    for (int at : {1, -1})
      for (int as : {1, -1}) {
        Eigen::Index row = (at < 0 ? 2 : 0) + (as < 0 ? 1 : 0);
        Eigen::Index col = (at < 0 ? 0 : 2) + (as < 0 ? 1 : 0);
        cxd brute = dp(row, col);
        if (std::abs(offdiag_general(m, t, s, at, as) - brute) > 1e-10 ||
            std::abs(analytic_offdiag_pair(m, t, s, at, as) - brute) > 1e-10)
          throw VerifyError("off-diagonal closed forms disagree with brute force");
      }
  }
  ok("analytic probabilities and off-diagonals match brute force");

  SpinModelConfig frozen2;
  frozen2.v = frozen.v;
  frozen2.u = {frozen.u[0], frozen.u[1]};
  classify_pairs(frozen2, 6, cfg.tol.consistency);  // asserts both inclusions
  ok("grid classification matches the allowed forms");

  for (int rep = 0; rep < 5; ++rep) {
    SplitMix64 rng(mix64(seed, 200 + rep));
    SpinModelConfig m = random_generic_config(4, rng, cfg.tol.genericity);
    for (int k = 1; k <= m.n(); ++k) optimal_interior_time(m, k);  // self-asserting
  }
  ok("interior optimum matches the closed form");

  min_il_select(frozen2, -1, 17);  // asserts the minimizer structure
  ok("information-entropy minimum has the expected structure");

  {
    std::vector<double> times;
    for (int j = 1; j < frozen.n(); ++j) times.push_back(j);
    HistorySpec spec;
    spec.between = {1, 2};
    spec.interior = 2.37;
    spec.final_k = 3;
    CMat d = brute_decoherence(frozen, spec.times());
    Eigen::VectorXd diag = d.diagonal().real();
    Eigen::SelfAdjointEigenSolver<CMat> es(d);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    if (std::abs(shannon_information(diag) - shannon_information(ev)) > 1e-10)
      throw VerifyError("consistent-set information misses the eigenvalue information");
    ok("consistent-set information equals the eigenvalue information");
    std::vector<StateVector> branches =
        forward_path_states(frozen, times, frozen.n());
    if (!env_orthogonality_check(branches, 1e-10))
      throw VerifyError("between-time branch environments overlap");
    ok("between-time branch environments are orthogonal");
  }

  {
    MonteCarloReport r1 = montecarlo_stats(3, 4000, seed, 1, cfg.tol.genericity);
    MonteCarloReport r2 = montecarlo_stats(3, 4000, seed, 3, cfg.tol.genericity);
    if (r1.counts != r2.counts)
      throw VerifyError("montecarlo counts depend on the thread count");
    ok("montecarlo counts reproduce across thread counts");
  }

  out << "verify: all checks passed\n";
  return 0;
}

}  // namespace qhist
