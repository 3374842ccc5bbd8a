#include "qhist/selection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

namespace qhist {

namespace {
constexpr double kLn2 = 0.6931471805599453;
}

double f_info(double x) {
  double a = std::clamp(x, -1.0, 1.0);
  double p = 0.5 * (1.0 + a), q = 0.5 * (1.0 - a);
  double e = 0.0;
  if (p > 0.0) e -= p * std::log(p);
  if (q > 0.0) e -= q * std::log(q);
  return e;
}

static double between_prefix(const SpinModelConfig& cfg, int k) {
  double s = 0.0;
  for (int j = 1; j < k; ++j) s += f_info(cfg.c(j));
  return s;
}

static double interior_information(const SpinModelConfig& cfg, int k, double omega) {
  double nk = axis_norm_N(cfg, k, omega);
  return f_info(nk) + f_info(std::abs(cfg.c(k)) / nk);
}

double set_information(const SpinModelConfig& cfg, int k, double t) {
  if (k < 1 || k > cfg.n()) throw ConfigError("interaction index out of range");
  return between_prefix(cfg, k) + interior_information(cfg, k, theta_k(k, t));
}

double closed_form_Ek(const SpinModelConfig& cfg, int k) {
  if (k < 1 || k > cfg.n()) throw ConfigError("interaction index out of range");
  return 2.0 * f_info(std::sqrt(std::abs(cfg.c(k)))) + between_prefix(cfg, k);
}

InteriorOptimum optimal_interior_time(const SpinModelConfig& cfg, int k) {
  if (k < 1 || k > cfg.n()) throw ConfigError("interaction index out of range");
  auto g = [&](double om) { return interior_information(cfg, k, om); };
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = kPi / 2;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double g1 = g(x1), g2 = g(x2);
  while (b - a > 1e-12) {
    if (g1 < g2) {
      a = x1;
      x1 = x2;
      g1 = g2;
      x2 = a + r * (b - a);
      g2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      g2 = g1;
      x1 = b - r * (b - a);
      g1 = g(x1);
    }
  }
  InteriorOptimum opt;
  opt.omega_star = 0.5 * (a + b);
  opt.t_star = (k - 1) + opt.omega_star / (kPi / 2);
  opt.E_k = between_prefix(cfg, k) + g(opt.omega_star);
  double closed = closed_form_Ek(cfg, k);
  if (std::abs(opt.E_k - closed) > 1e-9)
    throw VerifyError("interior optimum E = " + fmt17(opt.E_k) +
                      " misses the closed form " + fmt17(closed));
  double n2 = axis_norm_N(cfg, k, opt.omega_star);
  n2 *= n2;
  if (std::abs(n2 - std::abs(cfg.c(k))) > 1e-6)
    throw VerifyError("N^2 at the optimum is " + fmt17(n2) + ", expected " +
                      fmt17(std::abs(cfg.c(k))));
  return opt;
}

SelectionResult max_info_select(const SpinModelConfig& cfg, SelectRoute route,
                                double tie_tol) {
  const int n = cfg.n();
  if (n < 1) throw ConfigError("empty model");
  SelectionResult res;
  res.E_values.resize(n);
  res.t_values.resize(n);
  for (int k = 1; k <= n; ++k) {
    if (route == SelectRoute::maximize) {
      InteriorOptimum opt = optimal_interior_time(cfg, k);
      res.E_values[k - 1] = opt.E_k;
      res.t_values[k - 1] = opt.t_star;
    } else {
      res.E_values[k - 1] = closed_form_Ek(cfg, k);
      double c = std::abs(cfg.c(k));
      double omega = std::acos(std::sqrt(c / (1.0 + c)));
      res.t_values[k - 1] = (k - 1) + omega / (kPi / 2);
    }
  }
  double best = *std::max_element(res.E_values.begin(), res.E_values.end());
  for (int k = 1; k <= n; ++k)
    if (best - res.E_values[k - 1] <= tie_tol) res.ties.push_back(k);
  res.chosen_k = res.ties.front();
  res.optimal_t = res.t_values[res.chosen_k - 1];
  res.information = res.E_values[res.chosen_k - 1];
  return res;
}

static int resolve_threads(int threads) {
  if (threads > 0) return threads;
  if (const char* env = std::getenv("QHIST_THREADS")) {
    int t = std::atoi(env);
    if (t > 0) return t;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

MonteCarloReport montecarlo_stats(int n, long long samples, std::uint64_t seed,
                                  int threads, double genericity_tol) {
  if (n < 1 || samples < 1) throw ConfigError("montecarlo needs n >= 1, samples >= 1");
  MonteCarloReport rep;
  rep.n = n;
  rep.samples = samples;
  rep.seed = seed;
  rep.threads = std::min<long long>(resolve_threads(threads), samples);
  const int nt = rep.threads;
  std::vector<std::vector<long long>> counts(nt, std::vector<long long>(n, 0));
  std::vector<long long> rejected(nt, 0);
  auto worker = [&](int tid, long long lo, long long hi) {
    for (long long idx = lo; idx < hi; ++idx) {
      SplitMix64 rng(mix64(seed, static_cast<std::uint64_t>(idx)));
      SpinModelConfig cfg = random_generic_config(n, rng, genericity_tol,
                                                  &rejected[tid]);
      double prefix = 0.0, best = -1.0;
      int chosen = 1;
      for (int k = 1; k <= n; ++k) {
        double ek = 2.0 * f_info(std::sqrt(std::abs(cfg.c(k)))) + prefix;
        if (ek > best + 1e-10) {
          best = ek;
          chosen = k;
        }
        prefix += f_info(cfg.c(k));
      }
      ++counts[tid][chosen - 1];
    }
  };
  std::vector<std::thread> pool;
  long long chunk = (samples + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    long long lo = t * chunk, hi = std::min<long long>(samples, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(worker, t, lo, hi);
  }
  for (auto& th : pool) th.join();
  rep.counts.assign(n, 0);
  for (int t = 0; t < nt; ++t) {
    rep.rejected += rejected[t];
    for (int k = 0; k < n; ++k) rep.counts[k] += counts[t][k];
  }
  rep.fraction_by_k.resize(n);
  for (int k = 0; k < n; ++k)
    rep.fraction_by_k[k] = static_cast<double>(rep.counts[k]) / samples;
  rep.fraction_Sn = rep.fraction_by_k[n - 1];
  rep.stderr_Sn = std::sqrt(rep.fraction_Sn * (1.0 - rep.fraction_Sn) / samples);
  return rep;
}

ILResult min_il_select(const SpinModelConfig& cfg, int max_times, int omega_grid) {
  const int n = cfg.n();
  if (n < 1 || n > 20) throw ConfigError("model size out of range for enumeration");
  if (omega_grid < 3) throw ConfigError("omega grid too coarse");
  if (max_times < 0) max_times = n + 2;
  ILResult res;
  double best = std::numeric_limits<double>::infinity();
  double second = best;
  auto consider = [&](const std::vector<int>& between, int k, double omega,
                      bool has_final) {
    int m = static_cast<int>(between.size()) + (k > 0 ? (has_final ? 2 : 1) : 0);
    if (m < 1 || m > max_times) return;
    std::vector<double> args;
    int prev = 0;
    for (int b : between) {
      args.push_back(lambda_abs(cfg, prev, b));
      prev = b;
    }
    if (k > 0) {
      double nk = axis_norm_N(cfg, k, omega);
      args.push_back(lambda_abs(cfg, prev, k - 1) * nk);
      if (has_final) args.push_back(std::abs(cfg.c(k)) / nk);
    }
    ILCandidate cand;
    cand.between = between;
    cand.k = k;
    cand.omega = omega;
    cand.has_final = has_final;
    cand.m = m;
    cand.s_prime = 0.0;
    for (double a : args) cand.s_prime += f_info(a) - 2.0 * kLn2;
    cand.times.assign(between.begin(), between.end());
    if (k > 0) {
      cand.times.push_back((k - 1) + omega / (kPi / 2));
      if (has_final) cand.times.push_back(k);
    }
    if (static_cast<int>(res.best_by_m.size()) < m) res.best_by_m.resize(m);
    if (res.best_by_m[m - 1].m == 0 || cand.s_prime < res.best_by_m[m - 1].s_prime)
      res.best_by_m[m - 1] = cand;
    if (cand.s_prime < best) {
      second = best;
      best = cand.s_prime;
      res.minimizer = cand;
      res.terms.clear();
      for (double a : args) res.terms.push_back(f_info(a) - 2.0 * kLn2);
    } else if (cand.s_prime < second) {
      second = cand.s_prime;
    }
  };
  std::vector<int> between;
  auto subset_of = [&](int top, unsigned mask) {
    between.clear();
    for (int j = 1; j <= top; ++j)
      if (mask & (1u << (j - 1))) between.push_back(j);
  };
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    subset_of(n, mask);
    consider(between, 0, 0.0, false);
  }
  for (int k = 1; k <= n; ++k) {
    for (unsigned mask = 0; mask < (1u << (k - 1)); ++mask) {
      subset_of(k - 1, mask);
      for (int i = 1; i <= omega_grid; ++i) {
        double omega = (kPi / 2) * i / (omega_grid + 1);
        consider(between, k, omega, false);
        consider(between, k, omega, true);
      }
    }
  }
  res.s_second = second;
  const auto& min = res.minimizer;
  std::string what;
  if (min.m != n + 1)
    what = "minimizer has " + std::to_string(min.m) + " projections, expected " +
           std::to_string(n + 1);
  else if (min.k != n || !min.has_final ||
           static_cast<int>(min.between.size()) != n - 1)
    what = "minimizer is not the full-length set on the last interaction";
  else if (std::min(min.omega, kPi / 2 - min.omega) >
           (kPi / 2) / (omega_grid + 1) * (1.0 + 1e-9))
    what = "minimizer angle " + fmt17(min.omega) + " is not at the grid edge";
  for (double t : res.terms)
    if (what.empty() && t >= 0.0)
      what = "projection term " + fmt17(t) + " is not negative";
  if (!what.empty()) throw VerifyError("information-entropy minimum: " + what);
  return res;
}

// grid over the whole schedule, matching the classification grid
static std::vector<double> schedule_grid(int n, int grid_per_interaction) {
  std::vector<double> g;
  for (int k = 1; k <= n; ++k)
    for (int i = (k == 1 ? 0 : 1); i <= grid_per_interaction; ++i)
      g.push_back((k - 1) + static_cast<double>(i) / grid_per_interaction);
  return g;
}

ExtendabilityReport check_nonextendable(const SpinModelConfig& cfg, int k,
                                        double t_star, int grid_per_interaction,
                                        double consistency_tol, double p_min) {
  if (k < 1 || k > cfg.n()) throw ConfigError("interaction index out of range");
  std::vector<double> base;
  for (int j = 1; j < k; ++j) base.push_back(j);
  base.push_back(t_star);
  base.push_back(k);
  std::sort(base.begin(), base.end());
  CMat d0 = brute_decoherence(cfg, base);
  auto nontrivial = [&](const CMat& d) {
    int c = 0;
    for (Eigen::Index i = 0; i < d.rows(); ++i)
      if (d(i, i).real() > p_min) ++c;
    return c;
  };
  auto max_offdiag = [](const CMat& d) {
    double worst = 0.0;
    for (Eigen::Index a = 0; a < d.rows(); ++a)
      for (Eigen::Index b = 0; b < d.cols(); ++b)
        if (a != b) worst = std::max(worst, std::abs(d(a, b)));
    return worst;
  };
  const int base_count = nontrivial(d0);
  ExtendabilityReport rep;
  for (double tau : schedule_grid(cfg.n(), grid_per_interaction)) {
    bool repeated = false;
    for (double t : base) repeated = repeated || t == tau;
    if (repeated) continue;  // same projector again, refinements carry zero probability
    std::vector<double> times = base;
    times.insert(std::upper_bound(times.begin(), times.end(), tau), tau);
    CMat d = brute_decoherence(cfg, times);
    if (max_offdiag(d) > consistency_tol) continue;
    if (nontrivial(d) > base_count) {
      rep.nonextendable = false;
      rep.extendable_times.push_back(tau);
    }
  }
  return rep;
}

BruteSelection brute_best_consistent_set(const SpinModelConfig& cfg,
                                         const std::vector<double>& grid_times,
                                         double consistency_tol) {
  const int T = static_cast<int>(grid_times.size());
  if (T < 1 || T > 16) throw ConfigError("brute search needs 1..16 grid times");
  for (int i = 1; i < T; ++i)
    if (grid_times[i] <= grid_times[i - 1])
      throw ConfigError("grid times must strictly increase");
  std::vector<TimedDecomposition> decs;
  decs.reserve(T);
  for (double t : grid_times) decs.push_back(schmidt_timed_decomposition(cfg, t));
  HeisenbergSource src = heisenberg_source(cfg);
  StateVector psi0 = initial_state(cfg);
  BruteSelection best;
  best.information = -1.0;
  for (unsigned mask = 1; mask < (1u << T); ++mask) {
    if (std::popcount(mask) > 12) continue;  // leaf-count cap
    std::vector<TimedDecomposition> chosen;
    for (int i = 0; i < T; ++i)
      if (mask & (1u << i)) chosen.push_back(decs[i]);
    HistorySet set = HistorySet::chain(std::move(chosen));
    DecoherenceMatrix d = decoherence_matrix(set, psi0, src);
    ++best.sets_tried;
    if (!consistency_check(d, Criterion::medium, consistency_tol).consistent) continue;
    ++best.consistent_sets;
    double e = shannon_information(d.probabilities);
    if (e > best.information + 1e-12) {
      best.information = e;
      best.times.clear();
      for (int i = 0; i < T; ++i)
        if (mask & (1u << i)) best.times.push_back(grid_times[i]);
    }
  }
  return best;
}

}  // namespace qhist
