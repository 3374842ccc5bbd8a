#pragma once

#include <string>
#include <vector>

#include "qhist/histories.hpp"
#include "qhist/spinmodel.hpp"

namespace qhist {

// entropy of a +-1 variable with mean x, in nats: f(x) = H((1+x)/2).
// Even, maximal at x = 0 with value ln 2, zero at x = +-1.
double f_info(double x);

// Shannon information of the complete set on interaction k: between-times
// 1..k-1, an interior time t inside interaction k, and the final time k
double set_information(const SpinModelConfig& cfg, int k, double t);

struct InteriorOptimum {
  double t_star = 0.0;
  double omega_star = 0.0;
  double E_k = 0.0;
};
// golden-section maximum of set_information over the interior time;
// cross-checks the closed form E_k = 2 f(sqrt|c_k|) + sum_{j<k} f(c_j)
// and N_k(omega*)^2 = |c_k|
InteriorOptimum optimal_interior_time(const SpinModelConfig& cfg, int k);
double closed_form_Ek(const SpinModelConfig& cfg, int k);

enum class SelectRoute { maximize, closed_form };

struct SelectionResult {
  int chosen_k = 0;
  double optimal_t = 0.0;
  double information = 0.0;
  std::vector<double> E_values;  // E_k, index k-1
  std::vector<double> t_values;  // optimal interior time per k
  std::vector<int> ties;         // every k within tie_tol of the maximum
};
// picks the interaction whose complete set carries maximal information;
// ties are reported and the smallest k represents the equivalence class
SelectionResult max_info_select(const SpinModelConfig& cfg,
                                SelectRoute route = SelectRoute::maximize,
                                double tie_tol = 1e-10);

struct MonteCarloReport {
  int n = 0;
  long long samples = 0;
  std::uint64_t seed = 0;
  int threads = 1;
  std::vector<long long> counts;     // wins per k = 1..n
  std::vector<double> fraction_by_k;
  double fraction_Sn = 0.0;          // fraction with chosen k = n
  double stderr_Sn = 0.0;
  long long rejected = 0;            // configs redrawn for genericity
};
// selection statistics over uniformly random generic configs.  Each sample
// draws from its own counter-derived stream, so results do not depend on the
// thread count; threads = 0 reads QHIST_THREADS, then hardware concurrency.
MonteCarloReport montecarlo_stats(int n, long long samples, std::uint64_t seed,
                                  int threads = 0, double genericity_tol = 1e-6);

struct ILCandidate {
  std::vector<int> between;
  int k = 0;              // interior interaction, 0 for between-only sets
  double omega = 0.0;     // interior angle when k > 0
  bool has_final = false;
  int m = 0;              // number of projections
  double s_prime = 0.0;
  std::vector<double> times;
};
struct ILResult {
  ILCandidate minimizer;
  std::vector<ILCandidate> best_by_m;  // best candidate per projection count,
                                       // index m-1; m = 0 marks an empty slot
  std::vector<double> terms;           // minimizer's per-projection S' parts
  double s_second = 0.0;               // runner-up S'
};
// minimizes the information-entropy S' = E - 2m ln 2 over the allowed sets
// with at most max_times projections (default n+2), scanning interior angles
// on an open grid.  Verifies the minimum lands on the full-length set
// (m = n+1, interaction n, all between-times, final time present, angle one
// grid step from an endpoint) with every projection term negative.
ILResult min_il_select(const SpinModelConfig& cfg, int max_times = -1,
                       int omega_grid = 33);

struct ExtendabilityReport {
  bool nonextendable = true;
  std::vector<double> extendable_times;  // grid times that extend nontrivially
};
// appends each grid-time Schmidt projection to the selected set and verifies
// it either breaks medium consistency or adds only probability-zero branches
ExtendabilityReport check_nonextendable(const SpinModelConfig& cfg, int k,
                                        double t_star, int grid_per_interaction,
                                        double consistency_tol = 1e-10,
                                        double p_min = 1e-12);

struct BruteSelection {
  std::vector<double> times;
  double information = 0.0;
  long long consistent_sets = 0;
  long long sets_tried = 0;
};
// exhaustive search over subsets of a time grid for the medium-consistent
// Schmidt-projection set of maximal information (small n only)
BruteSelection brute_best_consistent_set(const SpinModelConfig& cfg,
                                         const std::vector<double>& grid_times,
                                         double consistency_tol = 1e-10);

}  // namespace qhist
