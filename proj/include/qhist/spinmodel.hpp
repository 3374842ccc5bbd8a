#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhist/hilbert.hpp"

namespace qhist {

// n spin-1/2 pointers measured one after another along directions u_1..u_n;
// the measured qubit starts along v.  Basis index: system bit slowest,
// then environment spins in order, idx = s*2^n + e, e = sum e_k 2^(n-k).
struct SpinModelConfig {
  Vec3 v;
  std::vector<Vec3> u;
  int n() const { return static_cast<int>(u.size()); }
  int dim() const { return 1 << (n() + 1); }
  Vec3 dir(int k) const;    // k = 0 -> v, else u[k-1]
  double c(int k) const;    // dir(k-1) . dir(k), k = 1..n
  void validate(double unit_tol = 1e-12) const;
};

// interaction k runs over t in [k-1, k], its angle ramping linearly 0..pi/2
double theta_k(int k, double t);
Eigen::VectorXd schedule_theta(const SpinModelConfig& cfg, double t);

struct TimeLocation {
  bool between = true;  // no interaction strictly in progress
  int k = 0;            // interaction index when not between (1-based)
  double omega = 0.0;   // theta_k(t) when not between
};
TimeLocation locate_time(const SpinModelConfig& cfg, double t);

// qubit spinor pointing along a Bloch direction, (cos(th/2), e^{i phi} sin(th/2))
Eigen::Vector2cd qubit_from_direction(const Vec3& dir);
// 2x2 projector onto the +1 eigenstate of sigma.dir
Eigen::Matrix2cd qubit_projector(const Vec3& dir);

// 3x3 helpers
Mat3 proj3(const Vec3& u);      // u u^T
Mat3 proj3_bar(const Vec3& u);  // I - u u^T
Mat3 crossmat(const Vec3& u);   // [u]x, crossmat(u)*y = u x y

// rotation by sign*theta about u as it acts on Bloch vectors:
// B = P(u) + cos(theta) Pbar(u) - sign*sin(theta) [u]x
Mat3 bloch_rotation(const Vec3& u, double theta, int sign);
// interaction-averaged factor A_k = P(u) + cos(theta) Pbar(u) = (B+ + B-)/2
Mat3 chain_factor_A(const Vec3& u, double theta);

struct RotationChain {
  std::vector<Mat3> factors;  // A_k(t), k = 1..n
  Mat3 A;                     // A_n(t) ... A_1(t)
};
RotationChain rotation_A(const SpinModelConfig& cfg, double t);

StateVector initial_state(const SpinModelConfig& cfg);

// dense U(t) = V_n(t)...V_1(t); refuses n beyond the dense cap
DenseOperator full_unitary(const SpinModelConfig& cfg, double t, int n_cap = 12);

// U(t) applied to a vector without forming the dense matrix
CVec apply_unitary(const SpinModelConfig& cfg, double t, const CVec& in);
CVec apply_unitary_adjoint(const SpinModelConfig& cfg, double t, const CVec& in);

// |psi(t)>, computed both by structured application and by the product-state
// sum over environment sign strings; the two must agree to 1e-12
StateVector evolve(const SpinModelConfig& cfg, double t);

struct SchmidtAxis {
  Vec3 w;
  double N;
};
// w(t) = A(t)v / N(t), N(t) = |A(t)v|; reduced eigenvalues are (1 +- N)/2
SchmidtAxis schmidt_axis(const SpinModelConfig& cfg, double t, double axis_tol = 1e-12);

// true iff every adjacent pair (v,u1), (u1,u2), ... has |dot| above the margin,
// which keeps N(t) bounded away from zero for all t
bool lemma1_check(const SpinModelConfig& cfg, double genericity_tol = 1e-6);

// lambda_{ij} = prod_{i<k<=j} |c(k)|  (absolute adjacent dots), lambda_{ii} = 1
double lambda_abs(const SpinModelConfig& cfg, int i, int j);
// N_k(omega) = sqrt(c_k^2 + cos^2(omega) (1 - c_k^2))
double axis_norm_N(const SpinModelConfig& cfg, int k, double omega);

// sign-labelled history over Schmidt projections: integer between-times,
// optionally one interior time inside interaction k, optionally the final
// time k itself.  signs run over the projections in time order, +1 meaning
// the larger-weight Schmidt outcome.
struct HistorySpec {
  std::vector<int> between;      // strictly increasing, values in 1..n
  std::optional<double> interior;
  std::optional<int> final_k;
  std::vector<int> signs;
  std::vector<double> times() const;
  int num_projections() const;
};

// checks a spec against the allowed forms:
//  (i) between-times only, (ii) between + interior in interaction k + final k,
//  (iii) between + interior last.  Returns the interaction index k of the
//  interior time (0 when there is none); throws NotClassified otherwise.
int validate_allowed(const SpinModelConfig& cfg, const HistorySpec& spec);

// closed-form probability of one sign pattern
double analytic_probability(const SpinModelConfig& cfg, const HistorySpec& spec);
// all 2^m sign patterns of the same time set, leaf bit order: earliest
// projection = most significant bit, bit 0 encodes '+'
std::vector<double> analytic_probabilities(const SpinModelConfig& cfg,
                                           const HistorySpec& times_only);

// two-time decoherence element between the histories (a_t, a_s) and
// (-a_t, a_s): the only off-diagonal pairs not killed by the final projector.
// general closed form, valid for every t <= s
cxd offdiag_general(const SpinModelConfig& cfg, double t, double s, int a_t, int a_s);
// the same element assembled from the three tabulated cases
// (same interaction, adjacent interactions, separated interactions)
cxd analytic_offdiag_pair(const SpinModelConfig& cfg, double t, double s,
                          int a_t, int a_s);

// full-space decoherence matrix of the Schmidt-projection histories at the
// given strictly increasing times, built by brute force from evolved states
// and their Schmidt decompositions.  Leaf bit order matches
// analytic_probabilities: earliest = most significant bit, bit 0 = '+'.
CMat brute_decoherence(const SpinModelConfig& cfg, std::vector<double> times);

// normalized branch states evolved forward to a common reference time;
// probability-zero branches are dropped
std::vector<StateVector> forward_path_states(const SpinModelConfig& cfg,
                                             const std::vector<double>& times,
                                             double reference_time);

enum class PairCase { repeated, between_first, same_interaction, same_end, adjacent, separated };
PairCase classify_case(const SpinModelConfig& cfg, double t, double s);
std::string pair_case_name(PairCase c);

struct PairRecord {
  double t, s;
  PairCase tag;
  double offdiag_abs;
  bool consistent;
};
// scans all ordered grid pairs, marks consistency, and asserts the consistent
// set coincides exactly with the allowed pairs; use_brute re-derives every
// element from the full-space decoherence matrix instead of the closed form
std::vector<PairRecord> classify_pairs(const SpinModelConfig& cfg,
                                       int grid_per_interaction, double tol,
                                       bool use_brute = false);

struct GenericityReport {
  bool ok = true;
  double min_dot = 1.0;
  double min_cross = 1.0;
  double min_triple = 1.0;  // weak mode only
  int worst_index = -1;
  std::string detail() const;
};
GenericityReport genericity_check(const SpinModelConfig& cfg, Criterion mode,
                                  double genericity_tol = 1e-6);

// uniform direction on the sphere (Marsaglia polar method)
template <class URBG>
Vec3 sample_unit_vector(URBG& g) {
  auto unif = [&g] { return static_cast<double>(g() >> 11) * 0x1.0p-53; };
  for (;;) {
    double x1 = 2.0 * unif() - 1.0;
    double x2 = 2.0 * unif() - 1.0;
    double s = x1 * x1 + x2 * x2;
    if (s >= 1.0 || s == 0.0) continue;
    double f = 2.0 * std::sqrt(1.0 - s);
    return Vec3(x1 * f, x2 * f, 1.0 - 2.0 * s);
  }
}

// uniform direction with pairwise genericity margins, rejection-sampled
SpinModelConfig random_generic_config(int n, SplitMix64& rng,
                                      double genericity_tol = 1e-6,
                                      long long* rejections = nullptr);

}  // namespace qhist
