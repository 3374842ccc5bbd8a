#include "qhist/spinmodel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qhist {

Vec3 SpinModelConfig::dir(int k) const {
  if (k == 0) return v;
  if (k < 1 || k > n()) throw ConfigError("direction index out of range");
  return u[k - 1];
}

double SpinModelConfig::c(int k) const { return dir(k - 1).dot(dir(k)); }

void SpinModelConfig::validate(double unit_tol) const {
  if (n() < 1) throw ConfigError("model needs at least one measurement direction");
  if (std::abs(v.norm() - 1.0) > unit_tol)
    throw ConfigError("v is not unit length: |v| = " + fmt17(v.norm()));
  for (int k = 1; k <= n(); ++k)
    if (std::abs(u[k - 1].norm() - 1.0) > unit_tol)
      throw ConfigError("u" + std::to_string(k) + " is not unit length: |u| = " +
                        fmt17(u[k - 1].norm()));
}

double theta_k(int k, double t) {
  double x = std::clamp(t - (k - 1), 0.0, 1.0);
  return x * (kPi / 2);
}

Eigen::VectorXd schedule_theta(const SpinModelConfig& cfg, double t) {
  Eigen::VectorXd th(cfg.n());
  for (int k = 1; k <= cfg.n(); ++k) th(k - 1) = theta_k(k, t);
  return th;
}

TimeLocation locate_time(const SpinModelConfig& cfg, double t) {
  TimeLocation loc;
  if (t <= 0 || t >= cfg.n() || t == std::floor(t)) return loc;  // between
  loc.between = false;
  loc.k = static_cast<int>(std::floor(t)) + 1;
  loc.omega = theta_k(loc.k, t);
  return loc;
}

Eigen::Vector2cd qubit_from_direction(const Vec3& dir) {
  double th = std::acos(std::clamp(dir.z(), -1.0, 1.0));
  double ph = std::atan2(dir.y(), dir.x());
  Eigen::Vector2cd q;
  q << std::cos(th / 2), std::sin(th / 2) * std::exp(cxd(0, ph));
  return q;
}

Eigen::Matrix2cd qubit_projector(const Vec3& d) {
  Eigen::Matrix2cd p;
  p << cxd(1 + d.z(), 0), cxd(d.x(), -d.y()), cxd(d.x(), d.y()), cxd(1 - d.z(), 0);
  return 0.5 * p;
}

Mat3 proj3(const Vec3& u) { return u * u.transpose(); }
Mat3 proj3_bar(const Vec3& u) { return Mat3::Identity() - u * u.transpose(); }

Mat3 crossmat(const Vec3& u) {
  Mat3 m;
  m << 0, -u.z(), u.y(), u.z(), 0, -u.x(), -u.y(), u.x(), 0;
  return m;
}

Mat3 bloch_rotation(const Vec3& u, double theta, int sign) {
  return proj3(u) + std::cos(theta) * proj3_bar(u) - sign * std::sin(theta) * crossmat(u);
}

Mat3 chain_factor_A(const Vec3& u, double theta) {
  return proj3(u) + std::cos(theta) * proj3_bar(u);
}

RotationChain rotation_A(const SpinModelConfig& cfg, double t) {
  RotationChain rc;
  rc.factors.reserve(cfg.n());
  rc.A = Mat3::Identity();
  for (int k = 1; k <= cfg.n(); ++k) {
    rc.factors.push_back(chain_factor_A(cfg.u[k - 1], theta_k(k, t)));
    rc.A = rc.factors.back() * rc.A;
  }
  return rc;
}

StateVector initial_state(const SpinModelConfig& cfg) {
  CVec sys = qubit_from_direction(cfg.v);
  CVec env = CVec::Zero(1 << cfg.n());
  env(0) = 1.0;  // all pointer spins up
  return tensor_product(sys, env);
}

// applies V_k = P(u_k) (x) I + P(-u_k) (x) R_k(theta) in place
static void apply_Vk(const SpinModelConfig& cfg, int k, double theta, CVec& a,
                     bool adjoint) {
  const int n = cfg.n();
  const int sys_stride = 1 << n;
  const int k_stride = 1 << (n - k);
  Eigen::Matrix2cd p = qubit_projector(cfg.u[k - 1]);
  Eigen::Matrix2cd pb = Eigen::Matrix2cd::Identity() - p;
  double ct = std::cos(theta), st = std::sin(theta);
  if (adjoint) st = -st;  // R is real orthogonal, adjoint = transpose
  const int dim = 2 * sys_stride;
  for (int base = 0; base < dim; ++base) {
    if ((base & sys_stride) || (base & k_stride)) continue;
    cxd a00 = a(base);                          // s=0, e_k=0
    cxd a01 = a(base + k_stride);               // s=0, e_k=1
    cxd a10 = a(base + sys_stride);             // s=1, e_k=0
    cxd a11 = a(base + sys_stride + k_stride);  // s=1, e_k=1
    // P (x) I part
    cxd b00 = p(0, 0) * a00 + p(0, 1) * a10;
    cxd b01 = p(0, 0) * a01 + p(0, 1) * a11;
    cxd b10 = p(1, 0) * a00 + p(1, 1) * a10;
    cxd b11 = p(1, 0) * a01 + p(1, 1) * a11;
    // Pbar (x) R part, R = [[ct, -st], [st, ct]] on the pointer spin
    cxd c00 = pb(0, 0) * a00 + pb(0, 1) * a10;
    cxd c01 = pb(0, 0) * a01 + pb(0, 1) * a11;
    cxd c10 = pb(1, 0) * a00 + pb(1, 1) * a10;
    cxd c11 = pb(1, 0) * a01 + pb(1, 1) * a11;
    a(base) = b00 + ct * c00 - st * c01;
    a(base + k_stride) = b01 + st * c00 + ct * c01;
    a(base + sys_stride) = b10 + ct * c10 - st * c11;
    a(base + sys_stride + k_stride) = b11 + st * c10 + ct * c11;
  }
}

CVec apply_unitary(const SpinModelConfig& cfg, double t, const CVec& in) {
  if (in.size() != cfg.dim()) throw ConfigError("state dimension mismatch");
  CVec a = in;
  for (int k = 1; k <= cfg.n(); ++k) apply_Vk(cfg, k, theta_k(k, t), a, false);
  return a;
}

CVec apply_unitary_adjoint(const SpinModelConfig& cfg, double t, const CVec& in) {
  if (in.size() != cfg.dim()) throw ConfigError("state dimension mismatch");
  CVec a = in;
  for (int k = cfg.n(); k >= 1; --k) apply_Vk(cfg, k, theta_k(k, t), a, true);
  return a;
}

DenseOperator full_unitary(const SpinModelConfig& cfg, double t, int n_cap) {
  if (cfg.n() > n_cap)
    throw ConfigError("n = " + std::to_string(cfg.n()) +
                      " exceeds the dense cap " + std::to_string(n_cap));
  const int d = cfg.dim();
  CMat u(d, d);
  CVec col = CVec::Zero(d);
  for (int j = 0; j < d; ++j) {
    col.setZero();
    col(j) = 1.0;
    u.col(j) = apply_unitary(cfg, t, col);
  }
  return {u, SpaceTag::total};
}

// product-state sum route: |psi(t)> as a sum over pointer sign strings
static CVec evolve_sign_sum(const SpinModelConfig& cfg, double t) {
  const int n = cfg.n();
  const Eigen::Vector2cd up = (Eigen::Vector2cd() << 1, 0).finished();
  const Eigen::Vector2cd dn = (Eigen::Vector2cd() << 0, 1).finished();
  CVec psi = CVec::Zero(cfg.dim());
  CVec vspin = qubit_from_direction(cfg.v);
  const double scale = std::pow(2.0, -0.5 * n);
  for (int bits = 0; bits < (1 << n); ++bits) {
    // bit (n-k) set means sign '-' for pointer spin k
    Eigen::Vector2cd s = vspin;
    for (int k = 1; k <= n; ++k) {
      int minus = (bits >> (n - k)) & 1;
      double th = theta_k(k, t);
      cxd phase = std::exp(cxd(0, minus ? th : -th));
      Eigen::Matrix2cd x = qubit_projector(cfg.u[k - 1]) +
                           phase * qubit_projector(-cfg.u[k - 1]);
      s = x * s;
    }
    CVec env = CVec::Ones(1);
    for (int k = 1; k <= n; ++k) {
      int minus = (bits >> (n - k)) & 1;
      Eigen::Vector2cd pm = (up + cxd(0, minus ? -1.0 : 1.0) * dn) / std::sqrt(2.0);
      env = kron(env, CVec(pm));
    }
    psi += scale * kron(CVec(s), env);
  }
  return psi;
}

StateVector evolve(const SpinModelConfig& cfg, double t) {
  StateVector out = initial_state(cfg);
  out.amp = apply_unitary(cfg, t, out.amp);
  CVec alt = evolve_sign_sum(cfg, t);
  double diff = (out.amp - alt).cwiseAbs().maxCoeff();
  if (diff > 1e-12)
    throw VerifyError("evolution routes disagree by " + fmt17(diff));
  return out;
}

SchmidtAxis schmidt_axis(const SpinModelConfig& cfg, double t, double axis_tol) {
  Vec3 av = rotation_A(cfg, t).A * cfg.v;
  double N = av.norm();
  if (N <= axis_tol)
    throw DegenerateAxisError("N(" + fmt17(t) + ") = " + fmt17(N));
  return {av / N, N};
}

bool lemma1_check(const SpinModelConfig& cfg, double genericity_tol) {
  for (int k = 1; k <= cfg.n(); ++k)
    if (std::abs(cfg.c(k)) <= genericity_tol) return false;
  return true;
}

double lambda_abs(const SpinModelConfig& cfg, int i, int j) {
  if (i < 0 || j < i || j > cfg.n()) throw ConfigError("lambda index out of range");
  double p = 1.0;
  for (int k = i + 1; k <= j; ++k) p *= std::abs(cfg.c(k));
  return p;
}

double axis_norm_N(const SpinModelConfig& cfg, int k, double omega) {
  double ck = cfg.c(k);
  double co = std::cos(omega);
  return std::sqrt(ck * ck + co * co * (1.0 - ck * ck));
}

std::vector<double> HistorySpec::times() const {
  std::vector<double> ts(between.begin(), between.end());
  if (interior) ts.push_back(*interior);
  if (final_k) ts.push_back(static_cast<double>(*final_k));
  return ts;
}

int HistorySpec::num_projections() const {
  return static_cast<int>(between.size()) + (interior ? 1 : 0) + (final_k ? 1 : 0);
}

int validate_allowed(const SpinModelConfig& cfg, const HistorySpec& spec) {
  const int n = cfg.n();
  for (size_t i = 0; i < spec.between.size(); ++i) {
    int m = spec.between[i];
    if (m < 1 || m > n)
      throw NotClassifiedError("between-time " + std::to_string(m) +
                               " outside 1..n (the time-0 projection is trivial "
                               "and times past n repeat the final axis)");
    if (i > 0 && spec.between[i] <= spec.between[i - 1])
      throw NotClassifiedError("between-times must strictly increase");
  }
  if (spec.final_k && !spec.interior)
    throw NotClassifiedError("a final time without an interior time is just a "
                             "between-time; list it there");
  int k = 0;
  if (spec.interior) {
    TimeLocation loc = locate_time(cfg, *spec.interior);
    if (loc.between)
      throw NotClassifiedError("interior time " + fmt17(*spec.interior) +
                               " is not strictly inside an interaction");
    k = loc.k;
    if (!spec.between.empty() && spec.between.back() > k - 1)
      throw NotClassifiedError("between-times must precede the interior interaction");
    if (spec.final_k && *spec.final_k != k)
      throw NotClassifiedError("final time must close the interior interaction");
  }
  if (!spec.signs.empty() &&
      static_cast<int>(spec.signs.size()) != spec.num_projections())
    throw ConfigError("sign count does not match projection count");
  for (int s : spec.signs)
    if (s != 1 && s != -1) throw ConfigError("signs must be +1 or -1");
  return k;
}

// chain factor arguments: consecutive-projection correlation coefficients.
// probabilities are 2^{-m} prod_i (1 + s_i s_{i+1} arg_i) over the chain
// anchored at s_0 = +1 (the initial direction).
static std::vector<double> chain_args(const SpinModelConfig& cfg,
                                      const HistorySpec& spec, int k) {
  std::vector<double> args;
  int prev = 0;
  for (int m : spec.between) {
    args.push_back(lambda_abs(cfg, prev, m));
    prev = m;
  }
  if (spec.interior) {
    double omega = theta_k(k, *spec.interior);
    double Nk = axis_norm_N(cfg, k, omega);
    args.push_back(lambda_abs(cfg, prev, k - 1) * Nk);
    if (spec.final_k) args.push_back(std::abs(cfg.c(k)) / Nk);
  }
  return args;
}

double analytic_probability(const SpinModelConfig& cfg, const HistorySpec& spec) {
  int k = validate_allowed(cfg, spec);
  int m = spec.num_projections();
  if (static_cast<int>(spec.signs.size()) != m)
    throw ConfigError("analytic_probability needs one sign per projection");
  std::vector<double> args = chain_args(cfg, spec, k);
  double p = std::pow(2.0, -m);
  int prev_sign = 1;
  for (int i = 0; i < m; ++i) {
    p *= 1.0 + prev_sign * spec.signs[i] * args[i];
    prev_sign = spec.signs[i];
  }
  return p;
}

std::vector<double> analytic_probabilities(const SpinModelConfig& cfg,
                                           const HistorySpec& times_only) {
  HistorySpec spec = times_only;
  spec.signs.clear();
  int k = validate_allowed(cfg, spec);
  int m = spec.num_projections();
  std::vector<double> args = chain_args(cfg, spec, k);
  std::vector<double> out(size_t{1} << m);
  for (size_t idx = 0; idx < out.size(); ++idx) {
    double p = std::pow(2.0, -m);
    int prev_sign = 1;
    for (int i = 0; i < m; ++i) {
      int sign = ((idx >> (m - 1 - i)) & 1) ? -1 : 1;  // earliest = msb, 0 = '+'
      p *= 1.0 + prev_sign * sign * args[i];
      prev_sign = sign;
    }
    out[idx] = p;
  }
  return out;
}

// canonical (k, phi) for the second time: a between-interaction s acts like
// the end of the last completed interaction
static void canonical_second_time(const SpinModelConfig& cfg, double s, int j,
                                  int& k, double& phi) {
  TimeLocation loc = locate_time(cfg, s);
  if (!loc.between) {
    k = loc.k;
    phi = loc.omega;
  } else {
    k = std::clamp(static_cast<int>(std::floor(s)), j, cfg.n());
    phi = kPi / 2;
  }
}

cxd offdiag_general(const SpinModelConfig& cfg, double t, double s, int a_t, int a_s) {
  if (s < t) throw ConfigError("offdiag requires t <= s");
  TimeLocation lt = locate_time(cfg, t);
  if (lt.between || s == t) return 0.0;
  const int j = lt.k;
  const double om = lt.omega;
  const double phj = theta_k(j, s);
  Vec3 x = cfg.v;
  for (int i = 1; i <= j - 1; ++i) x = proj3(cfg.dir(i)) * x;
  RotationChain rs = rotation_A(cfg, s);
  Vec3 Asv = rs.A * cfg.v;
  Mat3 tail = Mat3::Identity();
  for (int i = j + 1; i <= cfg.n(); ++i) tail = rs.factors[i - 1] * tail;
  Vec3 y = tail.transpose() * Asv;
  double Nt = (rotation_A(cfg, t).A * cfg.v).norm();
  double Ns = Asv.norm();
  Vec3 uj = cfg.dir(j);
  double re = a_s * x.dot(proj3_bar(uj) * y);
  double im = a_t * a_s * uj.dot(x) * uj.dot(x.cross(y)) / Nt;
  return -(0.25 / Ns) * std::sin(om) * std::sin(phj - om) * cxd(re, im);
}

cxd analytic_offdiag_pair(const SpinModelConfig& cfg, double t, double s,
                          int a_t, int a_s) {
  if (s < t) throw ConfigError("offdiag requires t <= s");
  TimeLocation lt = locate_time(cfg, t);
  if (lt.between || s == t) return 0.0;
  const int j = lt.k;
  const double om = lt.omega;
  int k;
  double phi;
  canonical_second_time(cfg, s, j, k, phi);
  double lam0j1 = lambda_abs(cfg, 0, j - 1);
  double cre, cim;
  if (k == j) {
    double cross2 = 1.0 - cfg.c(j) * cfg.c(j);
    cre = lam0j1 * std::sin(om) * std::sin(phi - om) * std::cos(phi) * cross2 /
          (4.0 * axis_norm_N(cfg, j, phi));
    cim = 0.0;
  } else {
    Vec3 um = cfg.dir(j - 1), uj = cfg.dir(j), up = cfg.dir(j + 1);
    double bar = um.dot(proj3_bar(uj) * up);
    double triple = um.dot(uj.cross(up));
    double Nj = axis_norm_N(cfg, j, om);
    double f;
    if (k == j + 1) {
      f = lam0j1 * lambda_abs(cfg, j, j + 1) * std::sin(om) * std::cos(om) *
          std::sin(phi) * std::sin(phi) / (4.0 * Nj * axis_norm_N(cfg, j + 1, phi));
    } else {
      f = lam0j1 * lambda_abs(cfg, j + 1, k - 1) * axis_norm_N(cfg, k, phi) *
          std::sin(om) * std::cos(om) / (4.0 * Nj);
    }
    // the chain factors enter signed: the real part through c_j c_{j+1}, the
    // imaginary part through lambda_{0(j-1)} c_{j+1} (squares drop out)
    auto sgn = [](double x) { return x < 0 ? -1.0 : 1.0; };
    double sgn_lam = 1.0;
    for (int i = 1; i < j; ++i) sgn_lam *= sgn(cfg.c(i));
    cre = f * Nj * bar * sgn(cfg.c(j)) * sgn(cfg.c(j + 1));
    cim = f * lambda_abs(cfg, j - 1, j) * triple * sgn_lam * sgn(cfg.c(j + 1));
  }
  return -static_cast<double>(a_s) * cxd(cre, -a_t * cim);
}

PairCase classify_case(const SpinModelConfig& cfg, double t, double s) {
  if (s == t) return PairCase::repeated;
  TimeLocation lt = locate_time(cfg, t);
  if (lt.between) return PairCase::between_first;
  int k;
  double phi;
  canonical_second_time(cfg, s, lt.k, k, phi);
  if (k == lt.k) return phi >= kPi / 2 ? PairCase::same_end : PairCase::same_interaction;
  if (k == lt.k + 1) return PairCase::adjacent;
  return PairCase::separated;
}

std::string pair_case_name(PairCase c) {
  switch (c) {
    case PairCase::repeated: return "repeated";
    case PairCase::between_first: return "between_first";
    case PairCase::same_interaction: return "same_interaction";
    case PairCase::same_end: return "same_end";
    case PairCase::adjacent: return "adjacent";
    case PairCase::separated: return "separated";
  }
  return "?";
}

// Schmidt projector pair at time t from the brute-force decomposition,
// as 2x2 system operators; index 0 is the larger weight
static std::array<Eigen::Matrix2cd, 2> brute_schmidt_pair(const SpinModelConfig& cfg,
                                                          double t) {
  StateVector psi = evolve(cfg, t);
  SchmidtDecomposition sd = schmidt_decompose(psi);
  std::array<Eigen::Matrix2cd, 2> out;
  for (int i = 0; i < 2; ++i) {
    Eigen::Vector2cd b = sd.system_basis[i];
    out[i] = b * b.adjoint();
  }
  return out;
}

static void apply_system_2x2(const Eigen::Matrix2cd& p, int n, CVec& a) {
  const int stride = 1 << n;
  for (int e = 0; e < stride; ++e) {
    cxd a0 = a(e), a1 = a(e + stride);
    a(e) = p(0, 0) * a0 + p(0, 1) * a1;
    a(e + stride) = p(1, 0) * a0 + p(1, 1) * a1;
  }
}

CMat brute_decoherence(const SpinModelConfig& cfg, std::vector<double> times) {
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) throw ConfigError("times must strictly increase");
  const int m = static_cast<int>(times.size());
  std::vector<CVec> paths(1, initial_state(cfg).amp);
  for (int i = 0; i < m; ++i) {
    auto projs = brute_schmidt_pair(cfg, times[i]);
    std::vector<CVec> next(paths.size() * 2);
    for (size_t a = 0; a < paths.size(); ++a) {
      for (int b = 0; b < 2; ++b) {
        CVec s = apply_unitary(cfg, times[i], paths[a]);
        apply_system_2x2(projs[b], cfg.n(), s);
        next[a * 2 + b] = apply_unitary_adjoint(cfg, times[i], s);
      }
    }
    paths.swap(next);
  }
  const size_t h = paths.size();
  CMat d(h, h);
  for (size_t a = 0; a < h; ++a)
    for (size_t b = 0; b < h; ++b) d(a, b) = paths[b].dot(paths[a]);
  return d;
}

std::vector<StateVector> forward_path_states(const SpinModelConfig& cfg,
                                             const std::vector<double>& times,
                                             double reference_time) {
  for (double t : times)
    if (t > reference_time)
      throw ConfigError("reference time must not precede any projection");
  std::vector<CVec> paths(1, initial_state(cfg).amp);
  for (double t : times) {
    auto projs = brute_schmidt_pair(cfg, t);
    std::vector<CVec> next(paths.size() * 2);
    for (size_t a = 0; a < paths.size(); ++a) {
      for (int b = 0; b < 2; ++b) {
        CVec s = apply_unitary(cfg, t, paths[a]);
        apply_system_2x2(projs[b], cfg.n(), s);
        next[a * 2 + b] = apply_unitary_adjoint(cfg, t, s);
      }
    }
    paths.swap(next);
  }
  std::vector<StateVector> out;
  TensorSplit split{2, 1 << cfg.n()};
  for (CVec& p : paths) {
    CVec fwd = apply_unitary(cfg, reference_time, p);
    double nrm = fwd.norm();
    if (nrm < 1e-14) continue;  // probability-zero branch
    out.push_back({fwd / nrm, split});
  }
  return out;
}

std::vector<PairRecord> classify_pairs(const SpinModelConfig& cfg,
                                       int grid_per_interaction, double tol,
                                       bool use_brute) {
  if (grid_per_interaction < 2) throw ConfigError("grid too coarse");
  GenericityReport rep = genericity_check(cfg, Criterion::medium);
  if (!rep.ok)
    throw DegeneracyError("classification needs a generic config: " + rep.detail());
  std::vector<double> grid;
  for (int k = 1; k <= cfg.n(); ++k)
    for (int i = (k == 1 ? 0 : 1); i <= grid_per_interaction; ++i)
      grid.push_back((k - 1) + static_cast<double>(i) / grid_per_interaction);
  std::vector<PairRecord> out;
  std::vector<std::string> violations;
  for (size_t a = 0; a < grid.size(); ++a) {
    for (size_t b = a; b < grid.size(); ++b) {
      double t = grid[a], s = grid[b];
      double mag;
      if (use_brute) {
        CMat d = brute_decoherence(cfg, s == t ? std::vector<double>{t}
                                               : std::vector<double>{t, s});
        mag = 0.0;
        for (int r = 0; r < d.rows(); ++r)
          for (int c2 = 0; c2 < d.cols(); ++c2)
            if (r != c2) mag = std::max(mag, std::abs(d(r, c2)));
      } else {
        mag = std::abs(analytic_offdiag_pair(cfg, t, s, 1, 1));
      }
      bool consistent = mag < tol;
      TimeLocation lt = locate_time(cfg, t);
      bool allowed = lt.between || s == t ||
                     (!lt.between && s == static_cast<double>(lt.k));
      if (consistent != allowed && violations.size() < 5)
        violations.push_back("(t=" + fmt17(t) + ", s=" + fmt17(s) + ") |D| = " +
                             fmt17(mag) + (allowed ? " expected 0" : " expected nonzero"));
      out.push_back({t, s, classify_case(cfg, t, s), mag, consistent});
    }
  }
  if (!violations.empty()) {
    std::string msg = "consistent pairs do not match the allowed forms:";
    for (const auto& v : violations) msg += "\n  " + v;
    throw VerifyError(msg);
  }
  return out;
}

std::string GenericityReport::detail() const {
  std::ostringstream os;
  os << (ok ? "generic" : "degenerate") << " (min |dot| = " << fmt17(min_dot)
     << ", min |cross| = " << fmt17(min_cross);
  if (min_triple < 1.0) os << ", min |triple| = " << fmt17(min_triple);
  os << ", worst adjacent index " << worst_index << ")";
  return os.str();
}

GenericityReport genericity_check(const SpinModelConfig& cfg, Criterion mode,
                                  double genericity_tol) {
  GenericityReport rep;
  double worst = 2.0;
  for (int k = 0; k + 1 <= cfg.n(); ++k) {
    double dot = std::abs(cfg.dir(k).dot(cfg.dir(k + 1)));
    double cross = cfg.dir(k).cross(cfg.dir(k + 1)).norm();
    double margin = std::min(dot, cross);
    if (margin < worst) {
      worst = margin;
      rep.worst_index = k;
    }
    rep.min_dot = std::min(rep.min_dot, dot);
    rep.min_cross = std::min(rep.min_cross, cross);
  }
  if (mode == Criterion::weak) {
    for (int k = 1; k + 1 <= cfg.n(); ++k) {
      double trip =
          std::abs(cfg.dir(k - 1).dot(proj3_bar(cfg.dir(k)) * cfg.dir(k + 1)));
      rep.min_triple = std::min(rep.min_triple, trip);
    }
  }
  rep.ok = rep.min_dot > genericity_tol && rep.min_cross > genericity_tol &&
           (mode != Criterion::weak || rep.min_triple > genericity_tol);
  return rep;
}

SpinModelConfig random_generic_config(int n, SplitMix64& rng,
                                      double genericity_tol, long long* rejections) {
  if (n < 1) throw ConfigError("n must be positive");
  for (;;) {
    SpinModelConfig cfg;
    cfg.v = sample_unit_vector(rng);
    cfg.u.clear();
    for (int k = 0; k < n; ++k) cfg.u.push_back(sample_unit_vector(rng));
    if (genericity_check(cfg, Criterion::medium, genericity_tol).ok) return cfg;
    if (rejections) ++*rejections;
  }
}

}  // namespace qhist
