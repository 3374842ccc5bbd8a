#include "qhist/histories.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace qhist {

void TimedDecomposition::validate(double tol) const {
  if (projectors.empty()) throw ConfigError("decomposition has no projectors");
  const Eigen::Index d = projectors[0].dim();
  CMat sum = CMat::Zero(d, d);
  for (size_t i = 0; i < projectors.size(); ++i) {
    const auto& p = projectors[i];
    if (p.dim() != d) throw ConfigError("projector dimensions differ");
    if (!p.is_projector(tol))
      throw VerifyError("entry " + std::to_string(i) + " at t = " + fmt17(time) +
                        " is not a projector");
    sum += p.m;
    for (size_t j = 0; j < i; ++j) {
      double ortho = (p.m * projectors[j].m).cwiseAbs().maxCoeff();
      if (ortho > tol)
        throw VerifyError("projectors " + std::to_string(j) + " and " +
                          std::to_string(i) + " overlap by " + fmt17(ortho));
    }
  }
  double gap = (sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff();
  if (gap > tol)
    throw VerifyError("decomposition at t = " + fmt17(time) +
                      " does not resolve the identity, gap " + fmt17(gap));
}

HistorySet HistorySet::chain(std::vector<TimedDecomposition> decs) {
  for (size_t i = 1; i < decs.size(); ++i)
    if (decs[i].time <= decs[i - 1].time)
      throw ConfigError("chain times must strictly increase");
  HistorySet set;
  std::function<void(HistoryNode&, size_t)> grow = [&](HistoryNode& node, size_t i) {
    if (i == decs.size()) return;
    node.dec = decs[i];
    node.children.resize(decs[i].projectors.size());
    for (auto& ch : node.children) grow(ch, i + 1);
  };
  grow(set.root_, 0);
  return set;
}

void HistorySet::extend_leaf(const std::vector<int>& alpha_path,
                             TimedDecomposition dec) {
  HistoryNode* node = &root_;
  double last = -std::numeric_limits<double>::infinity();
  for (int a : alpha_path) {
    if (node->is_leaf()) throw ConfigError("alpha path runs past a leaf");
    if (a < 0 || a >= static_cast<int>(node->children.size()))
      throw ConfigError("alpha path index out of range");
    last = node->dec->time;
    node = &node->children[a];
  }
  if (!node->is_leaf()) throw ConfigError("alpha path does not end at a leaf");
  if (dec.time <= last)
    throw ConfigError("refinement time must exceed every time on the path");
  node->children.resize(dec.projectors.size());
  node->dec = std::move(dec);
}

static void collect_leaves(const HistoryNode& node, HistorySet::Leaf& cur,
                           std::vector<HistorySet::Leaf>& out) {
  if (node.is_leaf()) {
    out.push_back(cur);
    return;
  }
  cur.times.push_back(node.dec->time);
  for (size_t i = 0; i < node.children.size(); ++i) {
    cur.alpha.push_back(static_cast<int>(i));
    cur.projectors.push_back(&node.dec->projectors[i]);
    cur.ranks.push_back(node.dec->projectors[i].projector_rank());
    collect_leaves(node.children[i], cur, out);
    cur.alpha.pop_back();
    cur.projectors.pop_back();
    cur.ranks.pop_back();
  }
  cur.times.pop_back();
}

std::vector<HistorySet::Leaf> HistorySet::leaves() const {
  std::vector<Leaf> out;
  Leaf cur;
  collect_leaves(root_, cur, out);
  return out;
}

size_t HistorySet::num_leaves() const {
  std::function<size_t(const HistoryNode&)> count = [&](const HistoryNode& n) -> size_t {
    if (n.is_leaf()) return 1;
    size_t s = 0;
    for (const auto& ch : n.children) s += count(ch);
    return s;
  };
  return count(root_);
}

void HistorySet::validate(double tol) const {
  std::function<void(const HistoryNode&, double)> walk = [&](const HistoryNode& n,
                                                             double last) {
    if (n.is_leaf()) return;
    if (n.dec->time <= last)
      throw VerifyError("times do not strictly increase along a branch");
    if (n.children.size() != n.dec->projectors.size())
      throw ConfigError("child count does not match projector count");
    n.dec->validate(tol);
    for (const auto& ch : n.children) walk(ch, n.dec->time);
  };
  walk(root_, -std::numeric_limits<double>::infinity());
}

HeisenbergSource heisenberg_source(const SpinModelConfig& cfg) {
  auto cache = std::make_shared<std::map<double, CMat>>();
  auto mtx = std::make_shared<std::mutex>();
  return [cfg, cache, mtx](double t, const CMat& p) -> CMat {
    const CMat* u;
    {
      std::lock_guard<std::mutex> lock(*mtx);
      auto it = cache->find(t);
      if (it == cache->end()) it = cache->emplace(t, full_unitary(cfg, t).m).first;
      u = &it->second;
    }
    return u->adjoint() * p * (*u);
  };
}

TimedDecomposition schmidt_timed_decomposition(const SpinModelConfig& cfg, double t,
                                               double degeneracy_tol,
                                               double weight_tol) {
  StateVector psi = evolve(cfg, t);
  SchmidtDecomposition sd = schmidt_decompose(psi, degeneracy_tol, weight_tol);
  SchmidtProjectors sp = schmidt_projectors(sd, psi.split, weight_tol);
  return {t, sp.decomposition()};
}

DenseOperator class_operator(const HistorySet::Leaf& leaf, const HeisenbergSource& src) {
  if (leaf.projectors.empty()) throw ConfigError("empty history");
  const Eigen::Index d = leaf.projectors[0]->dim();
  CMat c = CMat::Identity(d, d);
  for (size_t i = 0; i < leaf.projectors.size(); ++i)
    c = src(leaf.times[i], leaf.projectors[i]->m) * c;
  return {c, leaf.projectors[0]->tag};
}

// branch states for every leaf, depth-first so the order matches leaves()
static void branch_states(const HistoryNode& node, const CVec& psi,
                          const HeisenbergSource& src, std::vector<CVec>& out) {
  if (node.is_leaf()) {
    out.push_back(psi);
    return;
  }
  for (size_t i = 0; i < node.children.size(); ++i) {
    CMat ph = src(node.dec->time, node.dec->projectors[i].m);
    branch_states(node.children[i], ph * psi, src, out);
  }
}

DecoherenceMatrix decoherence_matrix(const HistorySet& set, const StateVector& initial,
                                     const HeisenbergSource& src) {
  std::vector<CVec> states;
  branch_states(set.root(), initial.amp, src, states);
  const Eigen::Index h = static_cast<Eigen::Index>(states.size());
  DecoherenceMatrix d;
  d.entries.resize(h, h);
  for (Eigen::Index a = 0; a < h; ++a)
    for (Eigen::Index b = 0; b < h; ++b) d.entries(a, b) = states[b].dot(states[a]);
  d.probabilities = d.entries.diagonal().real();
  return d;
}

std::vector<StateVector> path_states(const HistorySet& set, const StateVector& initial,
                                     const HeisenbergSource& src) {
  std::vector<CVec> states;
  branch_states(set.root(), initial.amp, src, states);
  std::vector<StateVector> out;
  out.reserve(states.size());
  for (CVec& s : states) out.push_back({std::move(s), initial.split});
  return out;
}

ConsistencyReport consistency_check(const DecoherenceMatrix& d, Criterion criterion,
                                    double tol) {
  ConsistencyReport rep{criterion, 0.0, true, tol};
  for (Eigen::Index a = 0; a < d.entries.rows(); ++a)
    for (Eigen::Index b = 0; b < d.entries.cols(); ++b) {
      if (a == b) continue;
      double v = criterion == Criterion::medium ? std::abs(d.entries(a, b))
                                                : std::abs(d.entries(a, b).real());
      rep.max_offdiag = std::max(rep.max_offdiag, v);
    }
  rep.consistent = rep.max_offdiag <= tol;
  return rep;
}

Eigen::VectorXd probabilities(const DecoherenceMatrix& d) { return d.probabilities; }

double shannon_information(const Eigen::VectorXd& p) {
  double e = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 0.0) e -= p(i) * std::log(p(i));
  return e;
}

double il_information_entropy(const HistorySet& set, const DecoherenceMatrix& d,
                              const TensorSplit& split) {
  std::vector<HistorySet::Leaf> ls = set.leaves();
  if (static_cast<Eigen::Index>(ls.size()) != d.probabilities.size())
    throw ConfigError("leaf count does not match the decoherence matrix");
  const double dd = static_cast<double>(split.d());
  double s = 0.0;
  for (size_t a = 0; a < ls.size(); ++a) {
    double p = d.probabilities(a);
    if (p <= 1e-300) continue;
    double log_dhat = 0.0;
    for (int r : ls[a].ranks) {
      if (r == 0)
        throw VerifyError("zero-rank projector on a history with probability " +
                          fmt17(p));
      log_dhat += std::log(static_cast<double>(r) / dd);
    }
    s -= p * (std::log(p) - 2.0 * log_dhat);
  }
  return s;
}

TreeInformation tree_information(const HistorySet& set, const DecoherenceMatrix& d,
                                 double tol) {
  std::vector<double> leaf_p(d.probabilities.data(),
                             d.probabilities.data() + d.probabilities.size());
  TreeInformation info;
  size_t cursor = 0;
  std::function<double(const HistoryNode&)> walk = [&](const HistoryNode& n) -> double {
    if (n.is_leaf()) return leaf_p.at(cursor++);
    size_t slot = info.node_terms.size();
    info.node_terms.push_back(0.0);
    std::vector<double> child_p;
    double total = 0.0;
    for (const auto& ch : n.children) {
      child_p.push_back(walk(ch));
      total += child_p.back();
    }
    double term = 0.0;
    if (total > 0.0)
      for (double q : child_p)
        if (q > 0.0) term -= q * std::log(q / total);
    info.node_terms[slot] = term;
    return total;
  };
  walk(set.root());
  for (double t : info.node_terms) info.total += t;
  Eigen::VectorXd p = d.probabilities;
  info.matches_leaf_shannon = std::abs(info.total - shannon_information(p)) <= tol;
  return info;
}

double env_overlap_max(const std::vector<StateVector>& states) {
  double worst = 0.0;
  for (size_t a = 0; a < states.size(); ++a) {
    CMat ca = states[a].coeff_matrix();
    for (size_t b = 0; b < a; ++b) {
      CMat cb = states[b].coeff_matrix();
      worst = std::max(worst, (ca * cb.adjoint()).squaredNorm());
    }
  }
  return worst;
}

bool env_orthogonality_check(const std::vector<StateVector>& states, double tol) {
  return env_overlap_max(states) <= tol;
}

int nontrivial_count_check(const DecoherenceMatrix& dmat, double p_min, int d) {
  int count = 0;
  for (Eigen::Index i = 0; i < dmat.probabilities.size(); ++i)
    if (dmat.probabilities(i) > p_min) ++count;
  if (count > d)
    throw VerifyError(std::to_string(count) + " nontrivial histories exceed the "
                      "space dimension " + std::to_string(d));
  return count;
}

}  // namespace qhist
