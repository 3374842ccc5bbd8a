#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qhist/spinmodel.hpp"

namespace qhist {

// one projective decomposition applied at a fixed time, given in the
// Schrodinger picture; projectors must be orthogonal and sum to identity
struct TimedDecomposition {
  double time = 0.0;
  std::vector<DenseOperator> projectors;
  void validate(double tol = 1e-10) const;
};

struct HistoryNode {
  std::optional<TimedDecomposition> dec;  // absent for a leaf
  std::vector<HistoryNode> children;      // one per projector when dec is set
  bool is_leaf() const { return !dec.has_value(); }
};

// branch-dependent set of histories: every tree node may carry its own
// decomposition, as long as times strictly increase along each path
class HistorySet {
 public:
  struct Leaf {
    std::vector<int> alpha;                        // child indices, root first
    std::vector<double> times;
    std::vector<const DenseOperator*> projectors;  // borrowed from the tree
    std::vector<int> ranks;
  };

  HistorySet() = default;

  // the same decomposition sequence on every branch.  Child order follows
  // projector order, so with [P_plus, P_minus] pairs the leaf index has the
  // earliest projection as its most significant bit and 0 meaning '+'.
  static HistorySet chain(std::vector<TimedDecomposition> decs);

  HistoryNode& root() { return root_; }
  const HistoryNode& root() const { return root_; }

  // refine the leaf reached by alpha_path with a further decomposition,
  // which must be later than every time already on that path
  void extend_leaf(const std::vector<int>& alpha_path, TimedDecomposition dec);

  std::vector<Leaf> leaves() const;  // depth-first, child 0 first
  size_t num_leaves() const;
  void validate(double tol = 1e-10) const;

 private:
  HistoryNode root_;
};

// maps a Schrodinger operator at time t to the Heisenberg picture U^+(t) P U(t)
using HeisenbergSource = std::function<CMat(double, const CMat&)>;

// Heisenberg source for the spin model, caching the dense unitary per time
HeisenbergSource heisenberg_source(const SpinModelConfig& cfg);

// Schmidt decomposition of the evolved state packaged for history building
TimedDecomposition schmidt_timed_decomposition(const SpinModelConfig& cfg, double t,
                                               double degeneracy_tol = 1e-9,
                                               double weight_tol = 1e-12);

// chain product of Heisenberg projectors, latest leftmost
DenseOperator class_operator(const HistorySet::Leaf& leaf, const HeisenbergSource& src);

struct DecoherenceMatrix {
  CMat entries;                   // D(a,b) = <psi_b|psi_a>, leaf order
  Eigen::VectorXd probabilities;  // real diagonal
};

// D built from branch states psi_alpha = P_H(t_m)...P_H(t_1) |psi_0>
DecoherenceMatrix decoherence_matrix(const HistorySet& set, const StateVector& initial,
                                     const HeisenbergSource& src);

// unnormalized branch states, one per leaf in leaf order
std::vector<StateVector> path_states(const HistorySet& set, const StateVector& initial,
                                     const HeisenbergSource& src);

struct ConsistencyReport {
  Criterion criterion = Criterion::medium;
  double max_offdiag = 0.0;  // |D_ab| (medium) or |Re D_ab| (weak), a != b
  bool consistent = true;
  double tol = 0.0;
};
ConsistencyReport consistency_check(const DecoherenceMatrix& d, Criterion criterion,
                                    double tol = 1e-10);

Eigen::VectorXd probabilities(const DecoherenceMatrix& d);

// -sum p ln p in nats, zero terms skipped
double shannon_information(const Eigen::VectorXd& p);

// entropy against the history dimensions: -sum_a p_a ln(p_a / dhat_a^2)
// with dhat_a = prod_i rank(P_i)/d.  More negative is better; every
// projective refinement that stays consistent lowers it.
double il_information_entropy(const HistorySet& set, const DecoherenceMatrix& d,
                              const TensorSplit& split);

struct TreeInformation {
  double total = 0.0;
  std::vector<double> node_terms;  // internal nodes, depth-first
  bool matches_leaf_shannon = true;
};
// chain-rule split of the leaf Shannon information over tree nodes:
// total = sum over internal nodes of p_node * H(branching at node)
TreeInformation tree_information(const HistorySet& set, const DecoherenceMatrix& d,
                                 double tol = 1e-12);

// largest pairwise environment overlap |C_a C_b^+|_F^2 between normalized
// branch states; zero exactly when environment traces are orthogonal
double env_overlap_max(const std::vector<StateVector>& states);
bool env_orthogonality_check(const std::vector<StateVector>& states,
                             double tol = 1e-10);

// number of histories above p_min; throws if it exceeds the space dimension d
int nontrivial_count_check(const DecoherenceMatrix& dmat, double p_min, int d);

}  // namespace qhist
