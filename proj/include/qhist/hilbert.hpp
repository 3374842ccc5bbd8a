#pragma once

#include <vector>

#include "qhist/common.hpp"

namespace qhist {

struct TensorSplit {
  int d1 = 1;  // system dimension
  int d2 = 1;  // environment dimension
  int d() const { return d1 * d2; }
  void validate() const;  // d1 >= 1, d2 >= 1, d1 <= d2
};

enum class SpaceTag { system, environment, total };

// basis index convention: row-major with the system index slowest,
// amp(s*d2 + e) = <s,e|psi>
struct StateVector {
  CVec amp;
  TensorSplit split;
  double norm() const { return amp.norm(); }
  void check_normalized(double tol = 1e-12) const;
  // d1 x d2 coefficient matrix C with C(s,e) = amp(s*d2+e)
  CMat coeff_matrix() const;
};

struct DenseOperator {
  CMat m;
  SpaceTag tag = SpaceTag::total;
  int dim() const { return static_cast<int>(m.rows()); }
  bool is_projector(double tol = 1e-10) const;
  int projector_rank() const;  // round(Re tr)
};

struct SchmidtDecomposition {
  Eigen::VectorXd weights;         // descending, length d1
  std::vector<CVec> system_basis;  // length d1, vectors of dim d1
  std::vector<CVec> env_basis;     // length d1, vectors of dim d2
  bool degenerate = false;
  int degenerate_pair = -1;  // first adjacent colliding index, -1 if none
  int rank = 0;              // weights above weight_tol
};

struct SchmidtProjectors {
  std::vector<DenseOperator> projectors;  // one per kept weight, total space
  DenseOperator complement;               // I - sum, may be zero
  // the full projective decomposition (projectors, then complement if nonzero)
  std::vector<DenseOperator> decomposition() const;
};

CMat kron(const CMat& a, const CMat& b);
CVec kron(const CVec& a, const CVec& b);

// system (d1) x environment (d2) -> total; other tag combinations are refused
DenseOperator tensor_product(const DenseOperator& sys, const DenseOperator& env);
StateVector tensor_product(const CVec& sys, const CVec& env);

DenseOperator identity_op(int dim, SpaceTag tag);

// Tr_E |psi><psi|, a d1 x d1 system operator
DenseOperator partial_trace_env(const StateVector& state);

SchmidtDecomposition schmidt_decompose(const StateVector& state,
                                       double degeneracy_tol = 1e-9,
                                       double weight_tol = 1e-12);

// independent weight route (singular values squared), used as a self-test
Eigen::VectorXd schmidt_weights_svd(const StateVector& state);

SchmidtProjectors schmidt_projectors(const SchmidtDecomposition& sd,
                                     const TensorSplit& split,
                                     double weight_tol = 1e-12);

}  // namespace qhist
