#include "qhist/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace qhist {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void TensorSplit::validate() const {
  if (d1 < 1 || d2 < 1) throw ConfigError("tensor split dimensions must be positive");
  if (d1 > d2) throw ConfigError("system dimension must not exceed environment dimension");
}

void StateVector::check_normalized(double tol) const {
  if (amp.size() != split.d())
    throw ConfigError("state length does not match its split");
  if (std::abs(norm() - 1.0) > tol)
    throw ConfigError("state is not normalized: |norm-1| = " + fmt17(std::abs(norm() - 1.0)));
}

CMat StateVector::coeff_matrix() const {
  CMat c(split.d1, split.d2);
  for (int s = 0; s < split.d1; ++s)
    for (int e = 0; e < split.d2; ++e) c(s, e) = amp(s * split.d2 + e);
  return c;
}

bool DenseOperator::is_projector(double tol) const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol &&
         (m * m - m).cwiseAbs().maxCoeff() <= tol;
}

int DenseOperator::projector_rank() const {
  return static_cast<int>(std::lround(m.trace().real()));
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CVec kron(const CVec& a, const CVec& b) {
  CVec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

DenseOperator tensor_product(const DenseOperator& sys, const DenseOperator& env) {
  if (sys.tag != SpaceTag::system || env.tag != SpaceTag::environment)
    throw ConfigError("tensor_product expects system (x) environment operands");
  return {kron(sys.m, env.m), SpaceTag::total};
}

StateVector tensor_product(const CVec& sys, const CVec& env) {
  StateVector out;
  out.amp = kron(sys, env);
  out.split = {static_cast<int>(sys.size()), static_cast<int>(env.size())};
  return out;
}

DenseOperator identity_op(int dim, SpaceTag tag) {
  return {CMat::Identity(dim, dim), tag};
}

DenseOperator partial_trace_env(const StateVector& state) {
  state.check_normalized();
  CMat c = state.coeff_matrix();
  return {c * c.adjoint(), SpaceTag::system};
}

SchmidtDecomposition schmidt_decompose(const StateVector& state,
                                       double degeneracy_tol, double weight_tol) {
  state.check_normalized();
  const int d1 = state.split.d1;
  CMat c = state.coeff_matrix();
  Eigen::SelfAdjointEigenSolver<CMat> es(c * c.adjoint());
  if (es.info() != Eigen::Success) throw VerifyError("eigendecomposition failed");

  SchmidtDecomposition sd;
  sd.weights.resize(d1);
  sd.system_basis.resize(d1);
  sd.env_basis.resize(d1);
  // Eigen sorts ascending; emit descending
  for (int i = 0; i < d1; ++i) {
    int src = d1 - 1 - i;
    sd.weights(i) = std::max(0.0, es.eigenvalues()(src));
    CVec a = es.eigenvectors().col(src);
    // phase: largest-magnitude component real positive
    int imax = 0;
    for (int r = 1; r < d1; ++r)
      if (std::abs(a(r)) > std::abs(a(imax))) imax = r;
    cxd z = a(imax);
    if (std::abs(z) > 0) a *= std::conj(z) / std::abs(z);
    sd.system_basis[i] = a;
    sd.env_basis[i] = (a.adjoint() * c).adjoint().conjugate();  // row a†C as a column
  }
  // normalize env vectors where the weight allows; complete the rest
  std::vector<int> pending;
  for (int i = 0; i < d1; ++i) {
    double nrm = sd.env_basis[i].norm();
    if (sd.weights(i) > weight_tol && nrm > 0) {
      sd.env_basis[i] /= nrm;
    } else {
      pending.push_back(i);
    }
  }
  // Gram-Schmidt completion for (numerically) zero-weight slots
  const int d2 = state.split.d2;
  for (int idx : pending) {
    CVec v;
    bool ok = false;
    for (int seed = 0; seed < d2 && !ok; ++seed) {
      v = CVec::Zero(d2);
      v(seed) = 1.0;
      for (int j = 0; j < d1; ++j) {
        if (j == idx) continue;
        if (sd.env_basis[j].size() == 0) continue;
        if (std::find(pending.begin(), pending.end(), j) != pending.end() && j > idx) continue;
        v -= (sd.env_basis[j].adjoint() * v)(0) * sd.env_basis[j];
      }
      if (v.norm() > 1e-6) {
        v /= v.norm();
        ok = true;
      }
    }
    if (!ok) throw VerifyError("environment basis completion failed");
    sd.env_basis[idx] = v;
  }

  sd.rank = 0;
  for (int i = 0; i < d1; ++i)
    if (sd.weights(i) > weight_tol) ++sd.rank;
  for (int i = 0; i + 1 < d1; ++i) {
    if (std::abs(sd.weights(i) - sd.weights(i + 1)) < degeneracy_tol) {
      sd.degenerate = true;
      if (sd.degenerate_pair < 0) sd.degenerate_pair = i;
    }
  }
  double wsum = sd.weights.sum();
  if (std::abs(wsum - 1.0) > 1e-12)
    throw VerifyError("Schmidt weights do not sum to 1: " + fmt17(wsum));
  return sd;
}

Eigen::VectorXd schmidt_weights_svd(const StateVector& state) {
  Eigen::JacobiSVD<CMat> svd(state.coeff_matrix());
  Eigen::VectorXd w = svd.singularValues().array().square();
  std::sort(w.data(), w.data() + w.size(), std::greater<double>());
  return w;
}

std::vector<DenseOperator> SchmidtProjectors::decomposition() const {
  std::vector<DenseOperator> out = projectors;
  if (complement.m.size() > 0 && complement.m.cwiseAbs().maxCoeff() > 1e-14)
    out.push_back(complement);
  return out;
}

SchmidtProjectors schmidt_projectors(const SchmidtDecomposition& sd,
                                     const TensorSplit& split, double weight_tol) {
  split.validate();
  if (sd.degenerate_pair >= 0 && sd.weights(sd.degenerate_pair) > weight_tol)
    throw SchmidtDegenerateError(
        "weights " + fmt17(sd.weights(sd.degenerate_pair)) + " and " +
        fmt17(sd.weights(sd.degenerate_pair + 1)) + " collide; projectors ill-defined");
  SchmidtProjectors out;
  CMat sum = CMat::Zero(split.d(), split.d());
  CMat id2 = CMat::Identity(split.d2, split.d2);
  for (int i = 0; i < static_cast<int>(sd.weights.size()); ++i) {
    if (sd.weights(i) <= weight_tol) continue;
    const CVec& a = sd.system_basis[i];
    CMat p1 = a * a.adjoint();
    CMat p = kron(p1, id2);
    sum += p;
    out.projectors.push_back({p, SpaceTag::total});
  }
  out.complement = {CMat::Identity(split.d(), split.d()) - sum, SpaceTag::total};
  return out;
}

}  // namespace qhist
