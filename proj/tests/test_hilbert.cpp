#include <cmath>
#include <complex>

#include "doctest.h"
#include "qhist/hilbert.hpp"
#include "qhist/spinmodel.hpp"
#include "test_support.hpp"

using namespace qhist;
using qhist_test::frozen_config;

namespace {

StateVector random_state(int d1, int d2, std::uint64_t seed) {
  SplitMix64 g(seed);
  auto unif = [&g] { return static_cast<double>(g() >> 11) * 0x1.0p-53 - 0.5; };
  StateVector st;
  st.split = {d1, d2};
  st.amp = CVec(d1 * d2);
  for (int i = 0; i < d1 * d2; ++i) st.amp(i) = cxd(unif(), unif());
  st.amp /= st.amp.norm();
  return st;
}

}  // namespace

TEST_SUITE("hilbert") {

TEST_CASE("kron follows the row-major system-slowest convention") {
  CMat a(2, 2), b(2, 2);
  a << cxd(1, 0), cxd(2, 0), cxd(3, 0), cxd(4, 0);
  b << cxd(0, 1), cxd(0, 0), cxd(0, 0), cxd(0, -1);
  CMat k = kron(a, b);
  REQUIRE(k.rows() == 4);
  CHECK(k(0, 0) == cxd(0, 1));
  CHECK(k(1, 1) == cxd(0, -1));
  CHECK(k(2, 0) == cxd(0, 3));
  CHECK(k(3, 3) == cxd(0, -4));

  CVec x(2), y(2);
  x << cxd(1, 0), cxd(0, 1);
  y << cxd(2, 0), cxd(0, 0);
  CVec xy = kron(x, y);
  CHECK(xy(0) == cxd(2, 0));
  CHECK(xy(2) == cxd(0, 2));
  CHECK(xy(3) == cxd(0, 0));
}

TEST_CASE("tensor products carry tags and refuse mismatched ones") {
  DenseOperator sys = identity_op(2, SpaceTag::system);
  DenseOperator env = identity_op(4, SpaceTag::environment);
  DenseOperator tot = tensor_product(sys, env);
  CHECK(tot.tag == SpaceTag::total);
  CHECK(tot.dim() == 8);
  CHECK((tot.m - CMat::Identity(8, 8)).norm() == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)tensor_product(env, sys), Error);
}

TEST_CASE("coeff_matrix lays amplitudes out as amp(s*d2+e)") {
  StateVector st = random_state(2, 4, 11);
  CMat c = st.coeff_matrix();
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 4);
  for (int s = 0; s < 2; ++s)
    for (int e = 0; e < 4; ++e) CHECK(c(s, e) == st.amp(s * 4 + e));
}

TEST_CASE("partial trace over the environment is a density matrix") {
  StateVector st = random_state(2, 8, 23);
  DenseOperator rho = partial_trace_env(st);
  CHECK(rho.tag == SpaceTag::system);
  REQUIRE(rho.dim() == 2);
  CHECK(std::abs(rho.m.trace().real() - 1.0) < 1e-12);
  CHECK((rho.m - rho.m.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<CMat> es(rho.m);
  CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("product states have Schmidt rank one") {
  CVec s(2), e(4);
  s << cxd(0.6, 0.0), cxd(0.0, 0.8);
  e << cxd(0.5, 0.5), cxd(0.5, -0.5), cxd(0, 0), cxd(0, 0);
  StateVector st = tensor_product(s, e);
  SchmidtDecomposition sd = schmidt_decompose(st);
  CHECK(sd.rank == 1);
  CHECK(sd.weights(0) == doctest::Approx(1.0));
  CHECK(std::abs(sd.weights(1)) < 1e-12);
}

TEST_CASE("schmidt_decompose reconstructs the state and matches the svd route") {
  StateVector st = random_state(2, 8, 37);
  SchmidtDecomposition sd = schmidt_decompose(st);

  CHECK(sd.weights(0) >= sd.weights(1));
  CHECK(std::abs(sd.weights.sum() - 1.0) < 1e-12);

  Eigen::VectorXd sv = schmidt_weights_svd(st);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(sd.weights(i) - sv(i)) < 1e-12);

  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(sd.system_basis[i].norm() - 1.0) < 1e-12);
    CHECK(std::abs(sd.env_basis[i].norm() - 1.0) < 1e-12);
    for (int j = i + 1; j < 2; ++j) {
      CHECK(std::abs(sd.system_basis[i].dot(sd.system_basis[j])) < 1e-12);
      CHECK(std::abs(sd.env_basis[i].dot(sd.env_basis[j])) < 1e-12);
    }
  }

  CVec rebuilt = CVec::Zero(st.amp.size());
  for (int i = 0; i < 2; ++i)
    rebuilt += std::sqrt(sd.weights(i)) * kron(sd.system_basis[i], sd.env_basis[i]);
  CHECK((rebuilt - st.amp).norm() < 1e-10);
}

TEST_CASE("evolved reference state has the frozen Schmidt weights") {
  StateVector st = evolve(frozen_config(), 1.7);
  SchmidtDecomposition sd = schmidt_decompose(st);
  CHECK(std::abs(sd.weights(0) - 0.82685187546814443) < 1e-14);
  CHECK(std::abs(sd.weights(1) - 0.17314812453185552) < 1e-14);
  CHECK_FALSE(sd.degenerate);
  CHECK(sd.rank == 2);
}

TEST_CASE("maximally entangled states are flagged degenerate") {
  StateVector st;
  st.split = {2, 2};
  st.amp = CVec::Zero(4);
  st.amp(0) = st.amp(3) = 1.0 / std::sqrt(2.0);
  SchmidtDecomposition sd = schmidt_decompose(st);
  CHECK(sd.degenerate);
  CHECK(sd.degenerate_pair == 0);
  CHECK_THROWS_AS((void)schmidt_projectors(sd, st.split), SchmidtDegenerateError);
}

TEST_CASE("schmidt projectors decompose the identity") {
  StateVector st = evolve(frozen_config(), 2.37);
  TensorSplit split = st.split;
  SchmidtDecomposition sd = schmidt_decompose(st);
  SchmidtProjectors sp = schmidt_projectors(sd, split);

  REQUIRE(sp.projectors.size() == 2);
  CMat sum = CMat::Zero(split.d(), split.d());
  for (const auto& p : sp.projectors) {
    CHECK(p.is_projector());
    CHECK(p.projector_rank() == split.d2);
    sum += p.m;
  }
  CHECK(sp.complement.m.norm() < 1e-12);
  CHECK((sum - CMat::Identity(split.d(), split.d())).norm() < 1e-10);
  CHECK((sp.projectors[0].m * sp.projectors[1].m).norm() < 1e-10);

  // projector 0 belongs to the larger weight: expectation in the state
  CVec px = sp.projectors[0].m * st.amp;
  CHECK(std::abs(st.amp.dot(px).real() - sd.weights(0)) < 1e-12);
}

TEST_CASE("rank-deficient states keep a complement block") {
  CVec s(2), e(4);
  s << cxd(1, 0), cxd(0, 0);
  e << cxd(0, 0), cxd(1, 0), cxd(0, 0), cxd(0, 0);
  StateVector st = tensor_product(s, e);
  SchmidtProjectors sp = schmidt_projectors(schmidt_decompose(st), st.split);
  REQUIRE(sp.projectors.size() == 1);
  CHECK(sp.complement.projector_rank() == 4);
  auto dec = sp.decomposition();
  CHECK(dec.size() == 2);
  CMat sum = dec[0].m + dec[1].m;
  CHECK((sum - CMat::Identity(8, 8)).norm() < 1e-10);
}

TEST_CASE("is_projector rejects near misses") {
  DenseOperator half;
  half.m = 0.5 * CMat::Identity(4, 4);
  half.tag = SpaceTag::total;
  CHECK_FALSE(half.is_projector());
  CHECK(identity_op(4, SpaceTag::total).is_projector());
}

}  // TEST_SUITE
