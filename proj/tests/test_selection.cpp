#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "qhist/selection.hpp"
#include "test_support.hpp"

using namespace qhist;
using qhist_test::frozen_config;
using qhist_test::near_degenerate_config;

TEST_SUITE("selection") {

TEST_CASE("binary information function") {
  CHECK(std::abs(f_info(0.0) - std::log(2.0)) < 1e-15);
  CHECK(f_info(1.0) == 0.0);
  CHECK(f_info(-1.0) == 0.0);
  CHECK(f_info(0.37) == f_info(-0.37));
  double h = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  CHECK(std::abs(f_info(0.5) - h) < 1e-15);
  CHECK(f_info(0.2) < std::log(2.0));
}

TEST_CASE("interior optimum matches the closed form on the reference model") {
  SpinModelConfig cfg = frozen_config();
  CHECK(std::abs(closed_form_Ek(cfg, 3) - 1.8320468287410978) < 1e-14);

  InteriorOptimum opt = optimal_interior_time(cfg, 3);
  CHECK(std::abs(opt.E_k - closed_form_Ek(cfg, 3)) < 1e-9);
  // the maximum is flat, so the argmax itself is only good to ~sqrt(eps)
  CHECK(std::abs(opt.t_star - 2.7523594860350244) < 1e-6);
  double n2 = axis_norm_N(cfg, 3, opt.omega_star);
  CHECK(std::abs(n2 * n2 - std::abs(cfg.c(3))) < 1e-6);
  CHECK(std::abs(set_information(cfg, 3, opt.t_star) - opt.E_k) < 1e-12);

  // closed-form expansion in the chain dots
  double byhand = 2 * f_info(std::sqrt(std::abs(cfg.c(3)))) + f_info(cfg.c(1)) +
                  f_info(cfg.c(2));
  CHECK(std::abs(closed_form_Ek(cfg, 3) - byhand) < 1e-15);
}

TEST_CASE("set_information drops when the interior time leaves the optimum") {
  SpinModelConfig cfg = frozen_config();
  InteriorOptimum opt = optimal_interior_time(cfg, 2);
  CHECK(set_information(cfg, 2, opt.t_star) > set_information(cfg, 2, 1.2) + 1e-6);
  CHECK(set_information(cfg, 2, opt.t_star) > set_information(cfg, 2, 1.95) + 1e-6);
}

TEST_CASE("max_info_select picks the last interaction on the reference model") {
  SpinModelConfig cfg = frozen_config();
  SelectionResult res = max_info_select(cfg);
  CHECK(res.chosen_k == 3);
  CHECK(std::abs(res.information - 1.8320468287410978) < 1e-9);
  CHECK(res.ties == std::vector<int>{3});
  REQUIRE(res.E_values.size() == 3);
  CHECK(res.E_values[0] < res.E_values[1]);
  CHECK(res.E_values[1] < res.E_values[2]);

  SelectionResult closed = max_info_select(cfg, SelectRoute::closed_form);
  CHECK(closed.chosen_k == res.chosen_k);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(closed.E_values[i] - res.E_values[i]) < 1e-9);
}

TEST_CASE("both selection routes agree on random models") {
  SplitMix64 rng(606);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + static_cast<int>(rng() % 3ull);
    SpinModelConfig cfg = random_generic_config(n, rng);
    SelectionResult a = max_info_select(cfg, SelectRoute::maximize);
    SelectionResult b = max_info_select(cfg, SelectRoute::closed_form);
    CHECK(a.chosen_k == b.chosen_k);
    CHECK(std::abs(a.information - b.information) < 1e-9);
    for (int k = 1; k <= n; ++k) {
      CHECK(std::abs(a.E_values[k - 1] - closed_form_Ek(cfg, k)) < 1e-9);
      double om = theta_k(k, a.t_values[k - 1]);
      double nk = axis_norm_N(cfg, k, om);
      CHECK(std::abs(nk * nk - std::abs(cfg.c(k))) < 1e-6);
    }
  }
}

TEST_CASE("near-degenerate chains steer the choice") {
  // c_k = eps makes interaction k the information-rich one
  SpinModelConfig sharp = near_degenerate_config(4, 2, 1e-3);
  SelectionResult res = max_info_select(sharp);
  CHECK(res.chosen_k == 2);
  CHECK(std::abs(res.E_values[1] - 2 * std::log(2.0)) < 0.02);
  CHECK(res.E_values[0] < 0.05);
  CHECK(std::abs(res.E_values[2] - std::log(2.0)) < 0.05);
  CHECK(std::abs(res.E_values[3] - std::log(2.0)) < 0.05);

  // a nearly measured first spin pins the choice to k = 1
  SpinModelConfig first = near_degenerate_config(4, 1, 0.0);
  first.v = Vec3(0.0, 0.0, 1.0);
  {
    // rebuild with dots (0.1, 1-1e-4, 1-1e-4, 1-1e-4)
    first.u.clear();
    double phi = std::acos(0.1);
    first.u.push_back(Vec3(std::sin(phi), 0.0, std::cos(phi)));
    for (int j = 2; j <= 4; ++j) {
      phi += std::acos(1.0 - 1e-4);
      first.u.push_back(Vec3(std::sin(phi), 0.0, std::cos(phi)));
    }
  }
  SelectionResult r1 = max_info_select(first);
  CHECK(r1.chosen_k == 1);
  CHECK(std::abs(r1.E_values[0] - 2 * f_info(std::sqrt(0.1))) < 1e-12);
}

TEST_CASE("montecarlo statistics are seeded and thread-count independent") {
  MonteCarloReport a = montecarlo_stats(3, 5000, 99, 1);
  MonteCarloReport b = montecarlo_stats(3, 5000, 99, 3);
  CHECK(a.counts == b.counts);
  long long total = 0;
  for (long long c : a.counts) total += c;
  CHECK(total == 5000);
  CHECK(a.fraction_by_k.size() == 3);
  CHECK(std::abs(a.fraction_by_k[0] + a.fraction_by_k[1] + a.fraction_by_k[2] - 1.0) <
        1e-12);

  MonteCarloReport c = montecarlo_stats(3, 5000, 99, 2);
  CHECK(c.counts == a.counts);
  MonteCarloReport other = montecarlo_stats(3, 5000, 100, 1);
  CHECK(other.counts != a.counts);
}

TEST_CASE("montecarlo fractions land in the expected band") {
  MonteCarloReport rep = montecarlo_stats(3, 40000, 20240817, 0);
  CHECK(rep.fraction_Sn > 0.82);
  CHECK(rep.fraction_Sn < 0.86);
  CHECK(rep.stderr_Sn > 0.0);
  CHECK(rep.stderr_Sn < 0.01);
  CHECK(rep.n == 3);
  CHECK(rep.samples == 40000);
}

TEST_CASE("entropy minimization lands on the full-length set") {
  SpinModelConfig cfg = frozen_config();
  ILResult res = min_il_select(cfg);
  CHECK(res.minimizer.m == 4);
  CHECK(res.minimizer.k == 3);
  CHECK(res.minimizer.has_final);
  CHECK(res.minimizer.between == std::vector<int>{1, 2});
  CHECK(std::abs(res.minimizer.s_prime - -4.2429944171049812) < 1e-12);
  CHECK(std::abs(res.s_second - -4.2326470090234825) < 1e-12);
  REQUIRE(res.minimizer.times.size() == 4);
  CHECK(res.minimizer.times[0] == 1.0);
  CHECK(res.minimizer.times[1] == 2.0);
  CHECK(std::abs(res.minimizer.times[2] - 2.0294117647058822) < 1e-12);
  CHECK(res.minimizer.times[3] == 3.0);

  REQUIRE(res.terms.size() == 4);
  for (double term : res.terms) CHECK(term < 0.0);
  double sum = 0.0;
  for (double term : res.terms) sum += term;
  CHECK(std::abs(sum - res.minimizer.s_prime) < 1e-12);

  // every shorter set does strictly worse
  for (int m = 1; m <= 3; ++m) {
    REQUIRE(res.best_by_m[m - 1].m == m);
    CHECK(res.best_by_m[m - 1].s_prime > res.minimizer.s_prime + 1e-3);
  }
  // the interior angle hugs an endpoint of the scanned grid
  double step = (kPi / 2) / 34.0;
  double omega = res.minimizer.omega;
  CHECK(std::min(omega, kPi / 2 - omega) < step * 1.000001);
}

TEST_CASE("entropy minimization verifies structure on random models") {
  SplitMix64 rng(515);
  for (int rep = 0; rep < 9; ++rep) {
    int n = 2 + rep % 3;
    SpinModelConfig cfg = random_generic_config(n, rng);
    ILResult res = min_il_select(cfg);
    CHECK(res.minimizer.m == n + 1);
    CHECK(res.minimizer.k == n);
    CHECK(static_cast<int>(res.minimizer.between.size()) == n - 1);
    for (double term : res.terms) CHECK(term < 0.0);
    CHECK(res.s_second > res.minimizer.s_prime);
  }
}

TEST_CASE("the selected set admits no further schmidt projection") {
  SpinModelConfig cfg = frozen_config();
  SelectionResult sel = max_info_select(cfg);
  ExtendabilityReport rep =
      check_nonextendable(cfg, sel.chosen_k, sel.optimal_t, 12);
  CHECK(rep.nonextendable);
  CHECK(rep.extendable_times.empty());
}

TEST_CASE("grid brute force recovers the closed-form optimum when offered it") {
  SplitMix64 rng(808);
  SpinModelConfig cfg = random_generic_config(2, rng);
  InteriorOptimum opt = optimal_interior_time(cfg, 2);
  std::vector<double> grid = {1.0, opt.t_star, 2.0};
  BruteSelection brute = brute_best_consistent_set(cfg, grid);
  CHECK(brute.times == grid);
  CHECK(std::abs(brute.information - closed_form_Ek(cfg, 2)) < 1e-9);
  CHECK(brute.sets_tried == 7);
  CHECK(brute.consistent_sets >= 5);

  // an off-optimum interior grid never beats the selected information
  std::vector<double> coarse = {0.5, 1.0, 1.5, 2.0};
  BruteSelection rough = brute_best_consistent_set(cfg, coarse);
  SelectionResult sel = max_info_select(cfg);
  CHECK(rough.information <= sel.information + 1e-9);
}

}  // TEST_SUITE
