#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qhist/selection.hpp"

namespace qhist {

struct RunParams {
  long long samples = 1000000;
  std::uint64_t seed = 20240817;
  int grid = 25;
  int omega_grid = 33;
  int threads = 0;      // 0: QHIST_THREADS, then hardware concurrency
  int max_times = -1;   // -1: n + 2
  bool use_brute = false;
  std::string criterion = "medium";
  std::string format = "csv";  // csv or jsonl
  std::string output;          // empty: stdout
  std::vector<double> times;
  std::optional<double> t;
  std::optional<double> s;
};

// experiment description parsed from a dotted-key config file, e.g.
//   model.n = 3
//   model.v = 0.6 0.48 0.64
//   model.u1 = 0.8 0.36 0.48
//   tolerances.consistency = 1e-10
//   run.samples = 1000000
struct ExperimentConfig {
  int n = 0;  // may stay 0 when the u-list fixes it
  std::optional<Vec3> v;
  std::vector<std::optional<Vec3>> u;
  std::optional<std::uint64_t> model_seed;  // draw a random generic model
  Tolerances tol;
  RunParams run;

  int model_n() const;
  SpinModelConfig build_model() const;
};

ExperimentConfig parse_config_file(const std::string& path);
void parse_config_text(ExperimentConfig& cfg, std::istream& in,
                       const std::string& origin);
// one "key = value" override, same keys as the file
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// subcommand drivers; rows go to out in cfg.run.format
int run_schmidt(const ExperimentConfig& cfg, std::ostream& out);
int run_evolve(const ExperimentConfig& cfg, std::ostream& out);
int run_dmatrix(const ExperimentConfig& cfg, std::ostream& out);
int run_classify(const ExperimentConfig& cfg, std::ostream& out);
int run_select(const ExperimentConfig& cfg, std::ostream& out);
int run_montecarlo(const ExperimentConfig& cfg, std::ostream& out);
int run_compare_il(const ExperimentConfig& cfg, std::ostream& out);
// reduced-scale oracle and invariant suite; throws on any failure
int run_verify(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace qhist
