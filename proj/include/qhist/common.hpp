#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhist {

using cxd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// error taxonomy; the CLI maps these onto exit codes
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};
// bad user input: malformed config, out-of-range parameters  (exit 1)
struct ConfigError : Error {
  using Error::Error;
};
// a cross-check or asserted postcondition failed  (exit 2)
struct VerifyError : Error {
  using Error::Error;
};
// numerical degeneracy: colliding Schmidt weights, vanishing axis,
// genericity violation  (exit 3)
struct DegeneracyError : Error {
  using Error::Error;
};
struct SchmidtDegenerateError : DegeneracyError {
  explicit SchmidtDegenerateError(const std::string& msg)
      : DegeneracyError("SchmidtDegenerate: " + msg) {}
};
struct DegenerateAxisError : DegeneracyError {
  explicit DegenerateAxisError(const std::string& msg)
      : DegeneracyError("DegenerateAxis: " + msg) {}
};
struct NotClassifiedError : Error {
  explicit NotClassifiedError(const std::string& msg)
      : Error("NotClassified: " + msg) {}
};

enum class Criterion { medium, weak };

struct Tolerances {
  double consistency = 1e-10;  // off-diagonal magnitude for "exact" consistency
  double genericity = 1e-6;    // margin on dot / cross / triple products
  double degeneracy = 1e-9;    // adjacent Schmidt-weight gap
  double weight = 1e-12;       // weights below this are dropped into the complement
  double p_min = 1e-12;        // nontriviality threshold on probabilities
  double tie = 1e-10;          // information ties
  double axis = 1e-12;         // smallest usable axis norm N(t)
};

// counter-based 64-bit generator: cheap to seed, so every Monte Carlo sample
// gets its own stream derived from (seed, sample index) and results do not
// depend on the thread partition
struct SplitMix64 {
  using result_type = std::uint64_t;
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t s) : state(s) {}
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
  std::uint64_t operator()() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (b * 0x9e3779b97f4a7c15ull));
  g();
  return g();
}

// all file output uses 17 significant digits so doubles round-trip exactly
std::string fmt17(double x);

}  // namespace qhist
