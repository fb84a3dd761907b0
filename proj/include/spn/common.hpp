#pragma once

// Shared error type and small numeric utilities for the s_{p,n} toolkit.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace spn {

enum class Err {
  DegenerateInput,
  InvalidP,
  InvalidL,
  InvalidParams,
  DomainError,
  QuadratureFailure,
  SlopeViolation,
  LambdaTooSmall,
  AxisSingularity,
  NotClosed,
  DimensionMismatch,
  CaseMismatch,
  StencilOutOfDomain,
  DegeneratePair,
  UnsupportedModel,
  InterfaceMismatch,
  SearchExhausted,
  ConfigError,
};

class Error : public std::runtime_error {
public:
  Error(Err code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Err code() const { return code_; }

private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) { throw Error(code, what); }

// ---------------------------------------------------------------------------
// Numerics
// ---------------------------------------------------------------------------

// Adaptive Simpson quadrature. Classic bisection recursion with the 1/15
// Richardson error estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 50);

// Composite Simpson with a fixed number of panels (panels must be even).
double composite_simpson(const std::function<double(double)>& f, double a, double b,
                         std::int64_t panels);

// Cubic Hermite interpolation table: values and exact derivatives at uniform
// knots on [lo, hi]. Evaluation is O(1).
class HermiteTable {
public:
  HermiteTable() = default;
  HermiteTable(double lo, double hi, std::vector<double> values, std::vector<double> derivs);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double operator()(double x) const;

private:
  double lo_ = 0, hi_ = 1, dx_ = 1;
  std::vector<double> v_, d_;
};

// Deterministic splitmix64, used to derive independent per-task seeds.
inline std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Hand-rolled generator (splitmix64 stream + Box-Muller) so seeded draws are
// bit-identical across standard libraries and thread counts.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * kTwoPi_ * 0.5 * u2);
    have_spare_ = true;
    return mag * std::cos(2.0 * kTwoPi_ * 0.5 * u2);
  }

private:
  static constexpr double kTwoPi_ = 6.28318530717958647692;
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0;
};

// Index-parallel map with a deterministic, index-ordered result vector.
// nthreads <= 1 runs inline; results are identical either way.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int nthreads);

// Process-wide default worker count (CLI --threads sets this).
int default_threads();
void set_default_threads(int n);

constexpr double kPi = 3.14159265358979323846;

}  // namespace spn
