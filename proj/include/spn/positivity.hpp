#pragma once

// Certification of s_{p,n} positivity by minimizing over the Grassmann bundle
// on a parameter grid. Two search strategies run by default and must agree:
// a structured search exploiting fiber rotational symmetry (driven by the
// case evaluators on singly/doubly warped models) and projected gradient
// descent on the full Stiefel parametrisation with random restarts.

#include <functional>
#include <string>
#include <vector>

#include "spn/curvature.hpp"
#include "spn/geometry.hpp"

namespace spn {

enum class Verdict { Positive, Nonpositive, Inconclusive };
enum class Strategy { Structured, RandomRestart, Both };

std::string to_string(Verdict v);
std::string to_string(Strategy s);

struct GridSpec {
  int n1 = 64;  // radial / line samples
  int n2 = 32;  // secondary base samples (2-D bases)
  int restarts = 16;
};

struct PointMinimum {
  ModelPoint point;
  double min_value = 0;
};

struct PositivityCertificate {
  std::string model_id;
  int p = 0;
  GridSpec grid;
  double min_value = 0;
  ModelPoint argmin_point;
  PlaneComplement argmin_plane;
  Strategy strategy = Strategy::Both;
  double tolerance = 1e-7;
  Verdict verdict = Verdict::Inconclusive;
  std::uint64_t seed = 0;
  double strategy_gap = 0;  // worst |structured - random-restart| over the grid
  std::vector<PointMinimum> per_point;
  std::vector<PositivityCertificate> region_certificates;  // assemblies only

  std::string text() const;
  void write_csv(const std::string& path) const;
  int exit_code() const;  // 0 positive, 1 nonpositive, 2 inconclusive
};

// Minimum of s_{p,n} over p-planes at a fixed point; returns the value and an
// explicit complement attaining it (so the certified minimum is always an
// upper bound on the true minimum).
std::pair<double, PlaneComplement> min_over_grassmann(const MetricModel& model,
                                                      const ModelPoint& x, int p,
                                                      Strategy strategy, std::uint64_t seed);

// Grid x Grassmannian certificate. Deterministic for a fixed seed; grid points
// run in parallel with an index-ordered reduction. Assemblies certify each
// region and combine the worst case.
PositivityCertificate certify(const MetricModel& model, int p, const GridSpec& grid,
                              double tolerance, std::uint64_t seed,
                              Strategy strategy = Strategy::Both);

// Re-evaluates the stored argmin; used by the certificate invariant tests.
double reevaluate_argmin(const MetricModel& model, const PositivityCertificate& cert);

// For a product of m unit spheres of total dimension n, returns n - m and
// verifies by certification that p = n-m-1 is positive and (for m >= 2)
// p = n-m is not.
int sphere_product_threshold(const std::vector<int>& dims);

// Certified minima of model(delta) for a decreasing list of deltas; checks the
// 1/delta^2 trend min(delta_next) >= (delta/delta_next)^2 / 2 * min(delta).
struct DeltaScalingRow {
  double delta = 0;
  double min_value = 0;
  bool ratio_ok = true;  // trend versus the previous row
};
std::vector<DeltaScalingRow> delta_scaling_probe(
    const std::function<MetricModel(double)>& family, int p, const std::vector<double>& deltas,
    const GridSpec& grid, double tolerance, std::uint64_t seed);

}  // namespace spn
