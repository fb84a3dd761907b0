#pragma once

// Independent ground truth: explicit coordinate charts for every model family,
// Christoffel symbols and the Riemann tensor by central finite differences,
// and residual reports comparing the closed forms against them.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "spn/curvature.hpp"
#include "spn/geometry.hpp"

namespace spn {

struct ChartMetric {
  int dim = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> components;
  Eigen::VectorXd box_lo, box_hi;
};

// Chart margin that keeps nested spherical coordinates away from their poles.
constexpr double kChartEpsilon = 1e-2;

// Explicit chart of a (non-assembly) model: coordinates
// [base coords..., block angles...], diagonal metric with round-sphere chart
// factors sin^2(theta_1)..., scaled by the squared fiber radii.
ChartMetric chart_of(const MetricModel& model);

// 3-index array Gamma[k](i,j), symmetric in (i,j), from central differences of
// the metric components. Throws StencilOutOfDomain if the h-ball leaves the box.
std::vector<Eigen::MatrixXd> fd_christoffel(const ChartMetric& chart, const Eigen::VectorXd& x,
                                            double h);

// Flat 4-index array R^l_{ijk} = (R(d_i, d_j) d_k)^l.
struct Riemann4 {
  int d = 0;
  std::vector<double> v;
  double at(int l, int i, int j, int k) const { return v[((l * d + i) * d + j) * d + k]; }
  double& at(int l, int i, int j, int k) { return v[((l * d + i) * d + j) * d + k]; }
};

Riemann4 fd_riemann(const ChartMetric& chart, const Eigen::VectorXd& x, double h);

// Sectional curvature K = R(v,w,w,v) / |v wedge w|_g^2 for coordinate-frame
// vectors. Throws DegeneratePair for dependent pairs.
double fd_sectional(const ChartMetric& chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& w, double h);

// Worst symmetry violation of the lowered tensor: R_ijkl + R_jikl,
// R_ijkl + R_ijlk, R_ijkl - R_klij, and the first Bianchi sum.
struct TensorResiduals {
  double symmetry = 0;
  double bianchi = 0;
};
TensorResiduals riemann_residuals(const ChartMetric& chart, const Eigen::VectorXd& x, double h);

// ---------------------------------------------------------------------------
// Cross-checks
// ---------------------------------------------------------------------------

struct CrosscheckSample {
  ModelPoint point;
  double closed_form = 0;
  double oracle = 0;
  double residual = 0;
};

struct CrosscheckReport {
  std::string model_id;
  double h = 0;
  double max_residual = 0;
  double tol = 0;
  bool pass = false;
  std::vector<CrosscheckSample> samples;

  std::string text() const;
  void write_csv(const std::string& path) const;
};

// Compares closed-form sectional curvature with the finite-difference oracle
// on `samples` random generic (point, plane) draws. Assemblies are checked
// region by region (worst case reported).
CrosscheckReport crosscheck(const MetricModel& model, int samples, double h, double tol,
                            std::uint64_t seed);

// Draws a random chart-generic point of the model (fiber angles away from
// poles, base coordinates inside the box, radii away from degeneracies).
Eigen::VectorXd random_chart_point(const MetricModel& model, const ChartMetric& chart, Rng& rng);

// Fills the oracle residual of a curvature report in place.
CurvatureReport report_with_oracle(const MetricModel& model, const ModelPoint& x,
                                   const PlaneComplement& complement, double h, double tol);

}  // namespace spn
