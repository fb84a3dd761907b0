#pragma once

// Closed-form curvature of the model families.
//
// Every supported family is a warped product over a 1- or 2-dimensional base
// with round-sphere fibers, and in the adapted orthonormal frame its curvature
// tensor is diagonal on coordinate 2-planes. The whole module reduces to the
// pair-curvature matrix K(a,b) of frame directions plus the quadratic form
//   R(v,w,w,v) = sum_{a<b} K(a,b) (v_a w_b - v_b w_a)^2.

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "spn/geometry.hpp"

namespace spn {

// Curvatures of the coordinate 2-planes of dr^2 + omega^2 dt^2 + beta^2 ds_n^2:
//   K_rt = -omega_rr / omega          K_ri = -beta_rr / beta
//   K_ti = -omega_r beta_r / (omega beta)   K_ij = (1 - beta_r^2) / beta^2
struct SectionalTable {
  double K_rt = 0, K_ri = 0, K_ti = 0, K_ij = 0;
};

struct CurvatureReport {
  ModelPoint point;
  int p = 0;
  double s_value = 0;
  PlaneComplement plane;
  std::optional<double> oracle_residual;
  bool verified = false;
};

// Pair curvatures of the orthonormal frame at a point. Evaluation at a closed
// axis end substitutes the curvature limits.
class PairCurvatures {
public:
  static PairCurvatures at(const MetricModel& model, const ModelPoint& x);

  int dim() const { return static_cast<int>(K_.rows()); }
  const FrameLayout& layout() const { return layout_; }
  double pair(int a, int b) const { return K_(a, b); }

  // R(v,w,w,v) for frame-component vectors.
  double quad_form(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
  // K(v,w) = R(v,w,w,v) / |v wedge w|^2. Throws DegeneratePair.
  double sectional(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const;
  // Ordered-pair sum over the orthonormal columns of the complement basis.
  double s_sum(const Eigen::MatrixXd& complement_basis) const;

private:
  FrameLayout layout_;
  Eigen::MatrixXd K_;
};

// Distance from a closed end below which closed forms are 0/0 and callers
// must use limit_at_axis instead. Scales with the local curvature radius.
double axis_epsilon(const MetricModel& model);

// The four coordinate-plane curvatures at an interior point (WarpedLine models
// report K_rt = K_ti = 0). Throws AxisSingularity within axis_epsilon of a
// closed end.
SectionalTable base_sectionals(const MetricModel& model, const ModelPoint& x);

// R(v,w,w,v) for tangent vectors in the orthonormal frame. Zero when w is a
// multiple of v. Throws AxisSingularity as above.
double riemann_quadform(const MetricModel& model, const ModelPoint& x, const TangentVector& v,
                        const TangentVector& w);

// s_{p,n}(x, P) = sum over ordered pairs of an orthonormal basis of P-perp.
// Basis-independent; p is implied by the complement size.
double s_pn(const MetricModel& model, const ModelPoint& x, const PlaneComplement& complement);

// Coordinate-pair curvature table of a multiply warped line:
// line_block(b) = -rho_b''/rho_b, block_block(b,b) = (1-rho_b'^2)/rho_b^2,
// block_block(a,b) = -rho_a' rho_b' / (rho_a rho_b).
struct MultiplyWarpedTable {
  Eigen::VectorXd line_block;
  Eigen::MatrixXd block_block;
};
MultiplyWarpedTable multiply_warped_sectionals(const MetricModel& model, const ModelPoint& x);

// The common r -> 0 (or r -> rmax) limit of every sectional curvature of a
// model closing smoothly at that end: -beta'''/beta' there. Throws NotClosed
// unless beta = 0 and |beta'| = 1 at the end.
double limit_at_axis(const MetricModel& model, bool at_rmax = false);

// ---------------------------------------------------------------------------
// Case evaluators for dr^2 + omega^2 dt^2 + beta^2 ds_n^2
// ---------------------------------------------------------------------------
//
// The complement of a p-plane contains n-p directions tangent to the fiber;
// the remaining one or two basis vectors project to a 0-, 1-, or 2-dimensional
// fiber subspace (cases 1, 2, 3). The vectors live in the orthonormal frame
// with at most two fiber slots (k and k+1).

struct CasePlaneParams {
  int p = 0;
  std::optional<TangentVector> v;  // absent for case 1 (v = d_r, w = d_t/omega)
  std::optional<TangentVector> w;
};

double s_pn_case(const MetricModel& model, const ModelPoint& x, int case_id,
                 const CasePlaneParams& params);

// CSV of curvature-vs-r curves at fixed t: columns r, K_rt, K_ri, K_ti, K_ij.
void dump_sectionals_csv(const MetricModel& model, double t, const std::string& path,
                         int samples = 512);

}  // namespace spn
