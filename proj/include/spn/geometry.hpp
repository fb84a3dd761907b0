#pragma once

// Points, frames, plane complements, and metric-model descriptors shared by
// the curvature, oracle, and certification modules.
//
// Frame convention: all tangent data is expressed in the orthonormal frame
// {d_r, d_t/omega, fiber directions / radius}, so Euclidean components equal
// g-components. Conversion to coordinate frames happens only inside the
// finite-difference oracle.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "spn/common.hpp"
#include "spn/profiles.hpp"

namespace spn {

struct ModelPoint {
  double r = 0;                      // radial / line coordinate
  double t = 0;                      // secondary base coordinate (2-D bases)
  std::vector<double> fiber_angles;  // chart angles, used by the oracle only
};

struct TangentVector {
  double comp_r = 0;
  double comp_t = 0;
  std::vector<double> comp_fiber;  // concatenated over fiber blocks

  double norm() const;
};

struct PlaneComplement {
  int dim_ambient = 0;
  int p = 0;
  std::vector<TangentVector> basis;  // orthonormal basis of P-perp (dim_ambient - p vectors)
};

// Max |<e_i, e_j> - delta_ij| over the basis.
double gram_residual(const PlaneComplement& c);

// ---------------------------------------------------------------------------
// Metric models
// ---------------------------------------------------------------------------

enum class ModelKind {
  ProductOfSpheres,    // product of round spheres, constant radii
  WarpedLine,          // dr^2 + beta(r)^2 ds_n^2
  TwoDWarp,            // dr^2 + omega(r,t)^2 dt^2 + beta(r)^2 ds_n^2
  MultiplyWarpedLine,  // dr^2 + sum_i rho_i(r)^2 ds_{n_i}^2
  RegionAssembly,      // named regions glued along declared interfaces
};

struct SphereBlock {
  int dim = 0;
  WarpingProfile radius;  // function of the line coordinate; constant for products
};

struct Region;
struct InterfaceSpec;

struct MetricModel {
  ModelKind kind = ModelKind::ProductOfSpheres;
  std::string id;

  // WarpedLine / TwoDWarp
  int fiber_dim = 0;
  WarpingProfile beta;
  TwoVarProfile omega;

  // ProductOfSpheres / MultiplyWarpedLine
  std::vector<SphereBlock> blocks;
  double line_lo = 0, line_hi = 0;

  // Extra round unit-sphere product factor (0 = none).
  int extra_sphere_dim = 0;

  // RegionAssembly
  std::vector<Region> regions;
  std::vector<InterfaceSpec> interfaces;

  // Construction parameters, kept for the plain-text descriptor.
  std::vector<std::pair<std::string, std::string>> config;

  int ambient_dim() const;
  bool closed_at_r0() const;    // beta -> 0 at the left end (smooth axis)
  bool closed_at_rmax() const;  // beta -> 0 at the right end
};

struct Region {
  std::string name;
  MetricModel model;
};

// One shared boundary between two regions. The edge of each region is a
// coordinate segment; s in [0,1] parametrises both sides consistently.
struct EdgeRef {
  int region = 0;
  int fixed_coord = 0;  // 0: r fixed (edge runs along t), 1: t fixed (runs along r)
  double fixed_value = 0;
  double s0 = 0, s1 = 1;  // running-coordinate range
};

struct InterfaceSpec {
  std::string name;
  EdgeRef a, b;
};

// Metric components seen from one side of an interface at parameter s:
// (g along the edge, g transverse to it, squared fiber radius).
struct EdgeComponents {
  double along = 0, transverse = 0, fiber_sq = 0;
};

EdgeComponents edge_components(const MetricModel& assembly, const EdgeRef& e, double s);

struct InterfaceReport {
  struct Entry {
    std::string name;
    double max_mismatch = 0;
  };
  std::vector<Entry> entries;
  double max_mismatch = 0;
  bool pass = false;
};

// Samples every declared interface and reports the worst componentwise
// mismatch; passes iff all are below tol. Vacuous pass with no interfaces.
InterfaceReport check_region_interfaces(const MetricModel& assembly, double tol,
                                        int samples = 101);

// ---------------------------------------------------------------------------
// Frame layout
// ---------------------------------------------------------------------------

// Direction classes of the orthonormal frame, in index order:
// [r] [t] [block 0 ...] [block 1 ...] ... [extra sphere ...]
struct FrameLayout {
  bool has_r = false, has_t = false;
  std::vector<int> block_dims;

  int dim() const {
    int d = (has_r ? 1 : 0) + (has_t ? 1 : 0);
    for (int b : block_dims) d += b;
    return d;
  }
  int base_dims() const { return (has_r ? 1 : 0) + (has_t ? 1 : 0); }
};

FrameLayout frame_layout(const MetricModel& model);

Eigen::VectorXd to_components(const TangentVector& v, const FrameLayout& layout);
TangentVector from_components(const Eigen::VectorXd& v, const FrameLayout& layout);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Modified Gram-Schmidt with a re-orthogonalisation pass; deterministic given
// input order. Throws DegenerateInput on rank deficiency (projection residual
// below 1e-10 of the original norm).
std::vector<Eigen::VectorXd> gram_schmidt(const std::vector<Eigen::VectorXd>& vectors);
std::vector<TangentVector> gram_schmidt(const std::vector<TangentVector>& vectors,
                                        const FrameLayout& layout);

// Seeded orthonormal (n_amb - p)-frame from Gaussian draws; reproducible
// bit-for-bit for a fixed seed. Throws InvalidP unless 0 <= p <= n_amb - 2.
// The flat form stores all components in comp_fiber; the layout form splits
// them across (comp_r, comp_t, comp_fiber) for a given model frame.
PlaneComplement random_complement(std::uint64_t seed, int n_amb, int p);
PlaneComplement random_complement(std::uint64_t seed, const FrameLayout& layout, int p);

// ---------------------------------------------------------------------------
// Model constructors
// ---------------------------------------------------------------------------

MetricModel make_product_of_spheres(const std::vector<int>& dims, const std::vector<double>& radii);
MetricModel make_warped_line(int fiber_dim, const WarpingProfile& beta);
MetricModel make_two_d_warp(int fiber_dim, const WarpingProfile& beta, const TwoVarProfile& omega);
MetricModel make_multiply_warped(const std::vector<SphereBlock>& blocks, double lo, double hi);
MetricModel with_extra_sphere(MetricModel model, int m);

// Checks strict positivity of all radius profiles on the open interior
// (sampled) and, for assemblies, interface agreement at 1e-9.
void validate_model(const MetricModel& model);

}  // namespace spn
