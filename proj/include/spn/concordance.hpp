#pragma once

// Cylinders over a path of metrics: g_{f(t)} + dt^2. The path runs through
// (products of) round spheres with smooth radius functions, so the cylinder
// is itself a multiply warped line with closed-form curvature. Provides the
// curvature-expansion scaling check, the search for the slope bound C, and
// the concordance builder with exact product ends.

#include <string>
#include <vector>

#include "spn/geometry.hpp"
#include "spn/positivity.hpp"

namespace spn {

// A smooth path r in [0,1] of product-of-spheres metrics, one radius profile
// per factor.
struct MetricPath {
  std::vector<SphereBlock> blocks;  // radius profiles over [0, 1]
  int slice_dim() const;
};

MetricPath round_sphere_path(int n, const WarpingProfile& radius);
MetricPath product_path(const std::vector<int>& dims, const std::vector<WarpingProfile>& radii);

// Slice metric at path parameter r.
MetricModel path_slice(const MetricPath& path, double r);

// Certifies a sample of slices at p; the declared-positivity precondition of
// the C search.
bool path_slices_positive(const MetricPath& path, int p, int n_slices, std::uint64_t seed);

// Cylinder g_{f(t)} + dt^2 over [t_lo, t_hi] for a ramp profile f with values
// in [0, 1].
MetricModel path_cylinder(const MetricPath& path, const WarpingProfile& ramp);

// ---------------------------------------------------------------------------
// Curvature expansion scaling
// ---------------------------------------------------------------------------

// For slow ramps f_eps(t) = mu(eps t), |f'| ~ eps and |f''| ~ eps^2, and the
// cylinder curvatures approach the slice curvatures at second order:
// max |K_ij(cyl) - K_ij(slice)| and max |K_it| both scale like eps^2.
struct ExpansionReport {
  struct Row {
    double eps = 0;
    double max_dK_ij = 0;  // fiber-fiber error, including cross-block pairs
    double max_K_it = 0;   // mixed line-fiber curvature
  };
  std::vector<Row> rows;
  double slope_ij = 0;  // log-log fit
  double slope_it = 0;
};

ExpansionReport expansion_check(const MetricPath& path, const std::vector<double>& amplitudes,
                                int t_samples = 257);

// ---------------------------------------------------------------------------
// The constant C and the concordance
// ---------------------------------------------------------------------------

// Largest C in a halving schedule from 1 such that the cylinder is certified
// positive at p for every ramp in the test family with |f'|, |f''| <= C
// (mu_L ramps, a sine smoothstep, and a double ramp with a plateau).
// Throws SearchExhausted below 1e-6.
double find_C(const MetricPath& path, int p, const GridSpec& grid, std::uint64_t seed);

struct Concordance {
  double L = 0;
  double C = 0;
  MetricModel cylinder;  // over t in [0, L+2]
  PositivityCertificate certificate;
  double boundary_residual = 0;  // worst end-slice component deviation
  double ramp_d1_max = 0;        // sup |f'| on a dense grid
  double ramp_d2_max = 0;

  std::string summary() const;
};

// f = mu_L with L minimal in a doubling schedule such that sup|mu_L'| <= C and
// sup|mu_L''| <= C; the cylinder is a product g_0 + dt^2 on [0,1] and
// g_1 + dt^2 on [L+1, L+2] exactly.
Concordance build_concordance(const MetricPath& path, int p, std::uint64_t seed);

}  // namespace spn
