#pragma once

// Builders for the named metric families: torpedo disks and cylinders, the
// toe (a half-torpedo closed by a quarter-turn), the bend (a torpedo cylinder
// turned through pi/2 at standoff radius Lambda), the four-region boot, and
// its product with a round sphere. Plus the Lambda search that makes the bend
// positively curved.

#include <string>

#include "spn/geometry.hpp"
#include "spn/positivity.hpp"

namespace spn {

// dr^2 + eta_{delta,lambda}(r)^2 ds_{n+1}^2 on [0, pi*delta/2 + lambda].
// Fiber dimension n+1, ambient n+2; boundary fiber radius C*delta.
MetricModel build_torpedo(int n, double delta, double lambda);

// dr^2 + dt^2 + eta_{delta,lambda}(r)^2 ds_n^2 over t in [0, length].
MetricModel build_torpedo_cylinder(int n, double delta, double lambda, double length);

// Toe: cross-section torpedo beta = eta_{delta,lambda1}; the warping
// omega interpolates 1 -> alpha(r) -> 1 across the quarter turn, with alpha
// vanishing at the cross-section boundary r = b (where the turn closes).
// lambda2 extends the flat cylinder end; glue_extent is the extra flat band
// kept past the turn (default 1).
MetricModel build_toe(int n, double delta, double lambda1, double lambda2,
                      double glue_extent = 1.0);

// Bend: reversed torpedo beta(r) = eta_delta(b - r) and omega = Lambda +
// alpha(r) across the turn, alpha decreasing with alpha(0) = 0 so the minimum
// of omega equals Lambda - max|alpha|. Throws LambdaTooSmall.
MetricModel build_bend(int n, double delta, double Lambda, double lambda = 1.0);

// Grid maximum of the mixed negative term |omega_r beta_r| / omega over the
// turn band, and its analytic bound max|alpha_r beta_r| / (Lambda - max|alpha|).
struct BendNegativityBound {
  double reported = 0;
  double analytic = 0;
};
BendNegativityBound bend_negativity_bound(const MetricModel& bend, int grid_r = 401,
                                          int grid_t = 201);

// Smallest Lambda in a doubling-then-bisection schedule (start 2*max|alpha|+1,
// cap 20 doublings, then bisection keeping the certified-positive endpoint)
// whose certificate at p is positive. Throws SearchExhausted.
double search_bend_Lambda(int n, double delta, int p, const GridSpec& grid, std::uint64_t seed);

// Four-region boot assembly: toe, bend, torpedo-cylinder leg, and the flat
// region D^2 x S^n at the neck radius C*delta. l2 = l1 + Lambda and
// l3 = l4 + Lambda close the flat rectangle. Interfaces must match at 1e-9.
MetricModel assemble_boot(int n, double delta, double Lambda, double l1, double l4);

// Product of the boot with a unit round S^m (m = 0 gives the boot itself).
MetricModel boot_cross_sphere(int n, int m, double delta, double Lambda, double l1 = 1.0,
                              double l4 = 1.0);

// Plain-text model descriptor (key = value lines, versioned) so CLI runs are
// reproducible from their emitted configs.
std::string model_config_text(const MetricModel& model);

}  // namespace spn
