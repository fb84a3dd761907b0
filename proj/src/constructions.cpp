#include "spn/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spn/io.hpp"

namespace spn {

namespace {

void push_param(MetricModel& m, const std::string& key, double value) {
  m.config.emplace_back(key, fmt17(value));
}
void push_param(MetricModel& m, const std::string& key, int value) {
  m.config.emplace_back(key, std::to_string(value));
}

}  // namespace

MetricModel build_torpedo(int n, double delta, double lambda) {
  if (n < 1 || !(delta > 0) || lambda < 0)
    fail(Err::InvalidParams, "torpedo needs n >= 1, delta > 0, lambda >= 0");
  MetricModel m = make_warped_line(n + 1, torpedo_profile(delta, lambda));
  m.id = "torpedo";
  push_param(m, "n", n);
  push_param(m, "delta", delta);
  push_param(m, "lambda", lambda);
  return m;
}

MetricModel build_torpedo_cylinder(int n, double delta, double lambda, double length) {
  if (n < 1 || !(delta > 0) || lambda < 0 || !(length > 0))
    fail(Err::InvalidParams, "torpedo cylinder needs n >= 1, delta > 0, lambda >= 0, length > 0");
  const WarpingProfile beta = torpedo_profile(delta, lambda);
  MetricModel m =
      make_two_d_warp(n, beta, constant_two_var(1.0, beta.lo(), beta.hi(), 0.0, length));
  m.id = "torpedo-cylinder";
  push_param(m, "n", n);
  push_param(m, "delta", delta);
  push_param(m, "lambda", lambda);
  push_param(m, "length", length);
  return m;
}

MetricModel build_toe(int n, double delta, double lambda1, double lambda2, double glue_extent) {
  if (n < 2 || !(delta > 0) || lambda1 < 0 || lambda2 < 0 || glue_extent < 0)
    fail(Err::InvalidParams, "toe needs n >= 2, delta > 0, nonnegative extensions");
  const WarpingProfile beta = torpedo_profile(delta, lambda1);
  const double b = beta.hi();
  // The quarter turn closes at the cross-section boundary, so alpha vanishes
  // there (flat quarter-disk corner in the (r,t) plane).
  const WarpingProfile alpha = alpha_anchored(beta, b, b);
  TwoVarProfile omega = toe_omega(alpha);
  omega = rebox(omega, beta.lo(), b, -2.0 - lambda2, kPi / 2.0 + 1.0 + glue_extent);
  MetricModel m = make_two_d_warp(n, beta, omega);
  m.id = "toe";
  push_param(m, "n", n);
  push_param(m, "delta", delta);
  push_param(m, "lambda1", lambda1);
  push_param(m, "lambda2", lambda2);
  push_param(m, "glue_extent", glue_extent);
  return m;
}

MetricModel build_bend(int n, double delta, double Lambda, double lambda) {
  if (n < 2 || !(delta > 0) || lambda < 0)
    fail(Err::InvalidParams, "bend needs n >= 2, delta > 0, lambda >= 0");
  const WarpingProfile eta = torpedo_profile(delta, lambda);
  const WarpingProfile beta = reversed_profile(eta);
  // alpha decreases from 0 (neck side) to -max|alpha| (cap side facing the
  // pivot), so min omega = Lambda - max|alpha| is attained.
  const WarpingProfile alpha = alpha_anchored(beta, beta.hi(), 0.0);
  MetricModel m = make_two_d_warp(n, beta, bend_omega(Lambda, alpha));
  m.id = "bend";
  push_param(m, "n", n);
  push_param(m, "delta", delta);
  push_param(m, "Lambda", Lambda);
  push_param(m, "lambda", lambda);
  return m;
}

BendNegativityBound bend_negativity_bound(const MetricModel& bend, int grid_r, int grid_t) {
  if (bend.id != "bend") fail(Err::InvalidParams, "bend_negativity_bound expects a bend model");
  const double rlo = bend.beta.lo(), rhi = bend.beta.hi();
  // Recover Lambda and alpha from the warping: the alpha band is t in
  // [0, pi/2] and omega(0, t_plateau) = Lambda.
  const double Lambda = bend.omega.value(rlo, -1.0);
  double alpha_max = 0, mixed_max = 0;
  for (int i = 0; i < grid_r; ++i) {
    const double r = rlo + (rhi - rlo) * i / (grid_r - 1);
    const TwoVarSample w = bend.omega(r, kPi / 4.0);
    alpha_max = std::max(alpha_max, std::abs(w.value - Lambda));
    mixed_max = std::max(mixed_max, std::abs(w.dr * bend.beta.d1(r)));
  }
  BendNegativityBound out;
  out.analytic = mixed_max / (Lambda - alpha_max);
  double num = 0, den = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid_r; ++i) {
    const double r = rlo + (rhi - rlo) * i / (grid_r - 1);
    for (int j = 0; j < grid_t; ++j) {
      const double t = -0.5 + (kPi / 2.0 + 1.0) * j / (grid_t - 1);
      const TwoVarSample w = bend.omega(r, t);
      num = std::max(num, std::abs(w.dr * bend.beta.d1(r)));
      den = std::min(den, w.value);
    }
  }
  out.reported = num / den;
  return out;
}

double search_bend_Lambda(int n, double delta, int p, const GridSpec& grid, std::uint64_t seed) {
  if (p < 0 || p > n - 2) fail(Err::InvalidP, "bend search needs 0 <= p <= n - 2");
  const WarpingProfile eta = torpedo_profile(delta, 1.0);
  const WarpingProfile beta = reversed_profile(eta);
  const WarpingProfile alpha = alpha_anchored(beta, beta.hi(), 0.0);
  const double amax = profile_max_abs(alpha, 0);

  auto positive = [&](double Lambda, int round) {
    const MetricModel m = build_bend(n, delta, Lambda);
    return certify(m, p, grid, 1e-7, seed_mix(seed, static_cast<std::uint64_t>(round))).verdict ==
           Verdict::Positive;
  };

  double lo = amax;  // never certified here (metric degenerates as Lambda -> max|alpha|)
  double hi = 2.0 * amax + 1.0;
  int round = 0;
  if (!positive(hi, round++)) {
    bool found = false;
    for (int doubling = 0; doubling < 20; ++doubling) {
      lo = hi;
      hi *= 2.0;
      if (positive(hi, round++)) {
        found = true;
        break;
      }
    }
    if (!found) fail(Err::SearchExhausted, "bend Lambda search capped at 20 doublings");
  }
  for (int step = 0; step < 12; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= amax * (1.0 + 1e-6)) break;
    if (positive(mid, round++))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

MetricModel assemble_boot(int n, double delta, double Lambda, double l1, double l4) {
  if (n < 2 || !(delta > 0) || !(l1 > 0) || !(l4 > 0))
    fail(Err::InvalidParams, "boot needs n >= 2, delta > 0, l1 > 0, l4 > 0");
  const double l2 = l1 + Lambda;  // flat padding closing the rectangle
  const double l3 = l4 + Lambda;

  MetricModel toe = build_toe(n, delta, l1, l3 - 1.0, 1.0);
  MetricModel bend = build_bend(n, delta, Lambda, l1);
  MetricModel leg = build_torpedo_cylinder(n, delta, l1, l4);
  const double neck = torpedo_constant(1e-12) * delta;
  MetricModel flat = make_two_d_warp(n, constant_profile(neck, 0.0, l2),
                                     constant_two_var(1.0, 0.0, l2, 0.0, l3));
  flat.id = "flat";

  MetricModel boot;
  boot.kind = ModelKind::RegionAssembly;
  boot.id = "boot";
  boot.regions.push_back({"toe", std::move(toe)});
  boot.regions.push_back({"bend", std::move(bend)});
  boot.regions.push_back({"leg", std::move(leg)});
  boot.regions.push_back({"flat", std::move(flat)});

  const double b = kPi * delta / 2.0 + l1;  // cross-section radius
  const MetricModel& toe_m = boot.regions[0].model;
  const MetricModel& bend_m = boot.regions[1].model;
  // Full cross-section gluings run the radius in opposite orientations
  // because the bend profile is reversed.
  boot.interfaces.push_back({"toe-bend",
                             {0, 1, toe_m.omega.thi(), 0.0, b},
                             {1, 1, bend_m.omega.tlo(), b, 0.0}});
  boot.interfaces.push_back({"bend-leg",
                             {1, 1, bend_m.omega.thi(), 0.0, b},
                             {2, 1, 0.0, b, 0.0}});
  // Lateral neck gluings against the flat block.
  boot.interfaces.push_back({"leg-flat", {2, 0, b, 0.0, l4}, {3, 0, l2, 0.0, l4}});
  boot.interfaces.push_back(
      {"toe-flat", {0, 0, b, toe_m.omega.tlo(), -1.0}, {3, 0, 0.0, 0.0, l3}});

  const InterfaceReport report = check_region_interfaces(boot, 1e-9);
  if (!report.pass)
    fail(Err::InterfaceMismatch,
         "boot interfaces disagree by " + fmt17(report.max_mismatch));

  push_param(boot, "n", n);
  push_param(boot, "delta", delta);
  push_param(boot, "Lambda", Lambda);
  push_param(boot, "l1", l1);
  push_param(boot, "l2", l2);
  push_param(boot, "l3", l3);
  push_param(boot, "l4", l4);
  return boot;
}

MetricModel boot_cross_sphere(int n, int m, double delta, double Lambda, double l1, double l4) {
  if (m < 0) fail(Err::InvalidParams, "boot x sphere needs m >= 0");
  MetricModel boot = assemble_boot(n, delta, Lambda, l1, l4);
  if (m == 0) return boot;
  MetricModel product = with_extra_sphere(std::move(boot), m);
  product.id = "boot-sphere";
  push_param(product, "m", m);
  return product;
}

std::string model_config_text(const MetricModel& model) {
  std::ostringstream out;
  out << "spn model v1\n";
  out << "id = " << model.id << "\n";
  for (const auto& [key, value] : model.config) out << key << " = " << value << "\n";
  return out.str();
}

}  // namespace spn
