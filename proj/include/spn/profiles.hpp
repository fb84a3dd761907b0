#pragma once

// Smooth warping profiles with analytic first and second derivatives:
// the bump mu, its rescaling mu_L, the torpedo profile eta_{delta,lambda},
// the companion slope profile alpha with (alpha')^2 + (beta')^2 = 1, and the
// two-variable warpings used by the toe and bend metrics.

#include <functional>
#include <memory>
#include <string>

#include "spn/common.hpp"

namespace spn {

struct ProfileSample {
  double value = 0, d1 = 0, d2 = 0;
};

// Scalar profile on a closed interval [lo, hi]; immutable after construction,
// evaluation is pure.
class WarpingProfile {
public:
  WarpingProfile() = default;
  WarpingProfile(std::function<ProfileSample(double)> fn, double lo, double hi,
                 double positivity_floor = 0.0)
      : fn_(std::move(fn)), lo_(lo), hi_(hi), floor_(positivity_floor) {}

  ProfileSample operator()(double r) const { return fn_(r); }
  double value(double r) const { return fn_(r).value; }
  double d1(double r) const { return fn_(r).d1; }
  double d2(double r) const { return fn_(r).d2; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double positivity_floor() const { return floor_; }

  bool valid() const { return static_cast<bool>(fn_); }

private:
  std::function<ProfileSample(double)> fn_;
  double lo_ = 0, hi_ = 1, floor_ = 0;
};

struct TwoVarSample {
  double value = 0, dr = 0, dt = 0, drr = 0;
};

// Profile of (r, t) on a rectangle [rlo, rhi] x [tlo, thi].
class TwoVarProfile {
public:
  TwoVarProfile() = default;
  TwoVarProfile(std::function<TwoVarSample(double, double)> fn, double rlo, double rhi,
                double tlo, double thi)
      : fn_(std::move(fn)), rlo_(rlo), rhi_(rhi), tlo_(tlo), thi_(thi) {}

  TwoVarSample operator()(double r, double t) const { return fn_(r, t); }
  double value(double r, double t) const { return fn_(r, t).value; }

  double rlo() const { return rlo_; }
  double rhi() const { return rhi_; }
  double tlo() const { return tlo_; }
  double thi() const { return thi_; }

  bool valid() const { return static_cast<bool>(fn_); }

private:
  std::function<TwoVarSample(double, double)> fn_;
  double rlo_ = 0, rhi_ = 1, tlo_ = 0, thi_ = 1;
};

// ---------------------------------------------------------------------------
// Bump functions
// ---------------------------------------------------------------------------

// mu(t) = 0 for t<=0, 1 for t>=1, e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}) between.
// Monotone, all derivatives vanish at both endpoints.
ProfileSample bump_mu(double t);

// mu_L(t) = mu((t-1)/L): transitions 0 -> 1 on [1, L+1].
// d1 = mu'((t-1)/L)/L, d2 = mu''((t-1)/L)/L^2. Throws InvalidL for L <= 0.
ProfileSample mu_L(double L, double t);

// sup |mu'| and sup |mu''|, computed once on a dense grid and cached.
double mu_sup_d1();
double mu_sup_d2();

// ---------------------------------------------------------------------------
// Torpedo profile
// ---------------------------------------------------------------------------

// eta_{delta,lambda} on [0, pi*delta/2 + lambda], defined through its
// derivative law eta'(r) = cos(r/delta) * mu(2 - 4r/(delta*pi)):
//   - equals delta*sin(r/delta) for r <= pi*delta/4,
//   - concave transition on [pi*delta/4, pi*delta/2] (value tabulated),
//   - constant C*delta beyond, with every derivative vanishing there.
// lambda only extends the constant neck; it does not enter the derivative law.
ProfileSample torpedo_eta(double delta, double lambda, double r);

// Same function packaged as a profile on its full domain.
WarpingProfile torpedo_profile(double delta, double lambda);

// The plateau constant C = eta_{1,0}(pi/2): adaptive quadrature of the
// derivative law to quad_tol. Scale-invariant in delta.
double torpedo_constant(double quad_tol);

// Brute-force check value: composite Simpson with a fixed panel count.
double torpedo_constant_composite(std::int64_t panels);

// ---------------------------------------------------------------------------
// The slope companion alpha
// ---------------------------------------------------------------------------

// alpha(r) = integral_r^{b/2} sqrt(1 - beta'(u)^2) du on [0, b], so that
// (alpha')^2 + (beta')^2 = 1 and alpha(b/2) = 0.
// Throws SlopeViolation if |beta'| > 1 + 1e-12 anywhere on [0, b].
WarpingProfile alpha_from_beta(const WarpingProfile& beta, double b);

// Same slopes, shifted so the value vanishes at r = anchor instead of b/2.
WarpingProfile alpha_anchored(const WarpingProfile& beta, double b, double anchor);

// ---------------------------------------------------------------------------
// Two-variable warpings
// ---------------------------------------------------------------------------

// Toe warping on [alpha.lo, alpha.hi] x [-2, pi/2 + 2]:
//   1                                   t in [-2, -1]
//   mu(-t) + (1 - mu(-t)) alpha(r)      t in [-1, 0]
//   alpha(r)                            t in [0, pi/2]
//   mu(t - pi/2) + (1 - mu(..)) alpha   t in [pi/2, pi/2 + 1]
//   1                                   t in [pi/2 + 1, pi/2 + 2]
// Values of t outside the band extend by the constant branches.
TwoVarProfile toe_omega(const WarpingProfile& alpha);

// Bend warping on [alpha.lo, alpha.hi] x [-3, pi/2 + 3], built from the same
// cutoff: 1 / Lambda / Lambda + alpha(r) / Lambda / 1, with mu interpolation
// on [-2,-3/2], [-1/2,0], [pi/2,pi/2+1/2], [pi/2+3/2,pi/2+2].
// dr vanishes outside t in (-1/2, pi/2 + 1/2); |d^k/dr^k| <= |alpha^(k)|.
// Throws LambdaTooSmall if Lambda <= max |alpha|.
TwoVarProfile bend_omega(double Lambda, const WarpingProfile& alpha);

// ---------------------------------------------------------------------------
// Basic profile families and combinators
// ---------------------------------------------------------------------------

// Same samples on a different rectangle (the toe/bend closures are total in t,
// constant outside their bands).
TwoVarProfile rebox(const TwoVarProfile& p, double rlo, double rhi, double tlo, double thi);

// Constant two-variable warping (flat cylinders).
TwoVarProfile constant_two_var(double c, double rlo, double rhi, double tlo, double thi);

WarpingProfile constant_profile(double c, double lo, double hi);
WarpingProfile sine_profile(double delta, double lo, double hi);  // delta*sin(r/delta)
WarpingProfile reversed_profile(const WarpingProfile& p);         // p(b - r) on [0, b-lo]
WarpingProfile shifted_profile(const WarpingProfile& p, double c);
// Profile r -> p(f(r)) for an affine reparametrisation f(r) = r + off.
WarpingProfile translated_profile(const WarpingProfile& p, double off, double lo, double hi);

// Max of |p'| (k=1) or |p| (k=0) or |p''| (k=2) on a dense grid.
double profile_max_abs(const WarpingProfile& p, int k, int samples = 20001);

// CSV dump: header "r,value,d1,d2", 17-significant-digit decimals, LF endings.
void dump_profile_csv(const WarpingProfile& p, const std::string& path, int samples = 512);

}  // namespace spn
