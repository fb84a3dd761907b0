#include "spn/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "spn/io.hpp"

namespace spn {

// ---------------------------------------------------------------------------
// bump mu
// ---------------------------------------------------------------------------

ProfileSample bump_mu(double t) {
  if (t <= 0.0) return {0.0, 0.0, 0.0};
  if (t >= 1.0) return {1.0, 0.0, 0.0};
  // mu = 1 / (1 + e^g) with g = 1/t - 1/(1-t); all derivatives flat at 0, 1.
  const double g = 1.0 / t - 1.0 / (1.0 - t);
  if (g > 40.0) return {0.0, 0.0, 0.0};
  if (g < -40.0) return {1.0, 0.0, 0.0};
  const double eg = std::exp(g);
  const double mu = 1.0 / (1.0 + eg);
  const double gp = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
  const double gpp = 2.0 / (t * t * t) - 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
  const double d1 = -gp * mu * (1.0 - mu);
  const double d2 = -gpp * mu * (1.0 - mu) - gp * d1 * (1.0 - 2.0 * mu);
  return {mu, d1, d2};
}

ProfileSample mu_L(double L, double t) {
  if (!(L > 0.0)) fail(Err::InvalidL, "mu_L requires L > 0");
  const ProfileSample s = bump_mu((t - 1.0) / L);
  return {s.value, s.d1 / L, s.d2 / (L * L)};
}

namespace {

struct MuSups {
  double d1, d2;
};

MuSups compute_mu_sups() {
  // One scan of a 1e6-point grid; the values are reused by the concordance
  // ramp bounds.
  const int n = 1000000;
  double m1 = 0, m2 = 0;
  for (int i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const ProfileSample s = bump_mu(t);
    m1 = std::max(m1, std::abs(s.d1));
    m2 = std::max(m2, std::abs(s.d2));
  }
  return {m1, m2};
}

const MuSups& mu_sups() {
  static const MuSups sups = compute_mu_sups();
  return sups;
}

}  // namespace

double mu_sup_d1() { return mu_sups().d1; }
double mu_sup_d2() { return mu_sups().d2; }

// ---------------------------------------------------------------------------
// torpedo profile
// ---------------------------------------------------------------------------

namespace {

// Derivative law at unit scale: h'(s) = cos(s) * mu(2 - 4s/pi).
double torpedo_slope_unit(double s) { return std::cos(s) * bump_mu(2.0 - 4.0 * s / kPi).value; }

// Value table for the transition band [pi/4, pi/2] at unit scale.
const HermiteTable& torpedo_transition_table() {
  static const HermiteTable table = [] {
    const int n = 2048;
    const double lo = kPi / 4.0, hi = kPi / 2.0;
    std::vector<double> vals(n + 1), ders(n + 1);
    vals[0] = std::sin(lo);
    ders[0] = torpedo_slope_unit(lo);
    for (int i = 1; i <= n; ++i) {
      const double a = lo + (hi - lo) * (i - 1) / n;
      const double b = lo + (hi - lo) * i / n;
      vals[i] = vals[i - 1] + adaptive_simpson(torpedo_slope_unit, a, b, 1e-14);
      ders[i] = torpedo_slope_unit(b);
    }
    return HermiteTable(lo, hi, std::move(vals), std::move(ders));
  }();
  return table;
}

double torpedo_plateau_unit() {
  static const double c = torpedo_transition_table()(kPi / 2.0);
  return c;
}

}  // namespace

ProfileSample torpedo_eta(double delta, double lambda, double r) {
  if (!(delta > 0.0) || lambda < 0.0) fail(Err::InvalidParams, "torpedo needs delta>0, lambda>=0");
  const double b = kPi * delta / 2.0 + lambda;
  const double slack = 1e-9 * (1.0 + b);
  if (r < -slack || r > b + slack)
    fail(Err::DomainError, "torpedo_eta: r outside [0, pi*delta/2 + lambda]");
  r = std::clamp(r, 0.0, b);
  const double s = r / delta;
  if (s <= kPi / 4.0) {
    return {delta * std::sin(s), std::cos(s), -std::sin(s) / delta};
  }
  if (s < kPi / 2.0) {
    const ProfileSample mu = bump_mu(2.0 - 4.0 * s / kPi);
    const double value = delta * torpedo_transition_table()(s);
    const double d1 = std::cos(s) * mu.value;
    const double d2 = -std::sin(s) * mu.value / delta - (4.0 / (delta * kPi)) * std::cos(s) * mu.d1;
    return {value, d1, d2};
  }
  return {delta * torpedo_plateau_unit(), 0.0, 0.0};
}

WarpingProfile torpedo_profile(double delta, double lambda) {
  const double b = kPi * delta / 2.0 + lambda;
  return WarpingProfile([delta, lambda](double r) { return torpedo_eta(delta, lambda, r); }, 0.0,
                        b, 0.0);
}

double torpedo_constant(double quad_tol) {
  if (!(quad_tol > 0.0)) fail(Err::QuadratureFailure, "torpedo_constant needs quad_tol > 0");
  return adaptive_simpson(torpedo_slope_unit, 0.0, kPi / 2.0, quad_tol);
}

double torpedo_constant_composite(std::int64_t panels) {
  return composite_simpson(torpedo_slope_unit, 0.0, kPi / 2.0, panels);
}

// ---------------------------------------------------------------------------
// alpha
// ---------------------------------------------------------------------------

namespace {

struct AlphaData {
  HermiteTable cumulative;  // integral of sqrt(1 - beta'^2) from lo
  WarpingProfile beta;
  double lo, hi;
};

std::shared_ptr<AlphaData> build_alpha_data(const WarpingProfile& beta, double b) {
  const double lo = beta.lo();
  if (!(b > lo)) fail(Err::InvalidParams, "alpha_from_beta: empty domain");
  auto slope = [&beta](double u) {
    const double d = beta.d1(u);
    const double s2 = 1.0 - d * d;
    if (s2 < -2.5e-12) fail(Err::SlopeViolation, "alpha_from_beta: |beta'| > 1");
    return std::sqrt(std::max(0.0, s2));
  };
  const int n = 4096;
  std::vector<double> vals(n + 1), ders(n + 1);
  vals[0] = 0.0;
  ders[0] = slope(lo);
  for (int i = 1; i <= n; ++i) {
    const double a = lo + (b - lo) * (i - 1) / n;
    const double c = lo + (b - lo) * i / n;
    vals[i] = vals[i - 1] + composite_simpson(slope, a, c, 16);
    ders[i] = slope(c);
  }
  auto data = std::make_shared<AlphaData>();
  data->cumulative = HermiteTable(lo, b, std::move(vals), std::move(ders));
  data->beta = beta;
  data->lo = lo;
  data->hi = b;
  return data;
}

// alpha'' = beta' beta'' / sqrt(1 - beta'^2); where the slope reaches +-1 the
// quotient is 0/0 and the limit is -sqrt(l) at a left end, +sqrt(l) at a right
// end, with l = -beta'''/beta' there (Richardson ratio on beta'').
double alpha_d2(const AlphaData& d, double r) {
  const double b1 = d.beta.d1(r);
  const double s2 = 1.0 - b1 * b1;
  if (s2 > 1e-12) return b1 * d.beta.d2(r) / std::sqrt(s2);
  const bool left = std::abs(r - d.lo) < std::abs(d.hi - r);
  const double end = left ? d.lo : d.hi;
  const double h = 1e-3 * (d.hi - d.lo);
  auto ratio = [&](double hh) {
    return left ? d.beta.d2(end + hh) / hh : d.beta.d2(end - hh) / hh;
  };
  const double e_lim = (4.0 * ratio(0.5 * h) - ratio(h)) / 3.0;
  const double b1_end = d.beta.d1(end);
  const double curv = (left ? -e_lim : e_lim) / b1_end;
  const double mag = std::sqrt(std::max(0.0, curv));
  return left ? -mag : mag;
}

WarpingProfile alpha_with_anchor(const WarpingProfile& beta, double b, double anchor) {
  auto data = build_alpha_data(beta, b);
  const double base = data->cumulative(anchor);
  auto fn = [data, base](double r) {
    const double value = base - data->cumulative(r);
    const double b1 = data->beta.d1(r);
    const double d1 = -std::sqrt(std::max(0.0, 1.0 - b1 * b1));
    return ProfileSample{value, d1, alpha_d2(*data, r)};
  };
  return WarpingProfile(std::move(fn), data->lo, b, 0.0);
}

}  // namespace

WarpingProfile alpha_from_beta(const WarpingProfile& beta, double b) {
  return alpha_with_anchor(beta, b, beta.lo() + 0.5 * (b - beta.lo()));
}

WarpingProfile alpha_anchored(const WarpingProfile& beta, double b, double anchor) {
  return alpha_with_anchor(beta, b, anchor);
}

// ---------------------------------------------------------------------------
// toe and bend warpings
// ---------------------------------------------------------------------------

namespace {

struct Activation {
  double value, slope;
};

// Rises 0 -> 1 over [t0, t0+w], stays 1 until t1, falls back over [t1, t1+w].
Activation band_activation(double t, double t0, double t1, double w) {
  if (t <= t0 || t >= t1 + w) return {0.0, 0.0};
  if (t < t0 + w) {
    const ProfileSample m = bump_mu((t - t0) / w);
    return {m.value, m.d1 / w};
  }
  if (t <= t1) return {1.0, 0.0};
  const ProfileSample m = bump_mu((t - t1) / w);
  return {1.0 - m.value, -m.d1 / w};
}

}  // namespace

TwoVarProfile toe_omega(const WarpingProfile& alpha) {
  WarpingProfile a = alpha;
  auto fn = [a](double r, double t) {
    const Activation act = band_activation(t, -1.0, kPi / 2.0, 1.0);
    const ProfileSample al = a(r);
    TwoVarSample s;
    s.value = 1.0 + act.value * (al.value - 1.0);
    s.dr = act.value * al.d1;
    s.dt = act.slope * (al.value - 1.0);
    s.drr = act.value * al.d2;
    return s;
  };
  return TwoVarProfile(std::move(fn), alpha.lo(), alpha.hi(), -2.0, kPi / 2.0 + 2.0);
}

TwoVarProfile bend_omega(double Lambda, const WarpingProfile& alpha) {
  const double amax = profile_max_abs(alpha, 0);
  if (!(Lambda > amax))
    fail(Err::LambdaTooSmall, "bend_omega: Lambda must exceed max |alpha| = " + fmt17(amax));
  WarpingProfile a = alpha;
  auto fn = [a, Lambda](double r, double t) {
    // 1 -> Lambda pedestal, flat in r everywhere.
    const Activation ped = band_activation(t, -2.0, kPi / 2.0 + 1.5, 0.5);
    // alpha(r) rides on top only across the quarter-turn band.
    const Activation act = band_activation(t, -0.5, kPi / 2.0, 0.5);
    const ProfileSample al = a(r);
    TwoVarSample s;
    s.value = 1.0 + ped.value * (Lambda - 1.0) + act.value * al.value;
    s.dr = act.value * al.d1;
    s.dt = ped.slope * (Lambda - 1.0) + act.slope * al.value;
    s.drr = act.value * al.d2;
    return s;
  };
  return TwoVarProfile(std::move(fn), alpha.lo(), alpha.hi(), -3.0, kPi / 2.0 + 3.0);
}

// ---------------------------------------------------------------------------
// families and combinators
// ---------------------------------------------------------------------------

TwoVarProfile rebox(const TwoVarProfile& p, double rlo, double rhi, double tlo, double thi) {
  TwoVarProfile q = p;
  return TwoVarProfile([q](double r, double t) { return q(r, t); }, rlo, rhi, tlo, thi);
}

TwoVarProfile constant_two_var(double c, double rlo, double rhi, double tlo, double thi) {
  return TwoVarProfile([c](double, double) { return TwoVarSample{c, 0.0, 0.0, 0.0}; }, rlo, rhi,
                       tlo, thi);
}

WarpingProfile constant_profile(double c, double lo, double hi) {
  return WarpingProfile([c](double) { return ProfileSample{c, 0.0, 0.0}; }, lo, hi,
                        std::max(0.0, c));
}

WarpingProfile sine_profile(double delta, double lo, double hi) {
  if (!(delta > 0.0)) fail(Err::InvalidParams, "sine_profile needs delta > 0");
  return WarpingProfile(
      [delta](double r) {
        return ProfileSample{delta * std::sin(r / delta), std::cos(r / delta),
                             -std::sin(r / delta) / delta};
      },
      lo, hi, 0.0);
}

WarpingProfile reversed_profile(const WarpingProfile& p) {
  WarpingProfile q = p;
  const double b = p.hi();
  auto fn = [q, b](double r) {
    const ProfileSample s = q(b - r);
    return ProfileSample{s.value, -s.d1, s.d2};
  };
  return WarpingProfile(std::move(fn), 0.0, b - p.lo(), p.positivity_floor());
}

WarpingProfile shifted_profile(const WarpingProfile& p, double c) {
  WarpingProfile q = p;
  auto fn = [q, c](double r) {
    ProfileSample s = q(r);
    s.value += c;
    return s;
  };
  return WarpingProfile(std::move(fn), p.lo(), p.hi(), 0.0);
}

WarpingProfile translated_profile(const WarpingProfile& p, double off, double lo, double hi) {
  WarpingProfile q = p;
  auto fn = [q, off](double r) { return q(r + off); };
  return WarpingProfile(std::move(fn), lo, hi, p.positivity_floor());
}

double profile_max_abs(const WarpingProfile& p, int k, int samples) {
  double m = 0;
  for (int i = 0; i < samples; ++i) {
    const double r = p.lo() + (p.hi() - p.lo()) * i / (samples - 1);
    const ProfileSample s = p(r);
    const double v = (k == 0) ? s.value : (k == 1 ? s.d1 : s.d2);
    m = std::max(m, std::abs(v));
  }
  return m;
}

void dump_profile_csv(const WarpingProfile& p, const std::string& path, int samples) {
  CsvTable table;
  table.header = {"r", "value", "d1", "d2"};
  for (int i = 0; i < samples; ++i) {
    const double r = p.lo() + (p.hi() - p.lo()) * i / (samples - 1);
    const ProfileSample s = p(r);
    table.rows.push_back({r, s.value, s.d1, s.d2});
  }
  write_csv(table, path);
}

}  // namespace spn
