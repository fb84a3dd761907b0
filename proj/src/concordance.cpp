#include "spn/concordance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spn/io.hpp"

namespace spn {

int MetricPath::slice_dim() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim;
  return n;
}

MetricPath round_sphere_path(int n, const WarpingProfile& radius) {
  if (n < 2) fail(Err::InvalidParams, "round path needs n >= 2");
  MetricPath path;
  path.blocks.push_back({n, radius});
  return path;
}

MetricPath product_path(const std::vector<int>& dims, const std::vector<WarpingProfile>& radii) {
  if (dims.empty() || dims.size() != radii.size())
    fail(Err::InvalidParams, "product path needs matching dims and radii");
  MetricPath path;
  for (std::size_t i = 0; i < dims.size(); ++i) path.blocks.push_back({dims[i], radii[i]});
  return path;
}

MetricModel path_slice(const MetricPath& path, double r) {
  std::vector<int> dims;
  std::vector<double> radii;
  for (const auto& b : path.blocks) {
    dims.push_back(b.dim);
    const double rho = b.radius.value(r);
    if (!(rho > 0)) fail(Err::InvalidParams, "slice radius must be positive");
    radii.push_back(rho);
  }
  MetricModel m = make_product_of_spheres(dims, radii);
  m.id = "path-slice";
  return m;
}

bool path_slices_positive(const MetricPath& path, int p, int n_slices, std::uint64_t seed) {
  GridSpec grid;
  for (int i = 0; i < n_slices; ++i) {
    const double r = static_cast<double>(i) / (n_slices - 1);
    const auto cert = certify(path_slice(path, r), p, grid, 1e-7, seed_mix(seed, i));
    if (cert.verdict != Verdict::Positive) return false;
  }
  return true;
}

namespace {

// rho(f(t)) with chain-rule derivatives.
WarpingProfile compose_profile(const WarpingProfile& rho, const WarpingProfile& ramp) {
  WarpingProfile r = rho, f = ramp;
  auto fn = [r, f](double t) {
    const ProfileSample ft = f(t);
    const ProfileSample rv = r(ft.value);
    return ProfileSample{rv.value, rv.d1 * ft.d1, rv.d2 * ft.d1 * ft.d1 + rv.d1 * ft.d2};
  };
  return WarpingProfile(std::move(fn), ramp.lo(), ramp.hi(), 0.0);
}

WarpingProfile mu_ramp(double scale, double lo, double hi) {
  // f(t) = mu(scale * t)
  return WarpingProfile(
      [scale](double t) {
        const ProfileSample m = bump_mu(scale * t);
        return ProfileSample{m.value, scale * m.d1, scale * scale * m.d2};
      },
      lo, hi, 0.0);
}

WarpingProfile mu_L_ramp(double L) {
  // transitions on [1, L+1]; domain [0, L+2]
  return WarpingProfile([L](double t) { return mu_L(L, t); }, 0.0, L + 2.0, 0.0);
}

WarpingProfile smoothstep_ramp(double T) {
  // f(t) = t/T - sin(2 pi t/T) / (2 pi); C^2 ramp, sup|f'| = 2/T,
  // sup|f''| = 2 pi / T^2.
  return WarpingProfile(
      [T](double t) {
        const double x = std::clamp(t / T, 0.0, 1.0);
        const double twopi = 2.0 * kPi;
        return ProfileSample{x - std::sin(twopi * x) / twopi,
                             (1.0 - std::cos(twopi * x)) / T,
                             twopi * std::sin(twopi * x) / (T * T)};
      },
      0.0, T, 0.0);
}

WarpingProfile double_ramp(double L) {
  // 0 -> 1/2 over [1, L+1], plateau, 1/2 -> 1 over [L+3, 2L+3].
  return WarpingProfile(
      [L](double t) {
        const ProfileSample a = mu_L(L, t);
        const ProfileSample b = mu_L(L, t - L - 2.0);
        return ProfileSample{0.5 * (a.value + b.value), 0.5 * (a.d1 + b.d1),
                             0.5 * (a.d2 + b.d2)};
      },
      0.0, 2.0 * L + 4.0, 0.0);
}

}  // namespace

MetricModel path_cylinder(const MetricPath& path, const WarpingProfile& ramp) {
  std::vector<SphereBlock> blocks;
  for (const auto& b : path.blocks) blocks.push_back({b.dim, compose_profile(b.radius, ramp)});
  MetricModel m = make_multiply_warped(blocks, ramp.lo(), ramp.hi());
  m.id = "path-cylinder";
  return m;
}

ExpansionReport expansion_check(const MetricPath& path, const std::vector<double>& amplitudes,
                                int t_samples) {
  ExpansionReport report;
  for (std::size_t ei = 0; ei < amplitudes.size(); ++ei) {
    const double eps = amplitudes[ei];
    if (!(eps > 0) || (ei > 0 && eps >= amplitudes[ei - 1]))
      fail(Err::InvalidParams, "amplitudes must be positive and decreasing");
    const WarpingProfile ramp = mu_ramp(eps, 0.0, 1.0 / eps);
    const MetricModel cyl = path_cylinder(path, ramp);
    ExpansionReport::Row row;
    row.eps = eps;
    for (int i = 0; i < t_samples; ++i) {
      const double t = ramp.lo() + (ramp.hi() - ramp.lo()) * i / (t_samples - 1);
      ModelPoint x;
      x.r = t;
      const MultiplyWarpedTable tbl = multiply_warped_sectionals(cyl, x);
      const double fr = ramp.value(t);
      const int nb = static_cast<int>(path.blocks.size());
      for (int a = 0; a < nb; ++a) {
        const double rho = path.blocks[a].radius.value(fr);
        const double slice_intra = 1.0 / (rho * rho);
        row.max_dK_ij = std::max(row.max_dK_ij, std::abs(tbl.block_block(a, a) - slice_intra));
        for (int b = a + 1; b < nb; ++b)
          row.max_dK_ij = std::max(row.max_dK_ij, std::abs(tbl.block_block(a, b)));
        row.max_K_it = std::max(row.max_K_it, std::abs(tbl.line_block[a]));
      }
    }
    report.rows.push_back(row);
  }

  auto slope = [&](auto get) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(report.rows.size());
    for (const auto& row : report.rows) {
      const double x = std::log(row.eps), y = std::log(std::max(get(row), 1e-300));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };
  report.slope_ij = slope([](const ExpansionReport::Row& r) { return r.max_dK_ij; });
  report.slope_it = slope([](const ExpansionReport::Row& r) { return r.max_K_it; });
  return report;
}

namespace {

std::vector<WarpingProfile> ramp_family(double C) {
  std::vector<WarpingProfile> family;
  double L = 1.0;
  while (mu_sup_d1() / L > C || mu_sup_d2() / (L * L) > C) L *= 2.0;
  family.push_back(mu_L_ramp(L));

  double T = 1.0;
  while (2.0 / T > C || 2.0 * kPi / (T * T) > C) T *= 2.0;
  family.push_back(smoothstep_ramp(T));

  double Ld = 1.0;
  while (0.5 * mu_sup_d1() / Ld > C || 0.5 * mu_sup_d2() / (Ld * Ld) > C) Ld *= 2.0;
  family.push_back(double_ramp(Ld));
  return family;
}

}  // namespace

double find_C(const MetricPath& path, int p, const GridSpec& grid, std::uint64_t seed) {
  if (!path_slices_positive(path, p, 9, seed_mix(seed, 0x736c696365ull)))
    fail(Err::InvalidParams, "find_C: path slices are not certified positive at p");

  double C = 1.0;
  while (C >= 1e-6) {
    bool all_positive = true;
    const auto family = ramp_family(C);
    for (std::size_t fi = 0; fi < family.size() && all_positive; ++fi) {
      const MetricModel cyl = path_cylinder(path, family[fi]);
      const auto cert = certify(cyl, p, grid, 1e-7, seed_mix(seed, 100 + fi));
      if (cert.verdict != Verdict::Positive) all_positive = false;
    }
    if (all_positive) return C;
    C *= 0.5;
  }
  fail(Err::SearchExhausted, "find_C: no admissible C above 1e-6");
}

Concordance build_concordance(const MetricPath& path, int p, std::uint64_t seed) {
  Concordance con;
  con.C = find_C(path, p, GridSpec{}, seed_mix(seed, 1));
  double L = 1.0;
  while (mu_sup_d1() / L > con.C || mu_sup_d2() / (L * L) > con.C) L *= 2.0;
  con.L = L;

  const WarpingProfile ramp = mu_L_ramp(L);
  con.cylinder = path_cylinder(path, ramp);
  con.cylinder.id = "concordance-cylinder";
  con.certificate = certify(con.cylinder, p, GridSpec{}, 1e-7, seed_mix(seed, 2));

  // Product ends: components must be t-independent on [0,1] and [L+1, L+2].
  for (int side = 0; side < 2; ++side) {
    const double t0 = side == 0 ? 0.0 : L + 1.0;
    const double ref = side == 0 ? 0.0 : 1.0;
    for (int i = 0; i <= 64; ++i) {
      const double t = t0 + i / 64.0;
      for (const auto& b : path.blocks) {
        const ProfileSample rho_end = b.radius(ref);
        const ProfileSample rho_cyl = compose_profile(b.radius, ramp)(t);
        con.boundary_residual = std::max(
            con.boundary_residual,
            std::abs(rho_cyl.value * rho_cyl.value - rho_end.value * rho_end.value));
        con.boundary_residual = std::max(con.boundary_residual, std::abs(rho_cyl.d1));
      }
    }
  }
  for (int i = 0; i <= 10000; ++i) {
    const double t = (L + 2.0) * i / 10000.0;
    const ProfileSample f = ramp(t);
    con.ramp_d1_max = std::max(con.ramp_d1_max, std::abs(f.d1));
    con.ramp_d2_max = std::max(con.ramp_d2_max, std::abs(f.d2));
  }
  return con;
}

std::string Concordance::summary() const {
  std::ostringstream out;
  out << "spn concordance v1\n";
  out << "C = " << fmt17(C) << "\n";
  out << "L = " << fmt17(L) << "\n";
  out << "certified_min = " << fmt17(certificate.min_value) << "\n";
  out << "verdict = " << to_string(certificate.verdict) << "\n";
  out << "boundary_residual = " << fmt17(boundary_residual) << "\n";
  out << "sup_f_d1 = " << fmt17(ramp_d1_max) << "\n";
  out << "sup_f_d2 = " << fmt17(ramp_d2_max) << "\n";
  return out.str();
}

}  // namespace spn
