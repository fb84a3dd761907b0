#include "spn/positivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spn/io.hpp"

namespace spn {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Positive: return "positive";
    case Verdict::Nonpositive: return "nonpositive";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::Structured: return "structured";
    case Strategy::RandomRestart: return "random-restart";
    case Strategy::Both: return "both";
  }
  return "?";
}

namespace {

// ---------------------------------------------------------------------------
// Stiefel descent
// ---------------------------------------------------------------------------

// QR-based orthonormalisation with a deterministic sign convention.
Eigen::MatrixXd qf(const Eigen::MatrixXd& y) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(y);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(y.rows(), y.cols());
  const Eigen::MatrixXd r = qr.matrixQR().topRows(y.cols()).triangularView<Eigen::Upper>();
  for (int i = 0; i < y.cols(); ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

// F(Y) = sum over ordered column pairs of R(y_i, y_j, y_j, y_i).
double frame_objective(const PairCurvatures& pc, const Eigen::MatrixXd& y) {
  return pc.s_sum(y);
}

// Euclidean gradient of F: G(:,m) = 4 sum_{j != m} s_mj with
// s_mj[c] = sum_b K(c,b) (Y_cm Y_bj - Y_bm Y_cj) Y_bj.
Eigen::MatrixXd frame_gradient(const PairCurvatures& pc, const Eigen::MatrixXd& y) {
  const int d = static_cast<int>(y.rows());
  const int k = static_cast<int>(y.cols());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, k);
  for (int m = 0; m < k; ++m) {
    for (int j = 0; j < k; ++j) {
      if (j == m) continue;
      for (int c = 0; c < d; ++c) {
        double sum = 0;
        for (int b = 0; b < d; ++b) {
          if (b == c) continue;
          sum += pc.pair(c, b) * (y(c, m) * y(b, j) - y(b, m) * y(c, j)) * y(b, j);
        }
        g(c, m) += 4.0 * sum;
      }
    }
  }
  return g;
}

struct DescentResult {
  double value = 0;
  Eigen::MatrixXd y;
};

// Projected gradient descent on the Stiefel manifold with Armijo backtracking.
DescentResult stiefel_descent(Eigen::MatrixXd y,
                              const std::function<double(const Eigen::MatrixXd&)>& objective,
                              const std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>& grad,
                              int max_iters) {
  double f = objective(y);
  double step = 1.0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const Eigen::MatrixXd g = grad(y);
    const Eigen::MatrixXd sym = 0.5 * (y.transpose() * g + g.transpose() * y);
    const Eigen::MatrixXd tangent = g - y * sym;
    const double gnorm = tangent.norm();
    if (gnorm < 1e-10 * (1.0 + std::abs(f))) break;
    step = std::min(step * 2.0, 1.0 / std::max(gnorm, 1e-12));
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      const Eigen::MatrixXd y_new = qf(y - step * tangent);
      const double f_new = objective(y_new);
      if (f_new <= f - 1e-4 * step * gnorm * gnorm) {
        y = y_new;
        f = f_new;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {f, y};
}

// Finite-difference Euclidean gradient for objectives without analytic form.
Eigen::MatrixXd fd_gradient(const std::function<double(const Eigen::MatrixXd&)>& objective,
                            const Eigen::MatrixXd& y, double h = 1e-6) {
  Eigen::MatrixXd g(y.rows(), y.cols());
  Eigen::MatrixXd probe = y;
  for (int c = 0; c < y.cols(); ++c)
    for (int r = 0; r < y.rows(); ++r) {
      const double old = probe(r, c);
      probe(r, c) = old + h;
      const double fp = objective(probe);
      probe(r, c) = old - h;
      const double fm = objective(probe);
      probe(r, c) = old;
      g(r, c) = (fp - fm) / (2.0 * h);
    }
  return g;
}

// ---------------------------------------------------------------------------
// Random-restart strategy on the full Stiefel parametrisation
// ---------------------------------------------------------------------------

DescentResult stiefel_min(const PairCurvatures& pc, int k, int restarts, std::uint64_t seed) {
  const int d = pc.dim();
  auto objective = [&pc](const Eigen::MatrixXd& y) { return frame_objective(pc, y); };
  auto gradient = [&pc](const Eigen::MatrixXd& y) { return frame_gradient(pc, y); };

  DescentResult best;
  best.value = std::numeric_limits<double>::infinity();
  Rng rng(seed_mix(seed, 0x73746965ull));
  for (int restart = 0; restart < restarts; ++restart) {
    Eigen::MatrixXd y0(d, k);
    if (restart == 0) {
      // Axis-aligned start: the last k frame directions.
      y0.setZero();
      for (int i = 0; i < k; ++i) y0(d - k + i, i) = 1.0;
    } else {
      for (int c = 0; c < k; ++c)
        for (int r = 0; r < d; ++r) y0(r, c) = rng.normal();
      y0 = qf(y0);
    }
    const DescentResult res = stiefel_descent(y0, objective, gradient, 200);
    if (res.value < best.value) best = res;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Structured strategy
// ---------------------------------------------------------------------------

// Reduced-space description: columns of the assembled complement are
// n_pure fixed fiber directions plus the lifted reduced vectors.
struct ReducedSpace {
  std::vector<int> frame_index;  // reduced coordinate -> frame index
  int n_pure = 0;
  std::vector<int> pure_frame_index;
};

Eigen::MatrixXd lift_complement(const ReducedSpace& rs, int d, const Eigen::MatrixXd& vw) {
  const int k = rs.n_pure + static_cast<int>(vw.cols());
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(d, k);
  for (int i = 0; i < rs.n_pure; ++i) basis(rs.pure_frame_index[i], i) = 1.0;
  for (int c = 0; c < vw.cols(); ++c)
    for (std::size_t rr = 0; rr < rs.frame_index.size(); ++rr)
      basis(rs.frame_index[rr], rs.n_pure + c) = vw(static_cast<int>(rr), c);
  return basis;
}

// Structured minimum for singly and doubly warped single-fiber models: the
// complement keeps n - p pure fiber directions and the remaining one or two
// vectors live in span{d_r, d_t, two fiber slots}. On doubly warped models the
// objective goes through the case evaluators, so this route cross-checks them
// against the generic quadratic form at every certified point.
DescentResult structured_single_fiber(const MetricModel& model, const ModelPoint& x,
                                      const PairCurvatures& pc, int p, std::uint64_t seed) {
  const FrameLayout& layout = pc.layout();
  const int d = pc.dim();
  const int base = layout.base_dims();
  const int k = d - p;
  const int n_pure = k - base;          // fiber directions always in the complement
  const int m_f = std::min(base, p);    // fiber slots reachable by the mixed vectors

  ReducedSpace rs;
  rs.n_pure = n_pure;
  for (int i = 0; i < n_pure; ++i) rs.pure_frame_index.push_back(base + m_f + i);
  for (int i = 0; i < base; ++i) rs.frame_index.push_back(i);
  for (int i = 0; i < m_f; ++i) rs.frame_index.push_back(base + i);
  const int rdim = static_cast<int>(rs.frame_index.size());

  const double eps = axis_epsilon(model);
  const bool on_axis = (model.closed_at_r0() && x.r - model.beta.lo() < eps) ||
                       (model.closed_at_rmax() && model.beta.hi() - x.r < eps);
  const bool use_cases =
      model.kind == ModelKind::TwoDWarp && model.extra_sphere_dim == 0 && !on_axis;
  auto objective = [&](const Eigen::MatrixXd& vw_raw) {
    const Eigen::MatrixXd vw = qf(vw_raw);
    if (use_cases) {
      auto to_vec = [&](int col) {
        TangentVector tv;
        tv.comp_r = vw(0, col);
        tv.comp_t = vw(1, col);
        tv.comp_fiber.assign(2, 0.0);
        for (int i = 0; i < m_f; ++i) tv.comp_fiber[i] = vw(base + i, col);
        return tv;
      };
      CasePlaneParams params;
      params.p = p;
      params.v = to_vec(0);
      params.w = to_vec(1);
      return s_pn_case(model, x, 3, params);
    }
    return frame_objective(pc, lift_complement(rs, d, vw));
  };

  DescentResult best;
  best.value = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_vw;

  std::vector<Eigen::MatrixXd> starts;
  if (base == 1) {
    for (int a = 0; a < rdim; ++a) {
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rdim, 1);
      y(a, 0) = 1.0;
      starts.push_back(y);
    }
  } else {
    for (int a = 0; a < rdim; ++a)
      for (int b = a + 1; b < rdim; ++b) {
        Eigen::MatrixXd y = Eigen::MatrixXd::Zero(rdim, 2);
        y(a, 0) = 1.0;
        y(b, 1) = 1.0;
        starts.push_back(y);
      }
  }
  Rng rng(seed_mix(seed, 0x7374727563ull));
  for (int extra = 0; extra < 6; ++extra) {
    Eigen::MatrixXd y(rdim, base);
    for (int c = 0; c < base; ++c)
      for (int r = 0; r < rdim; ++r) y(r, c) = rng.normal();
    starts.push_back(qf(y));
  }

  for (const auto& y0 : starts) {
    auto grad = [&](const Eigen::MatrixXd& y) { return fd_gradient(objective, y); };
    const DescentResult res = stiefel_descent(y0, objective, grad, 120);
    if (res.value < best.value) {
      best = res;
      best_vw = qf(res.y);
    }
  }
  best.y = lift_complement(rs, d, best_vw);
  return best;
}

// Structured candidates for product / multiply warped models: axis-aligned
// compositions (c_a directions per frame class), then descent from the best.
DescentResult structured_blocks(const PairCurvatures& pc, int k, std::uint64_t seed) {
  const FrameLayout& layout = pc.layout();
  const int d = pc.dim();
  struct Class {
    int offset, dim;
  };
  std::vector<Class> classes;
  int off = 0;
  if (layout.has_r) classes.push_back({off++, 1});
  if (layout.has_t) classes.push_back({off++, 1});
  for (int bd : layout.block_dims) {
    classes.push_back({off, bd});
    off += bd;
  }

  DescentResult best;
  best.value = std::numeric_limits<double>::infinity();
  std::vector<int> counts(classes.size(), 0);
  std::function<void(std::size_t, int)> enumerate = [&](std::size_t idx, int left) {
    if (idx == classes.size()) {
      if (left != 0) return;
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(d, k);
      int col = 0;
      for (std::size_t c = 0; c < classes.size(); ++c)
        for (int i = 0; i < counts[c]; ++i) y(classes[c].offset + i, col++) = 1.0;
      const double value = frame_objective(pc, y);
      if (value < best.value) best = {value, y};
      return;
    }
    const int cap = std::min(classes[idx].dim, left);
    for (int c = 0; c <= cap; ++c) {
      counts[idx] = c;
      enumerate(idx + 1, left - c);
    }
  };
  enumerate(0, k);

  // Refine the best composition by descent, plus one seeded random start.
  auto objective = [&pc](const Eigen::MatrixXd& y) { return frame_objective(pc, y); };
  auto gradient = [&pc](const Eigen::MatrixXd& y) { return frame_gradient(pc, y); };
  DescentResult refined = stiefel_descent(best.y, objective, gradient, 200);
  if (refined.value < best.value) best = refined;
  Rng rng(seed_mix(seed, 0x626c6f636bull));
  Eigen::MatrixXd y(d, k);
  for (int c = 0; c < k; ++c)
    for (int r = 0; r < d; ++r) y(r, c) = rng.normal();
  const DescentResult extra = stiefel_descent(qf(y), objective, gradient, 200);
  if (extra.value < best.value) best = extra;
  return best;
}

DescentResult structured_min(const MetricModel& model, const ModelPoint& x,
                             const PairCurvatures& pc, int p, std::uint64_t seed) {
  const bool single_fiber =
      (model.kind == ModelKind::WarpedLine || model.kind == ModelKind::TwoDWarp) &&
      model.extra_sphere_dim == 0;
  if (single_fiber) return structured_single_fiber(model, x, pc, p, seed);
  return structured_blocks(pc, pc.dim() - p, seed);
}

PlaneComplement complement_from_matrix(const Eigen::MatrixXd& basis, const FrameLayout& layout,
                                       int p) {
  PlaneComplement c;
  c.dim_ambient = layout.dim();
  c.p = p;
  for (int i = 0; i < basis.cols(); ++i) c.basis.push_back(from_components(basis.col(i), layout));
  return c;
}

struct PointResult {
  double min_value = 0;
  Eigen::MatrixXd basis;
  double gap = 0;
};

PointResult min_at_point(const MetricModel& model, const ModelPoint& x, int p, Strategy strategy,
                         std::uint64_t seed, int restarts) {
  const PairCurvatures pc = PairCurvatures::at(model, x);
  const int d = pc.dim();
  if (p < 0 || p > d - 2) fail(Err::InvalidP, "min_over_grassmann: need 0 <= p <= dim - 2");
  const int k = d - p;

  PointResult out;
  if (strategy == Strategy::Structured) {
    const DescentResult res = structured_min(model, x, pc, p, seed);
    out.min_value = res.value;
    out.basis = qf(res.y);
    return out;
  }
  if (strategy == Strategy::RandomRestart) {
    const DescentResult res = stiefel_min(pc, k, restarts, seed);
    out.min_value = res.value;
    out.basis = res.y;
    return out;
  }
  const DescentResult a = structured_min(model, x, pc, p, seed);
  const DescentResult b = stiefel_min(pc, k, restarts, seed);
  out.gap = std::abs(a.value - b.value);
  if (a.value <= b.value) {
    out.min_value = a.value;
    out.basis = qf(a.y);
  } else {
    out.min_value = b.value;
    out.basis = b.y;
  }
  return out;
}

std::vector<ModelPoint> certification_grid(const MetricModel& model, const GridSpec& grid) {
  std::vector<ModelPoint> pts;
  switch (model.kind) {
    case ModelKind::ProductOfSpheres: {
      pts.push_back({});
      break;
    }
    case ModelKind::WarpedLine:
    case ModelKind::TwoDWarp: {
      const double lo = model.beta.lo(), hi = model.beta.hi();
      std::vector<double> rs;
      for (int i = 0; i < grid.n1; ++i) rs.push_back(lo + (hi - lo) * i / (grid.n1 - 1));
      if (model.kind == ModelKind::WarpedLine) {
        for (double r : rs) pts.push_back({r, 0.0, {}});
      } else {
        const double tlo = model.omega.tlo(), thi = model.omega.thi();
        for (double r : rs)
          for (int j = 0; j < grid.n2; ++j) {
            const double t = tlo + (thi - tlo) * j / (grid.n2 - 1);
            if (model.omega.value(r, t) < 1e-9) continue;  // closing corner
            pts.push_back({r, t, {}});
          }
      }
      break;
    }
    case ModelKind::MultiplyWarpedLine: {
      for (int i = 0; i < grid.n1; ++i)
        pts.push_back({model.line_lo + (model.line_hi - model.line_lo) * i / (grid.n1 - 1), 0.0, {}});
      break;
    }
    case ModelKind::RegionAssembly:
      break;
  }
  return pts;
}

}  // namespace

std::pair<double, PlaneComplement> min_over_grassmann(const MetricModel& model,
                                                      const ModelPoint& x, int p,
                                                      Strategy strategy, std::uint64_t seed) {
  const PointResult res = min_at_point(model, x, p, strategy, seed, 16);
  const FrameLayout layout = frame_layout(model);
  return {res.min_value, complement_from_matrix(res.basis, layout, p)};
}

PositivityCertificate certify(const MetricModel& model, int p, const GridSpec& grid,
                              double tolerance, std::uint64_t seed, Strategy strategy) {
  PositivityCertificate cert;
  cert.model_id = model.id;
  cert.p = p;
  cert.grid = grid;
  cert.tolerance = tolerance;
  cert.seed = seed;
  cert.strategy = strategy;

  if (model.kind != ModelKind::RegionAssembly) {
    const int d = frame_layout(model).dim();
    if (p < 0 || p > d - 2) fail(Err::InvalidP, "certify: need 0 <= p <= dim - 2");
  }

  if (model.kind == ModelKind::RegionAssembly) {
    cert.min_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < model.regions.size(); ++i) {
      PositivityCertificate sub =
          certify(model.regions[i].model, p, grid, tolerance, seed_mix(seed, i), strategy);
      sub.model_id = model.id + ":" + model.regions[i].name;
      if (sub.min_value < cert.min_value) {
        cert.min_value = sub.min_value;
        cert.argmin_point = sub.argmin_point;
        cert.argmin_plane = sub.argmin_plane;
      }
      cert.strategy_gap = std::max(cert.strategy_gap, sub.strategy_gap);
      cert.region_certificates.push_back(std::move(sub));
    }
  } else {
    const std::vector<ModelPoint> pts = certification_grid(model, grid);
    std::vector<PointResult> results(pts.size());
    parallel_for(
        pts.size(),
        [&](std::size_t i) {
          results[i] = min_at_point(model, pts[i], p, strategy, seed_mix(seed, i), grid.restarts);
        },
        default_threads());

    cert.min_value = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cert.per_point.push_back({pts[i], results[i].min_value});
      cert.strategy_gap = std::max(cert.strategy_gap, results[i].gap);
      if (results[i].min_value < cert.min_value) {
        cert.min_value = results[i].min_value;
        arg = i;
      }
    }
    cert.argmin_point = pts[arg];
    const FrameLayout layout = frame_layout(model);
    cert.argmin_plane = complement_from_matrix(results[arg].basis, layout, p);
  }

  if (cert.min_value > tolerance)
    cert.verdict = Verdict::Positive;
  else if (cert.min_value < -tolerance)
    cert.verdict = Verdict::Nonpositive;
  else
    cert.verdict = Verdict::Inconclusive;
  return cert;
}

double reevaluate_argmin(const MetricModel& model, const PositivityCertificate& cert) {
  if (model.kind == ModelKind::RegionAssembly) {
    for (std::size_t i = 0; i < model.regions.size(); ++i) {
      const auto& sub = cert.region_certificates[i];
      if (sub.min_value == cert.min_value)
        return reevaluate_argmin(model.regions[i].model, sub);
    }
    fail(Err::InvalidParams, "certificate does not match the assembly");
  }
  return s_pn(model, cert.argmin_point, cert.argmin_plane);
}

int sphere_product_threshold(const std::vector<int>& dims) {
  int n = 0;
  for (int d : dims) {
    if (d < 1) fail(Err::InvalidParams, "sphere factors need dimension >= 1");
    n += d;
  }
  const int m = static_cast<int>(dims.size());
  const int threshold = n - m;
  const MetricModel model = make_product_of_spheres(dims, std::vector<double>(dims.size(), 1.0));
  GridSpec grid;
  if (threshold - 1 >= 0) {
    const auto below = certify(model, threshold - 1, grid, 1e-7, 1);
    if (below.verdict != Verdict::Positive)
      fail(Err::InvalidParams, "threshold verification failed below n - m");
  }
  if (m >= 2 && threshold <= n - 2) {
    const auto at = certify(model, threshold, grid, 1e-7, 1);
    if (at.verdict == Verdict::Positive)
      fail(Err::InvalidParams, "threshold verification failed at n - m");
  }
  return threshold;
}

std::vector<DeltaScalingRow> delta_scaling_probe(
    const std::function<MetricModel(double)>& family, int p, const std::vector<double>& deltas,
    const GridSpec& grid, double tolerance, std::uint64_t seed) {
  std::vector<DeltaScalingRow> rows;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0) || (i > 0 && deltas[i] >= deltas[i - 1]))
      fail(Err::InvalidParams, "delta list must be positive and decreasing");
    const MetricModel model = family(deltas[i]);
    const auto cert = certify(model, p, grid, tolerance, seed_mix(seed, i));
    DeltaScalingRow row;
    row.delta = deltas[i];
    row.min_value = cert.min_value;
    if (i > 0) {
      const double expect = std::pow(deltas[i - 1] / deltas[i], 2) / 2.0;
      row.ratio_ok = row.min_value >= expect * rows[i - 1].min_value;
    }
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string PositivityCertificate::text() const {
  std::ostringstream out;
  out << "spn certificate v1\n";
  out << "model = " << model_id << "\n";
  out << "p = " << p << "\n";
  out << "grid = " << grid.n1 << "x" << grid.n2 << " restarts = " << grid.restarts << "\n";
  out << "strategy = " << to_string(strategy) << "\n";
  out << "seed = " << seed << "\n";
  out << "tolerance = " << fmt17(tolerance) << "\n";
  out << "min_value = " << fmt17(min_value) << "\n";
  out << "argmin_r = " << fmt17(argmin_point.r) << "\n";
  out << "argmin_t = " << fmt17(argmin_point.t) << "\n";
  out << "strategy_gap = " << fmt17(strategy_gap) << "\n";
  out << "verdict = " << to_string(verdict) << "\n";
  for (std::size_t i = 0; i < argmin_plane.basis.size(); ++i) {
    out << "argmin_basis_" << i << " =";
    const auto& v = argmin_plane.basis[i];
    out << " " << fmt17(v.comp_r) << " " << fmt17(v.comp_t);
    for (double c : v.comp_fiber) out << " " << fmt17(c);
    out << "\n";
  }
  for (const auto& sub : region_certificates)
    out << "region " << sub.model_id << " min = " << fmt17(sub.min_value)
        << " verdict = " << to_string(sub.verdict) << "\n";
  return out.str();
}

void PositivityCertificate::write_csv(const std::string& path) const {
  CsvTable table;
  table.header = {"r", "t", "min_s"};
  for (const auto& pm : per_point) table.rows.push_back({pm.point.r, pm.point.t, pm.min_value});
  for (const auto& sub : region_certificates)
    for (const auto& pm : sub.per_point) table.rows.push_back({pm.point.r, pm.point.t, pm.min_value});
  spn::write_csv(table, path);
}

int PositivityCertificate::exit_code() const {
  switch (verdict) {
    case Verdict::Positive: return 0;
    case Verdict::Nonpositive: return 1;
    case Verdict::Inconclusive: return 2;
  }
  return 2;
}

}  // namespace spn
