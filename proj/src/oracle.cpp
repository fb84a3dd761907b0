#include "spn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spn/io.hpp"

namespace spn {

namespace {

// Nested spherical chart factors for S^d: |d_theta_i|^2 = prod_{m<i} sin^2(theta_m).
double chart_factor(const Eigen::VectorXd& angles, int i) {
  double f = 1.0;
  for (int m = 0; m < i; ++m) f *= std::sin(angles[m]);
  return f;
}

struct BlockInfo {
  int dim = 0;
  int offset = 0;  // first angle coordinate in the chart
};

struct ChartShape {
  int base = 0;  // number of base coordinates
  std::vector<BlockInfo> blocks;
};

ChartShape chart_shape(const MetricModel& model) {
  ChartShape shape;
  std::vector<int> dims;
  switch (model.kind) {
    case ModelKind::ProductOfSpheres:
      shape.base = 0;
      for (const auto& b : model.blocks) dims.push_back(b.dim);
      break;
    case ModelKind::WarpedLine:
      shape.base = 1;
      dims.push_back(model.fiber_dim);
      break;
    case ModelKind::TwoDWarp:
      shape.base = 2;
      dims.push_back(model.fiber_dim);
      break;
    case ModelKind::MultiplyWarpedLine:
      shape.base = 1;
      for (const auto& b : model.blocks) dims.push_back(b.dim);
      break;
    case ModelKind::RegionAssembly:
      fail(Err::UnsupportedModel, "chart_of runs per region of an assembly");
  }
  if (model.extra_sphere_dim > 0) dims.push_back(model.extra_sphere_dim);
  int off = shape.base;
  for (int d : dims) {
    shape.blocks.push_back({d, off});
    off += d;
  }
  return shape;
}

// Squared radius of each fiber block at the base coordinates.
std::vector<double> block_radii(const MetricModel& model, double c0) {
  std::vector<double> rho;
  switch (model.kind) {
    case ModelKind::ProductOfSpheres:
      for (const auto& b : model.blocks) rho.push_back(b.radius.value(0.0));
      break;
    case ModelKind::WarpedLine:
    case ModelKind::TwoDWarp:
      rho.push_back(model.beta.value(c0));
      break;
    case ModelKind::MultiplyWarpedLine:
      for (const auto& b : model.blocks) rho.push_back(b.radius.value(c0));
      break;
    case ModelKind::RegionAssembly:
      break;
  }
  if (model.extra_sphere_dim > 0) rho.push_back(1.0);
  return rho;
}

}  // namespace

ChartMetric chart_of(const MetricModel& model) {
  if (model.kind == ModelKind::RegionAssembly)
    fail(Err::UnsupportedModel, "chart_of runs per region of an assembly");
  const ChartShape shape = chart_shape(model);
  int dim = shape.base;
  for (const auto& b : shape.blocks) dim += b.dim;

  ChartMetric chart;
  chart.dim = dim;
  chart.box_lo = Eigen::VectorXd::Constant(dim, kChartEpsilon);
  chart.box_hi = Eigen::VectorXd::Constant(dim, kPi - kChartEpsilon);
  switch (model.kind) {
    case ModelKind::WarpedLine:
    case ModelKind::TwoDWarp:
      chart.box_lo[0] = model.beta.lo();
      chart.box_hi[0] = model.beta.hi();
      if (model.kind == ModelKind::TwoDWarp) {
        chart.box_lo[1] = model.omega.tlo();
        chart.box_hi[1] = model.omega.thi();
      }
      break;
    case ModelKind::MultiplyWarpedLine:
      chart.box_lo[0] = model.line_lo;
      chart.box_hi[0] = model.line_hi;
      break;
    default:
      break;
  }

  MetricModel m = model;  // captured by value; profiles are immutable
  chart.components = [m, shape, dim](const Eigen::VectorXd& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < shape.base; ++i) g(i, i) = 1.0;
    if (m.kind == ModelKind::TwoDWarp) {
      const double w = m.omega.value(x[0], x[1]);
      g(1, 1) = w * w;
    }
    const std::vector<double> rho = block_radii(m, shape.base > 0 ? x[0] : 0.0);
    for (std::size_t b = 0; b < shape.blocks.size(); ++b) {
      const BlockInfo& blk = shape.blocks[b];
      const Eigen::VectorXd angles = x.segment(blk.offset, blk.dim);
      for (int i = 0; i < blk.dim; ++i) {
        const double cf = chart_factor(angles, i);
        g(blk.offset + i, blk.offset + i) = rho[b] * rho[b] * cf * cf;
      }
    }
    return g;
  };
  return chart;
}

namespace {

void require_in_box(const ChartMetric& chart, const Eigen::VectorXd& x, double margin) {
  for (int i = 0; i < chart.dim; ++i)
    if (x[i] - margin < chart.box_lo[i] - 1e-12 || x[i] + margin > chart.box_hi[i] + 1e-12)
      fail(Err::StencilOutOfDomain, "finite-difference stencil leaves the chart box");
}

}  // namespace

std::vector<Eigen::MatrixXd> fd_christoffel(const ChartMetric& chart, const Eigen::VectorXd& x,
                                            double h) {
  const int d = chart.dim;
  require_in_box(chart, x, h);
  const Eigen::MatrixXd g0 = chart.components(x);
  const Eigen::MatrixXd ginv = g0.inverse();
  std::vector<Eigen::MatrixXd> dg(d);
  for (int l = 0; l < d; ++l) {
    Eigen::VectorXd xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    dg[l] = (chart.components(xp) - chart.components(xm)) / (2.0 * h);
  }
  std::vector<Eigen::MatrixXd> gamma(d, Eigen::MatrixXd::Zero(d, d));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double sum = 0;
        for (int l = 0; l < d; ++l) sum += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        gamma[k](i, j) = gamma[k](j, i) = 0.5 * sum;
      }
  return gamma;
}

Riemann4 fd_riemann(const ChartMetric& chart, const Eigen::VectorXd& x, double h) {
  const int d = chart.dim;
  require_in_box(chart, x, 2.0 * h);
  const std::vector<Eigen::MatrixXd> gamma0 = fd_christoffel(chart, x, h);
  std::vector<std::vector<Eigen::MatrixXd>> dgamma(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    const auto gp = fd_christoffel(chart, xp, h);
    const auto gm = fd_christoffel(chart, xm, h);
    dgamma[i].resize(d);
    for (int l = 0; l < d; ++l) dgamma[i][l] = (gp[l] - gm[l]) / (2.0 * h);
  }
  Riemann4 R;
  R.d = d;
  R.v.assign(static_cast<std::size_t>(d) * d * d * d, 0.0);
  for (int l = 0; l < d; ++l)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
          double quad = 0;
          for (int m = 0; m < d; ++m)
            quad += gamma0[l](i, m) * gamma0[m](j, k) - gamma0[l](j, m) * gamma0[m](i, k);
          R.at(l, i, j, k) = dgamma[i][l](j, k) - dgamma[j][l](i, k) + quad;
        }
  return R;
}

double fd_sectional(const ChartMetric& chart, const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                    const Eigen::VectorXd& w, double h) {
  const int d = chart.dim;
  const Eigen::MatrixXd g0 = chart.components(x);
  const double area2 = (v.dot(g0 * v)) * (w.dot(g0 * w)) - std::pow(v.dot(g0 * w), 2);
  if (area2 < 1e-18) fail(Err::DegeneratePair, "fd_sectional: dependent pair");
  const Riemann4 R = fd_riemann(chart, x, h);
  // g(R(v,w)w, v)
  Eigen::VectorXd Rw = Eigen::VectorXd::Zero(d);
  for (int l = 0; l < d; ++l) {
    double sum = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) sum += R.at(l, i, j, k) * v[i] * w[j] * w[k];
    Rw[l] = sum;
  }
  return Rw.dot(g0 * v) / area2;
}

TensorResiduals riemann_residuals(const ChartMetric& chart, const Eigen::VectorXd& x, double h) {
  const int d = chart.dim;
  const Eigen::MatrixXd g0 = chart.components(x);
  const Riemann4 R = fd_riemann(chart, x, h);
  // Lowered tensor L(i,j,k,l) = g(R(d_i,d_j) d_k, d_l).
  Riemann4 L;
  L.d = d;
  L.v.assign(R.v.size(), 0.0);
  double scale = 1.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double sum = 0;
          for (int m = 0; m < d; ++m) sum += g0(l, m) * R.at(m, i, j, k);
          L.at(i, j, k, l) = sum;
          scale = std::max(scale, std::abs(sum));
        }
  TensorResiduals res;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          const double a = L.at(i, j, k, l);
          res.symmetry = std::max(res.symmetry, std::abs(a + L.at(j, i, k, l)));
          res.symmetry = std::max(res.symmetry, std::abs(a + L.at(i, j, l, k)));
          res.symmetry = std::max(res.symmetry, std::abs(a - L.at(k, l, i, j)));
          res.bianchi =
              std::max(res.bianchi, std::abs(a + L.at(j, k, i, l) + L.at(k, i, j, l)));
        }
  res.symmetry /= scale;
  res.bianchi /= scale;
  return res;
}

// ---------------------------------------------------------------------------
// Cross-checks
// ---------------------------------------------------------------------------

namespace {

// Columns are the chart representations of the orthonormal frame directions.
Eigen::MatrixXd frame_to_chart(const MetricModel& model, const Eigen::VectorXd& x) {
  const ChartShape shape = chart_shape(model);
  int dim = shape.base;
  for (const auto& b : shape.blocks) dim += b.dim;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  int col = 0;
  for (int i = 0; i < shape.base; ++i) {
    double len = 1.0;
    if (model.kind == ModelKind::TwoDWarp && i == 1) len = model.omega.value(x[0], x[1]);
    M(i, col++) = 1.0 / len;
  }
  const std::vector<double> rho = block_radii(model, shape.base > 0 ? x[0] : 0.0);
  for (std::size_t b = 0; b < shape.blocks.size(); ++b) {
    const BlockInfo& blk = shape.blocks[b];
    const Eigen::VectorXd angles = x.segment(blk.offset, blk.dim);
    for (int i = 0; i < blk.dim; ++i)
      M(blk.offset + i, col++) = 1.0 / (rho[b] * chart_factor(angles, i));
  }
  return M;
}

ModelPoint chart_to_model_point(const MetricModel& model, const Eigen::VectorXd& x) {
  const ChartShape shape = chart_shape(model);
  ModelPoint pt;
  if (shape.base >= 1) pt.r = x[0];
  if (shape.base >= 2) pt.t = x[1];
  pt.fiber_angles.assign(x.data() + shape.base, x.data() + x.size());
  return pt;
}

}  // namespace

Eigen::VectorXd random_chart_point(const MetricModel& model, const ChartMetric& chart, Rng& rng) {
  const ChartShape shape = chart_shape(model);
  const double beta_floor = (model.kind == ModelKind::WarpedLine || model.kind == ModelKind::TwoDWarp)
                                ? 0.15 * profile_max_abs(model.beta, 0, 513)
                                : 0.0;
  for (int attempt = 0; attempt < 500; ++attempt) {
    Eigen::VectorXd x(chart.dim);
    for (int i = 0; i < shape.base; ++i) {
      const double lo = chart.box_lo[i], hi = chart.box_hi[i];
      const double pad = 0.05 * (hi - lo);
      x[i] = rng.uniform(lo + pad, hi - pad);
    }
    for (int i = shape.base; i < chart.dim; ++i) x[i] = rng.uniform(0.45, kPi - 0.45);
    bool ok = true;
    if (beta_floor > 0 && model.beta.value(x[0]) < beta_floor) ok = false;
    if (ok && model.kind == ModelKind::TwoDWarp && model.omega.value(x[0], x[1]) < 0.1) ok = false;
    if (ok) return x;
  }
  fail(Err::DomainError, "random_chart_point: no generic point found");
}

CrosscheckReport crosscheck(const MetricModel& model, int samples, double h, double tol,
                            std::uint64_t seed) {
  if (model.kind == ModelKind::RegionAssembly) {
    CrosscheckReport report;
    report.model_id = model.id;
    report.h = h;
    report.tol = tol;
    for (std::size_t i = 0; i < model.regions.size(); ++i) {
      CrosscheckReport sub =
          crosscheck(model.regions[i].model, samples, h, tol, seed_mix(seed, i));
      report.max_residual = std::max(report.max_residual, sub.max_residual);
      report.samples.insert(report.samples.end(), sub.samples.begin(), sub.samples.end());
    }
    report.pass = report.max_residual < tol;
    return report;
  }

  const ChartMetric chart = chart_of(model);
  CrosscheckReport report;
  report.model_id = model.id;
  report.h = h;
  report.tol = tol;
  report.samples.resize(samples);

  parallel_for(
      static_cast<std::size_t>(samples),
      [&](std::size_t i) {
        Rng rng(seed_mix(seed, i));
        const Eigen::VectorXd x = random_chart_point(model, chart, rng);
        const ModelPoint pt = chart_to_model_point(model, x);
        const PairCurvatures pc = PairCurvatures::at(model, pt);
        const int d = pc.dim();
        // Random orthonormal pair in the orthonormal frame.
        Eigen::VectorXd a(d), b(d);
        for (int j = 0; j < d; ++j) a[j] = rng.normal();
        for (int j = 0; j < d; ++j) b[j] = rng.normal();
        const auto pair = gram_schmidt({a, b});
        const double closed = pc.sectional(pair[0], pair[1]);
        const Eigen::MatrixXd M = frame_to_chart(model, x);
        const double oracle = fd_sectional(chart, x, M * pair[0], M * pair[1], h);
        CrosscheckSample s;
        s.point = pt;
        s.closed_form = closed;
        s.oracle = oracle;
        s.residual = std::abs(closed - oracle);
        report.samples[i] = s;
      },
      default_threads());

  for (const auto& s : report.samples) report.max_residual = std::max(report.max_residual, s.residual);
  report.pass = report.max_residual < tol;
  return report;
}

std::string CrosscheckReport::text() const {
  std::ostringstream out;
  out << "crosscheck " << model_id << "  h=" << fmt17(h) << "  tol=" << fmt17(tol) << "\n";
  out << "samples=" << samples.size() << "  max_residual=" << fmt17(max_residual) << "  "
      << (pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

void CrosscheckReport::write_csv(const std::string& path) const {
  std::string body = "model,r,t,closed_form,oracle,residual\n";
  for (const auto& s : samples) {
    body += model_id;
    body += ',' + fmt17(s.point.r) + ',' + fmt17(s.point.t) + ',' + fmt17(s.closed_form) + ',' +
            fmt17(s.oracle) + ',' + fmt17(s.residual) + '\n';
  }
  write_text_file(path, body);
}

CurvatureReport report_with_oracle(const MetricModel& model, const ModelPoint& x,
                                   const PlaneComplement& complement, double h, double tol) {
  CurvatureReport report;
  report.point = x;
  report.p = complement.p;
  report.plane = complement;
  report.s_value = s_pn(model, x, complement);

  const ChartMetric chart = chart_of(model);
  Eigen::VectorXd coords(chart.dim);
  const ChartShape shape = chart_shape(model);
  if (shape.base >= 1) coords[0] = x.r;
  if (shape.base >= 2) coords[1] = x.t;
  for (int i = shape.base; i < chart.dim; ++i) {
    const int ai = i - shape.base;
    coords[i] = ai < static_cast<int>(x.fiber_angles.size()) ? x.fiber_angles[ai] : kPi / 2.0;
  }
  const Eigen::MatrixXd M = frame_to_chart(model, coords);
  const FrameLayout layout = frame_layout(model);
  double oracle_sum = 0;
  for (std::size_t i = 0; i < complement.basis.size(); ++i)
    for (std::size_t j = i + 1; j < complement.basis.size(); ++j) {
      const Eigen::VectorXd vi = to_components(complement.basis[i], layout);
      const Eigen::VectorXd vj = to_components(complement.basis[j], layout);
      oracle_sum += 2.0 * fd_sectional(chart, coords, M * vi, M * vj, h);
    }
  report.oracle_residual = std::abs(report.s_value - oracle_sum);
  report.verified = *report.oracle_residual < tol;
  return report;
}

}  // namespace spn
