#include "spn/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "spn/io.hpp"

namespace spn {

namespace {

// Richardson limit of beta''(r)/dist as the closed end is approached;
// equals beta''' at a left end and -beta''' at a right end.
double end_second_derivative_ratio(const WarpingProfile& beta, bool at_rmax) {
  const double span = beta.hi() - beta.lo();
  const double h = 1e-3 * span;
  auto ratio = [&](double hh) {
    return at_rmax ? beta.d2(beta.hi() - hh) / hh : beta.d2(beta.lo() + hh) / hh;
  };
  return (4.0 * ratio(0.5 * h) - ratio(h)) / 3.0;
}

double axis_limit_of(const WarpingProfile& beta, bool at_rmax) {
  const double end = at_rmax ? beta.hi() : beta.lo();
  const double b0 = beta.value(end);
  const double b1 = beta.d1(end);
  if (std::abs(b0) > 1e-9 || std::abs(std::abs(b1) - 1.0) > 1e-9)
    fail(Err::NotClosed, "axis limit needs beta = 0 and |beta'| = 1 at the end");
  const double e = end_second_derivative_ratio(beta, at_rmax);
  // l = -beta'''/beta' at the end; the ratio above carries a sign flip at rmax.
  const double b3 = at_rmax ? -e : e;
  return -b3 / b1;
}

int block_offset(const FrameLayout& layout, int block) {
  int off = layout.base_dims();
  for (int b = 0; b < block; ++b) off += layout.block_dims[b];
  return off;
}

}  // namespace

double axis_epsilon(const MetricModel& model) {
  if (model.kind != ModelKind::WarpedLine && model.kind != ModelKind::TwoDWarp) return 0.0;
  const double span = model.beta.hi() - model.beta.lo();
  double scale = span;
  if (model.closed_at_r0() || model.closed_at_rmax()) {
    const double l = limit_at_axis(model, model.closed_at_rmax() && !model.closed_at_r0());
    if (l > 1e-12) scale = std::min(scale, 1.0 / std::sqrt(l));
  }
  return 1e-3 * scale;
}

double limit_at_axis(const MetricModel& model, bool at_rmax) {
  if (model.kind != ModelKind::WarpedLine && model.kind != ModelKind::TwoDWarp)
    fail(Err::UnsupportedModel, "limit_at_axis applies to singly/doubly warped models");
  return axis_limit_of(model.beta, at_rmax);
}

// ---------------------------------------------------------------------------
// PairCurvatures
// ---------------------------------------------------------------------------

PairCurvatures PairCurvatures::at(const MetricModel& model, const ModelPoint& x) {
  PairCurvatures pc;
  pc.layout_ = frame_layout(model);
  const int d = pc.layout_.dim();
  pc.K_ = Eigen::MatrixXd::Zero(d, d);

  const int nblocks = static_cast<int>(pc.layout_.block_dims.size());
  auto fill_block_pair = [&](int blk_a, int blk_b, double value) {
    const int oa = block_offset(pc.layout_, blk_a), da = pc.layout_.block_dims[blk_a];
    const int ob = block_offset(pc.layout_, blk_b), db = pc.layout_.block_dims[blk_b];
    for (int i = oa; i < oa + da; ++i)
      for (int j = ob; j < ob + db; ++j)
        if (i != j) pc.K_(i, j) = pc.K_(j, i) = value;
  };
  auto fill_base_block = [&](int base_idx, int blk, double value) {
    const int ob = block_offset(pc.layout_, blk), db = pc.layout_.block_dims[blk];
    for (int j = ob; j < ob + db; ++j) pc.K_(base_idx, j) = pc.K_(j, base_idx) = value;
  };

  switch (model.kind) {
    case ModelKind::ProductOfSpheres: {
      for (int b = 0; b < nblocks; ++b) {
        const bool extra = model.extra_sphere_dim > 0 && b == nblocks - 1;
        const double rho = extra ? 1.0 : model.blocks[b].radius.value(0.0);
        fill_block_pair(b, b, 1.0 / (rho * rho));
      }
      break;
    }
    case ModelKind::WarpedLine:
    case ModelKind::TwoDWarp: {
      const double eps = axis_epsilon(model);
      const bool at_left_axis = model.closed_at_r0() && x.r - model.beta.lo() < eps;
      const bool at_right_axis = model.closed_at_rmax() && model.beta.hi() - x.r < eps;
      double k_rf, k_ff;
      if (at_left_axis || at_right_axis) {
        const double l = axis_limit_of(model.beta, at_right_axis);
        k_rf = k_ff = l;
      } else {
        const ProfileSample b = model.beta(x.r);
        k_rf = -b.d2 / b.value;
        k_ff = (1.0 - b.d1 * b.d1) / (b.value * b.value);
      }
      fill_base_block(0, 0, k_rf);
      fill_block_pair(0, 0, k_ff);
      if (model.kind == ModelKind::TwoDWarp) {
        const TwoVarSample w = model.omega(x.r, x.t);
        const double k_rt = -w.drr / w.value;
        double k_tf;
        if (at_left_axis || at_right_axis) {
          // omega_r vanishes at a closed axis; the t-fiber limit equals K_rt.
          k_tf = k_rt;
        } else {
          const ProfileSample b = model.beta(x.r);
          k_tf = -w.dr * b.d1 / (w.value * b.value);
        }
        pc.K_(0, 1) = pc.K_(1, 0) = k_rt;
        fill_base_block(1, 0, k_tf);
      }
      if (model.extra_sphere_dim > 0) fill_block_pair(nblocks - 1, nblocks - 1, 1.0);
      break;
    }
    case ModelKind::MultiplyWarpedLine: {
      std::vector<ProfileSample> rho(nblocks);
      for (int b = 0; b < nblocks; ++b) {
        const bool extra = model.extra_sphere_dim > 0 && b == nblocks - 1;
        rho[b] = extra ? ProfileSample{1.0, 0.0, 0.0} : model.blocks[b].radius(x.r);
      }
      for (int b = 0; b < nblocks; ++b) {
        fill_base_block(0, b, -rho[b].d2 / rho[b].value);
        fill_block_pair(b, b, (1.0 - rho[b].d1 * rho[b].d1) / (rho[b].value * rho[b].value));
        for (int c = b + 1; c < nblocks; ++c)
          fill_block_pair(b, c, -rho[b].d1 * rho[c].d1 / (rho[b].value * rho[c].value));
      }
      break;
    }
    case ModelKind::RegionAssembly:
      fail(Err::UnsupportedModel, "assemblies are evaluated per region");
  }
  return pc;
}

double PairCurvatures::quad_form(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  const int d = dim();
  if (v.size() != d || w.size() != d) fail(Err::DimensionMismatch, "quad_form: wrong vector size");
  double sum = 0;
  for (int a = 0; a < d; ++a) {
    for (int b = a + 1; b < d; ++b) {
      const double wedge = v[a] * w[b] - v[b] * w[a];
      sum += K_(a, b) * wedge * wedge;
    }
  }
  return sum;
}

double PairCurvatures::sectional(const Eigen::VectorXd& v, const Eigen::VectorXd& w) const {
  const double area2 = v.squaredNorm() * w.squaredNorm() - std::pow(v.dot(w), 2);
  if (area2 < 1e-20) fail(Err::DegeneratePair, "sectional: vectors are linearly dependent");
  return quad_form(v, w) / area2;
}

double PairCurvatures::s_sum(const Eigen::MatrixXd& basis) const {
  double sum = 0;
  for (int i = 0; i < basis.cols(); ++i)
    for (int j = i + 1; j < basis.cols(); ++j) sum += quad_form(basis.col(i), basis.col(j));
  return 2.0 * sum;
}

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

namespace {

void require_interior(const MetricModel& model, const ModelPoint& x) {
  const double eps = axis_epsilon(model);
  if (model.closed_at_r0() && x.r - model.beta.lo() < eps)
    fail(Err::AxisSingularity, "point within axis_epsilon of the closed end; use limit_at_axis");
  if (model.closed_at_rmax() && model.beta.hi() - x.r < eps)
    fail(Err::AxisSingularity, "point within axis_epsilon of the closed end; use limit_at_axis");
}

}  // namespace

SectionalTable base_sectionals(const MetricModel& model, const ModelPoint& x) {
  if (model.kind != ModelKind::WarpedLine && model.kind != ModelKind::TwoDWarp)
    fail(Err::UnsupportedModel, "base_sectionals expects a singly/doubly warped model");
  require_interior(model, x);
  const ProfileSample b = model.beta(x.r);
  SectionalTable tbl;
  tbl.K_ri = -b.d2 / b.value;
  tbl.K_ij = (1.0 - b.d1 * b.d1) / (b.value * b.value);
  if (model.kind == ModelKind::TwoDWarp) {
    const TwoVarSample w = model.omega(x.r, x.t);
    tbl.K_rt = -w.drr / w.value;
    tbl.K_ti = -w.dr * b.d1 / (w.value * b.value);
  }
  return tbl;
}

double riemann_quadform(const MetricModel& model, const ModelPoint& x, const TangentVector& v,
                        const TangentVector& w) {
  require_interior(model, x);
  const PairCurvatures pc = PairCurvatures::at(model, x);
  return pc.quad_form(to_components(v, pc.layout()), to_components(w, pc.layout()));
}

double s_pn(const MetricModel& model, const ModelPoint& x, const PlaneComplement& complement) {
  const PairCurvatures pc = PairCurvatures::at(model, x);
  const int d = pc.dim();
  if (complement.dim_ambient != d)
    fail(Err::DimensionMismatch, "complement ambient dimension does not match the model");
  if (static_cast<int>(complement.basis.size()) != d - complement.p)
    fail(Err::DimensionMismatch, "complement basis must have dim - p vectors");
  if (gram_residual(complement) > 1e-6)
    fail(Err::DegenerateInput, "complement basis is not orthonormal");
  Eigen::MatrixXd basis(d, complement.basis.size());
  for (std::size_t i = 0; i < complement.basis.size(); ++i)
    basis.col(static_cast<int>(i)) = to_components(complement.basis[i], pc.layout());
  return pc.s_sum(basis);
}

MultiplyWarpedTable multiply_warped_sectionals(const MetricModel& model, const ModelPoint& x) {
  if (model.kind != ModelKind::MultiplyWarpedLine)
    fail(Err::UnsupportedModel, "multiply_warped_sectionals expects a multiply warped line");
  const PairCurvatures pc = PairCurvatures::at(model, x);
  const auto& layout = pc.layout();
  const int nb = static_cast<int>(layout.block_dims.size());
  MultiplyWarpedTable tbl;
  tbl.line_block.resize(nb);
  tbl.block_block.resize(nb, nb);
  for (int b = 0; b < nb; ++b) {
    const int ob = block_offset(layout, b);
    tbl.line_block[b] = pc.pair(0, ob);
    for (int c = 0; c < nb; ++c) {
      const int oc = block_offset(layout, c);
      // Within a 1-dimensional block there is no intra pair; report the
      // round-fiber value anyway via the radius profile.
      if (b == c && layout.block_dims[b] == 1) {
        const ProfileSample rho = model.blocks[b].radius(x.r);
        tbl.block_block(b, b) = (1.0 - rho.d1 * rho.d1) / (rho.value * rho.value);
      } else {
        tbl.block_block(b, c) = pc.pair(ob, oc + (b == c ? 1 : 0));
      }
    }
  }
  return tbl;
}

// ---------------------------------------------------------------------------
// Case evaluators
// ---------------------------------------------------------------------------

double s_pn_case(const MetricModel& model, const ModelPoint& x, int case_id,
                 const CasePlaneParams& params) {
  if (model.kind != ModelKind::TwoDWarp)
    fail(Err::UnsupportedModel, "s_pn_case expects a doubly warped model");
  const int n = model.fiber_dim;
  const int p = params.p;
  if (p < 0 || p > n) fail(Err::InvalidP, "case evaluator needs 0 <= p <= n");
  require_interior(model, x);

  const ProfileSample b = model.beta(x.r);
  const TwoVarSample wm = model.omega(x.r, x.t);
  const double beta = b.value, beta_r = b.d1, beta_rr = b.d2;
  const double omega = wm.value, omega_r = wm.dr, omega_rr = wm.drr;
  const double lead = (n - p) * (n - p - 1) * (1.0 - beta_r * beta_r) / (beta * beta);

  // Coordinate components (v_r, v_t, v_k, v_k+1) and the g-norm of a frame
  // vector with fiber slots in comp_fiber[0..1].
  struct Coord {
    double r, t, k, k1, norm2;
  };
  auto to_coord = [&](const TangentVector& v) {
    if (v.comp_fiber.size() > 2)
      fail(Err::CaseMismatch, "case vectors carry at most two fiber slots");
    Coord c{};
    c.r = v.comp_r;
    c.t = v.comp_t / omega;
    c.k = v.comp_fiber.empty() ? 0.0 : v.comp_fiber[0] / beta;
    c.k1 = v.comp_fiber.size() < 2 ? 0.0 : v.comp_fiber[1] / beta;
    c.norm2 = c.r * c.r + omega * omega * c.t * c.t + beta * beta * (c.k * c.k + c.k1 * c.k1);
    return c;
  };

  if (case_id == 1) {
    if (params.v || params.w) fail(Err::CaseMismatch, "case 1 takes no explicit vectors");
    return lead - 2.0 * (n - p) * beta_rr / beta -
           2.0 * (n - p) * omega_r * beta_r / (omega * beta) - 2.0 * omega_rr / omega;
  }
  if (case_id != 2 && case_id != 3) fail(Err::CaseMismatch, "case_id must be 1, 2, or 3");
  if (!params.v || !params.w) fail(Err::CaseMismatch, "cases 2 and 3 need both v and w");
  const Coord v = to_coord(*params.v);
  const Coord w = to_coord(*params.w);
  const double g_vw = v.r * w.r + omega * omega * v.t * w.t +
                      beta * beta * (v.k * w.k + v.k1 * w.k1);
  if (std::abs(g_vw) > 1e-8 * std::sqrt(v.norm2 * w.norm2))
    fail(Err::CaseMismatch, "case vectors must be orthogonal");
  if (case_id == 2 && (std::abs(v.k1) > 1e-12 || std::abs(w.k1) > 1e-12))
    fail(Err::CaseMismatch, "case 2 vectors span a single fiber direction");

  auto mixed_term = [&](const Coord& c) {
    const double fiber2 = c.k * c.k + c.k1 * c.k1;
    return 2.0 * (n - p) / c.norm2 *
           (fiber2 * (1.0 - beta_r * beta_r) - c.r * c.r * beta_rr / beta -
            c.t * c.t * (beta_r / beta) * omega * omega_r);
  };

  const double wedge_rt = v.t * w.r - v.r * w.t;
  const double wedge_kr = v.k * w.r - w.k * v.r;
  const double wedge_k1r = v.k1 * w.r - w.k1 * v.r;
  const double wedge_kt = v.k * w.t - w.k * v.t;
  const double wedge_k1t = v.k1 * w.t - w.k1 * v.t;
  const double wedge_kk1 = v.k * w.k1 - v.k1 * w.k;

  const double pair_vw =
      2.0 / (v.norm2 * w.norm2) *
      (-omega * omega_rr * wedge_rt * wedge_rt +
       wedge_kk1 * wedge_kk1 * beta * beta * (1.0 - beta_r * beta_r) -
       (wedge_kr * wedge_kr + wedge_k1r * wedge_k1r) * beta * beta_rr -
       (wedge_kt * wedge_kt + wedge_k1t * wedge_k1t) * beta * beta_r * omega * omega_r);

  return lead + mixed_term(v) + mixed_term(w) + pair_vw;
}

void dump_sectionals_csv(const MetricModel& model, double t, const std::string& path,
                         int samples) {
  CsvTable table;
  table.header = {"r", "K_rt", "K_ri", "K_ti", "K_ij"};
  const double eps = axis_epsilon(model);
  const double lo = model.beta.lo() + (model.closed_at_r0() ? eps * 1.0001 : 0.0);
  const double hi = model.beta.hi() - (model.closed_at_rmax() ? eps * 1.0001 : 0.0);
  for (int i = 0; i < samples; ++i) {
    const double r = lo + (hi - lo) * i / (samples - 1);
    ModelPoint x;
    x.r = r;
    x.t = t;
    const SectionalTable tbl = base_sectionals(model, x);
    table.rows.push_back({r, tbl.K_rt, tbl.K_ri, tbl.K_ti, tbl.K_ij});
  }
  write_csv(table, path);
}

}  // namespace spn
