#include "spn/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace spn {

double TangentVector::norm() const {
  double s = comp_r * comp_r + comp_t * comp_t;
  for (double c : comp_fiber) s += c * c;
  return std::sqrt(s);
}

double gram_residual(const PlaneComplement& c) {
  double worst = 0;
  const auto n = c.basis.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const auto& a = c.basis[i];
      const auto& b = c.basis[j];
      double dot = a.comp_r * b.comp_r + a.comp_t * b.comp_t;
      for (std::size_t k = 0; k < a.comp_fiber.size(); ++k) dot += a.comp_fiber[k] * b.comp_fiber[k];
      worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// MetricModel queries
// ---------------------------------------------------------------------------

int MetricModel::ambient_dim() const {
  switch (kind) {
    case ModelKind::ProductOfSpheres: {
      int d = extra_sphere_dim;
      for (const auto& b : blocks) d += b.dim;
      return d;
    }
    case ModelKind::WarpedLine:
      return 1 + fiber_dim + extra_sphere_dim;
    case ModelKind::TwoDWarp:
      return 2 + fiber_dim + extra_sphere_dim;
    case ModelKind::MultiplyWarpedLine: {
      int d = 1 + extra_sphere_dim;
      for (const auto& b : blocks) d += b.dim;
      return d;
    }
    case ModelKind::RegionAssembly:
      return regions.empty() ? 0 : regions.front().model.ambient_dim();
  }
  return 0;
}

bool MetricModel::closed_at_r0() const {
  if (kind != ModelKind::WarpedLine && kind != ModelKind::TwoDWarp) return false;
  return std::abs(beta.value(beta.lo())) < 1e-9;
}

bool MetricModel::closed_at_rmax() const {
  if (kind != ModelKind::WarpedLine && kind != ModelKind::TwoDWarp) return false;
  return std::abs(beta.value(beta.hi())) < 1e-9;
}

FrameLayout frame_layout(const MetricModel& model) {
  FrameLayout layout;
  switch (model.kind) {
    case ModelKind::ProductOfSpheres:
      for (const auto& b : model.blocks) layout.block_dims.push_back(b.dim);
      break;
    case ModelKind::WarpedLine:
      layout.has_r = true;
      layout.block_dims.push_back(model.fiber_dim);
      break;
    case ModelKind::TwoDWarp:
      layout.has_r = true;
      layout.has_t = true;
      layout.block_dims.push_back(model.fiber_dim);
      break;
    case ModelKind::MultiplyWarpedLine:
      layout.has_r = true;
      for (const auto& b : model.blocks) layout.block_dims.push_back(b.dim);
      break;
    case ModelKind::RegionAssembly:
      fail(Err::UnsupportedModel, "frame_layout: assemblies are handled per region");
  }
  if (model.extra_sphere_dim > 0) layout.block_dims.push_back(model.extra_sphere_dim);
  return layout;
}

Eigen::VectorXd to_components(const TangentVector& v, const FrameLayout& layout) {
  Eigen::VectorXd out(layout.dim());
  int idx = 0;
  if (layout.has_r) out[idx++] = v.comp_r;
  if (layout.has_t) out[idx++] = v.comp_t;
  int fiber_total = 0;
  for (int b : layout.block_dims) fiber_total += b;
  if (static_cast<int>(v.comp_fiber.size()) != fiber_total)
    fail(Err::DimensionMismatch, "tangent vector fiber components do not match the model");
  for (double c : v.comp_fiber) out[idx++] = c;
  return out;
}

TangentVector from_components(const Eigen::VectorXd& v, const FrameLayout& layout) {
  if (v.size() != layout.dim())
    fail(Err::DimensionMismatch, "component vector does not match the frame layout");
  TangentVector out;
  int idx = 0;
  if (layout.has_r) out.comp_r = v[idx++];
  if (layout.has_t) out.comp_t = v[idx++];
  out.comp_fiber.assign(v.data() + idx, v.data() + v.size());
  return out;
}

// ---------------------------------------------------------------------------
// Gram-Schmidt and random complements
// ---------------------------------------------------------------------------

std::vector<Eigen::VectorXd> gram_schmidt(const std::vector<Eigen::VectorXd>& vectors) {
  std::vector<Eigen::VectorXd> q;
  q.reserve(vectors.size());
  for (const auto& v : vectors) {
    Eigen::VectorXd u = v;
    const double original = u.norm();
    if (original < 1e-14) fail(Err::DegenerateInput, "gram_schmidt: zero vector");
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& e : q) u -= e.dot(u) * e;
    const double resid = u.norm();
    if (resid < 1e-10 * original) fail(Err::DegenerateInput, "gram_schmidt: rank-deficient input");
    q.push_back(u / resid);
  }
  return q;
}

std::vector<TangentVector> gram_schmidt(const std::vector<TangentVector>& vectors,
                                        const FrameLayout& layout) {
  std::vector<Eigen::VectorXd> flat;
  flat.reserve(vectors.size());
  for (const auto& v : vectors) flat.push_back(to_components(v, layout));
  std::vector<TangentVector> out;
  for (const auto& q : gram_schmidt(flat)) out.push_back(from_components(q, layout));
  return out;
}

namespace {

std::vector<Eigen::VectorXd> random_orthonormal(std::uint64_t seed, int n_amb, int p) {
  if (p < 0 || p > n_amb - 2) fail(Err::InvalidP, "random_complement: need 0 <= p <= n_amb - 2");
  Rng rng(seed_mix(seed, 0x706c616e65ull));
  const int k = n_amb - p;
  std::vector<Eigen::VectorXd> draws;
  draws.reserve(k);
  for (int i = 0; i < k; ++i) {
    Eigen::VectorXd v(n_amb);
    for (int j = 0; j < n_amb; ++j) v[j] = rng.normal();
    draws.push_back(std::move(v));
  }
  return gram_schmidt(draws);
}

}  // namespace

PlaneComplement random_complement(std::uint64_t seed, int n_amb, int p) {
  PlaneComplement c;
  c.dim_ambient = n_amb;
  c.p = p;
  for (const auto& v : random_orthonormal(seed, n_amb, p)) {
    TangentVector tv;
    tv.comp_fiber.assign(v.data(), v.data() + v.size());
    c.basis.push_back(std::move(tv));
  }
  return c;
}

PlaneComplement random_complement(std::uint64_t seed, const FrameLayout& layout, int p) {
  PlaneComplement c;
  c.dim_ambient = layout.dim();
  c.p = p;
  for (const auto& v : random_orthonormal(seed, layout.dim(), p))
    c.basis.push_back(from_components(v, layout));
  return c;
}

// ---------------------------------------------------------------------------
// Interfaces
// ---------------------------------------------------------------------------

EdgeComponents edge_components(const MetricModel& assembly, const EdgeRef& e, double s) {
  if (assembly.kind != ModelKind::RegionAssembly)
    fail(Err::UnsupportedModel, "edge_components expects a region assembly");
  if (e.region < 0 || e.region >= static_cast<int>(assembly.regions.size()))
    fail(Err::InvalidParams, "interface references a missing region");
  const MetricModel& m = assembly.regions[e.region].model;
  const double u = e.s0 + (e.s1 - e.s0) * s;
  EdgeComponents out;
  if (m.kind == ModelKind::TwoDWarp) {
    const double r = (e.fixed_coord == 0) ? e.fixed_value : u;
    const double t = (e.fixed_coord == 0) ? u : e.fixed_value;
    const double w = m.omega.value(r, t);
    if (e.fixed_coord == 0) {  // edge runs along t
      out.along = w * w;
      out.transverse = 1.0;
    } else {  // edge runs along r
      out.along = 1.0;
      out.transverse = w * w;
    }
    const double bv = m.beta.value(r);
    out.fiber_sq = bv * bv;
  } else if (m.kind == ModelKind::WarpedLine) {
    const double bv = m.beta.value(u);
    out.along = 1.0;
    out.transverse = 1.0;
    out.fiber_sq = bv * bv;
  } else {
    fail(Err::UnsupportedModel, "edge_components: unsupported region kind");
  }
  return out;
}

InterfaceReport check_region_interfaces(const MetricModel& assembly, double tol, int samples) {
  if (assembly.kind != ModelKind::RegionAssembly)
    fail(Err::UnsupportedModel, "check_region_interfaces expects a region assembly");
  InterfaceReport report;
  for (const auto& spec : assembly.interfaces) {
    double worst = 0;
    for (int i = 0; i < samples; ++i) {
      const double s = static_cast<double>(i) / (samples - 1);
      const EdgeComponents ca = edge_components(assembly, spec.a, s);
      const EdgeComponents cb = edge_components(assembly, spec.b, s);
      worst = std::max({worst, std::abs(ca.along - cb.along),
                        std::abs(ca.transverse - cb.transverse),
                        std::abs(ca.fiber_sq - cb.fiber_sq)});
    }
    report.entries.push_back({spec.name, worst});
    report.max_mismatch = std::max(report.max_mismatch, worst);
  }
  report.pass = report.max_mismatch < tol;
  return report;
}

// ---------------------------------------------------------------------------
// Constructors and validation
// ---------------------------------------------------------------------------

MetricModel make_product_of_spheres(const std::vector<int>& dims,
                                    const std::vector<double>& radii) {
  if (dims.empty() || dims.size() != radii.size())
    fail(Err::InvalidParams, "product of spheres needs matching dims and radii");
  MetricModel m;
  m.kind = ModelKind::ProductOfSpheres;
  m.id = "product-spheres";
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 1 || !(radii[i] > 0)) fail(Err::InvalidParams, "sphere factors need dim>=1, radius>0");
    m.blocks.push_back({dims[i], constant_profile(radii[i], 0.0, 1.0)});
  }
  return m;
}

MetricModel make_warped_line(int fiber_dim, const WarpingProfile& beta) {
  if (fiber_dim < 1) fail(Err::InvalidParams, "warped line needs fiber dim >= 1");
  MetricModel m;
  m.kind = ModelKind::WarpedLine;
  m.id = "warped-line";
  m.fiber_dim = fiber_dim;
  m.beta = beta;
  return m;
}

MetricModel make_two_d_warp(int fiber_dim, const WarpingProfile& beta, const TwoVarProfile& omega) {
  if (fiber_dim < 1) fail(Err::InvalidParams, "two-warp needs fiber dim >= 1");
  MetricModel m;
  m.kind = ModelKind::TwoDWarp;
  m.id = "two-d-warp";
  m.fiber_dim = fiber_dim;
  m.beta = beta;
  m.omega = omega;
  return m;
}

MetricModel make_multiply_warped(const std::vector<SphereBlock>& blocks, double lo, double hi) {
  if (blocks.empty() || !(hi > lo)) fail(Err::InvalidParams, "multiply warped needs blocks and a domain");
  MetricModel m;
  m.kind = ModelKind::MultiplyWarpedLine;
  m.id = "multiply-warped";
  m.blocks = blocks;
  m.line_lo = lo;
  m.line_hi = hi;
  return m;
}

MetricModel with_extra_sphere(MetricModel model, int m) {
  if (m < 0) fail(Err::InvalidParams, "extra sphere dim must be >= 0");
  if (model.kind == ModelKind::RegionAssembly) {
    for (auto& region : model.regions) region.model.extra_sphere_dim = m;
  }
  model.extra_sphere_dim = m;
  return model;
}

namespace {

void check_positive_interior(const WarpingProfile& p, const std::string& what) {
  const int samples = 257;
  for (int i = 1; i + 1 < samples; ++i) {
    const double r = p.lo() + (p.hi() - p.lo()) * i / (samples - 1);
    if (!(p.value(r) > 0)) fail(Err::InvalidParams, what + " not strictly positive in the interior");
  }
}

}  // namespace

void validate_model(const MetricModel& model) {
  switch (model.kind) {
    case ModelKind::ProductOfSpheres:
      for (const auto& b : model.blocks)
        if (!(b.radius.value(0.0) > 0)) fail(Err::InvalidParams, "sphere radius must be positive");
      break;
    case ModelKind::WarpedLine:
      check_positive_interior(model.beta, "beta");
      break;
    case ModelKind::TwoDWarp: {
      check_positive_interior(model.beta, "beta");
      const int nr = 65, nt = 65;
      for (int i = 1; i + 1 < nr; ++i) {
        for (int j = 1; j + 1 < nt; ++j) {
          const double r = model.omega.rlo() + (model.omega.rhi() - model.omega.rlo()) * i / (nr - 1);
          const double t = model.omega.tlo() + (model.omega.thi() - model.omega.tlo()) * j / (nt - 1);
          if (!(model.omega.value(r, t) > 0))
            fail(Err::InvalidParams, "omega not strictly positive in the interior");
        }
      }
      break;
    }
    case ModelKind::MultiplyWarpedLine:
      for (const auto& b : model.blocks) check_positive_interior(b.radius, "fiber radius");
      break;
    case ModelKind::RegionAssembly: {
      for (const auto& region : model.regions) validate_model(region.model);
      const InterfaceReport report = check_region_interfaces(model, 1e-9);
      if (!report.pass)
        fail(Err::InterfaceMismatch,
             "region interfaces disagree by " + std::to_string(report.max_mismatch));
      break;
    }
  }
}

}  // namespace spn
