#include <doctest.h>

#include <cmath>

#include "spn/constructions.hpp"
#include "spn/curvature.hpp"

using namespace spn;

namespace {

MetricModel flat_cylinder(int n, double delta, double rlen = 2.0, double tlen = 2.0) {
  return make_two_d_warp(n, constant_profile(delta, 0.0, rlen),
                         constant_two_var(1.0, 0.0, rlen, 0.0, tlen));
}

// Round sphere of radius delta as a doubly warped product:
// dr^2 + delta^2 cos^2(r/delta) dt^2 + delta^2 sin^2(r/delta) ds_n^2.
MetricModel round_two_warp(int n, double delta) {
  const double b = kPi * delta / 2.0;
  auto omega = TwoVarProfile(
      [delta](double r, double) {
        return TwoVarSample{delta * std::cos(r / delta), -std::sin(r / delta), 0.0,
                            -std::cos(r / delta) / delta};
      },
      0.0, b, 0.0, 1.0);
  return make_two_d_warp(n, sine_profile(delta, 0.0, b), omega);
}

PlaneComplement complement_from(const FrameLayout& layout, const std::vector<Eigen::VectorXd>& v,
                                int p) {
  PlaneComplement c;
  c.dim_ambient = layout.dim();
  c.p = p;
  for (const auto& x : v) c.basis.push_back(from_components(x, layout));
  return c;
}

}  // namespace

TEST_CASE("base sectionals of flat and round models") {
  // flat cylinder with round fiber: only the fiber pairs curve
  const MetricModel flat = flat_cylinder(3, 0.5);
  const SectionalTable t1 = base_sectionals(flat, {1.0, 1.0, {}});
  CHECK(t1.K_rt == 0.0);
  CHECK(t1.K_ri == 0.0);
  CHECK(t1.K_ti == 0.0);
  CHECK(t1.K_ij == doctest::Approx(4.0).epsilon(1e-12));

  // unit round sphere in polar form: the beta-driven entries are 1 and the
  // flat t direction contributes nothing
  const MetricModel polar = make_two_d_warp(
      2, sine_profile(1.0, 0.0, kPi), constant_two_var(1.0, 0.0, kPi, 0.0, 1.0));
  const SectionalTable t2 = base_sectionals(polar, {kPi / 3.0, 0.5, {}});
  CHECK(t2.K_ri == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t2.K_ij == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t2.K_rt == 0.0);
  CHECK(t2.K_ti == 0.0);

  // full round-sphere degeneracy: all four coordinate-plane curvatures agree
  for (double delta : {1.0, 0.5, 3.0}) {
    const MetricModel round = round_two_warp(2, delta);
    const SectionalTable t3 = base_sectionals(round, {0.6 * delta, 0.3, {}});
    const double k = 1.0 / (delta * delta);
    CHECK(t3.K_rt == doctest::Approx(k).epsilon(1e-9));
    CHECK(t3.K_ri == doctest::Approx(k).epsilon(1e-9));
    CHECK(t3.K_ti == doctest::Approx(k).epsilon(1e-9));
    CHECK(t3.K_ij == doctest::Approx(k).epsilon(1e-9));
  }

  // torpedo cap region has unit fiber curvature at delta = 1
  const MetricModel torp = build_torpedo_cylinder(2, 1.0, 0.0, 1.0);
  const SectionalTable t4 = base_sectionals(torp, {kPi / 8.0, 0.5, {}});
  CHECK(t4.K_ij == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(base_sectionals(build_torpedo(2, 1.0, 0.0), {1e-6, 0.0, {}}), Error);
}

TEST_CASE("riemann quadratic form") {
  const MetricModel flat = flat_cylinder(3, 0.7);
  TangentVector er, efib;
  er.comp_r = 1.0;
  er.comp_fiber = {0.0, 0.0, 0.0};
  efib.comp_fiber = {1.0, 0.0, 0.0};
  CHECK(riemann_quadform(flat, {1.0, 1.0, {}}, er, efib) == 0.0);

  // unit fiber pair on the torpedo cap carries curvature 1
  const MetricModel torp = build_torpedo(2, 1.0, 0.0);
  TangentVector f1, f2;
  f1.comp_fiber = {1.0, 0.0, 0.0};
  f2.comp_fiber = {0.0, 1.0, 0.0};
  f1.comp_r = f2.comp_r = 0.0;
  CHECK(riemann_quadform(torp, {kPi / 8.0, 0.0, {}}, f1, f2) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // on the unit sphere R(v,w,w,v) = |v wedge w|^2
  const MetricModel sphere = make_warped_line(3, sine_profile(1.0, 0.0, kPi));
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    TangentVector v, w;
    v.comp_r = rng.normal();
    w.comp_r = rng.normal();
    v.comp_fiber = {rng.normal(), rng.normal(), rng.normal()};
    w.comp_fiber = {rng.normal(), rng.normal(), rng.normal()};
    const double r = rng.uniform(0.5, 2.5);
    const double q = riemann_quadform(sphere, {r, 0.0, {}}, v, w);
    const FrameLayout layout = frame_layout(sphere);
    const Eigen::VectorXd a = to_components(v, layout), b = to_components(w, layout);
    const double area2 = a.squaredNorm() * b.squaredNorm() - std::pow(a.dot(b), 2);
    CHECK(q == doctest::Approx(area2).epsilon(1e-10));
    // antisymmetry: exactly zero on a dependent pair
    CHECK(riemann_quadform(sphere, {r, 0.0, {}}, v, v) == 0.0);
  }
}

TEST_CASE("s_pn on round spheres and products") {
  // unit S^n: every complement gives (n-p)(n-p-1)
  for (int n : {3, 5}) {
    const MetricModel sphere = make_warped_line(n, sine_profile(1.0, 0.0, kPi));
    const FrameLayout layout = frame_layout(sphere);
    for (int p = 0; p <= n - 2; ++p) {
      PlaneComplement c = random_complement(11 + p, layout, p);
      const double expected = (n + 1 - p) * (n - p);
      CHECK(s_pn(sphere, {1.2, 0.0, {}}, c) == doctest::Approx(expected).epsilon(1e-10));
    }
  }

  // S^2 x S^2, p = 2, complement with one direction in each factor -> 0
  const MetricModel s2s2 = make_product_of_spheres({2, 2}, {1.0, 1.0});
  const FrameLayout layout = frame_layout(s2s2);
  std::vector<Eigen::VectorXd> mixed(2, Eigen::VectorXd::Zero(4));
  mixed[0][0] = 1.0;
  mixed[1][2] = 1.0;
  CHECK(s_pn(s2s2, {}, complement_from(layout, mixed, 2)) == 0.0);

  // p = 1, plane inside one factor -> complement pairs (1,1,0): sum 2
  std::vector<Eigen::VectorXd> three(3, Eigen::VectorXd::Zero(4));
  three[0][1] = 1.0;  // remaining direction of factor one
  three[1][2] = 1.0;
  three[2][3] = 1.0;
  CHECK(s_pn(s2s2, {}, complement_from(layout, three, 1)) == doctest::Approx(2.0));

  // dimension mismatch and non-orthonormal input are rejected
  PlaneComplement bad = complement_from(layout, mixed, 1);  // wrong count for p=1
  CHECK_THROWS_AS(s_pn(s2s2, {}, bad), Error);
}

TEST_CASE("s_pn basis invariance under complement rotations") {
  const MetricModel toe = build_toe(3, 1.0, 0.5, 0.5);
  const ModelPoint x{0.9, 0.3, {}};
  const int d = 5, p = 1, k = d - p;
  const FrameLayout pre_layout = frame_layout(toe);
  const PlaneComplement base = random_complement(99, pre_layout, p);
  const double reference = s_pn(toe, x, base);
  const FrameLayout layout = frame_layout(toe);
  Eigen::MatrixXd B(d, k);
  for (int j = 0; j < k; ++j) B.col(j) = to_components(base.basis[j], layout);

  Rng rng(123);
  double spread = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::VectorXd> cols;
    for (int j = 0; j < k; ++j) {
      Eigen::VectorXd c(k);
      for (int i = 0; i < k; ++i) c[i] = rng.normal();
      cols.push_back(c);
    }
    const auto q = gram_schmidt(cols);
    Eigen::MatrixXd rot(k, k);
    for (int j = 0; j < k; ++j) rot.col(j) = q[j];
    const Eigen::MatrixXd rotated = B * rot;
    std::vector<Eigen::VectorXd> basis;
    for (int j = 0; j < k; ++j) basis.push_back(rotated.col(j));
    spread = std::max(spread,
                      std::abs(s_pn(toe, x, complement_from(layout, basis, p)) - reference));
  }
  CHECK(spread < 1e-10);
}

TEST_CASE("trace identity over complement contractions") {
  // round sphere, analytic: sum_k s_p(Q + e_k) = (m-2) * s_{p-1}(Q) with
  // m = complement size of Q; both sides m(m-1)(m-2) on the unit sphere.
  const int n = 5;
  const MetricModel sphere = make_warped_line(n, sine_profile(1.0, 0.0, kPi));
  const FrameLayout layout = frame_layout(sphere);
  const int d = n + 1;
  for (int p : {1, 2}) {
    const PlaneComplement big = random_complement(7 + p, layout, p - 1);
    const int m = d - (p - 1);
    const double s_small = s_pn(sphere, {1.0, 0.0, {}}, big);
    CHECK(s_small == doctest::Approx(static_cast<double>(m) * (m - 1)).epsilon(1e-10));
    double sum = 0;
    for (int k = 0; k < m; ++k) {
      std::vector<Eigen::VectorXd> rest;
      for (int j = 0; j < m; ++j)
        if (j != k) rest.push_back(to_components(big.basis[j], layout));
      sum += s_pn(sphere, {1.0, 0.0, {}}, complement_from(layout, rest, p));
    }
    CHECK(sum == doctest::Approx((m - 2) * s_small).epsilon(1e-10));
  }

  // warped model, numeric
  const MetricModel bend = build_bend(3, 1.0, 9.0);
  const ModelPoint x{1.1, 0.4, {}};
  const FrameLayout blayout = frame_layout(bend);
  for (int p : {1, 2}) {
    const PlaneComplement big = random_complement(20 + p, blayout, p - 1);
    const int m = 5 - (p - 1);
    const double s_small = s_pn(bend, x, big);
    double sum = 0;
    for (int k = 0; k < m; ++k) {
      std::vector<Eigen::VectorXd> rest;
      for (int j = 0; j < m; ++j)
        if (j != k) rest.push_back(to_components(big.basis[j], blayout));
      sum += s_pn(bend, x, complement_from(blayout, rest, p));
    }
    CHECK(sum == doctest::Approx((m - 2) * s_small).epsilon(1e-9));
  }
}

TEST_CASE("case evaluators agree with the generic sum") {
  const MetricModel toe = build_toe(4, 1.0, 0.5, 0.5);
  const ModelPoint x{0.8, 0.25, {}};
  const int n = 4;

  // case 1: complement {d_r, d_t/omega, fibers}
  for (int p = 0; p <= n; ++p) {
    if (p > n) continue;
    CasePlaneParams params;
    params.p = p;
    const double via_case = s_pn_case(toe, x, 1, params);
    // assemble explicitly
    const FrameLayout layout = frame_layout(toe);
    std::vector<Eigen::VectorXd> basis;
    Eigen::VectorXd er = Eigen::VectorXd::Zero(6), et = Eigen::VectorXd::Zero(6);
    er[0] = 1.0;
    et[1] = 1.0;
    basis.push_back(er);
    basis.push_back(et);
    for (int i = 0; i < n - p; ++i) {
      Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
      f[2 + i] = 1.0;
      basis.push_back(f);
    }
    const double via_generic = s_pn(toe, x, complement_from(layout, basis, p));
    CHECK(std::abs(via_case - via_generic) < 1e-10);
  }

  // cases 2 and 3 with random admissible vectors
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const int p = 2 + (trial % 2);  // leaves room for the two case slots
    const int case_id = (trial % 2) ? 2 : 3;
    std::vector<Eigen::VectorXd> vw(2, Eigen::VectorXd::Zero(4));
    const int active = case_id == 2 ? 3 : 4;  // r, t, k (, k+1)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < active; ++i) vw[j][i] = rng.normal();
    const auto q = gram_schmidt(vw);

    CasePlaneParams params;
    params.p = p;
    TangentVector v, w;
    v.comp_r = q[0][0];
    v.comp_t = q[0][1];
    v.comp_fiber = {q[0][2], q[0][3]};
    w.comp_r = q[1][0];
    w.comp_t = q[1][1];
    w.comp_fiber = {q[1][2], q[1][3]};
    params.v = v;
    params.w = w;
    const double via_case = s_pn_case(toe, x, case_id, params);

    const FrameLayout layout = frame_layout(toe);
    std::vector<Eigen::VectorXd> basis;
    for (int j = 0; j < 2; ++j) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(6);
      e[0] = q[j][0];
      e[1] = q[j][1];
      e[2] = q[j][2];
      e[3] = q[j][3];
      basis.push_back(e);
    }
    for (int i = 0; i < n - p; ++i) {
      Eigen::VectorXd f = Eigen::VectorXd::Zero(6);
      f[4 + i] = 1.0;
      basis.push_back(f);
    }
    const double via_generic = s_pn(toe, x, complement_from(layout, basis, p));
    CHECK(std::abs(via_case - via_generic) < 1e-10);
  }
}

TEST_CASE("case evaluator anchors") {
  // flat block: (n-p)(n-p-1) / delta^2
  const int n = 3;
  const double delta = 0.8;
  const MetricModel flat = flat_cylinder(n, delta);
  for (int p = 0; p <= n - 2; ++p) {
    CasePlaneParams params;
    params.p = p;
    CHECK(s_pn_case(flat, {1.0, 1.0, {}}, 1, params) ==
          doctest::Approx((n - p) * (n - p - 1) / (delta * delta)).epsilon(1e-12));
  }

  // torpedo neck: fiber radius C*delta, curvature 1/(C delta)^2
  const double C = torpedo_constant(1e-12);
  const MetricModel neck = build_torpedo_cylinder(n, 1.0, 2.0, 1.0);
  CasePlaneParams params;
  params.p = 1;
  CHECK(s_pn_case(neck, {kPi / 2.0 + 1.0, 0.5, {}}, 1, params) ==
        doctest::Approx((n - 1) * (n - 2) / (C * C)).epsilon(1e-9));

  // mismatched parameters
  CasePlaneParams bad;
  bad.p = 1;
  CHECK_THROWS_AS(s_pn_case(neck, {1.0, 0.5, {}}, 2, bad), Error);  // missing vectors
  TangentVector v, w;
  v.comp_r = 1.0;
  v.comp_fiber = {0.0, 0.0};
  w = v;  // not orthogonal
  bad.v = v;
  bad.w = w;
  CHECK_THROWS_AS(s_pn_case(neck, {1.0, 0.5, {}}, 2, bad), Error);
}

TEST_CASE("multiply warped sectionals") {
  // constant unit radii: a plain product of unit spheres
  std::vector<SphereBlock> blocks;
  blocks.push_back({2, constant_profile(1.0, 0.0, 2.0)});
  blocks.push_back({3, constant_profile(1.0, 0.0, 2.0)});
  const MetricModel prod = make_multiply_warped(blocks, 0.0, 2.0);
  const MultiplyWarpedTable tbl = multiply_warped_sectionals(prod, {1.0, 0.0, {}});
  CHECK(tbl.block_block(0, 0) == doctest::Approx(1.0));
  CHECK(tbl.block_block(1, 1) == doctest::Approx(1.0));
  CHECK(tbl.block_block(0, 1) == 0.0);
  CHECK(tbl.line_block[0] == 0.0);
  CHECK(tbl.line_block[1] == 0.0);

  // single fiber rho = sin t: the round sphere again
  std::vector<SphereBlock> one;
  one.push_back({3, sine_profile(1.0, 0.0, kPi)});
  const MetricModel sph = make_multiply_warped(one, 0.0, kPi);
  const MultiplyWarpedTable t2 = multiply_warped_sectionals(sph, {1.0, 0.0, {}});
  CHECK(t2.block_block(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t2.line_block[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("axis limits") {
  for (double delta : {1.0, 0.5, 3.0}) {
    const MetricModel torp = build_torpedo(2, delta, 0.5);
    CHECK(limit_at_axis(torp) == doctest::Approx(1.0 / (delta * delta)).epsilon(1e-8));
    const MetricModel sphere = make_warped_line(3, sine_profile(delta, 0.0, kPi * delta));
    CHECK(limit_at_axis(sphere) == doctest::Approx(1.0 / (delta * delta)).epsilon(1e-8));
  }
  // bend closes at the far end
  const MetricModel bend = build_bend(2, 1.0, 9.0);
  CHECK(limit_at_axis(bend, true) == doctest::Approx(1.0).epsilon(1e-8));
  // a cylinder is not closed
  CHECK_THROWS_AS(limit_at_axis(flat_cylinder(2, 1.0)), Error);
}

TEST_CASE("axis pair curvatures reproduce the round sphere") {
  const MetricModel round = round_two_warp(2, 1.0);
  const PairCurvatures pc = PairCurvatures::at(round, {0.0, 0.5, {}});
  for (int a = 0; a < pc.dim(); ++a)
    for (int b = a + 1; b < pc.dim(); ++b)
      CHECK(pc.pair(a, b) == doctest::Approx(1.0).epsilon(1e-7));
}
