#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "spn/constructions.hpp"
#include "spn/geometry.hpp"

using namespace spn;

TEST_CASE("gram_schmidt identity case") {
  std::vector<Eigen::VectorXd> in(2, Eigen::VectorXd::Zero(3));
  in[0] << 1, 0, 0;
  in[1] << 1, 1, 0;
  const auto q = gram_schmidt(in);
  CHECK(q[0].isApprox(Eigen::Vector3d(1, 0, 0).eval(), 1e-15));
  CHECK(q[1].isApprox(Eigen::Vector3d(0, 1, 0).eval(), 1e-15));
}

TEST_CASE("gram_schmidt leaves orthonormal sets unchanged") {
  std::vector<Eigen::VectorXd> in(2, Eigen::VectorXd::Zero(4));
  in[0] << 0.5, 0.5, 0.5, 0.5;
  in[1] << 0.5, -0.5, 0.5, -0.5;
  const auto q = gram_schmidt(in);
  CHECK((q[0] - in[0]).norm() < 1e-15);
  CHECK((q[1] - in[1]).norm() < 1e-15);
}

TEST_CASE("gram_schmidt matches a QR factorization oracle") {
  Rng rng(314);
  Eigen::MatrixXd a(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.normal();
  std::vector<Eigen::VectorXd> in;
  for (int j = 0; j < 3; ++j) in.push_back(a.col(j));
  const auto q = gram_schmidt(in);

  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(5, 3);
  const Eigen::MatrixXd R = qr.matrixQR().topRows(3).triangularView<Eigen::Upper>();
  for (int j = 0; j < 3; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);

  for (int j = 0; j < 3; ++j) CHECK((q[j] - Q.col(j)).norm() < 1e-12);
}

TEST_CASE("gram_schmidt rejects rank-deficient input") {
  std::vector<Eigen::VectorXd> in(2, Eigen::VectorXd::Zero(3));
  in[0] << 1, 1, 0;
  in[1] << 2, 2, 0;
  CHECK_THROWS_AS(gram_schmidt(in), Error);
}

TEST_CASE("random_complement is orthonormal and reproducible") {
  const PlaneComplement c = random_complement(1, 4, 0);
  CHECK(c.basis.size() == 4);
  CHECK(gram_residual(c) < 1e-12);

  const PlaneComplement again = random_complement(1, 4, 0);
  for (std::size_t i = 0; i < c.basis.size(); ++i)
    for (std::size_t j = 0; j < c.basis[i].comp_fiber.size(); ++j)
      CHECK(c.basis[i].comp_fiber[j] == again.basis[i].comp_fiber[j]);

  CHECK_THROWS_AS(random_complement(1, 4, 3), Error);
  CHECK_THROWS_AS(random_complement(1, 4, -1), Error);
}

TEST_CASE("random_complement gram residual sweep") {
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed)
    worst = std::max(worst, gram_residual(random_complement(seed, 5, 2)));
  CHECK(worst < 1e-12);
}

TEST_CASE("frame layout round trips tangent vectors") {
  const MetricModel m = build_torpedo_cylinder(3, 1.0, 0.5, 2.0);
  const FrameLayout layout = frame_layout(m);
  CHECK(layout.dim() == 5);
  TangentVector v;
  v.comp_r = 0.25;
  v.comp_t = -0.5;
  v.comp_fiber = {1.0, 2.0, 3.0};
  const Eigen::VectorXd flat = to_components(v, layout);
  const TangentVector back = from_components(flat, layout);
  CHECK(back.comp_r == v.comp_r);
  CHECK(back.comp_t == v.comp_t);
  CHECK(back.comp_fiber == v.comp_fiber);
  CHECK(v.norm() == doctest::Approx(flat.norm()));
}

TEST_CASE("interface check passes on a matched boot and is vacuous without interfaces") {
  const MetricModel boot = assemble_boot(2, 1.0, 8.0, 1.0, 1.0);
  const InterfaceReport report = check_region_interfaces(boot, 1e-9);
  CHECK(report.pass);
  CHECK(report.max_mismatch < 1e-9);
  CHECK(report.entries.size() == 4);

  MetricModel single;
  single.kind = ModelKind::RegionAssembly;
  single.regions.push_back({"only", build_torpedo(2, 1.0, 0.0)});
  const InterfaceReport vacuous = check_region_interfaces(single, 1e-9);
  CHECK(vacuous.pass);
  CHECK(vacuous.entries.empty());
}

TEST_CASE("interface check reports a fiber-block mismatch") {
  MetricModel boot = assemble_boot(2, 1.0, 8.0, 1.0, 1.0);
  // Rebuild the flat block with the wrong radius; the fiber mismatch is the
  // difference of squared radii.
  const double good = boot.regions[3].model.beta.value(0.0);
  const double bad = 1.1 * good;
  const double l2 = boot.regions[3].model.beta.hi();
  const double l3 = boot.regions[3].model.omega.thi();
  boot.regions[3].model = make_two_d_warp(2, constant_profile(bad, 0.0, l2),
                                          constant_two_var(1.0, 0.0, l2, 0.0, l3));
  const InterfaceReport report = check_region_interfaces(boot, 1e-9);
  CHECK_FALSE(report.pass);
  CHECK(report.max_mismatch ==
        doctest::Approx(std::abs(bad * bad - good * good)).epsilon(1e-10));
}

TEST_CASE("model validation flags nonpositive interiors") {
  CHECK_NOTHROW(validate_model(build_torpedo(2, 1.0, 0.5)));
  CHECK_NOTHROW(validate_model(build_toe(2, 1.0, 0.5, 0.5)));
  const WarpingProfile dips = WarpingProfile(
      [](double r) { return ProfileSample{r - 0.5, 1.0, 0.0}; }, 0.0, 1.0, 0.0);
  CHECK_THROWS_AS(validate_model(make_warped_line(2, dips)), Error);
}
