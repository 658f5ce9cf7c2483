#include <doctest.h>

#include <cmath>

#include "ucb/grid.hpp"

using namespace ucb;

namespace {

GridField from_xy(const PolarGrid& g, Complex (*f)(Real, Real)) {
  return field_from(g, [f](Real a, Real b) { return f(a, b); });
}

Real max_err(const CVec& got, const CVec& want) {
  Real m = 0;
  for (Eigen::Index k = 0; k < got.size(); ++k) m = std::max(m, std::abs(got[k] - want[k]));
  return m;
}

}  // namespace

TEST_CASE("grid: construction and node count") {
  const PolarGrid g = build_grid(1.0, 2.0, 65, 128);
  CHECK(g.size() == 65 * 128);
  CHECK(g.hr() == doctest::Approx((2.0 - 1.0) / 64).epsilon(1e-15));
  for (int k = 0; k < g.size(); k += 997) {
    const Real r = g.node(k).norm();
    CHECK(r >= 1.0 - 1e-14);
    CHECK(r <= 2.0 + 1e-14);
  }
}

TEST_CASE("grid: invalid geometry rejected") {
  CHECK_THROWS_AS(build_grid(2.0, 1.0, 65, 128), InvalidGeometry);
  CHECK_THROWS_AS(build_grid(-1.0, 2.0, 65, 128), InvalidGeometry);
  CHECK_THROWS_AS(build_grid(1.0, 2.0, 4, 128), InvalidGeometry);
  CHECK_THROWS_AS(build_grid(1.0, 2.0, 65, 6), InvalidGeometry);
  CHECK_THROWS_AS(build_grid(1.0, 2.0, 65, 127), InvalidGeometry);
}

TEST_CASE("grid: quadrature exactness on the annulus area") {
  // both parities of the radial interval count, several sizes
  for (auto [nr, nt] : {std::pair{65, 128}, {64, 128}, {33, 64}, {10, 16}, {9, 8}}) {
    const PolarGrid g = build_grid(1.0, 2.0, nr, nt);
    const Real area = integrate_volume(g, RVec::Ones(g.size()));
    CHECK(area == doctest::Approx(3.0 * kPi).epsilon(1e-12));
  }
  const PolarGrid g = build_grid(0.5, 1.5, 33, 64);
  CHECK(integrate_volume(g, RVec::Ones(g.size())) ==
        doctest::Approx(kPi * (1.5 * 1.5 - 0.25)).epsilon(1e-12));
  CHECK(g.boundary(BoundaryTag::Gamma_outer).arc_weights.sum() ==
        doctest::Approx(2.0 * kPi * 1.5).epsilon(1e-12));
}

TEST_CASE("grid: quadrature weights positive") {
  const PolarGrid g = build_grid(1.0, 2.0, 64, 16);  // exercises the 3/8 tail
  for (int k = 0; k < g.size(); ++k) CHECK(g.volume_weight(k) > 0.0);
}

TEST_CASE("grid: volume integral of |x|^2 matches the antiderivative") {
  const PolarGrid g = build_grid(1.0, 2.0, 65, 128);
  RVec f(g.size());
  for (int k = 0; k < g.size(); ++k) f[k] = g.node(k).squaredNorm();
  // 2 pi int_1^2 r^3 dr = 15 pi / 2; degree-3 radial integrand, exact
  CHECK(integrate_volume(g, f) == doctest::Approx(15.0 * kPi / 2.0).epsilon(1e-12));
}

TEST_CASE("grid: boundary quadrature") {
  const PolarGrid g = build_grid(1.0, 2.0, 33, 64);
  const auto& gam = g.boundary(BoundaryTag::Gamma_outer);
  const auto& inn = g.boundary(BoundaryTag::S_inner);
  CHECK(gam.arc_weights.sum() == doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK(inn.arc_weights.sum() == doctest::Approx(2.0 * kPi).epsilon(1e-12));

  const int nb = static_cast<int>(gam.nodes.size());
  CHECK(integrate_boundary(g, BoundaryTag::Gamma_outer, RVec::Ones(nb)) ==
        doctest::Approx(4.0 * kPi).epsilon(1e-12));
  CHECK(integrate_boundary(g, BoundaryTag::S_inner, RVec::Ones(nb)) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));

  // cos^2(theta) on the outer circle: R * integral = 2 pi, trapezoid exact
  RVec f(nb);
  for (int j = 0; j < nb; ++j) f[j] = std::pow(g.node(gam.nodes[j])[0] / 2.0, 2);
  CHECK(integrate_boundary(g, BoundaryTag::Gamma_outer, f) ==
        doctest::Approx(2.0 * kPi).epsilon(1e-12));

  for (int j = 0; j < nb; ++j) {
    CHECK(gam.normals[j].norm() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inn.normals[j].norm() == doctest::Approx(1.0).epsilon(1e-14));
    // outward of D: -x/|x| on S, +x/|x| on Gamma
    CHECK(gam.normals[j].dot(g.node(gam.nodes[j])) > 0.0);
    CHECK(inn.normals[j].dot(g.node(inn.nodes[j])) < 0.0);
  }
}

TEST_CASE("grid: first derivatives") {
  const PolarGrid g = build_grid(1.0, 2.0, 33, 64);

  SUBCASE("constants are annihilated to coefficient round-off") {
    auto [d1, d2] = partial_derivatives(g, from_xy(g, [](Real, Real) { return Complex(3.5, -1); }));
    CHECK(d1.values.cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d2.values.cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("u = x1: radial part exact, angular part second order") {
    auto [d1, d2] = partial_derivatives(g, from_xy(g, [](Real a, Real) { return Complex(a, 0); }));
    const Real ht = g.htheta();
    // error is sin^2(theta) (1 - sinc(ht)) <= ht^2/6
    const Real bound = ht * ht / 6.0 + 1e-12;
    CHECK(max_err(d1.values, CVec::Ones(g.size())) <= bound);
    CHECK(max_err(d2.values, CVec::Zero(g.size())) <= bound);
  }

  SUBCASE("u = x1 x2: error drops by ~4 under doubling") {
    auto err_at = [](int nr, int nt) {
      const PolarGrid gg = build_grid(1.0, 2.0, nr, nt);
      auto [d1, d2] =
          partial_derivatives(gg, from_xy(gg, [](Real a, Real b) { return Complex(a * b, 0); }));
      CVec want(gg.size());
      for (int k = 0; k < gg.size(); ++k) want[k] = Complex(gg.x2()[k], 0);
      return max_err(d1.values, want);
    };
    const Real ratio = err_at(33, 64) / err_at(65, 128);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }

  SUBCASE("smooth field refinement ratio in [3.5, 4.5]") {
    auto err_at = [](int nr, int nt) {
      const PolarGrid gg = build_grid(1.0, 2.0, nr, nt);
      auto [d1, d2] = partial_derivatives(
          gg, from_xy(gg, [](Real a, Real b) { return Complex(std::sin(a) * std::cos(b), 0); }));
      Real m = 0;
      for (int k = 0; k < gg.size(); ++k) {
        const Real a = gg.x1()[k], b = gg.x2()[k];
        m = std::max(m, std::abs(d1.values[k] - Complex(std::cos(a) * std::cos(b), 0)));
        m = std::max(m, std::abs(d2.values[k] - Complex(-std::sin(a) * std::sin(b), 0)));
      }
      return m;
    };
    const Real ratio = err_at(33, 64) / err_at(65, 128);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("grid: second derivatives") {
  SUBCASE("x1^2 has interior d11 = 2 at second order") {
    auto err_at = [](int nr, int nt) {
      const PolarGrid gg = build_grid(1.0, 2.0, nr, nt);
      const auto d = second_derivatives(
          gg, from_xy(gg, [](Real a, Real) { return Complex(a * a, 0); }));
      Real m = 0;
      for (int k : interior_nodes(gg)) m = std::max(m, std::abs(d[0].values[k] - 2.0));
      return m;
    };
    const Real e1 = err_at(33, 64), e2 = err_at(65, 128);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e1 / e2 <= 5.0);
  }

  SUBCASE("linear fields give near-zero second derivatives") {
    const PolarGrid g = build_grid(1.0, 2.0, 33, 64);
    const auto d =
        second_derivatives(g, from_xy(g, [](Real a, Real b) { return Complex(a - 2 * b, 0); }));
    const Real ht = g.htheta();
    for (const auto& dd : d) CHECK(dd.values.cwiseAbs().maxCoeff() <= 20 * ht * ht);
  }

  SUBCASE("laplacian of |x|^2 is 4 in the interior, ratio ~4") {
    auto err_at = [](int nr, int nt) {
      const PolarGrid gg = build_grid(1.0, 2.0, nr, nt);
      const auto d = second_derivatives(
          gg, from_xy(gg, [](Real a, Real b) { return Complex(a * a + b * b, 0); }));
      Real m = 0;
      for (int k : interior_nodes(gg))
        m = std::max(m, std::abs(d[0].values[k] + d[3].values[k] - 4.0));
      return m;
    };
    const Real ratio = err_at(33, 64) / err_at(65, 128);
    CHECK(ratio >= 3.5);
    CHECK(ratio <= 4.5);
  }
}

TEST_CASE("grid: angular shift commutes with the polar stencils exactly") {
  const PolarGrid g = build_grid(1.0, 2.0, 17, 32);
  GridField u = from_xy(g, [](Real a, Real b) { return Complex(std::sin(a + b), std::cos(a)); });

  auto shift = [&](const CVec& v) {
    CVec out(v.size());
    for (int i = 0; i < g.Nr(); ++i)
      for (int j = 0; j < g.Ntheta(); ++j)
        out[g.index(i, (j + 1) % g.Ntheta())] = v[g.index(i, j)];
    return out;
  };

  const DiffOps& o = g.ops();
  const CVec a1 = shift(o.Dr * u.values);
  const CVec b1 = o.Dr * shift(u.values);
  const CVec a2 = shift(o.Dth * u.values);
  const CVec b2 = o.Dth * shift(u.values);
  CHECK((a1 - b1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a2 - b2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("grid: non-finite input rejected") {
  const PolarGrid g = build_grid(1.0, 2.0, 9, 8);
  RVec f = RVec::Ones(g.size());
  f[3] = std::numeric_limits<Real>::quiet_NaN();
  CHECK_THROWS_AS(integrate_volume(g, f), InvalidParams);
  CVec u = CVec::Ones(g.size());
  u[5] = Complex(std::numeric_limits<Real>::infinity(), 0);
  CHECK_THROWS_AS(partial_derivatives(g, GridField(u)), InvalidParams);
}
