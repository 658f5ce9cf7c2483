#include <doctest.h>

#include <cmath>

#include "ucb/continuation.hpp"
#include "ucb/rng.hpp"

using namespace ucb;

TEST_CASE("continuation: stability modulus") {
  // first branch on ]0, e^c]
  CHECK(phi_modulus(0.0, 1.0, std::exp(0.5)) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  // the right endpoint belongs to the first branch
  CHECK(phi_modulus(0.0, 1.0, std::exp(1.0)) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  // second branch
  CHECK(phi_modulus(1.0, 2.0, std::exp(4.0)) == doctest::Approx(0.5).epsilon(1e-14));
  // just beyond the endpoint the second branch takes over (discontinuously)
  CHECK(phi_modulus(0.0, 1.0, std::exp(1.0) * (1 + 1e-9)) == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(phi_modulus(2.0, 1.0, 2.0), InvalidParams);
  CHECK_THROWS_AS(phi_modulus(-0.1, 1.0, 2.0), InvalidParams);
  CHECK_THROWS_AS(phi_modulus(0.0, 0.0, 2.0), InvalidParams);
  CHECK_THROWS_AS(phi_modulus(0.0, 1.0, 0.0), InvalidParams);
  CHECK_THROWS_AS(phi_modulus(0.0, 1.0, -1.0), InvalidParams);
}

TEST_CASE("continuation: minimize over s") {
  SUBCASE("dominant data term pins s = 1") {
    const MinimizeResult r = minimize_over_s(2.0, 1.0, 1.0, 0.0);
    CHECK(r.s_opt == 1.0);
    CHECK(r.value == doctest::Approx(std::exp(1.0) * 2.0 + 1.0).epsilon(1e-14));
  }

  SUBCASE("agrees with brute force on the reference tuple") {
    const MinimizeResult fast = minimize_over_s(std::exp(-10.0), 1.0, 1.0, 0.0);
    const MinimizeResult slow = minimize_over_s_bruteforce(std::exp(-10.0), 1.0, 1.0, 0.0);
    CHECK(fast.value <= slow.value * (1 + 1e-9));
    CHECK(std::abs(fast.value - slow.value) / slow.value < 1e-3);
  }

  SUBCASE("agrees with brute force on 100 random tuples") {
    Rng rng(123);
    for (int t = 0; t < 100; ++t) {
      const Real C = std::exp(rng.uniform(-25.0, 0.0));
      const Real M = std::exp(rng.uniform(-2.0, 2.0));
      const Real c = rng.uniform(0.2, 3.0);
      const Real eta = rng.uniform(0.0, 1.9);
      const MinimizeResult fast = minimize_over_s(C, M, c, eta);
      const MinimizeResult slow = minimize_over_s_bruteforce(C, M, c, eta);
      INFO("C=", C, " M=", M, " c=", c, " eta=", eta);
      CHECK(std::abs(fast.value - slow.value) / slow.value < 1e-3);
    }
  }

  SUBCASE("single-log modulus shape: minimum bounded with a grid-stable constant") {
    const Real c = 1.0;
    for (Real eta : {0.0, 1.0}) {
      Real kmin = 1e300, kmax = 0.0;
      for (int k = 2; k <= 30; ++k) {
        const Real C = std::exp(-static_cast<Real>(k));  // M / C = e^k > e^c
        const Real M = 1.0;
        const MinimizeResult r = minimize_over_s(C, M, c, eta);
        const Real bound = phi_modulus(eta, c, M / C) * M;
        const Real ratio = r.value / bound;
        kmin = std::min(kmin, ratio);
        kmax = std::max(kmax, ratio);
      }
      INFO("eta = ", eta, " K range [", kmin, ", ", kmax, "]");
      CHECK(kmax / kmin < 10.0);
      CHECK(std::isfinite(kmax));
    }
  }

  SUBCASE("parameter domain") {
    CHECK_THROWS_AS(minimize_over_s(0.0, 1.0, 1.0, 0.0), InvalidParams);
    CHECK_THROWS_AS(minimize_over_s(1.0, 1.0, 1.0, 2.0), InvalidParams);
  }
}

TEST_CASE("continuation: rate fitter calibration") {
  const std::vector<Real> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

  SUBCASE("exact beta = 1 data") {
    std::vector<Real> errors;
    for (Real d : deltas) errors.push_back(1.0 / std::log(1.0 / d));
    CHECK(fit_log_rate(deltas, errors) == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("exact beta = 1/2 data") {
    std::vector<Real> errors;
    for (Real d : deltas) errors.push_back(std::pow(std::log(1.0 / d), -0.5));
    CHECK(fit_log_rate(deltas, errors) == doctest::Approx(0.5).epsilon(1e-6));
  }
  SUBCASE("prefactors do not change the exponent") {
    std::vector<Real> errors;
    for (Real d : deltas) errors.push_back(7.5 * std::pow(std::log(1.0 / d), -1.25));
    CHECK(fit_log_rate(deltas, errors) == doctest::Approx(1.25).epsilon(1e-6));
  }
}

TEST_CASE("continuation: eps rule parsing") {
  CHECK(EpsRule::parse("delta-sq")(1e-3) == doctest::Approx(1e-6).epsilon(1e-12));
  CHECK(EpsRule::parse("fixed:1e-8")(0.5) == doctest::Approx(1e-8).epsilon(1e-12));
  CHECK_THROWS_AS(EpsRule::parse("bogus"), InvalidConfig);
  CHECK_THROWS_AS(EpsRule::parse("fixed:-1"), InvalidConfig);
}

TEST_CASE("continuation: cauchy data generation") {
  const PolarGrid g = build_grid(1.0, 2.0, 17, 32);
  const MetricTables mt(g, metric_preset("identity"));
  const TargetSolution& t = target_preset("harmonic-quadratic");

  SUBCASE("clean data matches the analytic traces") {
    const CauchyData d = make_cauchy_data(g, t, mt, 0.0, 1);
    const auto& gam = g.boundary(BoundaryTag::Gamma_outer);
    for (size_t j = 0; j < gam.nodes.size(); ++j) {
      const Real x1 = g.x1()[gam.nodes[j]], x2 = g.x2()[gam.nodes[j]];
      CHECK(d.f[j] == Complex(x1 * x1 - x2 * x2, 0));
      // d_nu (x1^2 - x2^2) = 2 (x1^2 - x2^2)/R on the circle of radius R
      CHECK(d.h[j].real() == doctest::Approx((x1 * x1 - x2 * x2)).epsilon(1e-12));
    }
  }

  SUBCASE("noise is seeded, reproducible, and correctly scaled") {
    const CauchyData a = make_cauchy_data(g, t, mt, 1e-2, 5);
    const CauchyData b = make_cauchy_data(g, t, mt, 1e-2, 5);
    const CauchyData c = make_cauchy_data(g, t, mt, 1e-2, 6);
    CHECK((a.f - b.f).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.f - c.f).cwiseAbs().maxCoeff() > 0.0);

    const CauchyData clean = make_cauchy_data(g, t, mt, 0.0, 5);
    const auto& gam = g.boundary(BoundaryTag::Gamma_outer);
    Real clean_sq = 0, noise_sq = 0;
    for (size_t j = 0; j < gam.nodes.size(); ++j) {
      clean_sq += gam.arc_weights[j] * std::norm(clean.f[j]);
      noise_sq += gam.arc_weights[j] * std::norm(a.f[j] - clean.f[j]);
    }
    CHECK(std::sqrt(noise_sq) == doctest::Approx(1e-2 * std::sqrt(clean_sq)).epsilon(1e-10));
  }
}

TEST_CASE("continuation: solver basics on a coarse grid") {
  const PolarGrid g = build_grid(1.0, 2.0, 17, 32);
  const MetricTables mt(g, metric_preset("identity"));
  const CoeffTables ct(g, coefficient_preset("free"));

  SUBCASE("zero data yields the zero field") {
    CauchyData d;
    const int nb = static_cast<int>(g.boundary(BoundaryTag::Gamma_outer).nodes.size());
    d.f = CVec::Zero(nb);
    d.h = CVec::Zero(nb);
    const GridField u = solve_cauchy(g, d, mt, ct, 1e-8);
    RVec sq(g.size());
    for (int k = 0; k < g.size(); ++k) sq[k] = std::norm(u.values[k]);
    CHECK(std::sqrt(integrate_volume(g, sq)) <= 1e-10);
  }

  SUBCASE("harmonic target is recovered at discretization accuracy") {
    const TargetSolution& t = target_preset("harmonic-quadratic");
    const CauchyData d = make_cauchy_data(g, t, mt, 0.0, 1);
    const GridField u = solve_cauchy(g, d, mt, ct, 1e-10);
    const GridField truth = field_from(g, [&](Real a, Real b) { return t.u(a, b); });
    RVec diff_sq(g.size()), truth_sq(g.size());
    for (int k = 0; k < g.size(); ++k) {
      diff_sq[k] = std::norm(u.values[k] - truth.values[k]);
      truth_sq[k] = std::norm(truth.values[k]);
    }
    const Real rel =
        std::sqrt(integrate_volume(g, diff_sq)) / std::sqrt(integrate_volume(g, truth_sq));
    CHECK(rel < 0.05);
  }

  SUBCASE("the minimizer beats the discrete truth and the zero field") {
    const TargetSolution& t = target_preset("harmonic-quadratic");
    const CauchyData d = make_cauchy_data(g, t, mt, 1e-3, 2);
    const Real eps = 1e-6;
    const GridField u = solve_cauchy(g, d, mt, ct, eps);
    const GridField truth = field_from(g, [&](Real a, Real b) { return t.u(a, b); });
    const GridField zero = field_from(g, [](Real, Real) { return Complex(0, 0); });
    const Real J_rec = continuation_objective(g, u, d, mt, ct, eps);
    const Real J_truth = continuation_objective(g, truth, d, mt, ct, eps);
    const Real J_zero = continuation_objective(g, zero, d, mt, ct, eps);
    CHECK(J_rec <= J_truth * (1 + 1e-10));
    CHECK(J_rec <= J_zero * (1 + 1e-10));
  }

  SUBCASE("invalid regularization rejected") {
    CauchyData d;
    const int nb = static_cast<int>(g.boundary(BoundaryTag::Gamma_outer).nodes.size());
    d.f = CVec::Zero(nb);
    d.h = CVec::Zero(nb);
    CHECK_THROWS_AS(solve_cauchy(g, d, mt, ct, 0.0), InvalidConfig);
    CHECK_THROWS_AS(solve_cauchy(g, d, mt, ct, -1.0), InvalidConfig);
  }
}

TEST_CASE("continuation: noise sweep input contracts") {
  const PolarGrid g = build_grid(1.0, 2.0, 17, 32);
  const MetricTables mt(g, metric_preset("identity"));
  const CoeffTables ct(g, coefficient_preset("free"));
  const TargetSolution& t = target_preset("harmonic-quadratic");
  const EpsRule rule = EpsRule::parse("delta-sq");
  CHECK_THROWS_AS(noise_sweep_fit(g, t, {1e-2, 1e-3, 1e-4}, rule, 0.0, 1, mt, ct),
                  InvalidConfig);  // too few levels
  CHECK_THROWS_AS(noise_sweep_fit(g, t, {1e-2, 2e-2, 3e-2, 4e-2}, rule, 0.0, 1, mt, ct),
                  InvalidConfig);  // not enough decades
}
