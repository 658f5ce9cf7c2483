#include "ucb/continuation.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>

#include "ucb/rng.hpp"

namespace ucb {

Real phi_modulus(Real eta, Real c, Real r) {
  if (!(eta >= 0.0 && eta < 2.0)) throw InvalidParams("phi_modulus: eta must be in [0, 2)");
  if (!(c > 0.0)) throw InvalidParams("phi_modulus: c must be positive");
  if (!(r > 0.0)) throw InvalidParams("phi_modulus: r must be positive");
  if (r <= std::exp(c)) return 1.0 / r;
  return std::pow(std::log(r), -(2.0 - eta) / 2.0);
}

namespace {

Real bracket_upper(Real C, Real M, Real c) {
  // beyond s_hi the exponential term alone exceeds F(1)
  const Real F1 = std::exp(c) * C + M;
  Real hi = std::max(2.0, std::log(F1 / C) / c * 2.0);
  if (!std::isfinite(hi)) hi = 1e6;
  return std::min(hi, 1e7);
}

}  // namespace

MinimizeResult minimize_over_s(Real C, Real M, Real c, Real eta) {
  if (!(C > 0.0) || !(M > 0.0) || !(c > 0.0))
    throw InvalidParams("minimize_over_s: C, M, c must be positive");
  if (!(eta >= 0.0 && eta < 2.0)) throw InvalidParams("minimize_over_s: eta must be in [0, 2)");
  const Real beta = (2.0 - eta) / 2.0;
  auto F = [&](Real s) { return std::exp(c * s) * C + std::pow(s, -beta) * M; };

  // F' = c C e^{cs} - beta s^{-beta-1} M is increasing, so F is convex;
  // if F'(1) >= 0 the minimum sits at the left endpoint
  if (c * C * std::exp(c) >= beta * M) return {1.0, F(1.0)};

  Real lo = 0.0, hi = std::log(bracket_upper(C, M, c));  // golden section in log s
  const Real gr = (std::sqrt(5.0) - 1.0) / 2.0;
  Real a = lo, b = hi;
  Real x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  Real f1 = F(std::exp(x1)), f2 = F(std::exp(x2));
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = F(std::exp(x1));
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = F(std::exp(x2));
    }
  }
  Real s_opt = std::exp(0.5 * (a + b));
  Real value = F(s_opt);
  // flat-minimum tie break: prefer the smallest admissible s
  if (F(1.0) <= value * (1.0 + 1e-12)) {
    s_opt = 1.0;
    value = F(1.0);
  }
  return {s_opt, value};
}

MinimizeResult minimize_over_s_bruteforce(Real C, Real M, Real c, Real eta, int points) {
  if (!(C > 0.0) || !(M > 0.0) || !(c > 0.0))
    throw InvalidParams("minimize_over_s_bruteforce: C, M, c must be positive");
  if (!(eta >= 0.0 && eta < 2.0))
    throw InvalidParams("minimize_over_s_bruteforce: eta must be in [0, 2)");
  const Real beta = (2.0 - eta) / 2.0;
  auto F = [&](Real s) { return std::exp(c * s) * C + std::pow(s, -beta) * M; };
  const Real hi = bracket_upper(C, M, c);
  MinimizeResult best{1.0, F(1.0)};
  for (int k = 0; k < points; ++k) {
    const Real s = std::exp(std::log(hi) * k / (points - 1.0));
    const Real v = F(s);
    if (v < best.value) best = {s, v};
  }
  return best;
}

namespace {

std::map<std::string, TargetSolution> make_target_presets() {
  std::map<std::string, TargetSolution> reg;
  {
    TargetSolution t;
    t.name = "zero";
    t.u = [](Real, Real) { return Complex(0, 0); };
    t.grad_u = [](Real, Real) { return Eigen::Vector2cd::Zero().eval(); };
    reg[t.name] = t;
  }
  {
    TargetSolution t;
    t.name = "harmonic-quadratic";  // x1^2 - x2^2
    t.u = [](Real x1, Real x2) { return Complex(x1 * x1 - x2 * x2, 0); };
    t.grad_u = [](Real x1, Real x2) {
      return Eigen::Vector2cd(Complex(2 * x1, 0), Complex(-2 * x2, 0)).eval();
    };
    reg[t.name] = t;
  }
  {
    TargetSolution t;
    t.name = "harmonic-oscillatory";  // Re/Im pair of z^3 = r^3 e^{3 i theta}
    t.u = [](Real x1, Real x2) {
      const Complex z(x1, x2);
      return z * z * z;
    };
    t.grad_u = [](Real x1, Real x2) {
      const Complex z(x1, x2);
      const Complex dz = 3.0 * z * z;  // holomorphic: du/dx1 = f', du/dx2 = i f'
      return Eigen::Vector2cd(dz, Complex(0, 1) * dz).eval();
    };
    reg[t.name] = t;
  }
  return reg;
}

}  // namespace

const TargetSolution& target_preset(const std::string& name) {
  static const auto reg = make_target_presets();
  auto it = reg.find(name);
  if (it == reg.end()) throw InvalidConfig("unknown target preset: " + name);
  return it->second;
}

std::vector<std::string> target_preset_names() {
  static const auto reg = make_target_presets();
  std::vector<std::string> out;
  for (const auto& [k, v] : reg) out.push_back(k);
  return out;
}

CauchyData make_cauchy_data(const PolarGrid& grid, const TargetSolution& target,
                            const MetricTables& mt, Real delta, std::uint64_t seed) {
  if (delta < 0.0) throw InvalidParams("make_cauchy_data: delta must be >= 0");
  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const int nb = static_cast<int>(gam.nodes.size());
  CauchyData d;
  d.delta = delta;
  d.seed = seed;
  d.f = CVec(nb);
  d.h = CVec(nb);
  for (int j = 0; j < nb; ++j) {
    const int k = gam.nodes[j];
    const Real x1 = grid.x1()[k], x2 = grid.x2()[k];
    d.f[j] = target.u(x1, x2);
    const Eigen::Vector2cd gu = target.grad_u(x1, x2);
    const Real n1 = gam.normals[j][0], n2 = gam.normals[j][1];
    // d_{nu_g} u with the exact gradient: nu_k g^{km} d_m u / |nu|_g
    const Complex num = n1 * (mt.inv11[k] * gu[0] + mt.inv12[k] * gu[1]) +
                        n2 * (mt.inv12[k] * gu[0] + mt.inv22[k] * gu[1]);
    const Real den = std::sqrt(mt.inv11[k] * n1 * n1 + 2.0 * mt.inv12[k] * n1 * n2 +
                               mt.inv22[k] * n2 * n2);
    d.h[j] = num / den;
  }
  if (delta > 0.0) {
    Rng rng(seed);
    auto add_noise = [&](CVec& v) {
      CVec noise(nb);
      for (int j = 0; j < nb; ++j) noise[j] = rng.complex_normal();
      Real v_sq = 0.0, n_sq = 0.0;
      for (int j = 0; j < nb; ++j) {
        v_sq += gam.arc_weights[j] * std::norm(v[j]);
        n_sq += gam.arc_weights[j] * std::norm(noise[j]);
      }
      if (n_sq > 0.0) {
        const Real scale = delta * std::sqrt(v_sq) / std::sqrt(n_sq);
        for (int j = 0; j < nb; ++j) v[j] += scale * noise[j];
      }
    };
    add_noise(d.f);
    add_noise(d.h);
  }
  return d;
}

namespace {

// Boundary operators entering the misfit terms; all rows live on Gamma.
struct BoundaryOperators {
  SpMatC restrict_gamma;   // nb x n picker
  SpMatC tangential;       // nb x n angular derivative on the Gamma ring
  SpMatC normal_deriv;     // nb x n metric normal derivative rows
  RVec w_trace;            // arc weight * sqrt|g|
  RVec w_tan;              // arc weight * sqrt|g| / g(T, T)
  CVec tangential_f;       // ring derivative applied to f data
};

BoundaryOperators build_boundary_ops(const PolarGrid& grid, const MetricTables& mt,
                                     const CVec& f) {
  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const int nb = static_cast<int>(gam.nodes.size());
  const int n = grid.size();
  const Real ht = grid.htheta();
  BoundaryOperators ops;

  std::vector<Eigen::Triplet<Complex>> tr;
  for (int j = 0; j < nb; ++j) tr.emplace_back(j, gam.nodes[j], Complex(1, 0));
  ops.restrict_gamma = SpMatC(nb, n);
  ops.restrict_gamma.setFromTriplets(tr.begin(), tr.end());

  tr.clear();
  for (int j = 0; j < nb; ++j) {
    const int jp = (j + 1) % nb, jm = (j + nb - 1) % nb;
    tr.emplace_back(j, gam.nodes[jp], Complex(1.0 / (2.0 * ht), 0));
    tr.emplace_back(j, gam.nodes[jm], Complex(-1.0 / (2.0 * ht), 0));
  }
  ops.tangential = SpMatC(nb, n);
  ops.tangential.setFromTriplets(tr.begin(), tr.end());

  // normal-derivative rows: extract D1/D2 rows through row-major copies
  const DiffOps& o = grid.ops();
  const Eigen::SparseMatrix<Real, Eigen::RowMajor> D1r = o.D1;
  const Eigen::SparseMatrix<Real, Eigen::RowMajor> D2r = o.D2;
  tr.clear();
  for (int j = 0; j < nb; ++j) {
    const int k = gam.nodes[j];
    const Real n1 = gam.normals[j][0], n2 = gam.normals[j][1];
    const Real den = std::sqrt(mt.inv11[k] * n1 * n1 + 2.0 * mt.inv12[k] * n1 * n2 +
                               mt.inv22[k] * n2 * n2);
    const Complex c1((n1 * mt.inv11[k] + n2 * mt.inv12[k]) / den, 0);
    const Complex c2((n1 * mt.inv12[k] + n2 * mt.inv22[k]) / den, 0);
    for (Eigen::SparseMatrix<Real, Eigen::RowMajor>::InnerIterator it(D1r, k); it; ++it)
      tr.emplace_back(j, static_cast<int>(it.col()), c1 * it.value());
    for (Eigen::SparseMatrix<Real, Eigen::RowMajor>::InnerIterator it(D2r, k); it; ++it)
      tr.emplace_back(j, static_cast<int>(it.col()), c2 * it.value());
  }
  ops.normal_deriv = SpMatC(nb, n);
  ops.normal_deriv.setFromTriplets(tr.begin(), tr.end());

  ops.w_trace = RVec(nb);
  ops.w_tan = RVec(nb);
  for (int j = 0; j < nb; ++j) {
    const int k = gam.nodes[j];
    const Real sg = mt.sqrt_det[k];
    // tangent T = d x / d theta; g(T, T) with the forward metric
    const Real t1 = -grid.x2()[k], t2 = grid.x1()[k];
    const Real gtt = mt.g11[k] * t1 * t1 + 2.0 * mt.g12[k] * t1 * t2 + mt.g22[k] * t2 * t2;
    ops.w_trace[j] = gam.arc_weights[j] * sg;
    ops.w_tan[j] = gam.arc_weights[j] * sg / gtt;
  }

  ops.tangential_f = CVec(nb);
  for (int j = 0; j < nb; ++j) {
    const int jp = (j + 1) % nb, jm = (j + nb - 1) % nb;
    ops.tangential_f[j] = (f[jp] - f[jm]) / (2.0 * ht);
  }
  return ops;
}

SpMatC weighted_gram(const SpMatC& A, const RVec& w) {
  SpMatC W(w.size(), w.size());
  W.reserve(Eigen::VectorXi::Constant(static_cast<int>(w.size()), 1));
  for (int k = 0; k < w.size(); ++k) W.insert(k, k) = Complex(w[k], 0);
  W.makeCompressed();
  return SpMatC(A.adjoint() * W * A);
}

}  // namespace

GridField solve_cauchy(const PolarGrid& grid, const CauchyData& data, const MetricTables& mt,
                       const CoeffTables& ct, Real eps) {
  if (!(eps > 0.0)) throw InvalidConfig("solve_cauchy: eps must be positive");
  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const int nb = static_cast<int>(gam.nodes.size());
  if (data.f.size() != nb || data.h.size() != nb)
    throw InvalidParams("solve_cauchy: data length does not match Gamma");
  ensure_finite(data.f, "solve_cauchy f");
  ensure_finite(data.h, "solve_cauchy h");

  const int n = grid.size();
  const SpMatC P = build_P_matrix(grid, mt, ct);
  RVec w_vol(n);
  for (int k = 0; k < n; ++k) w_vol[k] = grid.volume_weight(k) * mt.sqrt_det[k];

  const BoundaryOperators ops = build_boundary_ops(grid, mt, data.f);

  SpMatC N = weighted_gram(P, w_vol);
  N += weighted_gram(ops.restrict_gamma, ops.w_trace);
  N += weighted_gram(ops.tangential, ops.w_tan);
  N += weighted_gram(ops.normal_deriv, ops.w_trace);
  N += SpMatC(eps * build_h2_form(grid).cast<Complex>());
  N.makeCompressed();

  CVec rhs = CVec::Zero(n);
  rhs += ops.restrict_gamma.adjoint() * (ops.w_trace.cast<Complex>().cwiseProduct(data.f));
  rhs += ops.tangential.adjoint() * (ops.w_tan.cast<Complex>().cwiseProduct(ops.tangential_f));
  rhs += ops.normal_deriv.adjoint() * (ops.w_trace.cast<Complex>().cwiseProduct(data.h));

  Eigen::SparseLU<SpMatC> lu;
  lu.analyzePattern(N);
  lu.factorize(N);
  if (lu.info() != Eigen::Success)
    throw SolverFailure("solve_cauchy: factorization failed (system numerically singular)");
  CVec u = lu.solve(rhs);
  // one iterative-refinement pass tightens the small-eps solves
  const CVec resid = rhs - N * u;
  u += lu.solve(resid);
  ensure_finite(u, "solve_cauchy solution");
  return GridField(std::move(u), "cauchy_reconstruction");
}

Real continuation_objective(const PolarGrid& grid, const GridField& u, const CauchyData& data,
                            const MetricTables& mt, const CoeffTables& ct, Real eps) {
  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const int nb = static_cast<int>(gam.nodes.size());
  const GridField pu = apply_P(grid, u, mt, ct);
  RVec pu_sq(grid.size());
  for (int k = 0; k < grid.size(); ++k) pu_sq[k] = std::norm(pu.values[k]) * mt.sqrt_det[k];
  Real J = integrate_volume(grid, pu_sq);

  const BoundaryOperators ops = build_boundary_ops(grid, mt, data.f);
  const CVec trace = ops.restrict_gamma * u.values;
  const CVec tang = ops.tangential * u.values;
  const CVec nder = ops.normal_deriv * u.values;
  for (int j = 0; j < nb; ++j) {
    J += ops.w_trace[j] * std::norm(trace[j] - data.f[j]);
    J += ops.w_tan[j] * std::norm(tang[j] - ops.tangential_f[j]);
    J += ops.w_trace[j] * std::norm(nder[j] - data.h[j]);
  }
  const Real h2 = h2_norm(grid, u);
  return J + eps * h2 * h2;
}

EpsRule EpsRule::parse(const std::string& text) {
  EpsRule r;
  if (text == "delta-sq") {
    r.kind = Kind::DeltaSq;
    return r;
  }
  if (text.rfind("fixed:", 0) == 0) {
    r.kind = Kind::Fixed;
    r.fixed_value = std::stod(text.substr(6));
    if (!(r.fixed_value > 0.0)) throw InvalidConfig("eps rule: fixed value must be positive");
    return r;
  }
  throw InvalidConfig("unknown eps rule: " + text + " (expected delta-sq or fixed:<v>)");
}

Real fit_log_rate(const std::vector<Real>& deltas, const std::vector<Real>& errors,
                  Real* residual) {
  if (deltas.size() != errors.size() || deltas.size() < 2)
    throw InvalidParams("fit_log_rate: need matching lists with >= 2 points");
  const int m = static_cast<int>(deltas.size());
  // regress log(error) on log(log(1/delta)); slope = -beta
  Real sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<Real> xs(m), ys(m);
  for (int i = 0; i < m; ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0))
      throw InvalidParams("fit_log_rate: delta must lie in (0, 1)");
    if (!(errors[i] > 0.0)) throw InvalidParams("fit_log_rate: errors must be positive");
    xs[i] = std::log(std::log(1.0 / deltas[i]));
    ys[i] = std::log(errors[i]);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const Real denom = m * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) throw InvalidParams("fit_log_rate: degenerate abscissae");
  const Real slope = (m * sxy - sx * sy) / denom;
  const Real intercept = (sy - slope * sx) / m;
  if (residual) {
    Real rss = 0;
    for (int i = 0; i < m; ++i) {
      const Real e = ys[i] - (intercept + slope * xs[i]);
      rss += e * e;
    }
    *residual = std::sqrt(rss / m);
  }
  return -slope;
}

StabilityFit noise_sweep_fit(const PolarGrid& grid, const TargetSolution& target,
                             const std::vector<Real>& delta_list, const EpsRule& eps_rule,
                             Real eta, std::uint64_t seed, const MetricTables& mt,
                             const CoeffTables& ct) {
  if (delta_list.size() < 4)
    throw InvalidConfig("noise_sweep_fit: need at least 4 noise levels");
  const Real span = *std::max_element(delta_list.begin(), delta_list.end()) /
                    *std::min_element(delta_list.begin(), delta_list.end());
  if (span < 1e3)
    throw InvalidConfig("noise_sweep_fit: noise levels must span at least 3 decades");
  if (!(eta >= 0.0 && eta < 2.0)) throw InvalidEta("noise_sweep_fit: eta must be in [0, 2)");

  const GridField truth = field_from(grid, [&](Real x1, Real x2) { return target.u(x1, x2); },
                                     target.name);
  StabilityFit fit;
  fit.eta = eta;
  fit.target_exponent = (2.0 - eta) / 2.0;

  for (size_t i = 0; i < delta_list.size(); ++i) {
    const Real delta = delta_list[i];
    const Real eps = eps_rule(delta);
    const CauchyData data = make_cauchy_data(grid, target, mt, delta, seed + i);
    const GridField rec = solve_cauchy(grid, data, mt, ct, eps);
    GridField diff(CVec(rec.values - truth.values), "diff");
    RVec d_sq(grid.size());
    for (int k = 0; k < grid.size(); ++k) d_sq[k] = std::norm(diff.values[k]);
    StabilityPoint pt;
    pt.delta = delta;
    pt.eps = eps;
    pt.error_l2 = std::sqrt(integrate_volume(grid, d_sq));
    pt.error_eta = eta == 0.0 ? pt.error_l2 : sobolev_eta_norm(grid, diff, eta);
    fit.points.push_back(pt);
  }

  std::vector<Real> ds, es;
  for (const auto& p : fit.points) {
    ds.push_back(p.delta);
    es.push_back(p.error_eta);
  }
  fit.beta = fit_log_rate(ds, es, &fit.fit_residual);
  return fit;
}

}  // namespace ucb
