#include "ucb/stokes.hpp"

#include <cmath>
#include <map>

#include "ucb/norms.hpp"

namespace ucb {

Real drift_sup(const PolarGrid& grid, const DriftCoefficient& a) {
  Real sup = 0.0;
  for (int k = 0; k < grid.size(); ++k)
    sup = std::max(sup, a.a(grid.x1()[k], grid.x2()[k]).norm());
  return sup;
}

Real drift_grad_sup(const PolarGrid& grid, const DriftCoefficient& a) {
  Real sup = 0.0;
  for (int k = 0; k < grid.size(); ++k) {
    const Eigen::Matrix2cd d = a.da(grid.x1()[k], grid.x2()[k]);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) sup = std::max(sup, std::abs(d(i, j)));
  }
  return sup;
}

StokesState ManufacturedStokes::on_grid(const PolarGrid& grid) const {
  StokesState s;
  s.u1 = field_from(grid, u1, name + ".u1");
  s.u2 = field_from(grid, u2, name + ".u2");
  s.p = field_from(grid, p, name + ".p");
  return s;
}

namespace {

std::map<std::string, ManufacturedStokes> make_stokes_presets() {
  std::map<std::string, ManufacturedStokes> reg;
  auto zero_drift = [] {
    DriftCoefficient d;
    d.name = "zero";
    d.a = [](Real, Real) { return Eigen::Vector2cd::Zero().eval(); };
    d.da = [](Real, Real) { return Eigen::Matrix2cd::Zero().eval(); };
    return d;
  };
  {
    // u = (|x|^2/4, -x1 x2/2), p = x1: Delta u = (1, 0) = grad p, div u = 0
    ManufacturedStokes m;
    m.name = "poiseuille-like";
    m.drift = zero_drift();
    m.u1 = [](Real x1, Real x2) { return Complex((x1 * x1 + x2 * x2) / 4.0, 0); };
    m.u2 = [](Real x1, Real x2) { return Complex(-x1 * x2 / 2.0, 0); };
    m.p = [](Real x1, Real) { return Complex(x1, 0); };
    reg[m.name] = m;
  }
  {
    // stream function (x1^4 - x2^4)/24: u = (-x2^3/6, -x1^3/6),
    // Delta u = (-x2, -x1) = grad p with p = -x1 x2
    ManufacturedStokes m;
    m.name = "quadratic-pressure";
    m.drift = zero_drift();
    m.u1 = [](Real, Real x2) { return Complex(-x2 * x2 * x2 / 6.0, 0); };
    m.u2 = [](Real x1, Real) { return Complex(-x1 * x1 * x1 / 6.0, 0); };
    m.p = [](Real x1, Real x2) { return Complex(-x1 * x2, 0); };
    reg[m.name] = m;
  }
  {
    // rigid rotation with linear drift: u = (-x2, x1), a = (x1, -x2),
    // (a.grad) u = (x2, x1), p = -x1 x2
    ManufacturedStokes m;
    m.name = "rotational";
    m.drift.name = "linear";
    m.drift.a = [](Real x1, Real x2) {
      return Eigen::Vector2cd(Complex(x1, 0), Complex(-x2, 0)).eval();
    };
    m.drift.da = [](Real, Real) {
      Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
      d(0, 0) = Complex(1, 0);   // d_1 a^1
      d(1, 1) = Complex(-1, 0);  // d_2 a^2
      return d;
    };
    m.u1 = [](Real, Real x2) { return Complex(-x2, 0); };
    m.u2 = [](Real x1, Real) { return Complex(x1, 0); };
    m.p = [](Real x1, Real x2) { return Complex(-x1 * x2, 0); };
    reg[m.name] = m;
  }
  {
    // same velocity with imaginary drift: a = (i x1, -i x2), p = -i x1 x2
    ManufacturedStokes m;
    m.name = "rotational-complex";
    m.drift.name = "linear-imag";
    m.drift.a = [](Real x1, Real x2) {
      return Eigen::Vector2cd(Complex(0, x1), Complex(0, -x2)).eval();
    };
    m.drift.da = [](Real, Real) {
      Eigen::Matrix2cd d = Eigen::Matrix2cd::Zero();
      d(0, 0) = Complex(0, 1);
      d(1, 1) = Complex(0, -1);
      return d;
    };
    m.u1 = [](Real, Real x2) { return Complex(-x2, 0); };
    m.u2 = [](Real x1, Real) { return Complex(x1, 0); };
    m.p = [](Real x1, Real x2) { return Complex(0, -x1 * x2); };
    reg[m.name] = m;
  }
  return reg;
}

}  // namespace

const ManufacturedStokes& stokes_preset(const std::string& name) {
  static const auto reg = make_stokes_presets();
  auto it = reg.find(name);
  if (it == reg.end()) throw InvalidConfig("unknown manufactured solution: " + name);
  return it->second;
}

std::vector<std::string> stokes_preset_names() {
  static const auto reg = make_stokes_presets();
  std::vector<std::string> out;
  for (const auto& [k, v] : reg) out.push_back(k);
  return out;
}

StokesResidual stokes_residual(const PolarGrid& grid, const StokesState& state,
                               const DriftCoefficient& a) {
  const DiffOps& o = grid.ops();
  const int n = grid.size();
  const CVec lap1 = o.D11 * state.u1.values + o.D22 * state.u1.values;
  const CVec lap2 = o.D11 * state.u2.values + o.D22 * state.u2.values;
  const CVec d1u1 = o.D1 * state.u1.values, d2u1 = o.D2 * state.u1.values;
  const CVec d1u2 = o.D1 * state.u2.values, d2u2 = o.D2 * state.u2.values;
  const CVec d1p = o.D1 * state.p.values, d2p = o.D2 * state.p.values;

  CVec m1(n), m2(n), dv(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector2cd av = a.a(grid.x1()[k], grid.x2()[k]);
    m1[k] = -lap1[k] + av[0] * d1u1[k] + av[1] * d2u1[k] + d1p[k];
    m2[k] = -lap2[k] + av[0] * d1u2[k] + av[1] * d2u2[k] + d2p[k];
    dv[k] = d1u1[k] + d2u2[k];
  }
  return {GridField(std::move(m1), "mom1"), GridField(std::move(m2), "mom2"),
          GridField(std::move(dv), "div")};
}

IdentityDefect laplacian_identity_check(const PolarGrid& grid, const StokesState& state,
                                        const DriftCoefficient& a) {
  const DiffOps& o = grid.ops();
  const int n = grid.size();
  const CVec lap1 = o.D11 * state.u1.values + o.D22 * state.u1.values;
  const CVec lap2 = o.D11 * state.u2.values + o.D22 * state.u2.values;
  const CVec lapp = o.D11 * state.p.values + o.D22 * state.p.values;
  const CVec d1u1 = o.D1 * state.u1.values, d2u1 = o.D2 * state.u1.values;
  const CVec d1u2 = o.D1 * state.u2.values, d2u2 = o.D2 * state.u2.values;
  const CVec d1p = o.D1 * state.p.values, d2p = o.D2 * state.p.values;

  RVec defect(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::Vector2cd av = a.a(grid.x1()[k], grid.x2()[k]);
    const Eigen::Matrix2cd dav = a.da(grid.x1()[k], grid.x2()[k]);
    const Complex claim1 = av[0] * d1u1[k] + av[1] * d2u1[k] + d1p[k];
    const Complex claim2 = av[0] * d1u2[k] + av[1] * d2u2[k] + d2p[k];
    // -d_k a^j d_j u^k summed over j, k
    const Complex claimp = -(dav(0, 0) * d1u1[k] + dav(0, 1) * d1u2[k] +
                             dav(1, 0) * d2u1[k] + dav(1, 1) * d2u2[k]);
    const Real e1 = std::abs(lap1[k] - claim1);
    const Real e2 = std::abs(lap2[k] - claim2);
    const Real ep = std::abs(lapp[k] - claimp);
    defect[k] = std::max({e1, e2, ep});
  }
  IdentityDefect out;
  out.max_all = defect.maxCoeff();
  out.max_interior = 0.0;
  for (int k : interior_nodes(grid)) out.max_interior = std::max(out.max_interior, defect[k]);
  return out;
}

DominationCheck gradient_domination_check(const PolarGrid& grid, const StokesState& state,
                                          const DriftCoefficient& a) {
  constexpr Real n_dim = 2.0;
  const Real a_sup = drift_sup(grid, a);
  const Real da_sup = drift_grad_sup(grid, a);
  DominationCheck out;
  out.c0 = 1.0 / (2.0 * std::max(n_dim * a_sup * a_sup, n_dim * n_dim * da_sup * da_sup) + 2.0);

  const DiffOps& o = grid.ops();
  const int n = grid.size();
  const CVec lap1 = o.D11 * state.u1.values + o.D22 * state.u1.values;
  const CVec lap2 = o.D11 * state.u2.values + o.D22 * state.u2.values;
  const CVec lapp = o.D11 * state.p.values + o.D22 * state.p.values;
  std::array<CVec, 6> grads = {o.D1 * state.u1.values, o.D2 * state.u1.values,
                               o.D1 * state.u2.values, o.D2 * state.u2.values,
                               o.D1 * state.p.values,  o.D2 * state.p.values};
  out.max_violation = -std::numeric_limits<Real>::infinity();
  for (int k = 0; k < n; ++k) {
    const Real lap_sq = std::norm(lap1[k]) + std::norm(lap2[k]) + std::norm(lapp[k]);
    Real grad_sq = 0.0;
    for (const auto& gvec : grads) grad_sq += std::norm(gvec[k]);
    out.max_violation = std::max(out.max_violation, out.c0 * lap_sq - grad_sq);
  }
  return out;
}

Real stokes_cauchy_norm(const PolarGrid& grid, const StokesState& state) {
  static const MetricField& id = metric_preset("identity");
  const MetricTables mt(grid, id);
  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const int nb = static_cast<int>(gam.nodes.size());

  auto h1_gamma_sq = [&](const GridField& w) {
    const RVec tan = tangential_gradient_sq(grid, w, mt, BoundaryTag::Gamma_outer);
    RVec integrand(nb);
    for (int j = 0; j < nb; ++j)
      integrand[j] = tan[j] + std::norm(w.values[gam.nodes[j]]);
    return integrate_boundary(grid, BoundaryTag::Gamma_outer, integrand);
  };
  auto nd_gamma_sq = [&](const GridField& w) {
    const CVec nd = normal_derivative(grid, w, mt, BoundaryTag::Gamma_outer);
    RVec integrand(nb);
    for (int j = 0; j < nb; ++j) integrand[j] = std::norm(nd[j]);
    return integrate_boundary(grid, BoundaryTag::Gamma_outer, integrand);
  };

  const Real u_h1 = std::sqrt(h1_gamma_sq(state.u1) + h1_gamma_sq(state.u2));
  const Real p_h1 = std::sqrt(h1_gamma_sq(state.p));
  const Real u_nd = std::sqrt(nd_gamma_sq(state.u1) + nd_gamma_sq(state.u2));
  const Real p_nd = std::sqrt(nd_gamma_sq(state.p));
  return u_h1 + p_h1 + u_nd + p_nd;
}

StokesCarlemanReport stokes_carleman_run(const PolarGrid& grid, const StokesState& state,
                                         const BaseWeight& w, Real gamma,
                                         const std::vector<Real>& s_list) {
  if (s_list.empty()) throw InvalidConfig("stokes_carleman_run: empty s list");
  const WeightValidation wv = validate_weight(w, grid);
  if (!wv.ok()) throw InvalidParams("stokes_carleman_run: weight fails validation");

  static const MetricField& id = metric_preset("identity");
  static const CoefficientSet& free_c = coefficient_preset("free");
  const MetricTables mt(grid, id);
  const CoeffTables ct(grid, free_c);

  StokesCarlemanReport rep;
  for (Real s : s_list) {
    const CarlemanParams params{gamma, s};
    const CarlemanWeightField wf = stabilized_weight(w, params, grid);

    LogScaled lhs{wf.log_offset, 0.0}, rhs{wf.log_offset, 0.0};
    RVec grad_sq = RVec::Zero(grid.size());
    RVec lhs_vol_integrand = RVec::Zero(grid.size());
    for (int comp = 0; comp < StokesState::kComponents; ++comp) {
      const GridField& v = state.component(comp);
      lhs += carleman_lhs(grid, v, mt, w, params);
      rhs += carleman_rhs(grid, v, mt, ct, w, params);
      const RVec mg = metric_gradient_sq(grid, v, mt);
      for (int k = 0; k < grid.size(); ++k) {
        grad_sq[k] += mg[k] * mt.sqrt_det[k];
        const Real s2 = wf.sigma[k] * wf.sigma[k];
        lhs_vol_integrand[k] += wf.sigma[k] * gamma *
                                (mg[k] + s2 * std::norm(v.values[k])) * mt.sqrt_det[k];
      }
    }
    const LogScaled grad_term = log_weighted_integral(grid, wf, grad_sq);
    const LogScaled lhs_vol = log_weighted_integral(grid, wf, lhs_vol_integrand);

    StokesCarlemanRow row;
    row.s = s;
    row.lhs_log10 = lhs.log10_value();
    row.rhs_log10 = rhs.log10_value();
    row.ratio = lhs.mantissa > 0.0 ? rhs.mantissa / lhs.mantissa
                                   : std::numeric_limits<Real>::quiet_NaN();
    row.grad_term_over_lhs_vol =
        lhs_vol.mantissa > 0.0 ? grad_term.mantissa / lhs_vol.mantissa
                               : std::numeric_limits<Real>::quiet_NaN();
    row.absorption_ok = row.grad_term_over_lhs_vol <= 0.5;
    rep.rows.push_back(row);
    if (row.absorption_ok && rep.absorption_s_threshold == 0.0)
      rep.absorption_s_threshold = s;
  }
  return rep;
}

}  // namespace ucb
