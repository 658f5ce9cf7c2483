#include "ucb/fields.hpp"

#include <Eigen/LU>
#include <cmath>
#include <map>

namespace ucb {

std::pair<RMat2, Real> metric_inverse_det(const MetricField& m, Real x1, Real x2) {
  const RMat2 g = m.g(x1, x2);
  const Real det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (!(det > 0.0))
    throw SingularMetric("metric_inverse_det: det(g) <= 0 at (" + std::to_string(x1) + ", " +
                         std::to_string(x2) + ")");
  RMat2 inv;
  inv << g(1, 1), -g(0, 1), -g(1, 0), g(0, 0);
  inv /= det;
  return {inv, det};
}

MetricTables::MetricTables(const PolarGrid& grid, const MetricField& m) {
  const int n = grid.size();
  inv11 = RVec(n);
  inv12 = RVec(n);
  inv22 = RVec(n);
  g11 = RVec(n);
  g12 = RVec(n);
  g22 = RVec(n);
  sqrt_det = RVec(n);
  for (int k = 0; k < n; ++k) {
    const auto [inv, det] = metric_inverse_det(m, grid.x1()[k], grid.x2()[k]);
    inv11[k] = inv(0, 0);
    inv12[k] = inv(0, 1);
    inv22[k] = inv(1, 1);
    const RMat2 g = m.g(grid.x1()[k], grid.x2()[k]);
    g11[k] = g(0, 0);
    g12[k] = g(0, 1);
    g22[k] = g(1, 1);
    sqrt_det[k] = std::sqrt(det);
  }
}

MetricAudit audit_metric(const PolarGrid& grid, const MetricField& m) {
  MetricAudit a;
  a.min_rayleigh = std::numeric_limits<Real>::infinity();
  a.min_det = std::numeric_limits<Real>::infinity();
  a.max_asym = 0.0;
  const std::array<Eigen::Vector2d, 3> probes = {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                                                 Eigen::Vector2d(1, 1)};
  for (int k = 0; k < grid.size(); ++k) {
    const RMat2 g = m.g(grid.x1()[k], grid.x2()[k]);
    a.max_asym = std::max(a.max_asym, std::abs(g(0, 1) - g(1, 0)));
    a.min_det = std::min(a.min_det, g.determinant());
    a.sup_g = std::max(a.sup_g, g.cwiseAbs().maxCoeff());
    const auto dgs = m.dg(grid.x1()[k], grid.x2()[k]);
    a.sup_dg = std::max({a.sup_dg, dgs[0].cwiseAbs().maxCoeff(), dgs[1].cwiseAbs().maxCoeff()});
    for (const auto& xi : probes) {
      const Real q = xi.dot(g * xi) / xi.squaredNorm();
      a.min_rayleigh = std::min(a.min_rayleigh, q);
    }
  }
  a.ok = a.min_rayleigh >= m.rho - 1e-12 && a.min_det > 0.0 && a.max_asym <= 1e-12;
  return a;
}

std::pair<Real, Real> coefficient_sup(const PolarGrid& grid, const CoefficientSet& c) {
  Real x_sup = 0, p_sup = 0;
  for (int k = 0; k < grid.size(); ++k) {
    x_sup = std::max(x_sup, c.X(grid.x1()[k], grid.x2()[k]).norm());
    p_sup = std::max(p_sup, std::abs(c.p(grid.x1()[k], grid.x2()[k])));
  }
  return {x_sup, p_sup};
}

CoeffTables::CoeffTables(const PolarGrid& grid, const CoefficientSet& c) {
  const int n = grid.size();
  X1 = CVec(n);
  X2 = CVec(n);
  p = CVec(n);
  for (int k = 0; k < n; ++k) {
    const auto xv = c.X(grid.x1()[k], grid.x2()[k]);
    X1[k] = xv[0];
    X2[k] = xv[1];
    p[k] = c.p(grid.x1()[k], grid.x2()[k]);
  }
  ensure_finite(X1, "CoeffTables X1");
  ensure_finite(X2, "CoeffTables X2");
  ensure_finite(p, "CoeffTables p");
}

GridField laplace_beltrami(const PolarGrid& grid, const GridField& u, const MetricTables& mt) {
  ensure_finite(u.values, "laplace_beltrami");
  const DiffOps& o = grid.ops();
  const CVec d1 = o.D1 * u.values;
  const CVec d2 = o.D2 * u.values;
  const int n = grid.size();
  CVec F1(n), F2(n);
  for (int k = 0; k < n; ++k) {
    F1[k] = mt.sqrt_det[k] * (mt.inv11[k] * d1[k] + mt.inv12[k] * d2[k]);
    F2[k] = mt.sqrt_det[k] * (mt.inv12[k] * d1[k] + mt.inv22[k] * d2[k]);
  }
  CVec div = o.D1 * F1 + o.D2 * F2;
  for (int k = 0; k < n; ++k) div[k] /= mt.sqrt_det[k];
  return GridField(std::move(div), "lap_g(" + u.name + ")");
}

GridField laplace_beltrami(const PolarGrid& grid, const GridField& u, const MetricField& m) {
  return laplace_beltrami(grid, u, MetricTables(grid, m));
}

GridField apply_P(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                  const CoeffTables& ct) {
  const GridField lap = laplace_beltrami(grid, u, mt);
  const DiffOps& o = grid.ops();
  const CVec d1 = o.D1 * u.values;
  const CVec d2 = o.D2 * u.values;
  CVec out(grid.size());
  for (int k = 0; k < grid.size(); ++k)
    out[k] = -lap.values[k] + ct.X1[k] * d1[k] + ct.X2[k] * d2[k] + ct.p[k] * u.values[k];
  return GridField(std::move(out), "P(" + u.name + ")");
}

GridField apply_P(const PolarGrid& grid, const GridField& u, const MetricField& m,
                  const CoefficientSet& c) {
  return apply_P(grid, u, MetricTables(grid, m), CoeffTables(grid, c));
}

GridField apply_magnetic_L(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                           const MagneticPotential& a) {
  ensure_finite(u.values, "apply_magnetic_L");
  const DiffOps& o = grid.ops();
  const int n = grid.size();
  CVec a1(n), a2(n);
  for (int k = 0; k < n; ++k) {
    const auto av = a.a(grid.x1()[k], grid.x2()[k]);
    a1[k] = av[0];
    a2[k] = av[1];
  }
  const Complex I(0, 1);
  const CVec d1 = o.D1 * u.values;
  const CVec d2 = o.D2 * u.values;
  CVec F1(n), F2(n);
  for (int k = 0; k < n; ++k) {
    const Complex e1 = d1[k] + I * a1[k] * u.values[k];
    const Complex e2 = d2[k] + I * a2[k] * u.values[k];
    F1[k] = mt.sqrt_det[k] * (mt.inv11[k] * e1 + mt.inv12[k] * e2);
    F2[k] = mt.sqrt_det[k] * (mt.inv12[k] * e1 + mt.inv22[k] * e2);
  }
  CVec div = o.D1 * F1 + o.D2 * F2;
  for (int k = 0; k < n; ++k)
    div[k] = (div[k] + I * (a1[k] * F1[k] + a2[k] * F2[k])) / mt.sqrt_det[k];
  return GridField(std::move(div), "L(" + u.name + ")");
}

CoefficientSet magnetic_to_drift(const MetricField& m, const MagneticPotential& a) {
  CoefficientSet out;
  out.name = "magnetic(" + a.name + ")@" + m.name;
  const Complex I(0, 1);
  out.X = [m, a, I](Real x1, Real x2) {
    const auto [inv, det] = metric_inverse_det(m, x1, x2);
    (void)det;
    const Eigen::Vector2d av = a.a(x1, x2);
    const Eigen::Vector2d w = inv * av;  // g^{kl} a_k
    return Eigen::Vector2cd(-2.0 * I * w[0], -2.0 * I * w[1]);
  };
  out.p = [m, a, I](Real x1, Real x2) {
    const auto [inv, det] = metric_inverse_det(m, x1, x2);
    const Eigen::Vector2d av = a.a(x1, x2);
    const Eigen::Matrix2d dav = a.da(x1, x2);  // dav(k,l) = d_k a_l
    const auto dgs = m.dg(x1, x2);
    const Real sq = std::sqrt(det);
    // d_k (sqrt|g| g^{kl} a_l)
    //   = sum_k [ (d_k sqrt|g|) (g^{-1} a)_k + sqrt|g| (d_k g^{-1} a)_k
    //             + sqrt|g| (g^{-1} d_k a)_k ]
    Real divergence = 0.0;
    for (int k = 0; k < 2; ++k) {
      const RMat2& dgk = dgs[k];
      const Real dsq = 0.5 * sq * (inv * dgk).trace();      // d_k sqrt|g|
      const RMat2 dinv = -inv * dgk * inv;                  // d_k g^{-1}
      const Eigen::Vector2d dak(dav(k, 0), dav(k, 1));      // d_k a
      divergence += dsq * (inv * av)[k] + sq * (dinv * av)[k] + sq * (inv * dak)[k];
    }
    const Real a_sq = av.dot(inv * av);  // g^{kl} a_k a_l
    return -I * divergence / sq + a_sq;
  };
  return out;
}

SpMatC build_P_matrix(const PolarGrid& grid, const MetricTables& mt, const CoeffTables& ct) {
  const DiffOps& o = grid.ops();
  const int n = grid.size();
  const SpMatC D1 = o.D1.cast<Complex>();
  const SpMatC D2 = o.D2.cast<Complex>();

  auto cdiag = [&](const RVec& v) {
    SpMatC d(n, n);
    d.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int k = 0; k < n; ++k) d.insert(k, k) = Complex(v[k], 0);
    d.makeCompressed();
    return d;
  };
  auto zdiag = [&](const CVec& v) {
    SpMatC d(n, n);
    d.reserve(Eigen::VectorXi::Constant(n, 1));
    for (int k = 0; k < n; ++k) d.insert(k, k) = v[k];
    d.makeCompressed();
    return d;
  };

  const RVec a11 = mt.sqrt_det.cwiseProduct(mt.inv11);
  const RVec a12 = mt.sqrt_det.cwiseProduct(mt.inv12);
  const RVec a22 = mt.sqrt_det.cwiseProduct(mt.inv22);
  const RVec inv_sq = mt.sqrt_det.cwiseInverse();

  SpMatC lap = cdiag(inv_sq) * (D1 * (cdiag(a11) * D1) + D1 * (cdiag(a12) * D2) +
                                D2 * (cdiag(a12) * D1) + D2 * (cdiag(a22) * D2));
  SpMatC P = (-lap + zdiag(ct.X1) * D1 + zdiag(ct.X2) * D2 + zdiag(ct.p)).pruned();
  P.makeCompressed();
  return P;
}

namespace {

std::map<std::string, MetricField> make_metric_presets() {
  std::map<std::string, MetricField> reg;
  {
    MetricField m;
    m.name = "identity";
    m.g = [](Real, Real) { return RMat2::Identity(); };
    m.dg = [](Real, Real) { return std::array<RMat2, 2>{RMat2::Zero(), RMat2::Zero()}; };
    m.rho = 1.0;
    reg[m.name] = m;
  }
  {
    MetricField m;
    m.name = "anisotropic";
    m.g = [](Real, Real) {
      RMat2 g;
      g << 2.0, 0.0, 0.0, 0.5;
      return g;
    };
    m.dg = [](Real, Real) { return std::array<RMat2, 2>{RMat2::Zero(), RMat2::Zero()}; };
    m.rho = 0.5;
    reg[m.name] = m;
  }
  {
    // conformal bump, eigenvalues in [0.7, 1.3]
    MetricField m;
    m.name = "sin-bump";
    m.g = [](Real x1, Real x2) {
      const Real c = 1.0 + 0.3 * std::sin(x1) * std::sin(x2);
      return RMat2(c * RMat2::Identity());
    };
    m.dg = [](Real x1, Real x2) {
      const Real c1 = 0.3 * std::cos(x1) * std::sin(x2);
      const Real c2 = 0.3 * std::sin(x1) * std::cos(x2);
      return std::array<RMat2, 2>{RMat2(c1 * RMat2::Identity()), RMat2(c2 * RMat2::Identity())};
    };
    m.rho = 0.7;
    reg[m.name] = m;
  }
  return reg;
}

std::map<std::string, CoefficientSet> make_coefficient_presets() {
  std::map<std::string, CoefficientSet> reg;
  {
    CoefficientSet c;
    c.name = "free";
    c.X = [](Real, Real) { return Eigen::Vector2cd::Zero().eval(); };
    c.p = [](Real, Real) { return Complex(0, 0); };
    reg[c.name] = c;
  }
  {
    // constant complex drift with unit potential
    CoefficientSet c;
    c.name = "drift-complex";
    c.X = [](Real, Real) {
      return Eigen::Vector2cd(Complex(0.3, 0.2), Complex(-0.1, 0.4)).eval();
    };
    c.p = [](Real, Real) { return Complex(1, 0); };
    reg[c.name] = c;
  }
  return reg;
}

std::map<std::string, MagneticPotential> make_magnetic_presets() {
  std::map<std::string, MagneticPotential> reg;
  {
    MagneticPotential a;
    a.name = "constant";
    a.a = [](Real, Real) { return Eigen::Vector2d(0.4, -0.3); };
    a.da = [](Real, Real) { return Eigen::Matrix2d::Zero().eval(); };
    reg[a.name] = a;
  }
  {
    MagneticPotential a;
    a.name = "smooth";
    a.a = [](Real x1, Real x2) { return Eigen::Vector2d(std::sin(x2), std::cos(x1)); };
    a.da = [](Real x1, Real x2) {
      Eigen::Matrix2d d;  // d(k,l) = d_k a_l
      d << 0.0, -std::sin(x1), std::cos(x2), 0.0;
      return d;
    };
    reg[a.name] = a;
  }
  return reg;
}

template <typename M>
const typename M::mapped_type& lookup(const M& reg, const std::string& name, const char* kind) {
  auto it = reg.find(name);
  if (it == reg.end()) throw InvalidConfig(std::string("unknown ") + kind + " preset: " + name);
  return it->second;
}

template <typename M>
std::vector<std::string> names_of(const M& reg) {
  std::vector<std::string> out;
  for (const auto& [k, v] : reg) out.push_back(k);
  return out;
}

}  // namespace

const MetricField& metric_preset(const std::string& name) {
  static const auto reg = make_metric_presets();
  return lookup(reg, name, "metric");
}
const CoefficientSet& coefficient_preset(const std::string& name) {
  static const auto reg = make_coefficient_presets();
  return lookup(reg, name, "coefficient");
}
const MagneticPotential& magnetic_preset(const std::string& name) {
  static const auto reg = make_magnetic_presets();
  return lookup(reg, name, "magnetic");
}
std::vector<std::string> metric_preset_names() {
  static const auto reg = make_metric_presets();
  return names_of(reg);
}
std::vector<std::string> coefficient_preset_names() {
  static const auto reg = make_coefficient_presets();
  return names_of(reg);
}
std::vector<std::string> magnetic_preset_names() {
  static const auto reg = make_magnetic_presets();
  return names_of(reg);
}

}  // namespace ucb
