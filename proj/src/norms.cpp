#include "ucb/norms.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/Eigenvalues>

namespace ucb {

RVec metric_gradient_sq(const PolarGrid& grid, const GridField& u, const MetricTables& mt) {
  ensure_finite(u.values, "metric_gradient_sq");
  const DiffOps& o = grid.ops();
  const CVec d1 = o.D1 * u.values;
  const CVec d2 = o.D2 * u.values;
  RVec out(grid.size());
  for (int k = 0; k < grid.size(); ++k) {
    out[k] = mt.inv11[k] * std::norm(d1[k]) + 2.0 * mt.inv12[k] * (d1[k] * std::conj(d2[k])).real() +
             mt.inv22[k] * std::norm(d2[k]);
  }
  return out;
}

CVec normal_derivative(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       BoundaryTag tag) {
  ensure_finite(u.values, "normal_derivative");
  const DiffOps& o = grid.ops();
  const CVec d1 = o.D1 * u.values;
  const CVec d2 = o.D2 * u.values;
  const BoundarySlice& s = grid.boundary(tag);
  CVec out(s.nodes.size());
  for (size_t j = 0; j < s.nodes.size(); ++j) {
    const int k = s.nodes[j];
    const Real n1 = s.normals[j][0], n2 = s.normals[j][1];
    // nu_k g^{km} d_m u / sqrt(g^{ab} nu_a nu_b)
    const Complex num = n1 * (mt.inv11[k] * d1[k] + mt.inv12[k] * d2[k]) +
                        n2 * (mt.inv12[k] * d1[k] + mt.inv22[k] * d2[k]);
    const Real den = std::sqrt(mt.inv11[k] * n1 * n1 + 2.0 * mt.inv12[k] * n1 * n2 +
                               mt.inv22[k] * n2 * n2);
    out[j] = num / den;
  }
  return out;
}

RVec tangential_gradient_sq(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                            BoundaryTag tag) {
  const RVec full = metric_gradient_sq(grid, u, mt);
  const CVec nd = normal_derivative(grid, u, mt, tag);
  const BoundarySlice& s = grid.boundary(tag);
  RVec out(s.nodes.size());
  for (size_t j = 0; j < s.nodes.size(); ++j) {
    const Real f = full[s.nodes[j]];
    Real t = f - std::norm(nd[j]);
    const Real tol = 1e-12 * std::max(1.0, f);
    if (t < -tol)
      throw NegativeTangentialEnergy("tangential_gradient_sq: identity violated by " +
                                     std::to_string(-t));
    if (t < 0.0) t = 0.0;
    out[j] = t;
  }
  return out;
}

namespace {

RVec slice_values(const BoundarySlice& s, const RVec& nodal) {
  RVec out(s.nodes.size());
  for (size_t j = 0; j < s.nodes.size(); ++j) out[j] = nodal[s.nodes[j]];
  return out;
}

}  // namespace

Real cauchy_norm(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                 const CoeffTables& ct) {
  const GridField Pu = apply_P(grid, u, mt, ct);
  RVec pu_sq(grid.size());
  for (int k = 0; k < grid.size(); ++k) pu_sq[k] = std::norm(Pu.values[k]) * mt.sqrt_det[k];
  const Real t_res = std::sqrt(integrate_volume(grid, pu_sq));

  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  const RVec tan_sq = tangential_gradient_sq(grid, u, mt, BoundaryTag::Gamma_outer);
  const RVec sg = slice_values(gam, mt.sqrt_det);
  RVec h1_int(gam.nodes.size()), nd_int(gam.nodes.size());
  const CVec nd = normal_derivative(grid, u, mt, BoundaryTag::Gamma_outer);
  for (size_t j = 0; j < gam.nodes.size(); ++j) {
    h1_int[j] = (tan_sq[j] + std::norm(u.values[gam.nodes[j]])) * sg[j];
    nd_int[j] = std::norm(nd[j]) * sg[j];
  }
  const Real t_trace = std::sqrt(integrate_boundary(grid, BoundaryTag::Gamma_outer, h1_int));
  const Real t_flux = std::sqrt(integrate_boundary(grid, BoundaryTag::Gamma_outer, nd_int));
  return t_res + t_trace + t_flux;
}

Real h2_norm(const PolarGrid& grid, const GridField& u) {
  ensure_finite(u.values, "h2_norm");
  const DiffOps& o = grid.ops();
  auto l2sq = [&](const CVec& v) {
    RVec a(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) a[k] = std::norm(v[k]);
    return integrate_volume(grid, a);
  };
  Real total = l2sq(u.values);
  total += l2sq(o.D1 * u.values) + l2sq(o.D2 * u.values);
  total += l2sq(o.D11 * u.values) + l2sq(o.D12 * u.values) + l2sq(o.D21 * u.values) +
           l2sq(o.D22 * u.values);
  return std::sqrt(total);
}

SpMatR build_h2_form(const PolarGrid& grid) {
  const DiffOps& o = grid.ops();
  const int n = grid.size();
  SpMatR M(n, n);
  M.reserve(Eigen::VectorXi::Constant(n, 1));
  for (int k = 0; k < n; ++k) M.insert(k, k) = grid.volume_weight(k);
  M.makeCompressed();

  SpMatR B = M;
  B += SpMatR(o.D1.transpose() * M * o.D1);
  B += SpMatR(o.D2.transpose() * M * o.D2);
  B += SpMatR(o.D11.transpose() * M * o.D11);
  B += SpMatR(o.D12.transpose() * M * o.D12);
  B += SpMatR(o.D21.transpose() * M * o.D21);
  B += SpMatR(o.D22.transpose() * M * o.D22);
  B.makeCompressed();
  return B;
}

CVec SpectralPair::coefficients(const CVec& u) const {
  const int n = static_cast<int>(u.size());
  RVec re(n), im(n);
  for (int k = 0; k < n; ++k) {
    re[k] = m_sqrt[k] * u[k].real();
    im[k] = m_sqrt[k] * u[k].imag();
  }
  const RVec cre = V.transpose() * re;
  const RVec cim = V.transpose() * im;
  CVec c(n);
  for (int k = 0; k < n; ++k) c[k] = Complex(cre[k], cim[k]);
  return c;
}

CVec SpectralPair::eigenfield(int j) const {
  const int n = static_cast<int>(lambda.size());
  CVec e(n);
  for (int k = 0; k < n; ++k) e[k] = Complex(m_inv_sqrt[k] * V(k, j), 0.0);
  return e;
}

namespace {

std::unique_ptr<SpectralPair> compute_spectral_pair(const PolarGrid& grid) {
  const int n = grid.size();
  auto sp = std::make_unique<SpectralPair>();
  sp->m_sqrt = RVec(n);
  sp->m_inv_sqrt = RVec(n);
  for (int k = 0; k < n; ++k) {
    sp->m_sqrt[k] = std::sqrt(grid.volume_weight(k));
    sp->m_inv_sqrt[k] = 1.0 / sp->m_sqrt[k];
  }

  const SpMatR B = build_h2_form(grid);
  // scaled standard form: A = M^{-1/2} B M^{-1/2}
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < B.outerSize(); ++col)
    for (SpMatR::InnerIterator it(B, col); it; ++it)
      A(it.row(), it.col()) = sp->m_inv_sqrt[it.row()] * it.value() * sp->m_inv_sqrt[it.col()];

  // self-contained dense solve; system BLAS/LAPACK providers are not trusted
  // for correctness here and the desk-scale sizes do not need them
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw SolverFailure("eigensolve failed");
  sp->lambda = es.eigenvalues();
  sp->V = es.eigenvectors();
  // the form contains the L2 Gram exactly once, so lambda >= 1 up to round-off
  for (int k = 0; k < n; ++k) sp->lambda[k] = std::max(sp->lambda[k], 1.0);
  return sp;
}

using GridKey = std::tuple<Real, Real, int, int>;

std::mutex g_spectral_mutex;
std::map<GridKey, std::shared_ptr<const SpectralPair>> g_spectral_cache;

}  // namespace

const SpectralPair& spectral_pair(const PolarGrid& grid) {
  const GridKey key{grid.r0(), grid.R1(), grid.Nr(), grid.Ntheta()};
  {
    std::scoped_lock lock(g_spectral_mutex);
    auto it = g_spectral_cache.find(key);
    if (it != g_spectral_cache.end()) return *it->second;
  }
  // compute outside the lock; the grid sizes in play make this minutes-long
  // in the worst case and other grids should not be blocked
  std::shared_ptr<const SpectralPair> fresh = compute_spectral_pair(grid);
  std::scoped_lock lock(g_spectral_mutex);
  auto [it, inserted] = g_spectral_cache.emplace(key, std::move(fresh));
  // keep the cache small; dense bases are large
  while (g_spectral_cache.size() > 3) {
    auto victim = g_spectral_cache.begin();
    if (victim->first == key) ++victim;
    g_spectral_cache.erase(victim);
  }
  return *it->second;
}

Real sobolev_eta_norm(const PolarGrid& grid, const GridField& u, Real eta) {
  if (!(eta >= 0.0 && eta < 2.0)) throw InvalidEta("sobolev_eta_norm: eta must be in [0, 2)");
  ensure_finite(u.values, "sobolev_eta_norm");
  const SpectralPair& sp = spectral_pair(grid);
  const CVec c = sp.coefficients(u.values);
  Real acc = 0.0;
  for (int j = 0; j < sp.size(); ++j) acc += std::pow(sp.lambda[j], eta / 2.0) * std::norm(c[j]);
  return std::sqrt(acc);
}

}  // namespace ucb
