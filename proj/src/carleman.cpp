#include "ucb/carleman.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ucb/rng.hpp"

namespace ucb {

TestFamily make_test_family(const PolarGrid& grid, std::uint64_t seed, int count,
                            int max_radial_degree, int max_angular_frequency,
                            bool with_adversaries, bool complex_valued) {
  if (count < 1) throw InvalidConfig("make_test_family: count must be >= 1");
  TestFamily fam;
  fam.seed = seed;
  fam.count = count;
  fam.max_radial_degree = max_radial_degree;
  fam.max_angular_frequency = max_angular_frequency;
  fam.with_adversaries = with_adversaries;
  fam.complex_valued = complex_valued;

  Rng rng(seed);
  const int n = grid.size();
  const Real r0 = grid.r0(), R1 = grid.R1();

  auto normalize = [&](GridField f) {
    const Real h2 = h2_norm(grid, f);
    if (!(h2 > 0.0)) throw InvalidParams("make_test_family: zero member generated");
    f.values /= h2;
    return f;
  };

  for (int m = 0; m < count; ++m) {
    // coefficients drawn in a fixed (degree, frequency) order
    std::vector<std::vector<Complex>> coef(max_radial_degree + 1);
    for (int j = 0; j <= max_radial_degree; ++j) {
      coef[j].resize(2 * max_angular_frequency + 1);
      for (int q = 0; q <= 2 * max_angular_frequency; ++q) {
        const Real re = rng.uniform(-1.0, 1.0);
        const Real im = rng.uniform(-1.0, 1.0);
        coef[j][q] = complex_valued ? Complex(re, im) : Complex(re, 0.0);
      }
    }
    CVec v = CVec::Zero(n);
    for (int i = 0; i < grid.Nr(); ++i) {
      const Real rh = 2.0 * (grid.r(i) - r0) / (R1 - r0) - 1.0;  // mapped to [-1, 1]
      for (int jj = 0; jj < grid.Ntheta(); ++jj) {
        const Real th = grid.theta(jj);
        Complex acc(0, 0);
        Real rpow = 1.0;
        for (int j = 0; j <= max_radial_degree; ++j) {
          for (int q = -max_angular_frequency; q <= max_angular_frequency; ++q) {
            const Complex phase(std::cos(q * th), std::sin(q * th));
            acc += coef[j][q + max_angular_frequency] * rpow * phase;
          }
          rpow *= rh;
        }
        v[grid.index(i, jj)] = complex_valued ? acc : Complex(acc.real(), 0.0);
      }
    }
    fam.members.push_back(normalize(GridField(std::move(v), "band" + std::to_string(m))));
  }

  if (with_adversaries) {
    const Real w = 0.08 * (R1 - r0);
    auto bump = [&](bool at_inner, int freq, const std::string& name) {
      CVec v(n);
      for (int i = 0; i < grid.Nr(); ++i) {
        const Real d = at_inner ? (grid.r(i) - r0) : (R1 - grid.r(i));
        const Real prof = std::exp(-(d / w) * (d / w));
        for (int jj = 0; jj < grid.Ntheta(); ++jj) {
          const Real th = grid.theta(jj);
          v[grid.index(i, jj)] = prof * Complex(std::cos(freq * th), std::sin(freq * th));
        }
      }
      fam.members.push_back(normalize(GridField(std::move(v), name)));
    };
    bump(true, 0, "bump_S");
    bump(true, 2, "bump_S_m2");
    bump(false, 0, "bump_Gamma");
    bump(false, 3, "bump_Gamma_m3");
  }
  return fam;
}

LogScaled log_weighted_integral(const PolarGrid& grid, const CarlemanWeightField& wf,
                                const RVec& f) {
  if (f.size() != grid.size()) throw InvalidParams("log_weighted_integral: size mismatch");
  Real acc = 0.0;
  for (int k = 0; k < grid.size(); ++k)
    acc += grid.volume_weight(k) * wf.mantissa[k] * f[k];
  return {wf.log_offset, acc};
}

LogScaled log_weighted_boundary_integral(const PolarGrid& grid, BoundaryTag tag,
                                         const CarlemanWeightField& wf, const RVec& f_slice) {
  const BoundarySlice& s = grid.boundary(tag);
  if (f_slice.size() != static_cast<Eigen::Index>(s.nodes.size()))
    throw InvalidParams("log_weighted_boundary_integral: size mismatch");
  Real acc = 0.0;
  for (size_t j = 0; j < s.nodes.size(); ++j)
    acc += s.arc_weights[j] * wf.mantissa[s.nodes[j]] * f_slice[j];
  return {wf.log_offset, acc};
}

namespace {

// (gamma, s)-independent per-member data; the sweep reuses it across cells.
struct MemberData {
  RVec mgs;          // |grad_g u|_g^2 * sqrt|g| per node
  RVec u_sq;         // |u|^2 * sqrt|g| per node
  RVec pu_sq;        // |Pu|^2 * sqrt|g| per node
  RVec S_nd_sq;      // |d_nu u|^2 * sqrt|g| on S
  RVec S_u_sq;       // |u|^2 * sqrt|g| on S
  RVec S_tan_sq;     // |grad_tau u|^2 * sqrt|g| on S
  RVec G_mgs;        // |grad_g u|^2 * sqrt|g| on Gamma
  RVec G_u_sq;       // |u|^2 * sqrt|g| on Gamma
};

MemberData precompute_member(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                             const CoeffTables& ct) {
  MemberData md;
  const int n = grid.size();
  const RVec mg = metric_gradient_sq(grid, u, mt);
  const GridField pu = apply_P(grid, u, mt, ct);
  md.mgs = RVec(n);
  md.u_sq = RVec(n);
  md.pu_sq = RVec(n);
  for (int k = 0; k < n; ++k) {
    md.mgs[k] = mg[k] * mt.sqrt_det[k];
    md.u_sq[k] = std::norm(u.values[k]) * mt.sqrt_det[k];
    md.pu_sq[k] = std::norm(pu.values[k]) * mt.sqrt_det[k];
  }
  auto slice_sq = [&](BoundaryTag tag) {
    const BoundarySlice& s = grid.boundary(tag);
    const CVec nd = normal_derivative(grid, u, mt, tag);
    const RVec tan = tangential_gradient_sq(grid, u, mt, tag);
    RVec nd_sq(s.nodes.size()), usq(s.nodes.size()), tansq(s.nodes.size()), mgs(s.nodes.size());
    for (size_t j = 0; j < s.nodes.size(); ++j) {
      const Real sg = mt.sqrt_det[s.nodes[j]];
      nd_sq[j] = std::norm(nd[j]) * sg;
      usq[j] = std::norm(u.values[s.nodes[j]]) * sg;
      tansq[j] = tan[j] * sg;
      mgs[j] = mg[s.nodes[j]] * sg;
    }
    return std::tuple(nd_sq, usq, tansq, mgs);
  };
  auto [snd, susq, stan, smgs] = slice_sq(BoundaryTag::S_inner);
  md.S_nd_sq = snd;
  md.S_u_sq = susq;
  md.S_tan_sq = stan;
  auto [gnd, gusq, gtan, gmgs] = slice_sq(BoundaryTag::Gamma_outer);
  md.G_u_sq = gusq;
  md.G_mgs = gmgs;
  return md;
}

LogScaled lhs_from_data(const PolarGrid& grid, const MemberData& md,
                        const CarlemanWeightField& wf, const CarlemanParams& p) {
  const int n = grid.size();
  RVec vol(n);
  for (int k = 0; k < n; ++k) {
    const Real s2 = wf.sigma[k] * wf.sigma[k];
    vol[k] = wf.sigma[k] * (p.gamma * md.mgs[k] + p.gamma * s2 * md.u_sq[k]);
  }
  LogScaled total = log_weighted_integral(grid, wf, vol);

  const BoundarySlice& s = grid.boundary(BoundaryTag::S_inner);
  RVec bnd(s.nodes.size());
  for (size_t j = 0; j < s.nodes.size(); ++j) {
    const Real sig = wf.sigma[s.nodes[j]];
    bnd[j] = sig * (md.S_nd_sq[j] + sig * sig * md.S_u_sq[j]);
  }
  total += log_weighted_boundary_integral(grid, BoundaryTag::S_inner, wf, bnd);
  return total;
}

LogScaled rhs_from_data(const PolarGrid& grid, const MemberData& md,
                        const CarlemanWeightField& wf, const CarlemanParams& p) {
  (void)p;
  LogScaled total = log_weighted_integral(grid, wf, md.pu_sq);

  const BoundarySlice& gam = grid.boundary(BoundaryTag::Gamma_outer);
  RVec bnd(gam.nodes.size());
  for (size_t j = 0; j < gam.nodes.size(); ++j) {
    const Real sig = wf.sigma[gam.nodes[j]];
    bnd[j] = sig * (md.G_mgs[j] + sig * sig * md.G_u_sq[j]);
  }
  total += log_weighted_boundary_integral(grid, BoundaryTag::Gamma_outer, wf, bnd);

  const BoundarySlice& inner = grid.boundary(BoundaryTag::S_inner);
  RVec tan(inner.nodes.size());
  for (size_t j = 0; j < inner.nodes.size(); ++j)
    tan[j] = wf.sigma[inner.nodes[j]] * md.S_tan_sq[j];
  total += log_weighted_boundary_integral(grid, BoundaryTag::S_inner, wf, tan);
  return total;
}

}  // namespace

LogScaled carleman_lhs(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       const BaseWeight& w, const CarlemanParams& params) {
  validate_params(params);
  // the |Pu|^2 data is unused on this side; free coefficients keep the
  // precompute shared with the RHS path
  static const CoefficientSet& free_c = coefficient_preset("free");
  const CoeffTables ct(grid, free_c);
  const MemberData md = precompute_member(grid, u, mt, ct);
  const CarlemanWeightField wf = stabilized_weight(w, params, grid);
  return lhs_from_data(grid, md, wf, params);
}

LogScaled carleman_rhs(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       const CoeffTables& ct, const BaseWeight& w, const CarlemanParams& params) {
  validate_params(params);
  const MemberData md = precompute_member(grid, u, mt, ct);
  const CarlemanWeightField wf = stabilized_weight(w, params, grid);
  return rhs_from_data(grid, md, wf, params);
}

namespace {

EmpiricalConstant empirical_from_members(const PolarGrid& grid,
                                         const std::vector<MemberData>& members,
                                         const CarlemanWeightField& wf,
                                         const CarlemanParams& params) {
  EmpiricalConstant out;
  out.c_emp = std::numeric_limits<Real>::infinity();
  for (int m = 0; m < static_cast<int>(members.size()); ++m) {
    const LogScaled lhs = lhs_from_data(grid, members[m], wf, params);
    const LogScaled rhs = rhs_from_data(grid, members[m], wf, params);
    if (lhs.mantissa == 0.0 && rhs.mantissa == 0.0) {
      out.excluded.push_back(m);
      out.ratios.push_back(std::numeric_limits<Real>::quiet_NaN());
      continue;
    }
    const Real ratio = lhs.mantissa == 0.0 ? std::numeric_limits<Real>::infinity()
                                           : rhs.mantissa / lhs.mantissa;
    out.ratios.push_back(ratio);
    if (ratio < out.c_emp) {
      out.c_emp = ratio;
      out.argmin_member = m;
      out.lhs_at_argmin = lhs;
      out.rhs_at_argmin = rhs;
    }
  }
  out.degenerate = out.argmin_member < 0;
  return out;
}

}  // namespace

EmpiricalConstant empirical_constant(const PolarGrid& grid, const TestFamily& family,
                                     const MetricField& metric, const CoefficientSet& coeffs,
                                     const BaseWeight& w, const CarlemanParams& params) {
  validate_params(params);
  if (family.members.empty()) throw InvalidConfig("empirical_constant: empty family");
  const MetricTables mt(grid, metric);
  const CoeffTables ct(grid, coeffs);
  std::vector<MemberData> data;
  data.reserve(family.members.size());
  for (const auto& u : family.members) data.push_back(precompute_member(grid, u, mt, ct));
  const CarlemanWeightField wf = stabilized_weight(w, params, grid);
  return empirical_from_members(grid, data, wf, params);
}

SweepResult sweep(const PolarGrid& grid, const std::vector<Real>& gamma_list,
                  const std::vector<Real>& s_list, const TestFamily& family,
                  const MetricField& metric, const CoefficientSet& coeffs, const BaseWeight& w,
                  int workers) {
  if (gamma_list.empty() || s_list.empty())
    throw InvalidConfig("sweep: gamma_list and s_list must be nonempty");
  if (!std::is_sorted(gamma_list.begin(), gamma_list.end()) ||
      !std::is_sorted(s_list.begin(), s_list.end()))
    throw InvalidConfig("sweep: gamma_list and s_list must be ascending");
  if (family.members.empty()) throw InvalidConfig("sweep: empty family");
  const WeightValidation wv = validate_weight(w, grid);
  if (!wv.ok()) throw InvalidParams("sweep: weight '" + w.name + "' fails validation");
  const MetricAudit audit = audit_metric(grid, metric);
  if (!audit.ok) throw SingularMetric("sweep: metric '" + metric.name + "' fails ellipticity audit");

  const MetricTables mt(grid, metric);
  const CoeffTables ct(grid, coeffs);
  std::vector<MemberData> data;
  data.reserve(family.members.size());
  for (const auto& u : family.members) data.push_back(precompute_member(grid, u, mt, ct));

  struct Cell {
    Real gamma, s;
  };
  std::vector<Cell> cells;
  for (Real g : gamma_list)
    for (Real s : s_list) cells.push_back({g, s});

  std::vector<EmpiricalConstant> results(cells.size());
  const int nw = std::max(1, workers);
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const CarlemanParams p{cells[i].gamma, cells[i].s};
      const CarlemanWeightField wf = stabilized_weight(w, p, grid);
      results[i] = empirical_from_members(grid, data, wf, p);
    }
  };
  if (nw == 1) {
    work();
  } else {
    for (int t = 0; t < nw; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  for (size_t i = 0; i < cells.size(); ++i) {
    SweepCell c;
    c.gamma = cells[i].gamma;
    c.s = cells[i].s;
    c.c_emp = results[i].c_emp;
    c.argmin_member = results[i].argmin_member;
    c.lhs_log10 = results[i].lhs_at_argmin.log10_value();
    c.rhs_log10 = results[i].rhs_at_argmin.log10_value();
    c.excluded_count = static_cast<int>(results[i].excluded.size());
    out.cells.push_back(c);
  }

  // non-decay rule: a gamma row qualifies when c_emp never drops below half
  // its value at the smallest swept s
  const size_t ns = s_list.size();
  for (size_t gi = 0; gi < gamma_list.size(); ++gi) {
    const Real base = out.cells[gi * ns].c_emp;
    bool ok = std::isfinite(base) && base > 0.0;
    for (size_t si = 1; ok && si < ns; ++si)
      ok = out.cells[gi * ns + si].c_emp >= 0.5 * base;
    if (ok) {
      out.gamma_star = gamma_list[gi];
      out.s_star = s_list.front();
      out.stable = true;
      break;
    }
  }
  return out;
}

}  // namespace ucb
