#include "ucb/grid.hpp"

#include <cmath>
#include <vector>

namespace ucb {

namespace {

// Composite Simpson weights for Nr nodes. If the interval count is odd the
// last three intervals use the 3/8 rule; both rules are exact on cubics, so
// the combination keeps the quadrature exact for integrands polynomial in r
// of degree <= 3.
RVec simpson_weights(int Nr, Real h) {
  RVec w = RVec::Zero(Nr);
  const int n_int = Nr - 1;
  int simpson_end = n_int;  // node index where the 1/3 part stops
  if (n_int % 2 != 0) simpson_end = n_int - 3;
  for (int k = 0; k + 2 <= simpson_end; k += 2) {
    w[k] += h / 3.0;
    w[k + 1] += 4.0 * h / 3.0;
    w[k + 2] += h / 3.0;
  }
  if (simpson_end != n_int) {
    const Real c = 3.0 * h / 8.0;
    w[simpson_end] += c;
    w[simpson_end + 1] += 3.0 * c;
    w[simpson_end + 2] += 3.0 * c;
    w[simpson_end + 3] += c;
  }
  return w;
}

}  // namespace

PolarGrid build_grid(Real r0, Real R1, int Nr, int Ntheta) {
  if (!(r0 > 0.0) || !(R1 > r0))
    throw InvalidGeometry("build_grid: need 0 < r0 < R1");
  if (Nr < 8 || Ntheta < 8)
    throw InvalidGeometry("build_grid: need Nr >= 8 and Ntheta >= 8");
  if (Ntheta % 2 != 0)
    throw InvalidGeometry("build_grid: Ntheta must be even");

  auto d = std::make_shared<PolarGrid::Data>();
  d->r0 = r0;
  d->R1 = R1;
  d->Nr = Nr;
  d->Nt = Ntheta;
  d->hr = (R1 - r0) / (Nr - 1);
  d->ht = 2.0 * kPi / Ntheta;

  d->rs = RVec(Nr);
  for (int i = 0; i < Nr; ++i) d->rs[i] = r0 + i * d->hr;
  d->rs[Nr - 1] = R1;  // exact outer radius

  d->thetas = RVec(Ntheta);
  d->cos_t = RVec(Ntheta);
  d->sin_t = RVec(Ntheta);
  for (int j = 0; j < Ntheta; ++j) {
    d->thetas[j] = j * d->ht;
    d->cos_t[j] = std::cos(d->thetas[j]);
    d->sin_t[j] = std::sin(d->thetas[j]);
  }

  d->radial_w = simpson_weights(Nr, d->hr);

  const int n = Nr * Ntheta;
  d->x1 = RVec(n);
  d->x2 = RVec(n);
  d->vol_w = RVec(n);
  for (int i = 0; i < Nr; ++i) {
    for (int j = 0; j < Ntheta; ++j) {
      const int idx = i * Ntheta + j;
      d->x1[idx] = d->rs[i] * d->cos_t[j];
      d->x2[idx] = d->rs[i] * d->sin_t[j];
      d->vol_w[idx] = d->radial_w[i] * d->ht * d->rs[i];
    }
  }

  auto make_slice = [&](BoundaryTag tag) {
    BoundarySlice s;
    s.tag = tag;
    const int i = (tag == BoundaryTag::S_inner) ? 0 : Nr - 1;
    const Real rad = (tag == BoundaryTag::S_inner) ? r0 : R1;
    const Real sign = (tag == BoundaryTag::S_inner) ? -1.0 : 1.0;
    s.nodes.resize(Ntheta);
    s.normals.resize(Ntheta);
    s.arc_weights = RVec::Constant(Ntheta, rad * d->ht);
    for (int j = 0; j < Ntheta; ++j) {
      s.nodes[j] = i * Ntheta + j;
      s.normals[j] = Eigen::Vector2d(sign * d->cos_t[j], sign * d->sin_t[j]);
    }
    return s;
  };
  d->inner = make_slice(BoundaryTag::S_inner);
  d->outer = make_slice(BoundaryTag::Gamma_outer);

  PolarGrid g;
  g.d_ = std::move(d);
  return g;
}

namespace {

void build_ops(const PolarGrid::Data& d, DiffOps& ops) {
  const int Nr = d.Nr, Nt = d.Nt, n = Nr * Nt;
  const Real hr = d.hr, ht = d.ht;

  std::vector<Eigen::Triplet<Real>> tr, tt;
  tr.reserve(3 * n);
  tt.reserve(2 * n);
  for (int i = 0; i < Nr; ++i) {
    for (int j = 0; j < Nt; ++j) {
      const int row = i * Nt + j;
      if (i == 0) {
        tr.emplace_back(row, row, -3.0 / (2.0 * hr));
        tr.emplace_back(row, row + Nt, 4.0 / (2.0 * hr));
        tr.emplace_back(row, row + 2 * Nt, -1.0 / (2.0 * hr));
      } else if (i == Nr - 1) {
        tr.emplace_back(row, row, 3.0 / (2.0 * hr));
        tr.emplace_back(row, row - Nt, -4.0 / (2.0 * hr));
        tr.emplace_back(row, row - 2 * Nt, 1.0 / (2.0 * hr));
      } else {
        tr.emplace_back(row, row + Nt, 1.0 / (2.0 * hr));
        tr.emplace_back(row, row - Nt, -1.0 / (2.0 * hr));
      }
      const int jp = (j + 1) % Nt, jm = (j + Nt - 1) % Nt;
      tt.emplace_back(row, i * Nt + jp, 1.0 / (2.0 * ht));
      tt.emplace_back(row, i * Nt + jm, -1.0 / (2.0 * ht));
    }
  }
  ops.Dr = SpMatR(n, n);
  ops.Dr.setFromTriplets(tr.begin(), tr.end());
  ops.Dth = SpMatR(n, n);
  ops.Dth.setFromTriplets(tt.begin(), tt.end());

  // chain rule: d1 = cos(t) d_r - sin(t)/r d_theta, d2 = sin(t) d_r + cos(t)/r d_theta
  RVec c1(n), s1(n), inv_r(n);
  for (int i = 0; i < Nr; ++i)
    for (int j = 0; j < Nt; ++j) {
      const int idx = i * Nt + j;
      c1[idx] = d.cos_t[j];
      s1[idx] = d.sin_t[j];
      inv_r[idx] = 1.0 / d.rs[i];
    }
  ops.D1 = c1.asDiagonal() * ops.Dr - (s1.cwiseProduct(inv_r)).asDiagonal() * ops.Dth;
  ops.D2 = s1.asDiagonal() * ops.Dr + (c1.cwiseProduct(inv_r)).asDiagonal() * ops.Dth;
  ops.D1.makeCompressed();
  ops.D2.makeCompressed();

  ops.D11 = (ops.D1 * ops.D1).pruned();
  ops.D12 = (ops.D1 * ops.D2).pruned();
  ops.D21 = (ops.D2 * ops.D1).pruned();
  ops.D22 = (ops.D2 * ops.D2).pruned();
}

}  // namespace

const DiffOps& PolarGrid::ops() const {
  std::call_once(d_->ops_once, [&] {
    auto o = std::make_unique<DiffOps>();
    build_ops(*d_, *o);
    d_->ops = std::move(o);
  });
  return *d_->ops;
}

void ensure_finite(const CVec& v, const char* what) {
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (!std::isfinite(v[k].real()) || !std::isfinite(v[k].imag()))
      throw InvalidParams(std::string(what) + ": non-finite entry");
  }
}

Real integrate_volume(const PolarGrid& g, const RVec& f) {
  if (f.size() != g.size())
    throw InvalidParams("integrate_volume: field length mismatch");
  // fixed summation order: node index order, run-to-run reproducible
  Real acc = 0.0;
  const RVec& w = g.volume_weights();
  for (int k = 0; k < g.size(); ++k) {
    if (!std::isfinite(f[k])) throw InvalidParams("integrate_volume: non-finite entry");
    acc += w[k] * f[k];
  }
  return acc;
}

Real integrate_boundary(const PolarGrid& g, BoundaryTag tag, const RVec& f_on_slice) {
  const BoundarySlice& s = g.boundary(tag);
  if (f_on_slice.size() != static_cast<Eigen::Index>(s.nodes.size()))
    throw InvalidParams("integrate_boundary: slice length mismatch");
  Real acc = 0.0;
  for (int j = 0; j < static_cast<int>(s.nodes.size()); ++j) {
    if (!std::isfinite(f_on_slice[j]))
      throw InvalidParams("integrate_boundary: non-finite entry");
    acc += s.arc_weights[j] * f_on_slice[j];
  }
  return acc;
}

std::pair<GridField, GridField> partial_derivatives(const PolarGrid& g, const GridField& u) {
  ensure_finite(u.values, "partial_derivatives");
  const DiffOps& o = g.ops();
  return {GridField(o.D1 * u.values, u.name + "_d1"),
          GridField(o.D2 * u.values, u.name + "_d2")};
}

std::array<GridField, 4> second_derivatives(const PolarGrid& g, const GridField& u) {
  ensure_finite(u.values, "second_derivatives");
  const DiffOps& o = g.ops();
  return {GridField(o.D11 * u.values), GridField(o.D12 * u.values),
          GridField(o.D21 * u.values), GridField(o.D22 * u.values)};
}

GridField field_from(const PolarGrid& g, const std::function<Complex(Real, Real)>& f_xy,
                     std::string name) {
  CVec v(g.size());
  for (int k = 0; k < g.size(); ++k) v[k] = f_xy(g.x1()[k], g.x2()[k]);
  return GridField(std::move(v), std::move(name));
}

RVec real_part(const CVec& v) {
  RVec r(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) r[k] = v[k].real();
  return r;
}

std::vector<int> interior_nodes(const PolarGrid& g, Real frac) {
  const Real lo = g.r0() + frac * (g.R1() - g.r0());
  const Real hi = g.R1() - frac * (g.R1() - g.r0());
  std::vector<int> out;
  out.reserve(g.size());
  for (int i = 0; i < g.Nr(); ++i) {
    if (g.r(i) < lo || g.r(i) > hi) continue;
    for (int j = 0; j < g.Ntheta(); ++j) out.push_back(g.index(i, j));
  }
  return out;
}

}  // namespace ucb
