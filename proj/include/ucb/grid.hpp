#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "ucb/common.hpp"

namespace ucb {

enum class BoundaryTag { S_inner, Gamma_outer };

struct BoundarySlice {
  BoundaryTag tag;
  std::vector<int> nodes;                   // global node indices, theta order
  std::vector<Eigen::Vector2d> normals;     // Euclidean outward unit normals of D
  RVec arc_weights;                         // sum = circumference
};

// Complex nodal field on a PolarGrid. Length must equal grid.size().
struct GridField {
  CVec values;
  std::string name;

  GridField() = default;
  explicit GridField(CVec v, std::string n = "") : values(std::move(v)), name(std::move(n)) {}
  int size() const { return static_cast<int>(values.size()); }
};

// Sparse first/second derivative operators in Cartesian components,
// assembled from the polar stencils (central in r with one-sided
// second-order rows at r0 and R1, central periodic in theta).
struct DiffOps {
  SpMatR Dr, Dth;            // polar derivatives
  SpMatR D1, D2;             // Cartesian partials
  SpMatR D11, D12, D21, D22; // composed second derivatives
};

// Tensor grid on the annulus r0 <= |x| <= R1. Radial quadrature is composite
// Simpson (with a 3/8 tail when the interval count is odd), angular quadrature
// is the periodic trapezoid rule. Node (i, Ntheta) is identified with (i, 0).
// Immutable; copies share storage.
class PolarGrid {
 public:
  PolarGrid() = default;

  Real r0() const { return d_->r0; }
  Real R1() const { return d_->R1; }
  int Nr() const { return d_->Nr; }
  int Ntheta() const { return d_->Nt; }
  int size() const { return d_->Nr * d_->Nt; }
  Real hr() const { return d_->hr; }
  Real htheta() const { return d_->ht; }

  int index(int i, int j) const { return i * d_->Nt + j; }
  Real r(int i) const { return d_->rs[i]; }
  Real theta(int j) const { return d_->thetas[j]; }
  Eigen::Vector2d node(int idx) const {
    return {d_->x1[idx], d_->x2[idx]};
  }
  const RVec& x1() const { return d_->x1; }
  const RVec& x2() const { return d_->x2; }
  // quadrature weight including the polar Jacobian r
  Real volume_weight(int idx) const { return d_->vol_w[idx]; }
  const RVec& volume_weights() const { return d_->vol_w; }

  const BoundarySlice& boundary(BoundaryTag tag) const {
    return tag == BoundaryTag::S_inner ? d_->inner : d_->outer;
  }

  // Lazily built, cached, thread-safe.
  const DiffOps& ops() const;

  bool same_grid(const PolarGrid& other) const { return d_ == other.d_; }

  friend PolarGrid build_grid(Real r0, Real R1, int Nr, int Ntheta);

  struct Data {
    Real r0 = 0, R1 = 0, hr = 0, ht = 0;
    int Nr = 0, Nt = 0;
    RVec rs, thetas;       // radial / angular coordinates
    RVec cos_t, sin_t;     // per angular index
    RVec radial_w;         // Simpson weights
    RVec x1, x2, vol_w;    // per node
    BoundarySlice inner, outer;
    mutable std::once_flag ops_once;
    mutable std::unique_ptr<DiffOps> ops;
  };

 private:
  std::shared_ptr<const Data> d_;
};

PolarGrid build_grid(Real r0, Real R1, int Nr, int Ntheta);

// Integrals against the Euclidean measure (metric factors are the caller's
// business, matching the dV_g = sqrt|g| dx split).
Real integrate_volume(const PolarGrid& g, const RVec& f);
Real integrate_boundary(const PolarGrid& g, BoundaryTag tag, const RVec& f_on_slice);

// Cartesian partials of a nodal field, second-order stencils.
std::pair<GridField, GridField> partial_derivatives(const PolarGrid& g, const GridField& u);

// (d11, d12, d21, d22); O(h^2) interior, O(h) in the radial boundary layer.
std::array<GridField, 4> second_derivatives(const PolarGrid& g, const GridField& u);

// Field construction helpers.
GridField field_from(const PolarGrid& g, const std::function<Complex(Real, Real)>& f_xy,
                     std::string name = "");
RVec real_part(const CVec& v);

// Nodes inside the sub-annulus [r0 + frac*(R1-r0), R1 - frac*(R1-r0)];
// refinement studies of composed second derivatives measure here so the
// O(h) boundary rows do not pollute the interior order.
std::vector<int> interior_nodes(const PolarGrid& g, Real frac = 0.1);

void ensure_finite(const CVec& v, const char* what);

}  // namespace ucb
