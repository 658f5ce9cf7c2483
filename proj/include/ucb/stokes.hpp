#pragma once

#include <string>
#include <vector>

#include "ucb/carleman.hpp"
#include "ucb/fields.hpp"
#include "ucb/grid.hpp"
#include "ucb/weight.hpp"

namespace ucb {

// Velocity pair plus pressure; the packed view v = (u1, u2, p) is what the
// componentwise estimates run over.
struct StokesState {
  GridField u1, u2, p;

  const GridField& component(int k) const {
    return k == 0 ? u1 : (k == 1 ? u2 : p);
  }
  static constexpr int kComponents = 3;
};

struct DriftCoefficient {
  std::string name;
  std::function<Eigen::Vector2cd(Real, Real)> a;
  std::function<Eigen::Matrix2cd(Real, Real)> da;  // da(k,l) = d_k a^l
};

// sup-norm bounds over the grid nodes
Real drift_sup(const PolarGrid& grid, const DriftCoefficient& a);
Real drift_grad_sup(const PolarGrid& grid, const DriftCoefficient& a);

// Closed-form states satisfying -Delta u + (a.grad) u + grad p = 0, div u = 0.
struct ManufacturedStokes {
  std::string name;
  DriftCoefficient drift;
  std::function<Complex(Real, Real)> u1, u2, p;

  StokesState on_grid(const PolarGrid& grid) const;
};

const ManufacturedStokes& stokes_preset(const std::string& name);
std::vector<std::string> stokes_preset_names();

struct StokesResidual {
  GridField momentum1, momentum2, divergence;
};

StokesResidual stokes_residual(const PolarGrid& grid, const StokesState& state,
                               const DriftCoefficient& a);

// Defect of Delta v = ((a.grad) u + grad p, -d_k a^j d_j u^k), max over all
// nodes and over the interior sub-annulus (the radial boundary rows are one
// order lower).
struct IdentityDefect {
  Real max_all = 0;
  Real max_interior = 0;
};

IdentityDefect laplacian_identity_check(const PolarGrid& grid, const StokesState& state,
                                        const DriftCoefficient& a);

// Pointwise domination c0 |Delta v|^2 <= |grad v|^2 with
// c0 = 1 / (2 max(n ||a||^2, n^2 ||grad a||^2) + 2), n = 2.
// (Cauchy-Schwarz on the Delta v identity gives
//  |Delta v|^2 <= (2||a||^2 + n^2||grad a||^2) |grad u|^2 + 2 |grad p|^2,
//  so this c0 is on the safe side.) max_violation <= 0 means the inequality
// held at every node.
struct DominationCheck {
  Real c0 = 0;
  Real max_violation = 0;
};

DominationCheck gradient_domination_check(const PolarGrid& grid, const StokesState& state,
                                          const DriftCoefficient& a);

// F(u, p): the four Gamma terms with the Euclidean metric.
Real stokes_cauchy_norm(const PolarGrid& grid, const StokesState& state);

struct StokesCarlemanRow {
  Real s = 0;
  Real lhs_log10 = 0, rhs_log10 = 0;
  Real ratio = 0;               // aggregate RHS / LHS
  Real grad_term_over_lhs_vol = 0;  // integral e^{2s phi}|grad v|^2 dV vs LHS volume part
  bool absorption_ok = false;   // grad term <= half the LHS volume part
};

struct StokesCarlemanReport {
  std::vector<StokesCarlemanRow> rows;
  Real absorption_s_threshold = 0;  // smallest swept s with absorption_ok; 0 if none
};

// Componentwise scalar estimate with g = I and P = -Delta, summed over the
// three components of v, plus the absorption bookkeeping of the gradient
// volume term.
StokesCarlemanReport stokes_carleman_run(const PolarGrid& grid, const StokesState& state,
                                         const BaseWeight& w, Real gamma,
                                         const std::vector<Real>& s_list);

}  // namespace ucb
