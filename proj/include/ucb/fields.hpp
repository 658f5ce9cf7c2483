#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ucb/grid.hpp"

namespace ucb {

// Symmetric uniformly elliptic metric with analytic first partials.
// dg(x)[m] is the matrix of d/dx_m applied entrywise to g.
struct MetricField {
  std::string name;
  std::function<RMat2(Real, Real)> g;
  std::function<std::array<RMat2, 2>(Real, Real)> dg;
  Real rho = 1.0;  // declared ellipticity constant
};

// Lower-order coefficients of P u = -Delta_g u + <X, grad_g u> + p u.
// <X, grad_g u> contracts to X^k d_k u.
struct CoefficientSet {
  std::string name;
  std::function<Eigen::Vector2cd(Real, Real)> X;
  std::function<Complex(Real, Real)> p;
};

// Real magnetic potential with analytic partials; da(x)(k,l) = d_k a_l.
struct MagneticPotential {
  std::string name;
  std::function<Eigen::Vector2d(Real, Real)> a;
  std::function<Eigen::Matrix2d(Real, Real)> da;
};

// (g^{kl}, det g) at a point; throws SingularMetric if det <= 0.
std::pair<RMat2, Real> metric_inverse_det(const MetricField& m, Real x1, Real x2);

// Nodewise metric data cached for one (grid, metric) pair.
struct MetricTables {
  RVec inv11, inv12, inv22;  // inverse metric entries
  RVec g11, g12, g22;        // forward metric entries
  RVec sqrt_det;

  MetricTables(const PolarGrid& grid, const MetricField& m);
};

struct MetricAudit {
  bool ok = false;
  Real min_rayleigh = 0;   // min over nodes and probe directions of (xi' g xi)/|xi|^2
  Real min_det = 0;
  Real max_asym = 0;       // max |g12 - g21|
  Real sup_g = 0;          // max entry magnitude over nodes
  Real sup_dg = 0;         // max first-partial magnitude over nodes
};

// Ellipticity audit over all grid nodes with probe directions e1, e2, e1+e2;
// also collects the sup bounds the reports quote.
MetricAudit audit_metric(const PolarGrid& grid, const MetricField& m);

// Grid sup norms of the lower-order coefficients.
std::pair<Real, Real> coefficient_sup(const PolarGrid& grid, const CoefficientSet& c);

// Nodewise lower-order coefficient data.
struct CoeffTables {
  CVec X1, X2, p;
  CoeffTables(const PolarGrid& grid, const CoefficientSet& c);
};

GridField laplace_beltrami(const PolarGrid& grid, const GridField& u, const MetricTables& mt);
GridField laplace_beltrami(const PolarGrid& grid, const GridField& u, const MetricField& m);

GridField apply_P(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                  const CoeffTables& ct);
GridField apply_P(const PolarGrid& grid, const GridField& u, const MetricField& m,
                  const CoefficientSet& c);

// Divergence-form magnetic operator L applied numerically (both first-order
// factors discretized), for cross-checking the reduction to P.
GridField apply_magnetic_L(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                           const MagneticPotential& a);

// Reduction L -> P: X^l = -2i g^{kl} a_k,
// p = -(i/sqrt|g|) d_k(sqrt|g| g^{kl} a_l) + g^{kl} a_k a_l,
// with the divergence expanded through the analytic metric and potential partials.
CoefficientSet magnetic_to_drift(const MetricField& m, const MagneticPotential& a);

// Sparse nodal matrix of P (used by the least-squares solver and anywhere a
// quadratic form in u is assembled).
SpMatC build_P_matrix(const PolarGrid& grid, const MetricTables& mt, const CoeffTables& ct);

// Preset registries (names are the CLI-facing contract).
const MetricField& metric_preset(const std::string& name);
const CoefficientSet& coefficient_preset(const std::string& name);
const MagneticPotential& magnetic_preset(const std::string& name);
std::vector<std::string> metric_preset_names();
std::vector<std::string> coefficient_preset_names();
std::vector<std::string> magnetic_preset_names();

}  // namespace ucb
