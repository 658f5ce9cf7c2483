#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ucb/fields.hpp"
#include "ucb/grid.hpp"
#include "ucb/norms.hpp"

namespace ucb {

// Single-logarithmic stability modulus
//   Phi_{eta,c}(r) = 1/r            for 0 < r <= e^c   (endpoint included)
//                  = (log r)^{-(2-eta)/2}  for r > e^c.
Real phi_modulus(Real eta, Real c, Real r);

struct MinimizeResult {
  Real s_opt = 1;
  Real value = 0;
};

// Minimize F(s) = e^{c s} C + s^{-(2-eta)/2} M over s >= 1. F is strictly
// convex, so a golden-section search on a log-spaced bracket is exact enough;
// ties near a flat minimum resolve to the smallest bracketed minimizer.
MinimizeResult minimize_over_s(Real C, Real M, Real c, Real eta);

// Brute-force oracle: log-spaced grid scan with the same bracket.
MinimizeResult minimize_over_s_bruteforce(Real C, Real M, Real c, Real eta, int points = 10000);

// Closed-form target solutions used to manufacture Cauchy data.
struct TargetSolution {
  std::string name;
  std::function<Complex(Real, Real)> u;
  std::function<Eigen::Vector2cd(Real, Real)> grad_u;
};

const TargetSolution& target_preset(const std::string& name);
std::vector<std::string> target_preset_names();

struct CauchyData {
  CVec f;             // trace on Gamma nodes
  CVec h;             // d_{nu_g} u on Gamma nodes
  Real delta = 0.0;   // relative noise level
  std::uint64_t seed = 0;
};

// Exact traces from the target plus, for delta > 0, seeded complex Gaussian
// noise scaled to delta * ||clean|| in the discrete L2(Gamma) norm
// (independently for f and h).
CauchyData make_cauchy_data(const PolarGrid& grid, const TargetSolution& target,
                            const MetricTables& mt, Real delta, std::uint64_t seed);

// Tikhonov continuation: minimize
//   J(u) = ||Pu||^2_{L2(D)} + ||u - f||^2_{H1(Gamma)} + ||d_nu u - h||^2_{L2(Gamma)}
//          + eps * h2_norm(u)^2
// over nodal fields (all data terms metric-weighted, matching the Cauchy
// functional). The H1(Gamma) misfit uses the boundary-intrinsic tangential
// derivative |D_theta w|^2 / g(T,T); for g = I this equals the subtraction
// identity exactly on the discrete level. Sparse normal equations, direct
// factorization, one iterative-refinement pass; deterministic.
GridField solve_cauchy(const PolarGrid& grid, const CauchyData& data, const MetricTables& mt,
                       const CoeffTables& ct, Real eps);

// The functional J above, for optimality checks.
Real continuation_objective(const PolarGrid& grid, const GridField& u, const CauchyData& data,
                            const MetricTables& mt, const CoeffTables& ct, Real eps);

struct EpsRule {
  enum class Kind { DeltaSq, Fixed } kind = Kind::DeltaSq;
  Real fixed_value = 1e-10;

  Real operator()(Real delta) const {
    return kind == Kind::DeltaSq ? delta * delta : fixed_value;
  }
  static EpsRule parse(const std::string& text);  // "delta-sq" | "fixed:<v>"
};

struct StabilityPoint {
  Real delta = 0, eps = 0, error_l2 = 0, error_eta = 0;
};

struct StabilityFit {
  std::vector<StabilityPoint> points;
  Real beta = 0;             // fitted exponent of error ~ (log(1/delta))^{-beta}
  Real fit_residual = 0;     // rms residual of the log-log regression
  Real target_exponent = 1;  // (2 - eta) / 2
  Real eta = 0;
};

// Regression of log(error) on log(log(1/delta)); exposed for calibration.
Real fit_log_rate(const std::vector<Real>& deltas, const std::vector<Real>& errors,
                  Real* residual = nullptr);

// Per-level reconstruction with fresh seeded noise (seed + index), error
// recorded in the eta-norm (eta = 0 is the plain L2 norm and skips the
// eigensolve).
StabilityFit noise_sweep_fit(const PolarGrid& grid, const TargetSolution& target,
                             const std::vector<Real>& delta_list, const EpsRule& eps_rule,
                             Real eta, std::uint64_t seed, const MetricTables& mt,
                             const CoeffTables& ct);

}  // namespace ucb
