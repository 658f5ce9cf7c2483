#pragma once

#include <optional>
#include <vector>

#include "ucb/fields.hpp"
#include "ucb/grid.hpp"
#include "ucb/norms.hpp"
#include "ucb/weight.hpp"

namespace ucb {

// Seeded band-limited probe family, unit discrete H2 norm per member.
struct TestFamily {
  std::uint64_t seed = 42;
  int count = 20;
  int max_radial_degree = 4;
  int max_angular_frequency = 6;
  bool with_adversaries = true;  // boundary-layer bumps at S and Gamma
  bool complex_valued = true;
  std::vector<GridField> members;
};

TestFamily make_test_family(const PolarGrid& grid, std::uint64_t seed, int count,
                            int max_radial_degree, int max_angular_frequency,
                            bool with_adversaries = true, bool complex_valued = true);

// LogScaled integrals of f (resp. f on a slice) against e^{2 s phi} and the
// Euclidean measure; metric factors belong to the integrand.
LogScaled log_weighted_integral(const PolarGrid& grid, const CarlemanWeightField& wf,
                                const RVec& f);
LogScaled log_weighted_boundary_integral(const PolarGrid& grid, BoundaryTag tag,
                                         const CarlemanWeightField& wf, const RVec& f_slice);

// Weighted estimate sides. LHS: volume term sigma (gamma |grad_g u|^2 +
// gamma sigma^2 |u|^2) plus the S term sigma (|d_nu u|^2 + sigma^2 |u|^2).
// RHS: |Pu|^2 volume term, the Gamma term sigma (|grad_g u|^2 + sigma^2 |u|^2),
// and the S term sigma |grad_tau u|^2 (the only S integral on that side).
LogScaled carleman_lhs(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       const BaseWeight& w, const CarlemanParams& params);
LogScaled carleman_rhs(const PolarGrid& grid, const GridField& u, const MetricTables& mt,
                       const CoeffTables& ct, const BaseWeight& w, const CarlemanParams& params);

struct EmpiricalConstant {
  Real c_emp = 0;                    // min over admissible members of RHS/LHS
  int argmin_member = -1;
  LogScaled lhs_at_argmin, rhs_at_argmin;
  std::vector<Real> ratios;          // per member; NaN marks excluded 0/0 members
  std::vector<int> excluded;         // members with LHS = RHS = 0 at this (gamma, s)
  bool degenerate = false;           // no admissible member survived
};

EmpiricalConstant empirical_constant(const PolarGrid& grid, const TestFamily& family,
                                     const MetricField& metric, const CoefficientSet& coeffs,
                                     const BaseWeight& w, const CarlemanParams& params);

struct SweepCell {
  Real gamma = 0, s = 0;
  Real c_emp = 0;
  int argmin_member = -1;
  Real lhs_log10 = 0, rhs_log10 = 0;
  int excluded_count = 0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // ordered by (gamma, s) as swept
  std::optional<Real> gamma_star;
  std::optional<Real> s_star;
  bool stable = false;  // some gamma passes the factor-0.5 non-decay rule
};

// Full (gamma, s) table of the empirical constant. The declared (gamma*, s*)
// are the smallest swept values whose row never drops below half its value at
// the smallest s; instability is a reported outcome, not an error.
SweepResult sweep(const PolarGrid& grid, const std::vector<Real>& gamma_list,
                  const std::vector<Real>& s_list, const TestFamily& family,
                  const MetricField& metric, const CoefficientSet& coeffs, const BaseWeight& w,
                  int workers = 1);

}  // namespace ucb
