#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ucb/grid.hpp"

namespace ucb {

// Base weight psi: positive inside D, vanishing on the inner boundary S,
// with non-vanishing gradient. The Carleman weight is phi = exp(gamma psi).
struct BaseWeight {
  std::string name;
  std::function<Real(Real, Real)> psi;
  std::function<Eigen::Vector2d(Real, Real)> grad_psi;
  Real delta = 0.0;  // declared min |grad psi| over the closed annulus; 0 = undeclared
};

struct CarlemanParams {
  Real gamma = 2.0;
  Real s = 1.0;
};

void validate_params(const CarlemanParams& p);  // both finite and >= 1

// Quantity q represented as q = exp(log_offset) * mantissa. Ratios of values
// sharing an offset never touch the exponential, which keeps e^{2 s phi}
// arithmetic finite for s up to 1e3.
struct LogScaled {
  Real log_offset = 0.0;
  Real mantissa = 0.0;

  Real ratio_to(const LogScaled& other) const;  // throws InvalidParams on offset mismatch
  Real to_double() const;                       // may overflow; small-s cross-checks only
  Real log10_value() const;                     // -inf for mantissa 0
  LogScaled operator+(const LogScaled& other) const;
  LogScaled operator-(const LogScaled& other) const;
  LogScaled& operator+=(const LogScaled& other);
};

struct WeightValidation {
  Real min_psi_interior = 0;
  Real max_abs_psi_on_S = 0;
  Real min_grad_norm = 0;
  Real declared_delta = 0;
  bool pass_interior_positive = false;
  bool pass_vanishing_on_S = false;
  bool pass_gradient_bound = false;
  bool ok() const {
    return pass_interior_positive && pass_vanishing_on_S && pass_gradient_bound;
  }
};

// Checks the three weight conditions on every grid node. Failures are report
// entries, not exceptions, so invalid user weights stay diagnosable.
WeightValidation validate_weight(const BaseWeight& w, const PolarGrid& grid);

// psi = |x|^2 - r0^2, grad = 2x, delta = 2 r0.
BaseWeight quadratic_weight(Real r0);
// psi = |x| - r0, grad = x/|x|, delta = 1.
BaseWeight radial_linear_weight(Real r0);
// Deliberately invalid control (psi = sin x1 with a false delta claim).
BaseWeight invalid_control_weight();
// psi from an expression string; gradient by central differences.
BaseWeight custom_weight(const std::string& expression);
// Resolve "quadratic" | "radial-linear" | "invalid-sin" | "custom:<expr>".
BaseWeight weight_preset(const std::string& spec, Real r0);

// phi = exp(gamma psi(x)) and sigma = s gamma phi. Throws InvalidParams when
// gamma psi exceeds 700 (exp would overflow; such runs must use LogScaled).
std::pair<Real, Real> carleman_factors(const BaseWeight& w, const CarlemanParams& p, Real x1,
                                       Real x2);

// Nodewise Carleman weight data with the shared LogScaled offset 2 s phi_max.
struct CarlemanWeightField {
  RVec phi;       // exp(gamma psi) per node
  RVec sigma;     // s gamma phi per node
  RVec mantissa;  // exp(2 s (phi - phi_max)) in (0, 1]
  Real phi_max = 0;
  Real log_offset = 0;  // 2 s phi_max
};

CarlemanWeightField stabilized_weight(const BaseWeight& w, const CarlemanParams& p,
                                      const PolarGrid& grid);

}  // namespace ucb
