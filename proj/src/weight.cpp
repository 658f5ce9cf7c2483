#include "ucb/weight.hpp"

#include <cmath>
#include <limits>

#include "ucb/expr.hpp"

namespace ucb {

void validate_params(const CarlemanParams& p) {
  if (!std::isfinite(p.gamma) || !std::isfinite(p.s) || p.gamma < 1.0 || p.s < 1.0)
    throw InvalidParams("CarlemanParams: gamma and s must be finite and >= 1");
}

Real LogScaled::ratio_to(const LogScaled& other) const {
  if (log_offset != other.log_offset)
    throw InvalidParams("LogScaled: ratio of values with different offsets");
  return mantissa / other.mantissa;
}

Real LogScaled::to_double() const { return std::exp(log_offset) * mantissa; }

Real LogScaled::log10_value() const {
  if (mantissa <= 0.0) return -std::numeric_limits<Real>::infinity();
  return (log_offset + std::log(mantissa)) / std::log(10.0);
}

LogScaled LogScaled::operator+(const LogScaled& other) const {
  if (log_offset != other.log_offset)
    throw InvalidParams("LogScaled: sum of values with different offsets");
  return {log_offset, mantissa + other.mantissa};
}

LogScaled LogScaled::operator-(const LogScaled& other) const {
  if (log_offset != other.log_offset)
    throw InvalidParams("LogScaled: difference of values with different offsets");
  return {log_offset, mantissa - other.mantissa};
}

LogScaled& LogScaled::operator+=(const LogScaled& other) {
  *this = *this + other;
  return *this;
}

WeightValidation validate_weight(const BaseWeight& w, const PolarGrid& grid) {
  WeightValidation rep;
  rep.declared_delta = w.delta;
  rep.min_psi_interior = std::numeric_limits<Real>::infinity();
  rep.max_abs_psi_on_S = 0.0;
  rep.min_grad_norm = std::numeric_limits<Real>::infinity();

  const auto& inner = grid.boundary(BoundaryTag::S_inner);
  std::vector<bool> on_S(grid.size(), false);
  for (int idx : inner.nodes) on_S[idx] = true;

  for (int k = 0; k < grid.size(); ++k) {
    const Real x1 = grid.x1()[k], x2 = grid.x2()[k];
    const Real psi = w.psi(x1, x2);
    if (on_S[k])
      rep.max_abs_psi_on_S = std::max(rep.max_abs_psi_on_S, std::abs(psi));
    else
      rep.min_psi_interior = std::min(rep.min_psi_interior, psi);
    rep.min_grad_norm = std::min(rep.min_grad_norm, w.grad_psi(x1, x2).norm());
  }

  rep.pass_interior_positive = rep.min_psi_interior > 0.0;
  rep.pass_vanishing_on_S = rep.max_abs_psi_on_S <= 1e-12;
  // undeclared delta (custom weights): the gradient still has to be bounded
  // away from zero on the grid
  const Real bound = w.delta > 0.0 ? w.delta - 1e-12 : 1e-12;
  rep.pass_gradient_bound = rep.min_grad_norm >= bound;
  return rep;
}

BaseWeight quadratic_weight(Real r0) {
  if (!(r0 > 0.0)) throw InvalidGeometry("quadratic_weight: r0 must be positive");
  BaseWeight w;
  w.name = "quadratic";
  w.psi = [r0](Real x1, Real x2) { return x1 * x1 + x2 * x2 - r0 * r0; };
  w.grad_psi = [](Real x1, Real x2) { return Eigen::Vector2d(2 * x1, 2 * x2); };
  w.delta = 2 * r0;
  return w;
}

BaseWeight radial_linear_weight(Real r0) {
  if (!(r0 > 0.0)) throw InvalidGeometry("radial_linear_weight: r0 must be positive");
  BaseWeight w;
  w.name = "radial-linear";
  w.psi = [r0](Real x1, Real x2) { return std::sqrt(x1 * x1 + x2 * x2) - r0; };
  w.grad_psi = [](Real x1, Real x2) {
    const Real r = std::sqrt(x1 * x1 + x2 * x2);
    return Eigen::Vector2d(x1 / r, x2 / r);
  };
  w.delta = 1.0;
  return w;
}

BaseWeight invalid_control_weight() {
  BaseWeight w;
  w.name = "invalid-sin";
  w.psi = [](Real x1, Real) { return std::sin(x1); };
  w.grad_psi = [](Real x1, Real) { return Eigen::Vector2d(std::cos(x1), 0.0); };
  w.delta = 1.0;  // false claim; the validator must catch it
  return w;
}

BaseWeight custom_weight(const std::string& expression) {
  const Expr e = Expr::parse(expression);
  BaseWeight w;
  w.name = "custom";
  w.psi = [e](Real x1, Real x2) { return e.eval(x1, x2); };
  const Real h = 1e-6;
  w.grad_psi = [e, h](Real x1, Real x2) {
    return Eigen::Vector2d((e.eval(x1 + h, x2) - e.eval(x1 - h, x2)) / (2 * h),
                           (e.eval(x1, x2 + h) - e.eval(x1, x2 - h)) / (2 * h));
  };
  w.delta = 0.0;  // undeclared
  return w;
}

BaseWeight weight_preset(const std::string& spec, Real r0) {
  if (spec == "quadratic") return quadratic_weight(r0);
  if (spec == "radial-linear") return radial_linear_weight(r0);
  if (spec == "invalid-sin") return invalid_control_weight();
  if (spec.rfind("custom:", 0) == 0) return custom_weight(spec.substr(7));
  throw InvalidConfig("unknown weight preset: " + spec);
}

std::pair<Real, Real> carleman_factors(const BaseWeight& w, const CarlemanParams& p, Real x1,
                                       Real x2) {
  validate_params(p);
  const Real gp = p.gamma * w.psi(x1, x2);
  if (gp > 700.0)
    throw InvalidParams("carleman_factors: gamma*psi exceeds 700; exp would overflow");
  const Real phi = std::exp(gp);
  return {phi, p.s * p.gamma * phi};
}

CarlemanWeightField stabilized_weight(const BaseWeight& w, const CarlemanParams& p,
                                      const PolarGrid& grid) {
  validate_params(p);
  CarlemanWeightField f;
  const int n = grid.size();
  f.phi = RVec(n);
  f.sigma = RVec(n);
  f.phi_max = -std::numeric_limits<Real>::infinity();
  for (int k = 0; k < n; ++k) {
    const Real gp = p.gamma * w.psi(grid.x1()[k], grid.x2()[k]);
    if (gp > 700.0)
      throw InvalidParams("stabilized_weight: gamma*psi exceeds 700; exp would overflow");
    f.phi[k] = std::exp(gp);
    f.sigma[k] = p.s * p.gamma * f.phi[k];
    f.phi_max = std::max(f.phi_max, f.phi[k]);
  }
  f.log_offset = 2.0 * p.s * f.phi_max;
  f.mantissa = RVec(n);
  for (int k = 0; k < n; ++k) f.mantissa[k] = std::exp(2.0 * p.s * (f.phi[k] - f.phi_max));
  return f;
}

}  // namespace ucb
