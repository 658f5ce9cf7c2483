#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucb/common.hpp"

namespace ucb {

// Experiment kinds dispatched by the runner.
enum class ExperimentKind {
  ValidateWeight,
  CarlemanSweep,
  StabilityRun,
  StokesCheck,
  InterpNorms,
  Suite,
};

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

// Parsed, schema-validated configuration. Defaults below are the documented
// ones; unknown keys are rejected with their line number.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Suite;

  Real r0 = 1.0, R1 = 2.0;
  int Nr = 65, Ntheta = 128;

  std::string metric = "identity";
  std::string coeffs = "free";
  std::string weight = "quadratic";
  std::string target = "harmonic-quadratic";
  std::string solution = "all";  // manufactured Stokes state(s)

  std::vector<Real> gamma_list = {1, 2, 4};
  std::vector<Real> s_list = {8, 16, 32, 64};
  std::vector<Real> delta_list = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<Real> eta_list = {0.5, 1.0, 1.5};
  Real gamma = 2.0;
  Real eta = 0.0;
  std::string eps_rule = "delta-sq";

  std::uint64_t seed = 42;
  int workers = 0;  // 0 = available parallelism, resolved at parse time
  int family_count = 20;
  int family_max_radial_degree = 4;
  int family_max_angular_frequency = 6;
  bool family_adversaries = true;
  bool family_complex = true;

  std::string out_dir = "out";
};

// Parse "key = value" text (# comments, blank lines allowed) against the
// schema of the given kind. Throws InvalidConfig with line/key context.
ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind);
ExperimentConfig parse_config_file(const std::string& path, ExperimentKind kind);

// Flattened echo for reports.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg);

}  // namespace ucb
