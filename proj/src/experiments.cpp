#include "ucb/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "ucb/carleman.hpp"
#include "ucb/continuation.hpp"
#include "ucb/norms.hpp"
#include "ucb/stokes.hpp"

namespace ucb {

namespace {

int log_level() {
  const char* env = std::getenv("UCBENCH_LOG");
  if (!env) return 0;
  const std::string v(env);
  if (v == "debug") return 2;
  if (v == "info" || v == "1") return 1;
  return 0;
}

void log_info(const std::string& msg) {
  if (log_level() >= 1) std::fprintf(stderr, "[ucbench] %s\n", msg.c_str());
}

ExperimentReport run_validate_weight(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind_name(cfg.kind);
  rep.config_echo = config_echo(cfg);
  const PolarGrid grid = build_grid(cfg.r0, cfg.R1, cfg.Nr, cfg.Ntheta);
  const BaseWeight w = weight_preset(cfg.weight, cfg.r0);
  const WeightValidation v = validate_weight(w, grid);

  ReportTable t;
  t.name = "weight_validation";
  t.columns = {"quantity", "value"};
  t.rows = {
      {"min_psi_interior", fmt_real(v.min_psi_interior)},
      {"max_abs_psi_on_S", fmt_real(v.max_abs_psi_on_S)},
      {"min_grad_norm", fmt_real(v.min_grad_norm)},
      {"declared_delta", fmt_real(v.declared_delta)},
  };
  rep.tables.push_back(t);
  rep.add_summary("interior_positive", v.pass_interior_positive ? "pass" : "fail");
  rep.add_summary("vanishing_on_S", v.pass_vanishing_on_S ? "pass" : "fail");
  rep.add_summary("gradient_bound", v.pass_gradient_bound ? "pass" : "fail");
  rep.add_summary("delta", fmt_real(v.min_grad_norm));
  rep.pass = v.ok();
  return rep;
}

ExperimentReport run_carleman_sweep(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind_name(cfg.kind);
  rep.config_echo = config_echo(cfg);
  const PolarGrid grid = build_grid(cfg.r0, cfg.R1, cfg.Nr, cfg.Ntheta);
  const BaseWeight w = weight_preset(cfg.weight, cfg.r0);
  const MetricField& metric = metric_preset(cfg.metric);
  const CoefficientSet& coeffs = coefficient_preset(cfg.coeffs);
  const TestFamily fam =
      make_test_family(grid, cfg.seed, cfg.family_count, cfg.family_max_radial_degree,
                       cfg.family_max_angular_frequency, cfg.family_adversaries,
                       cfg.family_complex);
  log_info("carleman sweep: " + std::to_string(fam.members.size()) + " members, " +
           std::to_string(cfg.gamma_list.size() * cfg.s_list.size()) + " cells");
  const SweepResult res =
      sweep(grid, cfg.gamma_list, cfg.s_list, fam, metric, coeffs, w, cfg.workers);

  ReportTable t;
  t.name = "sweep";
  t.columns = {"gamma", "s", "c_emp", "argmin_member", "lhs_log10", "rhs_log10"};
  for (const auto& c : res.cells)
    t.rows.push_back({fmt_real(c.gamma), fmt_real(c.s), fmt_real(c.c_emp),
                      fmt_int(c.argmin_member), fmt_real(c.lhs_log10), fmt_real(c.rhs_log10)});
  rep.tables.push_back(t);

  int excluded_total = 0;
  for (const auto& c : res.cells) excluded_total += c.excluded_count;
  rep.add_summary("stability", res.stable ? "STABLE" : "UNSTABLE");
  if (res.gamma_star) rep.add_summary("gamma_star", fmt_real(*res.gamma_star));
  if (res.s_star) rep.add_summary("s_star", fmt_real(*res.s_star));
  rep.add_summary("excluded_member_evaluations", fmt_int(excluded_total));
  const MetricAudit audit = audit_metric(grid, metric);
  rep.add_summary("metric_min_rayleigh", fmt_real(audit.min_rayleigh));
  rep.add_summary("metric_sup", fmt_real(audit.sup_g));
  rep.add_summary("metric_grad_sup", fmt_real(audit.sup_dg));
  const auto [x_sup, p_sup] = coefficient_sup(grid, coeffs);
  rep.add_summary("drift_sup", fmt_real(x_sup));
  rep.add_summary("potential_sup", fmt_real(p_sup));
  rep.pass = res.stable;
  return rep;
}

ExperimentReport run_stability(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind_name(cfg.kind);
  rep.config_echo = config_echo(cfg);
  const PolarGrid grid = build_grid(cfg.r0, cfg.R1, cfg.Nr, cfg.Ntheta);
  const MetricField& metric = metric_preset(cfg.metric);
  const CoefficientSet& coeffs = coefficient_preset(cfg.coeffs);
  const MetricTables mt(grid, metric);
  const CoeffTables ct(grid, coeffs);
  const TargetSolution& target = target_preset(cfg.target);
  const EpsRule rule = EpsRule::parse(cfg.eps_rule);
  log_info("stability run: " + std::to_string(cfg.delta_list.size()) + " noise levels");
  const StabilityFit fit =
      noise_sweep_fit(grid, target, cfg.delta_list, rule, cfg.eta, cfg.seed, mt, ct);

  ReportTable t;
  t.name = "stability";
  t.columns = {"delta", "eps", "error_l2", "error_eta", "beta_partial"};
  for (size_t i = 0; i < fit.points.size(); ++i) {
    std::string beta_partial = "nan";
    if (i >= 1) {
      std::vector<Real> ds, es;
      for (size_t j = 0; j <= i; ++j) {
        ds.push_back(fit.points[j].delta);
        es.push_back(fit.points[j].error_eta);
      }
      beta_partial = fmt_real(fit_log_rate(ds, es));
    }
    const auto& p = fit.points[i];
    t.rows.push_back({fmt_real(p.delta), fmt_real(p.eps), fmt_real(p.error_l2),
                      fmt_real(p.error_eta), beta_partial});
  }
  rep.tables.push_back(t);

  // monotone: error grows with delta
  bool monotone = true;
  std::vector<std::pair<Real, Real>> by_delta;
  for (const auto& p : fit.points) by_delta.emplace_back(p.delta, p.error_eta);
  std::sort(by_delta.begin(), by_delta.end());
  for (size_t i = 1; i < by_delta.size(); ++i)
    monotone = monotone && by_delta[i].second > by_delta[i - 1].second;

  const bool beta_ok = std::abs(fit.beta - fit.target_exponent) <= 0.5;
  rep.add_summary("beta", fmt_real(fit.beta));
  rep.add_summary("target_exponent", fmt_real(fit.target_exponent));
  rep.add_summary("fit_residual", fmt_real(fit.fit_residual));
  rep.add_summary("beta_within_half_of_target", beta_ok ? "pass" : "fail");
  rep.add_summary("errors_monotone_in_delta", monotone ? "pass" : "fail");
  rep.pass = beta_ok && monotone;
  return rep;
}

ExperimentReport run_stokes_check(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind_name(cfg.kind);
  rep.config_echo = config_echo(cfg);
  const PolarGrid grid = build_grid(cfg.r0, cfg.R1, cfg.Nr, cfg.Ntheta);
  const BaseWeight w = weight_preset(cfg.weight, cfg.r0);

  std::vector<std::string> names;
  if (cfg.solution == "all")
    names = stokes_preset_names();
  else
    names.push_back(cfg.solution);

  ReportTable checks;
  checks.name = "stokes_checks";
  checks.columns = {"solution",        "residual_mom_interior", "residual_div_interior",
                    "identity_defect", "a_sup",                 "grad_a_sup",
                    "c0",              "max_violation",         "cauchy_norm"};
  ReportTable carl;
  carl.name = "stokes_carleman";
  carl.columns = {"solution", "s", "lhs_log10", "rhs_log10", "ratio", "grad_over_lhs_vol",
                  "absorption_ok"};

  bool all_ok = true;
  std::vector<std::vector<Real>> agg_ratios;  // per solution, per s
  Real absorption_threshold = 0;
  for (const auto& name : names) {
    const ManufacturedStokes& ms = stokes_preset(name);
    const StokesState state = ms.on_grid(grid);
    const StokesResidual res = stokes_residual(grid, state, ms.drift);
    Real mom = 0, divv = 0;
    for (int k : interior_nodes(grid)) {
      mom = std::max(mom, std::max(std::abs(res.momentum1.values[k]),
                                   std::abs(res.momentum2.values[k])));
      divv = std::max(divv, std::abs(res.divergence.values[k]));
    }
    const IdentityDefect defect = laplacian_identity_check(grid, state, ms.drift);
    const DominationCheck dom = gradient_domination_check(grid, state, ms.drift);
    const Real cn = stokes_cauchy_norm(grid, state);
    checks.rows.push_back({name, fmt_real(mom), fmt_real(divv), fmt_real(defect.max_interior),
                           fmt_real(drift_sup(grid, ms.drift)),
                           fmt_real(drift_grad_sup(grid, ms.drift)), fmt_real(dom.c0),
                           fmt_real(dom.max_violation), fmt_real(cn)});
    all_ok = all_ok && dom.max_violation <= 1e-8;

    const StokesCarlemanReport scr = stokes_carleman_run(grid, state, w, cfg.gamma, cfg.s_list);
    std::vector<Real> ratios;
    for (const auto& row : scr.rows) {
      carl.rows.push_back({name, fmt_real(row.s), fmt_real(row.lhs_log10),
                           fmt_real(row.rhs_log10), fmt_real(row.ratio),
                           fmt_real(row.grad_term_over_lhs_vol),
                           row.absorption_ok ? "true" : "false"});
      ratios.push_back(row.ratio);
      all_ok = all_ok && (row.s < 2.0 || row.absorption_ok);
    }
    agg_ratios.push_back(ratios);
    if (absorption_threshold == 0.0) absorption_threshold = scr.absorption_s_threshold;
  }
  rep.tables.push_back(checks);
  rep.tables.push_back(carl);

  // aggregate non-decay: min over solutions per s against the smallest s
  bool nondecay = true;
  if (!cfg.s_list.empty() && !agg_ratios.empty()) {
    std::vector<Real> min_per_s(cfg.s_list.size(), std::numeric_limits<Real>::infinity());
    for (const auto& rr : agg_ratios)
      for (size_t si = 0; si < rr.size(); ++si) min_per_s[si] = std::min(min_per_s[si], rr[si]);
    for (size_t si = 1; si < min_per_s.size(); ++si)
      nondecay = nondecay && min_per_s[si] >= 0.5 * min_per_s[0];
  }
  rep.add_summary("domination_ok", all_ok ? "pass" : "fail");
  rep.add_summary("aggregate_nondecay", nondecay ? "pass" : "fail");
  rep.add_summary("absorption_s_threshold", fmt_real(absorption_threshold));
  rep.pass = all_ok && nondecay;
  return rep;
}

ExperimentReport run_interp_norms(const ExperimentConfig& cfg) {
  ExperimentReport rep;
  rep.kind = kind_name(cfg.kind);
  rep.config_echo = config_echo(cfg);
  const PolarGrid grid = build_grid(cfg.r0, cfg.R1, cfg.Nr, cfg.Ntheta);
  const TestFamily fam =
      make_test_family(grid, cfg.seed, cfg.family_count, cfg.family_max_radial_degree,
                       cfg.family_max_angular_frequency, /*with_adversaries=*/false,
                       /*complex_valued=*/true);
  log_info("interp norms: eigensolve on " + std::to_string(grid.size()) + " unknowns");
  const SpectralPair& sp = spectral_pair(grid);

  ReportTable t;
  t.name = "interp";
  t.columns = {"member", "eta", "eta_norm", "l2_norm", "h2_norm", "holder_bound",
               "rel_violation"};
  Real max_violation = 0;
  for (size_t m = 0; m < fam.members.size(); ++m) {
    const GridField& u = fam.members[m];
    const CVec c = sp.coefficients(u.values);
    Real s0 = 0, s1 = 0;
    for (int j = 0; j < sp.size(); ++j) {
      s0 += std::norm(c[j]);
      s1 += sp.lambda[j] * std::norm(c[j]);
    }
    for (Real eta : cfg.eta_list) {
      Real se = 0;
      for (int j = 0; j < sp.size(); ++j)
        se += std::pow(sp.lambda[j], eta / 2.0) * std::norm(c[j]);
      const Real bound = std::pow(s0, 1.0 - eta / 2.0) * std::pow(s1, eta / 2.0);
      const Real viol = (se - bound) / bound;
      max_violation = std::max(max_violation, viol);
      t.rows.push_back({fmt_int(static_cast<long long>(m)), fmt_real(eta),
                        fmt_real(std::sqrt(se)), fmt_real(std::sqrt(s0)), fmt_real(std::sqrt(s1)),
                        fmt_real(std::sqrt(bound)), fmt_real(viol)});
    }
  }
  rep.tables.push_back(t);
  rep.add_summary("max_relative_violation", fmt_real(max_violation));
  rep.add_summary("lambda_min", fmt_real(sp.lambda.minCoeff()));
  rep.pass = max_violation <= 1e-12;
  return rep;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport rep;
  switch (cfg.kind) {
    case ExperimentKind::ValidateWeight: rep = run_validate_weight(cfg); break;
    case ExperimentKind::CarlemanSweep: rep = run_carleman_sweep(cfg); break;
    case ExperimentKind::StabilityRun: rep = run_stability(cfg); break;
    case ExperimentKind::StokesCheck: rep = run_stokes_check(cfg); break;
    case ExperimentKind::InterpNorms: rep = run_interp_norms(cfg); break;
    case ExperimentKind::Suite: {
      rep.kind = kind_name(cfg.kind);
      rep.config_echo = config_echo(cfg);
      ReportTable t;
      t.name = "suite_summary";
      t.columns = {"experiment", "pass"};
      rep.pass = true;
      for (ExperimentKind k :
           {ExperimentKind::ValidateWeight, ExperimentKind::CarlemanSweep,
            ExperimentKind::StabilityRun, ExperimentKind::StokesCheck,
            ExperimentKind::InterpNorms}) {
        ExperimentConfig sub = cfg;
        sub.kind = k;
        if (k == ExperimentKind::InterpNorms && cfg.Nr == 65 && cfg.Ntheta == 128) {
          sub.Nr = 33;  // keep the dense eigensolve inside the suite budget
          sub.Ntheta = 64;
        }
        sub.out_dir = (std::filesystem::path(cfg.out_dir) / kind_name(k)).string();
        log_info("suite: running " + kind_name(k));
        const ExperimentReport sub_rep = run_and_write(sub);
        t.rows.push_back({kind_name(k), sub_rep.pass ? "true" : "false"});
        rep.pass = rep.pass && sub_rep.pass;
      }
      rep.tables.push_back(t);
      rep.add_summary("all_pass", rep.pass ? "pass" : "fail");
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  rep.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  return rep;
}

ExperimentReport run_and_write(const ExperimentConfig& cfg) {
  const ExperimentReport rep = run_experiment(cfg);
  write_report_files(rep, cfg.out_dir);
  return rep;
}

}  // namespace ucb
