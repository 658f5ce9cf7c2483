#pragma once

#include "ucb/config.hpp"
#include "ucb/report.hpp"

namespace ucb {

// Runs one experiment and returns the filled report (report.pass carries the
// verdict). Throws InvalidConfig for configuration-level problems; everything
// else that goes wrong mid-run surfaces as the experiment's failure.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// run_experiment + write_report_files into cfg.out_dir (suite sub-experiments
// write into <out>/<kind>/).
ExperimentReport run_and_write(const ExperimentConfig& cfg);

}  // namespace ucb
