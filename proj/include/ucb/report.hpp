#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ucb/common.hpp"

namespace ucb {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Values are stringified at insertion time with a fixed format, so tables
// serialize byte-identically run to run and the JSON round-trip is lossless.
std::string fmt_real(Real v);
std::string fmt_int(long long v);

struct ReportTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const ReportTable&) const = default;
};

struct ExperimentReport {
  std::string kind;
  std::string version = kArtifactVersion;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::vector<ReportTable> tables;
  std::vector<std::pair<std::string, std::string>> summary;
  bool pass = false;
  Real wall_seconds = 0;

  void add_summary(const std::string& key, const std::string& value) {
    summary.emplace_back(key, value);
  }
  bool operator==(const ExperimentReport&) const = default;
};

std::string report_to_json(const ExperimentReport& rep);
ExperimentReport report_from_json(const std::string& text);

std::string table_to_csv(const ReportTable& t);

// Writes report.json, one <table>.csv per table, and plots.gp into out_dir.
void write_report_files(const ExperimentReport& rep, const std::string& out_dir);

}  // namespace ucb
