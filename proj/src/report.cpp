#include "ucb/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace ucb {

std::string fmt_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_int(long long v) { return std::to_string(v); }

namespace {

using nlohmann::json;

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
  json arr = json::array();
  for (const auto& [k, v] : pairs) arr.push_back({{"key", k}, {"value", v}});
  return arr;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(const json& arr) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : arr) out.emplace_back(e.at("key").get<std::string>(),
                                             e.at("value").get<std::string>());
  return out;
}

}  // namespace

std::string report_to_json(const ExperimentReport& rep) {
  json j;
  j["kind"] = rep.kind;
  j["version"] = rep.version;
  j["config"] = pairs_to_json(rep.config_echo);
  j["tables"] = json::array();
  for (const auto& t : rep.tables) {
    json jt;
    jt["name"] = t.name;
    jt["columns"] = t.columns;
    jt["rows"] = t.rows;
    j["tables"].push_back(jt);
  }
  j["summary"] = pairs_to_json(rep.summary);
  j["pass"] = rep.pass;
  j["wall_seconds"] = rep.wall_seconds;
  return j.dump(2) + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
  const json j = json::parse(text);
  ExperimentReport rep;
  rep.kind = j.at("kind").get<std::string>();
  rep.version = j.at("version").get<std::string>();
  rep.config_echo = pairs_from_json(j.at("config"));
  for (const auto& jt : j.at("tables")) {
    ReportTable t;
    t.name = jt.at("name").get<std::string>();
    t.columns = jt.at("columns").get<std::vector<std::string>>();
    t.rows = jt.at("rows").get<std::vector<std::vector<std::string>>>();
    rep.tables.push_back(std::move(t));
  }
  rep.summary = pairs_from_json(j.at("summary"));
  rep.pass = j.at("pass").get<bool>();
  rep.wall_seconds = j.at("wall_seconds").get<Real>();
  return rep;
}

std::string table_to_csv(const ReportTable& t) {
  std::string out;
  for (size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += row[c];
    }
    out += '\n';
  }
  return out;
}

namespace {

std::string plot_script(const ExperimentReport& rep) {
  std::string gp;
  gp += "# gnuplot script; run from this directory\n";
  gp += "set datafile separator ','\n";
  gp += "set key autotitle columnhead\n";
  for (const auto& t : rep.tables) {
    if (t.name == "sweep" || t.name == "stokes_carleman") {
      gp += "\nset terminal pngcairo size 900,600\n";
      gp += "set output '" + t.name + "_ratio_vs_s.png'\n";
      gp += "set logscale xy\nset xlabel 's'\nset ylabel 'empirical ratio'\n";
      if (t.name == "sweep")
        gp += "plot '" + t.name + ".csv' using 2:3 with linespoints title 'c_emp'\n";
      else
        gp += "plot '" + t.name + ".csv' using 2:5 with linespoints title 'aggregate ratio'\n";
    }
    if (t.name == "stability") {
      gp += "\nset terminal pngcairo size 900,600\n";
      gp += "set output 'error_vs_logdelta.png'\n";
      gp += "set logscale y\nunset logscale x\n";
      gp += "set xlabel 'log(1/delta)'\nset ylabel 'reconstruction error'\n";
      gp += "plot '" + t.name + ".csv' using (log(1/column(1))):4 with linespoints "
            "title 'error'\n";
    }
  }
  return gp;
}

}  // namespace

void write_report_files(const ExperimentReport& rep, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream f(fs::path(out_dir) / "report.json", std::ios::binary);
    if (!f) throw InvalidConfig("cannot write to output directory: " + out_dir);
    f << report_to_json(rep);
  }
  for (const auto& t : rep.tables) {
    std::ofstream f(fs::path(out_dir) / (t.name + ".csv"), std::ios::binary);
    f << table_to_csv(t);
  }
  {
    std::ofstream f(fs::path(out_dir) / "plots.gp", std::ios::binary);
    f << plot_script(rep);
  }
}

}  // namespace ucb
