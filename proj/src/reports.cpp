// Artifact emission: CSV files with a column legend header, and the limit
// report as JSON. Formatting is fixed so identical (config, seed) pairs
// produce byte-identical outputs.
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "ahlfors/scenario.hpp"

namespace ahlfors {
namespace detail_reports {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string diagnostics_csv(const std::vector<ScenarioIndex>& family,
                            const AhlforsDiagnostics& diag) {
  std::string s = "n,area,length,ratio,near_k_mass\n";
  for (size_t i = 0; i < family.size(); ++i) {
    const auto& e = family[i].entry;
    s += std::to_string(i) + "," + fmt(e.area) + "," + fmt(e.boundary_length) + ",";
    s += (i < diag.ratios.size() ? fmt(diag.ratios[i]) : "") + std::string(",");
    s += (i < diag.near_k_mass.size() ? fmt(diag.near_k_mass[i]) : "");
    s += "\n";
  }
  return s;
}

std::string levels_csv(const RunOutcome& out) {
  std::string s =
      "n,level,cardinality,c_k,removed_by_area,removed_by_length,confinement_violations,eps\n";
  for (const auto& [n, res] : out.doubling_results)
    for (const auto& rec : res.levels) {
      s += std::to_string(n) + "," + std::to_string(rec.level) + "," +
           std::to_string(rec.cardinality) + "," + fmt(rec.budget_ck) + "," +
           std::to_string(rec.removed_by_area) + "," + std::to_string(rec.removed_by_length) +
           "," + std::to_string(rec.confinement_violations) + "," + fmt(rec.eps) + "\n";
    }
  for (const auto& [n, res] : out.concentration_results)
    for (const auto& rec : res.levels) {
      s += std::to_string(n) + "," + std::to_string(rec.level) + "," +
           std::to_string(rec.cardinality) + "," + fmt(rec.budget_ck) + "," +
           std::to_string(rec.removed_by_area) + "," + std::to_string(rec.removed_by_length) +
           "," + std::to_string(rec.confinement_violations) + "," + fmt(rec.eps) + "\n";
    }
  return s;
}

std::string census_csv(const RunOutcome& out) {
  std::string s = "n,terminal,simple,multiple,non_simple_fraction,mostly_simple\n";
  for (const auto& [n, c] : out.census_results) {
    s += std::to_string(n) + "," + std::to_string(c.terminal) + "," + std::to_string(c.simple) +
         "," + std::to_string(c.multiple) + "," + fmt(c.non_simple_fraction) + "," +
         (c.mostly_simple ? "1" : "0") + "\n";
  }
  return s;
}

std::string annuli_csv(const RunOutcome& out) {
  std::string s =
      "n,lineage,block,outer_re,outer_im,outer_radius,inner_re,inner_im,inner_radius,"
      "near_k_mass,modulus_lower_bound\n";
  for (const auto& [n, fam] : out.annulus_families)
    for (const auto& a : fam.annuli) {
      s += std::to_string(n) + "," + std::to_string(a.lineage) + "," + std::to_string(a.block) +
           "," + fmt(a.annulus.outer.center.real()) + "," + fmt(a.annulus.outer.center.imag()) +
           "," + fmt(a.annulus.outer.radius) + "," + fmt(a.annulus.inner.center.real()) + "," +
           fmt(a.annulus.inner.center.imag()) + "," + fmt(a.annulus.inner.radius) + "," +
           fmt(a.near_k_mass) + "," + fmt(a.modulus_lower_bound) + "\n";
    }
  return s;
}

std::string ratio_curve_csv(const std::vector<ScenarioIndex>& family,
                            const AhlforsDiagnostics& diag) {
  std::string s = "n,area,length,ratio\n";
  for (size_t i = 0; i < family.size(); ++i) {
    const auto& e = family[i].entry;
    s += std::to_string(i) + "," + fmt(e.area) + "," + fmt(e.boundary_length) + "," +
         (i < diag.ratios.size() ? fmt(diag.ratios[i]) : "") + "\n";
  }
  return s;
}

std::string ck_table_csv(const RunOutcome& out) {
  std::string s = "level,c_k\n";
  const std::vector<double>* table = nullptr;
  if (!out.doubling_results.empty() &&
      out.doubling_results.back().second.status == DoublingStatus::Distributed)
    table = &out.doubling_results.back().second.budget_table;
  if (!out.concentration_results.empty())
    table = &out.concentration_results.back().second.budget_table;
  if (table)
    for (size_t k = 0; k < table->size(); ++k)
      s += std::to_string(k + 1) + "," + fmt((*table)[k]) + "\n";
  return s;
}

ordered_json report_json(const Scenario& sc, const RunOutcome& out) {
  ordered_json j;
  j["scenario"] = sc.name;
  j["seed"] = sc.seed;
  j["exit_code"] = out.exit_code;
  if (!out.failure.empty()) j["failure"] = out.failure;
  j["diagnose"] = {{"verdict", to_string(out.diagnostics.verdict)},
                   {"delta", out.diagnostics.delta},
                   {"decay_exponent", out.diagnostics.decay_exponent},
                   {"ratios", out.diagnostics.ratios}};
  if (out.isoperimetric) {
    j["isoperimetric"] = {{"constant", out.isoperimetric->constant},
                          {"excluded", out.isoperimetric->excluded}};
  }
  if (out.domain_set) j["domain"] = to_string(out.domain);
  if (out.report) {
    const LimitReport& r = *out.report;
    ordered_json explosions = ordered_json::array();
    for (const auto& e : r.explosions)
      explosions.push_back(
          {{"re", e.location.real()}, {"im", e.location.imag()}, {"mass", e.mass}});
    ordered_json compacts = ordered_json::array();
    for (const auto& c : r.compacts)
      compacts.push_back({{"inner_radius", c.inner_radius},
                          {"outer_radius", c.outer_radius},
                          {"indices_defined", c.indices_defined},
                          {"sup_distance_raw", c.sup_distance_raw},
                          {"sup_distance_adjusted", c.sup_distance_adjusted},
                          {"cauchy", c.cauchy}});
    j["limit_report"] = {{"domain", to_string(r.domain)},
                         {"verdict", r.verdict == ConvergenceVerdict::Converged
                                         ? "converged"
                                         : "inconclusive"},
                         {"explosion_threshold", r.explosion_threshold},
                         {"explosions", explosions},
                         {"k_intersection_area", r.k_intersection_area},
                         {"k_area_by_neighborhood", r.k_area_by_neighborhood},
                         {"bubble_count_bound", r.bubble_count_bound},
                         {"compacts", compacts}};
  }
  return j;
}

}  // namespace

void write_diagnostics_only(const Scenario& sc, const std::vector<ScenarioIndex>& family,
                            const RunOutcome& out) {
  namespace fs = std::filesystem;
  fs::create_directories(sc.out_dir);
  write_file(fs::path(sc.out_dir) / "diagnostics.csv", diagnostics_csv(family, out.diagnostics));
}

void write_artifacts(const Scenario& sc, const std::vector<ScenarioIndex>& family,
                     const RunOutcome& out) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(sc.out_dir) / "plots");
  write_file(fs::path(sc.out_dir) / "diagnostics.csv", diagnostics_csv(family, out.diagnostics));
  write_file(fs::path(sc.out_dir) / "families_level_k.csv", levels_csv(out));
  write_file(fs::path(sc.out_dir) / "census.csv", census_csv(out));
  write_file(fs::path(sc.out_dir) / "annuli.csv", annuli_csv(out));
  write_file(fs::path(sc.out_dir) / "limit_report.json", report_json(sc, out).dump(2) + "\n");
  write_file(fs::path(sc.out_dir) / "plots" / "ratio_curve.csv",
             ratio_curve_csv(family, out.diagnostics));
  write_file(fs::path(sc.out_dir) / "plots" / "ck_table.csv", ck_table_csv(out));
  write_file(fs::path(sc.out_dir) / "plots" / "census.csv", census_csv(out));
}

}  // namespace detail_reports
}  // namespace ahlfors
