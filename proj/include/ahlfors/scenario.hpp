// Scenario runner: config ingestion, named map-family generators, the
// end-to-end pipeline (diagnose -> germs -> doubling -> concentration ->
// limits), invariant verification suites, and report emission.
#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "ahlfors/concentration.hpp"
#include "ahlfors/limits.hpp"

namespace ahlfors {

class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Minimal TOML-like file: [section] headers, key = value lines, values are
// numbers, quoted strings, booleans or [number, ...] lists, # comments.
class Config {
public:
  struct Value {
    enum class Kind { Number, String, Boolean, NumberList } kind = Kind::Number;
    double number = 0;
    std::string text;
    bool boolean = false;
    std::vector<double> list;
    int line = 0;
  };

  static Config parse_file(const std::filesystem::path& path);
  static Config parse_text(const std::string& text, const std::string& origin = "<text>");

  bool has(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  double require_number(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;
  bool boolean(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> list(const std::string& section, const std::string& key,
                           const std::vector<double>& fallback) const;
  const std::map<std::string, std::map<std::string, Value>>& sections() const {
    return sections_;
  }

private:
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& why) const;
  std::map<std::string, std::map<std::string, Value>> sections_;
  std::string origin_;
};

struct Scenario {
  std::string name;
  unsigned long long seed = 1;
  std::string out_dir = "out";

  TargetModel target = TargetModel::unit_disk();
  CompactSet compact = CompactSet::whole_space({0.5, 0.25, 0.125, 0.0625});

  std::string generator;          // torus-line | concentric-chain | blaschke-random | explicit
  std::vector<double> n_values;   // torus-line N schedule
  std::vector<double> depths;     // concentric-chain depth schedule
  double chain_ratio = 1.0 / 32.0;
  double chain_scale = 0.125;
  int random_count = 100;
  int random_degree = 6;
  std::vector<Polynomial> explicit_maps;       // generator = explicit
  std::vector<Polynomial> explicit_maps_den;   // projective line denominators

  GermOptions germs{};
  double budget_per_area = 64.0;  // pullback sample budget = factor * a_n
  long min_budget = 200000;

  DoublingOptions doubling{};
  AnnulusDoublingOptions concentration{};
  double mostly_simple_threshold = 0.2;
  double certificate_factor = 0.75;

  DiagnoseOptions diagnose{};
  LimitOptions limits{};
  double k_area_tol = 1e-2;

  QuadratureOptions quadrature{};
};

Scenario scenario_from_config(const Config& cfg);

// One index of the prepared family.
struct ScenarioIndex {
  DiskEntry entry;
  PlanarMeasure measure;               // mu_n (pullback or synthetic)
  std::optional<DiskFamily> germs;     // provided directly by synthetic generators
};

std::vector<ScenarioIndex> build_family(const Scenario& sc);

struct RunOutcome {
  int exit_code = 1;
  AhlforsDiagnostics diagnostics;
  std::optional<IsoperimetricResult> isoperimetric;
  bool domain_set = false;
  LimitDomain domain = LimitDomain::C;
  std::optional<LimitReport> report;
  std::vector<std::pair<int, DoublingResult>> doubling_results;   // by index
  std::vector<std::pair<int, CensusResult>> census_results;
  std::vector<std::pair<int, AnnulusFamily>> annulus_families;
  std::vector<std::pair<int, ConcentrationOutcome>> concentration_results;
  std::string failure;
};

// Full pipeline; writes diagnostics.csv, families_level_k.csv, census.csv,
// annuli.csv, limit_report.json and plots/*.csv under out_dir.
RunOutcome run_scenario(const Scenario& sc);
// Stops after the Ahlfors diagnostics; writes diagnostics.csv only.
RunOutcome diagnose_scenario(const Scenario& sc);

struct VerifyRow {
  std::string check;
  double measured = 0;
  double bound = 0;
  bool pass = false;
};

// Suites: counting, packing, forest, stokes, equidistribution.
std::vector<VerifyRow> run_verify_suite(const Scenario& sc, const std::string& suite);
std::vector<std::string> verify_suite_names();

// Deterministic helpers shared by generators, suites and tests.
struct SplitMix64 {
  unsigned long long state;
  explicit SplitMix64(unsigned long long seed) : state(seed) {}
  unsigned long long next();
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi);
};

}  // namespace ahlfors
