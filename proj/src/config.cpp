#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ahlfors/scenario.hpp"

namespace ahlfors {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

bool parse_number(const std::string& s, double* out) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') return false;
  *out = v;
  return true;
}

}  // namespace

Config Config::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path.string());
}

Config Config::parse_text(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw config_error(origin + ":" + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(origin + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string raw = trim(line.substr(eq + 1));
    if (key.empty() || raw.empty())
      throw config_error(origin + ":" + std::to_string(lineno) + ": empty key or value");

    Value v;
    v.line = lineno;
    if (raw.front() == '"') {
      if (raw.size() < 2 || raw.back() != '"')
        throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated string");
      v.kind = Value::Kind::String;
      v.text = raw.substr(1, raw.size() - 2);
    } else if (raw.front() == '[') {
      if (raw.back() != ']')
        throw config_error(origin + ":" + std::to_string(lineno) + ": unterminated list");
      v.kind = Value::Kind::NumberList;
      std::string body = raw.substr(1, raw.size() - 2);
      std::string item;
      std::istringstream items(body);
      while (std::getline(items, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        double num;
        if (!parse_number(item, &num))
          throw config_error(origin + ":" + std::to_string(lineno) + ": bad list entry '" + item +
                             "' for key " + key);
        v.list.push_back(num);
      }
    } else if (raw == "true" || raw == "false") {
      v.kind = Value::Kind::Boolean;
      v.boolean = raw == "true";
    } else {
      double num;
      if (!parse_number(raw, &num))
        throw config_error(origin + ":" + std::to_string(lineno) + ": bad value '" + raw +
                           "' for key " + key);
      v.kind = Value::Kind::Number;
      v.number = num;
    }
    cfg.sections_[section][key] = std::move(v);
  }
  return cfg;
}

void Config::fail(const std::string& section, const std::string& key,
                  const std::string& why) const {
  throw config_error(origin_ + ": [" + section + "] " + key + ": " + why);
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  if (!has(section, key)) return fallback;
  const Value& v = sections_.at(section).at(key);
  if (v.kind != Value::Kind::Number) fail(section, key, "expected a number");
  return v.number;
}

double Config::require_number(const std::string& section, const std::string& key) const {
  if (!has(section, key)) fail(section, key, "missing required field");
  return number(section, key, 0);
}

std::string Config::text(const std::string& section, const std::string& key,
                         const std::string& fallback) const {
  if (!has(section, key)) return fallback;
  const Value& v = sections_.at(section).at(key);
  if (v.kind != Value::Kind::String) fail(section, key, "expected a string");
  return v.text;
}

bool Config::boolean(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const Value& v = sections_.at(section).at(key);
  if (v.kind != Value::Kind::Boolean) fail(section, key, "expected true or false");
  return v.boolean;
}

std::vector<double> Config::list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const {
  if (!has(section, key)) return fallback;
  const Value& v = sections_.at(section).at(key);
  if (v.kind != Value::Kind::NumberList) fail(section, key, "expected a [list]");
  return v.list;
}

unsigned long long SplitMix64::next() {
  state += 0x9e3779b97f4a7c15ull;
  unsigned long long z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return (double)(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Scenario scenario_from_config(const Config& cfg) {
  Scenario sc;
  sc.name = cfg.text("scenario", "name", "unnamed");
  sc.seed = (unsigned long long)cfg.number("scenario", "seed", 1);
  sc.out_dir = cfg.text("scenario", "out_dir", "out");

  const std::string kind = cfg.text("target", "kind", "torus");
  if (kind == "torus") {
    const auto lat = cfg.list("target", "lattice", {1, 0, 0, 1});
    if (lat.size() != 4) throw config_error("[target] lattice: expected 4 numbers for genus 1");
    sc.target = TargetModel::flat_torus({Complex(lat[0], lat[1]), Complex(lat[2], lat[3])});
  } else if (kind == "torus2") {
    const auto lat = cfg.list("target", "lattice",
                              {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1});
    if (lat.size() != 16) throw config_error("[target] lattice: expected 16 numbers for genus 2");
    std::vector<std::array<Complex, 2>> gens;
    for (int c = 0; c < 4; ++c)
      gens.push_back({Complex(lat[4 * c], lat[4 * c + 1]), Complex(lat[4 * c + 2], lat[4 * c + 3])});
    sc.target = TargetModel::flat_torus_g2(gens);
  } else if (kind == "p1") {
    sc.target = TargetModel::projective_line();
  } else if (kind == "unit-disk") {
    sc.target = TargetModel::unit_disk();
  } else {
    throw config_error("[target] kind: unknown target '" + kind + "'");
  }

  const auto schedule = cfg.list("compact", "schedule", {0.5, 0.25, 0.125, 0.0625});
  const std::string ckind = cfg.text("compact", "kind", "all");
  if (ckind == "all") {
    sc.compact = CompactSet::whole_space(schedule);
  } else if (ckind == "ball") {
    const auto c = cfg.list("compact", "center", {0, 0, 0, 0});
    TargetPoint center = sc.target.make_point(
        {Complex(c[0], c.size() > 1 ? c[1] : 0),
         Complex(c.size() > 2 ? c[2] : 0, c.size() > 3 ? c[3] : 0)});
    sc.compact = CompactSet::single_ball(center, cfg.require_number("compact", "radius"), schedule);
  } else if (ckind == "tube") {
    const auto v = cfg.list("compact", "value", {0, 0});
    sc.compact = CompactSet::coordinate_tube((int)cfg.number("compact", "coord", 0),
                                             Complex(v[0], v.size() > 1 ? v[1] : 0),
                                             cfg.require_number("compact", "radius"), schedule);
  } else {
    throw config_error("[compact] kind: unknown compact set '" + ckind + "'");
  }

  sc.generator = cfg.text("family", "generator", "torus-line");
  sc.n_values = cfg.list("family", "n_values", {8, 16, 32, 64});
  sc.depths = cfg.list("family", "depths", {60, 66, 72, 78});
  sc.chain_ratio = cfg.number("family", "ratio", 1.0 / 32.0);
  sc.chain_scale = cfg.number("family", "scale", 0.125);
  sc.random_count = (int)cfg.number("family", "count", 100);
  sc.random_degree = (int)cfg.number("family", "degree", 6);
  if (sc.generator == "explicit") {
    for (int i = 0;; ++i) {
      const std::string key = "map_" + std::to_string(i);
      if (!cfg.has("family", key)) break;
      const auto flat = cfg.list("family", key, {});
      Polynomial p;
      for (size_t j = 0; j + 1 < flat.size(); j += 2) p.push_back(Complex(flat[j], flat[j + 1]));
      sc.explicit_maps.push_back(std::move(p));
      if (cfg.has("family", key + "_q")) {
        const auto qflat = cfg.list("family", key + "_q", {});
        Polynomial q;
        for (size_t j = 0; j + 1 < qflat.size(); j += 2)
          q.push_back(Complex(qflat[j], qflat[j + 1]));
        sc.explicit_maps_den.push_back(std::move(q));
      }
    }
    if (sc.explicit_maps.empty())
      throw config_error("[family] generator = explicit requires map_0 = [re, im, ...]");
  }

  sc.germs.candidate_factor = cfg.number("besicovitch", "candidate_factor", 4.0);
  sc.germs.max_subfamilies = (int)cfg.number("besicovitch", "max_subfamilies", 19);
  sc.germs.mass_target = cfg.number("besicovitch", "mass_target", 1.0);
  sc.budget_per_area = cfg.number("sampling", "budget_per_area", 64.0);
  sc.min_budget = (long)cfg.number("sampling", "min_budget", 200000);

  sc.doubling.max_level = (int)cfg.number("doubling", "max_level", 4);
  sc.doubling.keep_fraction_divisor = cfg.number("doubling", "keep_fraction_divisor", 8.0);

  sc.concentration.max_level = (int)cfg.number("concentration", "max_level", 2);
  sc.concentration.comparability_threshold =
      cfg.number("concentration", "comparability_threshold", 16.0);
  sc.concentration.circle_candidates = (int)cfg.number("concentration", "circle_candidates", 64);
  sc.mostly_simple_threshold = cfg.number("concentration", "mostly_simple_threshold", 0.2);
  sc.certificate_factor = cfg.number("concentration", "certificate_factor", 0.75);

  sc.diagnose.divergent_threshold = cfg.number("diagnose", "divergent_threshold", 0.5);
  sc.diagnose.bounded_floor = cfg.number("diagnose", "bounded_floor", 1.0);

  sc.limits.cauchy_tol = cfg.number("limits", "cauchy_tol", 1e-3);
  sc.limits.grid_per_axis = (int)cfg.number("limits", "grid_per_axis", 17);
  sc.limits.refine_depth = (int)cfg.number("limits", "refine_depth", 4);
  sc.limits.rational_curve_area_floor = cfg.number("limits", "rational_curve_floor", 1.0);
  sc.limits.epsilon = cfg.number("limits", "epsilon", 0.0);
  sc.k_area_tol = cfg.number("limits", "k_area_tol", 1e-2);

  sc.quadrature.rtol = cfg.number("quadrature", "rtol", 1e-4);
  sc.quadrature.max_depth = (int)cfg.number("quadrature", "max_depth", 7);
  sc.diagnose.quadrature = sc.quadrature;
  sc.doubling.quadrature = sc.quadrature;
  sc.concentration.quadrature = sc.quadrature;
  sc.limits.quadrature = sc.quadrature;
  return sc;
}

}  // namespace ahlfors
