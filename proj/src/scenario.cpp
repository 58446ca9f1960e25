#include "ahlfors/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ahlfors {

namespace detail_reports {
void write_artifacts(const Scenario& sc, const std::vector<ScenarioIndex>& family,
                     const RunOutcome& out);
void write_diagnostics_only(const Scenario& sc, const std::vector<ScenarioIndex>& family,
                            const RunOutcome& out);
}  // namespace detail_reports

namespace {

long sample_budget_for(const Scenario& sc, double a_n) {
  return std::max<long>(sc.min_budget, (long)(sc.budget_per_area * std::max(a_n, 1.0)));
}

HoloDiskMap torus_line_map(const TargetModel& target, double n) {
  std::vector<Polynomial> comps;
  comps.push_back({Complex(0, 0), Complex(n, 0)});
  if (target.kind() == TargetKind::FlatTorus && target.genus() == 2)
    comps.push_back({Complex(0, 0), Complex(0, n)});
  return HoloDiskMap(target, std::move(comps));
}

// Random polynomial with sup |f| on the closed disk scaled to 0.9.
HoloDiskMap bounded_random_map(const TargetModel& target, int degree, SplitMix64& rng) {
  Polynomial p;
  for (int j = 0; j <= degree; ++j)
    p.push_back(Complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) / (double)(1 + j));
  double sup = 0;
  for (int i = 0; i < 2048; ++i) {
    const double t = 2.0 * kPi * i / 2048.0;
    sup = std::max(sup, std::abs(poly_eval(p, std::polar(1.0, t))));
  }
  if (sup < 1e-9) {
    p[0] += Complex(0.5, 0);
    sup = std::max(sup, 0.5);
  }
  for (auto& c : p) c *= 0.9 / sup;
  return HoloDiskMap(target, {p});
}

std::vector<ScenarioIndex> build_chain_family(const Scenario& sc) {
  std::vector<ScenarioIndex> out;
  for (size_t idx = 0; idx < sc.depths.size(); ++idx) {
    const int depth = (int)sc.depths[idx];
    if (depth < 1) throw config_error("[family] depths: depth must be >= 1");
    DiskFamily germs;
    germs.provenance = "concentric-chain";
    std::vector<PlanarMeasure::Sample> samples;
    for (int i = 0; i <= depth; ++i) {
      const double r = sc.chain_scale * std::pow(sc.chain_ratio, i);
      if (!(r > 0)) throw config_error("[family] ratio/depth underflow the radius range");
      const PlanarDisk germ(Complex(2.0 * r, 0.0), r);
      germs.disks.push_back(germ);
      germs.masses.push_back(1.0);
      samples.push_back({germ.center, 1.0});
    }
    const double a_n = (double)(depth + 1);
    germs.consistency_ratio = (double)germs.size() / a_n;

    ScenarioIndex si{DiskEntry{torus_line_map(sc.target, 1e-3), a_n, 1.0,
                               std::min<int>((int)idx, (int)sc.compact.schedule.size() - 1), true},
                     PlanarMeasure(std::move(samples)), std::move(germs)};
    out.push_back(std::move(si));
  }
  return out;
}

}  // namespace

std::vector<ScenarioIndex> build_family(const Scenario& sc) {
  std::vector<ScenarioIndex> out;
  const int sched_max = (int)sc.compact.schedule.size() - 1;

  if (sc.generator == "torus-line") {
    if (sc.target.kind() != TargetKind::FlatTorus)
      throw config_error("torus-line generator requires a torus target");
    for (size_t idx = 0; idx < sc.n_values.size(); ++idx) {
      HoloDiskMap f = torus_line_map(sc.target, sc.n_values[idx]);
      const double a = area(f, f.domain(), false, sc.quadrature);
      const double l = boundary_length(
          f, CircularArc{f.domain().center, f.domain().radius, 0, 2 * kPi}, false, sc.quadrature);
      const int ni = std::min<int>((int)idx, sched_max);
      PlanarMeasure mu = pullback_measure(f, sc.compact, ni, sample_budget_for(sc, a));
      out.push_back({DiskEntry{std::move(f), a, l, ni, false}, std::move(mu), std::nullopt});
    }
    return out;
  }

  if (sc.generator == "concentric-chain") return build_chain_family(sc);

  if (sc.generator == "blaschke-random") {
    SplitMix64 rng(sc.seed);
    for (int i = 0; i < sc.random_count; ++i) {
      HoloDiskMap f = bounded_random_map(sc.target, sc.random_degree, rng);
      const double a = area(f, f.domain(), false, sc.quadrature);
      const double l = boundary_length(
          f, CircularArc{f.domain().center, f.domain().radius, 0, 2 * kPi}, false, sc.quadrature);
      const int ni = std::min<int>(i, sched_max);
      PlanarMeasure mu = pullback_measure(f, sc.compact, ni, sample_budget_for(sc, a));
      out.push_back({DiskEntry{std::move(f), a, l, ni, false}, std::move(mu), std::nullopt});
    }
    return out;
  }

  if (sc.generator == "explicit") {
    for (size_t i = 0; i < sc.explicit_maps.size(); ++i) {
      std::vector<Polynomial> comps{sc.explicit_maps[i]};
      if (sc.target.kind() == TargetKind::ProjectiveLine) {
        if (i >= sc.explicit_maps_den.size())
          throw config_error("explicit projective maps need map_<i>_q denominators");
        comps.push_back(sc.explicit_maps_den[i]);
      }
      HoloDiskMap f(sc.target, std::move(comps));
      const double a = area(f, f.domain(), false, sc.quadrature);
      const double l = boundary_length(
          f, CircularArc{f.domain().center, f.domain().radius, 0, 2 * kPi}, false, sc.quadrature);
      const int ni = std::min<int>((int)i, sched_max);
      PlanarMeasure mu = pullback_measure(f, sc.compact, ni, sample_budget_for(sc, a));
      out.push_back({DiskEntry{std::move(f), a, l, ni, false}, std::move(mu), std::nullopt});
    }
    return out;
  }

  throw config_error("[family] generator: unknown generator '" + sc.generator + "'");
}

namespace {

DiskSequence sequence_of(const std::vector<ScenarioIndex>& family) {
  DiskSequence seq;
  for (const auto& si : family) seq.entries.push_back(si.entry);
  return seq;
}

// The deepest doubling level the germ scale admits before the doubled disks
// outgrow the source disk.
int level_cap(const DiskFamily& germs, const PlanarDisk& domain) {
  std::vector<double> radii;
  for (const auto& d : germs.disks) radii.push_back(d.radius);
  std::nth_element(radii.begin(), radii.begin() + radii.size() / 2, radii.end());
  const double median = radii[radii.size() / 2];
  if (!(median > 0)) return 1;
  const int cap = (int)std::floor(std::log2(domain.radius / (4.0 * median)));
  return std::max(1, cap);
}

}  // namespace

RunOutcome diagnose_scenario(const Scenario& sc) {
  RunOutcome out;
  const auto family = build_family(sc);
  DiskSequence seq = sequence_of(family);
  std::vector<PlanarMeasure> measures;
  for (const auto& si : family) measures.push_back(si.measure);
  out.diagnostics = diagnose_sequence(seq, sc.compact, measures, sc.diagnose);
  out.exit_code = out.diagnostics.verdict == SequenceVerdict::Inconclusive ? 2 : 0;
  detail_reports::write_diagnostics_only(sc, family, out);
  return out;
}

RunOutcome run_scenario(const Scenario& sc) {
  RunOutcome out;
  const auto family = build_family(sc);
  DiskSequence seq = sequence_of(family);
  std::vector<PlanarMeasure> measures;
  for (const auto& si : family) measures.push_back(si.measure);
  out.diagnostics = diagnose_sequence(seq, sc.compact, measures, sc.diagnose);

  if (out.diagnostics.verdict == SequenceVerdict::IsoperimetricallyBounded) {
    std::vector<HoloDiskMap> maps;
    for (const auto& si : family) maps.push_back(si.entry.map);
    out.isoperimetric = isoperimetric_constant(maps, sc.quadrature);
    out.exit_code = 0;
    detail_reports::write_artifacts(sc, family, out);
    return out;
  }
  if (out.diagnostics.verdict == SequenceVerdict::Inconclusive) {
    out.exit_code = 2;
    out.failure = "diagnose: inconclusive sequence";
    detail_reports::write_artifacts(sc, family, out);
    return out;
  }

  // Germs and doubling per index.
  std::vector<MeasureIndex> indices;
  long distributed = 0, concentrated = 0;
  for (size_t i = 0; i < family.size(); ++i) {
    indices.emplace_back(family[i].measure);
    const auto& e = family[i].entry;
    DiskFamily germs;
    if (family[i].germs) {
      germs = *family[i].germs;
    } else {
      germs = extract_germs(family[i].measure, e.map.domain(), e.area, sc.germs).family;
    }

    DoublingOptions dopts = sc.doubling;
    dopts.max_level = std::min(dopts.max_level, level_cap(germs, e.map.domain()));
    DoublingResult res = iterate_doubling(germs, e.map, indices.back(), e.area, e.boundary_length,
                                          sc.compact, e.neighborhood_index, dopts);
    if (res.status == DoublingStatus::Exhausted) {
      out.exit_code = 1;
      out.failure = "doubling: family exhausted below the consistency floor (floors too "
                    "aggressive for index " +
                    std::to_string(i) + ")";
      out.doubling_results.push_back({(int)i, std::move(res)});
      detail_reports::write_artifacts(sc, family, out);
      return out;
    }
    if (res.status == DoublingStatus::Distributed)
      ++distributed;
    else
      ++concentrated;
    out.doubling_results.push_back({(int)i, std::move(res)});
  }

  ReparamSequence seq_out;
  DiskSequence maps_out;
  std::vector<const PlanarMeasure*> measures_out;

  if (distributed >= concentrated) {
    seq_out.domain = LimitDomain::C;
    for (size_t i = 0; i < family.size(); ++i) {
      const auto& res = out.doubling_results[i].second;
      if (res.status != DoublingStatus::Distributed) continue;
      ReparamEntry entry;
      entry.reparam = *res.reparam;
      entry.anchor_disk = *res.selected_disk;
      entry.achieved_level = res.achieved_level;
      entry.budget_table = res.budget_table;
      seq_out.entries.push_back(std::move(entry));
      maps_out.entries.push_back(family[i].entry);
      measures_out.push_back(&family[i].measure);
    }
  } else {
    seq_out.domain = LimitDomain::CStar;
    for (size_t i = 0; i < family.size(); ++i) {
      const auto& res = out.doubling_results[i].second;
      if (res.status != DoublingStatus::Concentrated) continue;
      const auto& e = family[i].entry;

      DiskFamily quadrupled = res.concentrated_family;
      for (auto& d : quadrupled.disks) d = scale_disk(d, 4.0);
      const PruneResult pruned = scale_separation_prune(quadrupled);
      const IncidenceGraph graph = build_incidence_graph(pruned.kept);
      const Arborescence arb = arborize(graph);
      const CensusResult cen = census(arb, e.area, sc.mostly_simple_threshold);
      out.census_results.push_back({(int)i, cen});
      const LineageExtraction lineages = extract_lineages(arb, sc.certificate_factor);
      const AnnulusFamily annuli = build_annulus_family(lineages, arb.vertices, indices[i]);
      out.annulus_families.push_back({(int)i, annuli});
      ConcentrationOutcome cres =
          double_annuli_and_iterate(annuli, e.map, indices[i], sc.compact, e.neighborhood_index,
                                    e.area, e.boundary_length, sc.concentration);
      if (!cres.kept_piece || !cres.anchor) {
        out.exit_code = 1;
        out.failure = "concentration: no anchor annulus for index " + std::to_string(i);
        detail_reports::write_artifacts(sc, family, out);
        return out;
      }
      ReparamEntry entry;
      entry.reparam = cres.reparam;
      entry.anchor_annulus = *cres.kept_piece;
      entry.achieved_level = cres.achieved_level;
      entry.budget_table = cres.budget_table;
      seq_out.entries.push_back(std::move(entry));
      maps_out.entries.push_back(family[i].entry);
      measures_out.push_back(&family[i].measure);
      out.concentration_results.push_back({(int)i, std::move(cres)});
    }
  }

  if (seq_out.entries.empty()) {
    out.exit_code = 1;
    out.failure = "pipeline: no index completed its branch";
    detail_reports::write_artifacts(sc, family, out);
    return out;
  }
  out.domain_set = true;
  out.domain = seq_out.domain;

  out.report = detect_convergence(seq_out, maps_out, sc.compact, sc.limits);

  // Synthetic measures are the source of truth for the near-K area of their
  // anchors; quadrature of the placeholder map would undercount it.
  if (maps_out.entries.back().synthetic) {
    const auto& e = seq_out.entries.back();
    const PlanarMeasure& mu = *measures_out.back();
    double mass = 0;
    if (e.anchor_disk)
      mass = measure_mass_in(mu, *e.anchor_disk);
    else if (e.anchor_annulus)
      mass = measure_mass_in(mu, *e.anchor_annulus);
    out.report->k_intersection_area = mass;
    for (auto& v : out.report->k_area_by_neighborhood) v = mass;
  }

  const bool success = out.report->verdict == ConvergenceVerdict::Converged &&
                       out.report->k_intersection_area >= 1.0 - sc.k_area_tol;
  out.exit_code = success ? 0 : 2;
  if (!success)
    out.failure = out.report->verdict != ConvergenceVerdict::Converged
                      ? "limits: no Cauchy behavior at the sample budget"
                      : "limits: K-intersection area below 1 - tol";
  detail_reports::write_artifacts(sc, family, out);
  return out;
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

namespace {

VerifyRow row(const std::string& check, double measured, double bound, bool leq = true) {
  VerifyRow r{check, measured, bound, leq ? measured <= bound : measured >= bound};
  return r;
}

std::vector<VerifyRow> suite_counting(const Scenario& sc) {
  std::vector<VerifyRow> rows;
  (void)sc;
  // Exact dyadic instance: a_n = 64, eps = 1/4, threshold 2/eps = 8.
  const double a_n = 64, eps = 0.25;
  DiskFamily family;
  for (int i = 0; i < 16; ++i) {
    family.disks.push_back(PlanarDisk(Complex(i * 10.0, 0.0), 1.0));
    family.masses.push_back(1.0);
  }
  std::vector<double> areas(16, 1.0);
  for (int i = 0; i < 8; ++i) areas[i] = 12.0;  // 3/eps, above the 2/eps threshold
  const auto pass = area_budget_filter(family, areas, eps, a_n);
  rows.push_back(row("counting/area_removed", (double)pass.removed, 0.5 * eps * a_n));
  rows.push_back(row("counting/area_kept", (double)pass.kept.size(), 8.0, false));

  std::vector<double> lengths(16, 0.0);
  for (int i = 0; i < 4; ++i) lengths[i] = 5.0;  // above 4 l_n / (eps a_n) = 4
  const auto lpass = length_budget_filter(family, lengths, eps, a_n, /*l_n=*/16.0);
  rows.push_back(row("counting/length_removed", (double)lpass.removed, 0.25 * eps * a_n));
  return rows;
}

std::vector<VerifyRow> suite_packing(const Scenario& sc) {
  std::vector<VerifyRow> rows;
  SplitMix64 rng(sc.seed * 77 + 3);
  long max_degree = 0;
  double min_fraction = 1.0;
  long max_quarters = 0;
  for (int rep = 0; rep < 10; ++rep) {
    // Disjoint germ-like disks, then quadrupled.
    DiskFamily germs;
    for (int i = 0; i < 160; ++i) {
      const double r = 0.004 * std::pow(2.0, rng.uniform(0, 6));
      const Complex c(rng.uniform(-0.9, 0.9), rng.uniform(-0.9, 0.9));
      const PlanarDisk d(c, r);
      bool ok = true;
      for (const auto& g : germs.disks)
        if (disks_intersect(d, g)) ok = false;
      if (ok) {
        germs.disks.push_back(d);
        germs.masses.push_back(1.0);
      }
    }
    DiskFamily quad = germs;
    for (auto& d : quad.disks) d = scale_disk(d, 4.0);
    const auto pruned = scale_separation_prune(quad);
    max_degree = std::max(max_degree, pruned.max_conflict_degree);
    min_fraction = std::min(min_fraction, (double)pruned.kept.size() / (double)quad.size());

    // Quarter-disk packing oracle inside 5d for a few disks.
    for (size_t i = 0; i < std::min<size_t>(quad.size(), 8); ++i) {
      const PlanarDisk big = scale_disk(quad.disks[i], 5.0);
      const double floor_r = quad.disks[i].radius / 64.0;
      long count = 0;
      for (size_t j = 0; j < quad.size(); ++j) {
        const PlanarDisk q = scale_disk(quad.disks[j], 0.25);
        if (q.radius >= floor_r && big.contains_closure_of(q)) ++count;
      }
      max_quarters = std::max(max_quarters, count);
    }
  }
  rows.push_back(
      row("packing/max_conflict_degree", (double)max_degree, (double)kPackingDegreeBound));
  rows.push_back(
      row("packing/quarter_disks_in_5d", (double)max_quarters, (double)kPackingDegreeBound));
  rows.push_back(row("packing/retained_fraction", min_fraction,
                     1.0 / (double)(kPackingDegreeBound + 1), false));
  return rows;
}

std::vector<VerifyRow> suite_forest(const Scenario& sc) {
  std::vector<VerifyRow> rows;
  SplitMix64 rng(sc.seed * 101 + 7);
  long max_excess = 0;  // max over instances of m - t
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = 2 + (int)(rng.next() % 60);
    std::vector<int> parent(n, -1);
    std::vector<int> children(n, 0);
    for (int v = 1; v < n; ++v) {
      parent[v] = (int)(rng.next() % (unsigned long long)v);
      ++children[parent[v]];
    }
    long t = 0, m = 0;
    for (int v = 0; v < n; ++v) {
      if (children[v] == 0) ++t;
      if (children[v] >= 2) ++m;
    }
    max_excess = std::max(max_excess, m - t);
  }
  rows.push_back(row("forest/max_m_minus_t", (double)max_excess, 0.0));
  return rows;
}

std::vector<VerifyRow> suite_stokes(const Scenario& sc) {
  std::vector<VerifyRow> rows;
  SplitMix64 rng(sc.seed * 13 + 1);
  const TargetModel disk_target = TargetModel::unit_disk();
  QuadratureOptions q = sc.quadrature;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const HoloDiskMap f = bounded_random_map(disk_target, 6, rng);
    const double a = area(f, f.domain(), false, q);
    const double l = boundary_length(f, CircularArc{Complex(0, 0), 1.0, 0, 2 * kPi}, false, q);
    if (l > kLengthFloor) worst = std::max(worst, a / (0.5 * l));
  }
  rows.push_back(row("stokes/max_area_over_half_length", worst, 1.0 + 1e-3));
  return rows;
}

std::vector<VerifyRow> suite_equidistribution(const Scenario& sc) {
  std::vector<VerifyRow> rows;
  const TargetModel torus = TargetModel::flat_torus({Complex(1, 0), Complex(0, 1)});
  std::vector<double> ratios;
  for (double n : {8.0, 16.0, 32.0}) {
    const HoloDiskMap f = torus_line_map(torus, n);
    TargetAreaDistribution dist(&torus, 16);
    const double h = 1.0 / (6.0 * n);
    const int cells = (int)std::ceil(2.0 / h);
    for (int iy = 0; iy < cells; ++iy)
      for (int ix = 0; ix < cells; ++ix) {
        const Complex z(-1.0 + (ix + 0.5) * h, -1.0 + (iy + 0.5) * h);
        if (std::abs(z) >= 1.0) continue;
        dist.add(f.value(z), f.derivative_norm_sq(z) * h * h);
      }
    ratios.push_back(dist.max_cell_mass() / dist.min_nonempty_cell_mass());
  }
  rows.push_back(row("equidistribution/ratio_n8", ratios[0], 2.0));
  rows.push_back(row("equidistribution/ratio_n16", ratios[1], ratios[0]));
  rows.push_back(row("equidistribution/ratio_n32", ratios[2], ratios[1]));
  rows.push_back(row("equidistribution/ratio_final", ratios[2], 1.2));
  (void)sc;
  return rows;
}

}  // namespace

std::vector<std::string> verify_suite_names() {
  return {"counting", "packing", "forest", "stokes", "equidistribution"};
}

std::vector<VerifyRow> run_verify_suite(const Scenario& sc, const std::string& suite) {
  if (suite == "counting") return suite_counting(sc);
  if (suite == "packing") return suite_packing(sc);
  if (suite == "forest") return suite_forest(sc);
  if (suite == "stokes") return suite_stokes(sc);
  if (suite == "equidistribution") return suite_equidistribution(sc);
  throw config_error("unknown verify suite '" + suite + "'");
}

}  // namespace ahlfors
