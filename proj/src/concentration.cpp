#include "ahlfors/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "ahlfors/limits.hpp"
#include "disk_grid.hpp"

namespace ahlfors {

namespace {

DiskFamily subset(const DiskFamily& family, const std::vector<size_t>& keep) {
  DiskFamily out;
  out.provenance = family.provenance;
  out.consistency_ratio = family.consistency_ratio;
  for (size_t i : keep) {
    out.disks.push_back(family.disks[i]);
    if (!family.masses.empty()) out.masses.push_back(family.masses[i]);
  }
  return out;
}

bool separation_conflict(const PlanarDisk& a, const PlanarDisk& b) {
  const double ratio = std::max(a.radius, b.radius) / std::min(a.radius, b.radius);
  if (ratio >= 16.0) return false;
  return disks_intersect(scale_disk(a, 2.0), scale_disk(b, 2.0));
}

}  // namespace

PruneResult scale_separation_prune(const DiskFamily& quadrupled) {
  const size_t n = quadrupled.size();
  PruneResult out;

  // Conflict degrees, with the packing-count assertion per disk.
  std::vector<long> degree(n, 0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      if (separation_conflict(quadrupled.disks[i], quadrupled.disks[j])) {
        ++degree[i];
        ++degree[j];
      }
  for (size_t i = 0; i < n; ++i) {
    out.max_conflict_degree = std::max(out.max_conflict_degree, degree[i]);
    if (degree[i] > kPackingDegreeBound)
      throw geometry_error(
          "scale_separation_prune: conflict degree exceeds the 320^2 packing bound; "
          "germ centers are not mutually exterior");
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return detail::disk_order(quadrupled.disks[a], quadrupled.disks[b]);
  });
  std::vector<bool> kept(n, false);
  for (size_t idx : order) {
    bool ok = true;
    for (size_t j = 0; j < n && ok; ++j)
      if (kept[j] && separation_conflict(quadrupled.disks[idx], quadrupled.disks[j])) ok = false;
    kept[idx] = ok;
  }
  for (size_t i = 0; i < n; ++i)
    if (kept[i]) out.kept_indices.push_back(i);
  out.kept = subset(quadrupled, out.kept_indices);
  out.removed = (long)(n - out.kept_indices.size());
  // Greedy maximal independent sets retain at least n / (degree bound + 1).
  if (n > 0 && (double)out.kept.size() < (double)n / (double)(kPackingDegreeBound + 1))
    throw geometry_error("scale_separation_prune: retained fraction below 1/320^2");
  return out;
}

IncidenceGraph build_incidence_graph(const DiskFamily& family) {
  IncidenceGraph g;
  g.vertices = family.disks;
  const size_t n = g.vertices.size();
  g.out_edges.assign(n, {});
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      // Edge from the larger to the smaller of an intersecting pair.
      if (detail::disk_order(g.vertices[i], g.vertices[j]) &&
          disks_intersect(g.vertices[i], g.vertices[j])) {
        g.out_edges[i].push_back((int)j);
        ++g.edge_count;
      }
    }
  return g;
}

long Arborescence::roots() const {
  long r = 0;
  for (int p : parent)
    if (p < 0) ++r;
  return r;
}

Arborescence arborize(const IncidenceGraph& g, const ArborizeOptions& opts) {
  const size_t n = g.vertices.size();
  Arborescence a;
  a.vertices = g.vertices;
  a.parent.assign(n, -1);

  // Current in-edge origins per vertex.
  std::vector<std::set<int>> in_origins(n);
  for (size_t i = 0; i < n; ++i)
    for (int j : g.out_edges[i]) in_origins[j].insert((int)i);

  // Process in increasing radius; all in-origins of a vertex are strictly
  // larger in the order, so they are still unprocessed at that point.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return detail::disk_order(g.vertices[y], g.vertices[x]);  // ascending
  });

  for (int w : order) {
    if (in_origins[w].empty()) continue;
    std::vector<int> origins(in_origins[w].begin(), in_origins[w].end());
    std::stable_sort(origins.begin(), origins.end(), [&](int x, int y) {
      return detail::disk_order(g.vertices[x], g.vertices[y]);  // descending
    });
    // Replace the in-edges by the chain d1 -> d2 -> ... -> dk -> w.
    for (size_t i = 0; i + 1 < origins.size(); ++i) in_origins[origins[i + 1]].insert(origins[i]);
    a.parent[w] = origins.back();
  }

  a.children.assign(n, {});
  for (size_t v = 0; v < n; ++v)
    if (a.parent[v] >= 0) a.children[a.parent[v]].push_back((int)v);
  a.classes.assign(n, VertexClass::Terminal);
  for (size_t v = 0; v < n; ++v)
    a.classes[v] = a.children[v].empty()    ? VertexClass::Terminal
                   : a.children[v].size() == 1 ? VertexClass::Simple
                                               : VertexClass::Multiple;

  // Reachability implies containment in the doubled ancestor.
  auto contained_in_double = [&](int desc, int anc) {
    const auto& d = a.vertices[desc];
    const auto& up = a.vertices[anc];
    return std::abs(d.center - up.center) + d.radius <= 2.0 * up.radius * (1.0 + 1e-12);
  };
  long checked = 0, failures = 0;
  if (n <= opts.exhaustive_limit) {
    for (size_t v = 0; v < n; ++v)
      for (int p = a.parent[v]; p >= 0; p = a.parent[p]) {
        ++checked;
        if (!contained_in_double((int)v, p)) ++failures;
      }
  } else if (n > 0) {
    unsigned long long state = opts.sample_seed;
    auto next = [&state]() {
      state ^= state << 13;
      state ^= state >> 7;
      state ^= state << 17;
      return state;
    };
    for (int s = 0; s < opts.samples; ++s) {
      int v = (int)(next() % n);
      int hops = (int)(next() % 8) + 1;
      int p = a.parent[v];
      while (p >= 0 && --hops > 0 && a.parent[p] >= 0) p = a.parent[p];
      if (p < 0) continue;
      ++checked;
      if (!contained_in_double(v, p)) ++failures;
    }
  }
  if (checked > 0 && (double)failures > opts.max_failure_rate * (double)checked)
    throw geometry_error(
        "arborize: ancestor containment verification failed; was scale separation skipped?");
  return a;
}

CensusResult census(const Arborescence& a, double a_n, double mostly_simple_threshold) {
  CensusResult c;
  for (auto cls : a.classes) {
    if (cls == VertexClass::Terminal) ++c.terminal;
    if (cls == VertexClass::Simple) ++c.simple;
    if (cls == VertexClass::Multiple) ++c.multiple;
  }
  if (c.multiple > c.terminal)
    throw geometry_error("census: forest identity m <= t violated (not a forest?)");
  const long total = c.terminal + c.simple + c.multiple;
  c.non_simple_fraction = total > 0 ? (double)(c.terminal + c.multiple) / (double)total : 0.0;
  c.mostly_simple = c.non_simple_fraction <= mostly_simple_threshold;
  (void)a_n;
  return c;
}

LineageExtraction extract_lineages(const Arborescence& a, double certificate_factor) {
  const size_t n = a.vertices.size();
  LineageExtraction out;

  auto certified = [&](int parent, int child) {
    const auto& d = a.vertices[parent];
    const auto& dd = a.vertices[child];
    return std::abs(dd.center - d.center) + 2.0 * dd.radius <=
           certificate_factor * d.radius * (1.0 + 1e-12);
  };

  // Surviving links: parent and child both non-multiple, certificate holds.
  std::vector<int> next(n, -1), prev(n, -1);
  for (size_t v = 0; v < n; ++v) {
    if (a.classes[v] == VertexClass::Multiple) continue;
    const int p = a.parent[v];
    if (p < 0 || a.classes[p] == VertexClass::Multiple) continue;
    if (!certified(p, (int)v)) {
      ++out.dropped_certificates;
      continue;
    }
    next[p] = (int)v;
    prev[v] = p;
  }
  for (size_t v = 0; v < n; ++v) {
    if (a.classes[v] == VertexClass::Multiple) continue;
    if (prev[v] >= 0) continue;  // not a chain head
    Lineage line;
    for (int u = (int)v; u >= 0; u = next[u]) line.chain.push_back(u);
    out.lineages.push_back(std::move(line));
  }

  CensusResult c = census(a, 0.0);
  out.lineage_bound = c.terminal + c.multiple + out.dropped_certificates;
  if ((long)out.lineages.size() > out.lineage_bound)
    throw geometry_error("extract_lineages: lineage count exceeds t + m + dropped");
  return out;
}

bool annuli_disjoint(const PlanarAnnulus& a, const PlanarAnnulus& b) {
  if (!disks_intersect(a.outer, b.outer)) return true;
  if (a.inner.contains_closure_of(b.outer) ||
      (std::abs(b.outer.center - a.inner.center) + b.outer.radius <= a.inner.radius))
    return true;
  if (b.inner.contains_closure_of(a.outer) ||
      (std::abs(a.outer.center - b.inner.center) + a.outer.radius <= b.inner.radius))
    return true;
  return false;
}

AnnulusFamily build_annulus_family(const LineageExtraction& lineages,
                                   const std::vector<PlanarDisk>& vertices,
                                   const MeasureIndex& mu) {
  AnnulusFamily out;
  out.vertices = vertices;

  std::vector<AnnulusRecord> candidates;
  for (size_t li = 0; li < lineages.lineages.size(); ++li) {
    const auto& chain = lineages.lineages[li].chain;
    if (chain.size() < 7) continue;  // below the block length
    const int blocks = (int)((chain.size() - 1) / 6);
    std::vector<int> endpoints;
    for (int b = 0; b <= blocks; ++b) endpoints.push_back(chain[6 * b]);
    out.thinned.push_back(endpoints);
    const int lineage_id = (int)out.thinned.size() - 1;

    for (int b = 0; b < blocks; ++b) {
      const PlanarDisk& d1 = vertices[chain[6 * b]];
      const PlanarDisk& d7 = vertices[chain[6 * b + 6]];
      AnnulusRecord rec{PlanarAnnulus(d1, d7), lineage_id, b, -1, 0, 0};

      // Some initial germ (1/4)d_i, i = 1..6 of the block, must sit in the
      // smaller annulus (3/4)d1 \ 2d7.
      for (int i = 0; i < 6 && rec.certifying_vertex < 0; ++i) {
        const int v = chain[6 * b + i];
        const PlanarDisk q = scale_disk(vertices[v], 0.25);
        const bool in_outer =
            std::abs(q.center - d1.center) + q.radius <= 0.75 * d1.radius * (1.0 + 1e-12);
        const bool avoids_inner =
            std::abs(q.center - d7.center) >= q.radius + 2.0 * d7.radius * (1.0 - 1e-12);
        if (in_outer && avoids_inner) rec.certifying_vertex = v;
      }
      if (rec.certifying_vertex < 0)
        throw geometry_error(
            "build_annulus_family: no quarter germ inside (3/4)d1 minus 2d7; the packing "
            "argument is violated");
      rec.near_k_mass = mu.mass_in(rec.annulus.outer) - mu.mass_in(rec.annulus.inner);
      rec.modulus_lower_bound = annulus_modulus_lower_bound(rec.annulus);
      candidates.push_back(std::move(rec));
    }
  }

  // Disjointness sweep, outer radius descending.
  std::vector<size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
    return detail::disk_order(candidates[x].annulus.outer, candidates[y].annulus.outer);
  });
  std::vector<bool> kept(candidates.size(), false);
  for (size_t idx : order) {
    bool ok = true;
    for (size_t j = 0; j < candidates.size() && ok; ++j)
      if (kept[j] && !annuli_disjoint(candidates[idx].annulus, candidates[j].annulus)) ok = false;
    if (ok)
      kept[idx] = true;
    else
      ++out.dropped_for_disjointness;
  }
  for (size_t i = 0; i < candidates.size(); ++i)
    if (kept[i]) out.annuli.push_back(candidates[i]);
  return out;
}

CircleSearchResult shortest_circle(const HoloDiskMap& f, const PlanarAnnulus& within,
                                   int candidates, const QuadratureOptions& opts) {
  const Complex c = within.inner.center;
  const double r0 = within.inner.radius;
  const double r1 = within.outer.radius - std::abs(within.inner.center - within.outer.center);
  if (!(r1 > r0)) throw std::invalid_argument("shortest_circle: empty annulus");
  CircleSearchResult best;
  best.image_length = std::numeric_limits<double>::infinity();
  const double span = std::log(r1 / r0);
  for (int i = 0; i < candidates; ++i) {
    const double rho = r0 * std::exp(span * (i + 0.5) / candidates);
    const double len = boundary_length(f, CircularArc{c, rho, 0, 2 * kPi},
                                       /*clip_to_domain=*/true, opts);
    if (len < best.image_length) {
      best.image_length = len;
      best.radius = rho;
    }
  }
  return best;
}

namespace {

struct LiveAnnulus {
  int lineage;
  int block;
  size_t record;  // index into g0.annuli
};

PlanarAnnulus level_region(const AnnulusFamily& g0, const LiveAnnulus& a, int level) {
  const auto& w = g0.thinned[a.lineage];
  return PlanarAnnulus(g0.vertices[w[a.block - level]], g0.vertices[w[a.block + 1 + level]]);
}

bool level_defined(const AnnulusFamily& g0, const LiveAnnulus& a, int level) {
  const auto& w = g0.thinned[a.lineage];
  return a.block - level >= 0 && a.block + 1 + level < (int)w.size();
}

}  // namespace

ConcentrationOutcome double_annuli_and_iterate(const AnnulusFamily& g0, const HoloDiskMap& f,
                                               const MeasureIndex& mu, const CompactSet& k,
                                               int n_index, double a_n, double l_n,
                                               const AnnulusDoublingOptions& opts) {
  if (g0.annuli.empty())
    throw std::invalid_argument("double_annuli_and_iterate: empty annulus family");

  ConcentrationOutcome out;
  std::vector<LiveAnnulus> current;
  for (size_t i = 0; i < g0.annuli.size(); ++i)
    current.push_back({g0.annuli[i].lineage, g0.annuli[i].block, i});

  for (int level = 1; level <= opts.max_level; ++level) {
    AnnulusLevelRecord rec;
    rec.level = level;

    // Candidates whose lineage is long enough for this level.
    std::vector<LiveAnnulus> candidates;
    for (const auto& a : current)
      if (level_defined(g0, a, level)) candidates.push_back(a);
    if ((int)candidates.size() < (int)current.size()) out.level_capped = true;
    if (candidates.empty()) break;

    // Structural overlap count of the doubles along each lineage (paper: <= 3
    // per doubling step).
    {
      std::map<std::pair<int, int>, long> cover;
      for (const auto& a : candidates)
        for (int b = a.block - 1; b <= a.block + 1; ++b) cover[{a.lineage, b}]++;
      for (const auto& [slot, count] : cover) rec.max_overlap = std::max(rec.max_overlap, count);
      if (rec.max_overlap > 3)
        throw geometry_error("double_annuli_and_iterate: doubled annuli overlap more than 3 times");
    }

    // Greedy disjoint extraction of the level regions, outer radius descending.
    std::vector<size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t x, size_t y) {
      return detail::disk_order(level_region(g0, candidates[x], level).outer,
                                level_region(g0, candidates[y], level).outer);
    });
    std::vector<bool> kept(candidates.size(), false);
    for (size_t idx : order) {
      const PlanarAnnulus region = level_region(g0, candidates[idx], level);
      bool ok = true;
      for (size_t j = 0; j < candidates.size() && ok; ++j)
        if (kept[j] && !annuli_disjoint(region, level_region(g0, candidates[j], level))) ok = false;
      kept[idx] = ok;
    }
    std::vector<LiveAnnulus> survivors;
    for (size_t i = 0; i < candidates.size(); ++i)
      if (kept[i]) survivors.push_back(candidates[i]);
    if (survivors.empty()) break;

    const double eps = std::max((double)survivors.size() / std::max(a_n, 1.0), 1e-12);
    rec.eps = eps;

    // Area budget on the doubled regions.
    {
      std::vector<LiveAnnulus> filtered;
      double ck = 0;
      const double threshold = 2.0 / eps;
      const double bound = 0.5 * eps * a_n * (1.0 + opts.counting_tol);
      for (const auto& a : survivors) {
        const double ar = area(f, level_region(g0, a, level), true, opts.quadrature);
        if (ar >= threshold) {
          ++rec.removed_by_area;
        } else {
          ck = std::max(ck, ar);
          filtered.push_back(a);
        }
      }
      if ((double)rec.removed_by_area > bound)
        throw geometry_error("double_annuli_and_iterate: area removal exceeds the counting bound");
      survivors = std::move(filtered);
      rec.budget_ck = ck;
    }

    // Length budget on the domain-boundary arcs inside the doubled regions.
    if (l_n > 0) {
      const double threshold = 4.0 * l_n / (eps * a_n);
      const double bound = 0.25 * eps * a_n * (1.0 + opts.counting_tol);
      std::vector<LiveAnnulus> filtered;
      for (const auto& a : survivors) {
        const PlanarAnnulus region = level_region(g0, a, level);
        double len = 0;
        if (!f.domain().contains_closure_of(region.outer)) {
          len = domain_boundary_length_in(f, region.outer, opts.quadrature) -
                domain_boundary_length_in(f, region.inner, opts.quadrature);
        }
        if (len >= threshold) {
          ++rec.removed_by_length;
        } else {
          filtered.push_back(a);
        }
      }
      if ((double)rec.removed_by_length > bound)
        throw geometry_error(
            "double_annuli_and_iterate: length removal exceeds the counting bound");
      survivors = std::move(filtered);
    }

    // Confinement with the boundary-splitting report: for a violator, the
    // outer ring carries a circle of short image (length-area search).
    {
      std::vector<LiveAnnulus> confined;
      for (const auto& a : survivors) {
        const PlanarAnnulus region = level_region(g0, a, level);
        if (f.domain().contains_closure_of(region.outer)) {
          confined.push_back(a);
          continue;
        }
        ++rec.confinement_violations;
        const auto& w = g0.thinned[a.lineage];
        const PlanarDisk& ring_outer = g0.vertices[w[a.block - level]];
        const PlanarDisk& ring_inner = g0.vertices[w[a.block - level + 1]];
        if (ring_outer.contains_closure_of(ring_inner)) {
          out.circle = shortest_circle(f, PlanarAnnulus(ring_outer, ring_inner),
                                       opts.circle_candidates, opts.quadrature);
        }
      }
      survivors = std::move(confined);
    }

    if (survivors.empty()) {
      out.levels.push_back(rec);
      break;
    }
    rec.cardinality = (long)survivors.size();
    out.levels.push_back(rec);
    out.budget_table.push_back(rec.budget_ck);
    out.achieved_level = level;
    current = std::move(survivors);
  }

  // Anchor: the annulus surviving the most levels, ties by near-K mass, then
  // by deterministic outer-disk order.
  std::vector<size_t> pool;
  for (const auto& a : current) pool.push_back(a.record);
  if (pool.empty())
    for (size_t i = 0; i < g0.annuli.size(); ++i) pool.push_back(i);
  size_t best = pool.front();
  for (size_t rec_idx : pool) {
    const auto& challenger = g0.annuli[rec_idx];
    const auto& incumbent = g0.annuli[best];
    if (challenger.near_k_mass > incumbent.near_k_mass) {
      best = rec_idx;
    } else if (challenger.near_k_mass == incumbent.near_k_mass && rec_idx != best &&
               detail::disk_order(challenger.annulus.outer, incumbent.annulus.outer)) {
      best = rec_idx;
    }
  }
  out.anchor = g0.annuli[best];

  const PlanarAnnulus& anchor = out.anchor->annulus;
  const double size_ratio = anchor.outer.radius / anchor.inner.radius;
  const double diam = 2.0 * anchor.outer.radius;
  if (size_ratio <= opts.comparability_threshold) {
    // Comparable boundaries: anchor at the inner boundary center of the
    // deepest doubled annulus.
    PlanarAnnulus deepest = anchor;
    for (const auto& a : current)
      if (a.record == best && out.achieved_level > 0 && level_defined(g0, a, out.achieved_level))
        deepest = level_region(g0, a, out.achieved_level);
    out.kept_piece = anchor;
    out.reparam = AffineMap(deepest.inner.center, diam);
  } else {
    // Growing modulus: split by the shortest circle and keep the side with
    // the near-K mass.
    out.split_by_circle = true;
    out.circle = shortest_circle(f, anchor, opts.circle_candidates, opts.quadrature);
    const PlanarDisk middle(anchor.inner.center, out.circle.radius);
    const PlanarAnnulus minus(middle, anchor.inner);
    const PlanarAnnulus plus(anchor.outer, middle);
    const double mass_minus = mu.mass_in(middle) - mu.mass_in(anchor.inner);
    const double mass_plus = (mu.mass_in(anchor.outer) - mu.mass_in(anchor.inner)) - mass_minus;
    const PlanarAnnulus& keep = (mass_minus > mass_plus) ? minus : plus;
    out.kept_piece = keep;
    out.reparam = AffineMap(keep.inner.center, diam);
  }
  (void)k;
  (void)n_index;
  return out;
}

}  // namespace ahlfors
