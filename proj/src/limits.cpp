#include "ahlfors/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace ahlfors {

namespace {

double resolve_epsilon(const LimitOptions& opts, const TargetModel& target) {
  if (opts.epsilon > 0) return opts.epsilon;
  return target.injectivity_scale() / 8.0;
}

// Dyadic refinement of square cells: flags cells whose image area stays above
// eps^2 down to the finest scale. Returns one point per cluster of adjacent
// flagged cells.
struct ExplosionScan {
  std::vector<ExplosionPoint> points;
  std::vector<std::pair<Complex, double>> flagged;  // center, half-diagonal
};

ExplosionScan scan_explosions(const std::function<double(Complex, double)>& disk_area,
                              const std::function<bool(Complex)>& inside, Complex lo, Complex hi,
                              double cell0, double eps_sq, int depth) {
  ExplosionScan out;
  struct Cell {
    Complex center;
    double half;
    int depth;
  };
  std::vector<Cell> work;
  const int nx = std::max(1, (int)std::ceil((hi.real() - lo.real()) / cell0));
  const int ny = std::max(1, (int)std::ceil((hi.imag() - lo.imag()) / cell0));
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      Cell c{Complex(lo.real() + (ix + 0.5) * cell0, lo.imag() + (iy + 0.5) * cell0), cell0 / 2, 0};
      if (inside(c.center)) work.push_back(c);
    }
  std::vector<Cell> final_cells;
  while (!work.empty()) {
    Cell c = work.back();
    work.pop_back();
    const double r = c.half * std::sqrt(2.0);
    const double mass = disk_area(c.center, r);
    if (mass <= eps_sq) continue;
    if (c.depth >= depth) {
      final_cells.push_back(c);
      continue;
    }
    const double h = c.half / 2;
    for (int q = 0; q < 4; ++q) {
      Cell sub{c.center + Complex((q & 1) ? h : -h, (q & 2) ? h : -h), h, c.depth + 1};
      work.push_back(sub);
    }
  }
  // Cluster adjacent flagged cells into single explosion points.
  std::vector<bool> used(final_cells.size(), false);
  for (size_t i = 0; i < final_cells.size(); ++i) {
    if (used[i]) continue;
    std::vector<size_t> cluster{i};
    used[i] = true;
    for (size_t c = 0; c < cluster.size(); ++c)
      for (size_t j = 0; j < final_cells.size(); ++j) {
        if (used[j]) continue;
        if (std::abs(final_cells[cluster[c]].center - final_cells[j].center) <=
            3.0 * final_cells[i].half) {
          used[j] = true;
          cluster.push_back(j);
        }
      }
    // Representative: the cell of largest mass in the cluster.
    size_t best = cluster.front();
    double best_mass = -1;
    for (size_t j : cluster) {
      const double m = disk_area(final_cells[j].center, final_cells[j].half * std::sqrt(2.0));
      if (m > best_mass) {
        best_mass = m;
        best = j;
      }
    }
    out.points.push_back({final_cells[best].center, best_mass});
    for (size_t j : cluster)
      out.flagged.push_back({final_cells[j].center, final_cells[j].half * std::sqrt(2.0)});
  }
  return out;
}

bool near_flagged(const std::vector<std::pair<Complex, double>>& flagged, Complex z) {
  for (const auto& [c, r] : flagged)
    if (std::abs(z - c) <= 2.0 * r) return true;
  return false;
}

// Pullback area of f over `region` landing in the n-th neighborhood of K,
// midpoint cells at the given budget.
double area_in_neighborhood(const HoloDiskMap& f, const Region& region, const CompactSet& k,
                            int n, long budget) {
  Complex lo, hi;
  std::function<bool(Complex)> inside;
  if (const auto* d = std::get_if<PlanarDisk>(&region)) {
    lo = d->center - Complex(d->radius, d->radius);
    hi = d->center + Complex(d->radius, d->radius);
    const PlanarDisk dd = *d;
    inside = [dd](Complex z) { return dd.contains(z); };
  } else if (const auto* a = std::get_if<PlanarAnnulus>(&region)) {
    lo = a->outer.center - Complex(a->outer.radius, a->outer.radius);
    hi = a->outer.center + Complex(a->outer.radius, a->outer.radius);
    const PlanarAnnulus aa = *a;
    inside = [aa](Complex z) { return aa.contains(z); };
  } else {
    const auto& hd = std::get<HalfDisk>(region);
    lo = hd.disk.center - Complex(hd.disk.radius, hd.disk.radius);
    hi = hd.disk.center + Complex(hd.disk.radius, hd.disk.radius);
    const HalfDisk h = hd;
    inside = [h](Complex z) {
      if (!h.disk.contains(z)) return false;
      const Complex rel = (z - h.disk.center) * std::polar(1.0, -h.axis_angle);
      return rel.imag() > 0;
    };
  }
  const PlanarDisk dom = f.domain();
  const double span = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
  const double h = span / std::sqrt((double)std::max<long>(budget, 16));
  const int nx = (int)std::ceil((hi.real() - lo.real()) / h);
  const int ny = (int)std::ceil((hi.imag() - lo.imag()) / h);
  const TargetModel& target = f.target();
  double total = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Complex z(lo.real() + (ix + 0.5) * h, lo.imag() + (iy + 0.5) * h);
      if (!inside(z) || !dom.contains(z)) continue;
      if (!in_neighborhood(target, k, n, f.value(z))) continue;
      total += f.derivative_norm_sq(z) * h * h;
    }
  return total;
}

struct CompactSpec {
  double inner = 0;  // 0 for disks
  double outer = 1;
};

std::vector<Complex> compact_grid(const CompactSpec& c, int per_axis) {
  std::vector<Complex> pts;
  if (c.inner <= 0) {
    const double h = 2.0 * c.outer / per_axis;
    for (int iy = 0; iy < per_axis; ++iy)
      for (int ix = 0; ix < per_axis; ++ix) {
        const Complex z(-c.outer + (ix + 0.5) * h, -c.outer + (iy + 0.5) * h);
        if (std::abs(z) <= c.outer) pts.push_back(z);
      }
  } else {
    const int nr = std::max(4, per_axis / 2), nt = std::max(8, per_axis * 2);
    const double span = std::log(c.outer / c.inner);
    for (int ir = 0; ir < nr; ++ir) {
      const double rho = c.inner * std::exp(span * (ir + 0.5) / nr);
      for (int it = 0; it < nt; ++it) {
        const double t = 2.0 * kPi * (it + 0.5) / nt;
        pts.push_back(std::polar(rho, t));
      }
    }
  }
  return pts;
}

}  // namespace

long bubble_count_bound(double area_bound, double rational_curve_area_floor) {
  if (!(rational_curve_area_floor > 0))
    throw std::invalid_argument("bubble_count_bound: the area floor must be positive");
  return (long)std::floor(area_bound / rational_curve_area_floor);
}

LimitReport detect_convergence(const ReparamSequence& seq, const DiskSequence& maps,
                               const CompactSet& k, const LimitOptions& opts) {
  if (seq.entries.empty() || maps.entries.empty() || seq.entries.size() != maps.entries.size())
    throw std::invalid_argument("detect_convergence: sequence/maps size mismatch");

  LimitReport report;
  report.domain = seq.domain;
  const TargetModel& target = maps.entries.front().map.target();
  const double eps = resolve_epsilon(opts, target);
  report.explosion_threshold = eps * eps;
  const bool torus = target.kind() == TargetKind::FlatTorus;

  // Compact exhaustion in limit coordinates.
  std::vector<CompactSpec> compacts;
  if (seq.domain == LimitDomain::C) {
    int max_level = 0;
    for (const auto& e : seq.entries) max_level = std::max(max_level, e.achieved_level);
    for (int j = 0; (1 << j) <= std::max(1, 1 << max_level); ++j)
      compacts.push_back({0.0, (double)(1 << j)});
  } else {
    double ri = std::numeric_limits<double>::infinity(), ro = 0;
    for (const auto& e : seq.entries) {
      if (!e.anchor_annulus) continue;
      const auto& piece = *e.anchor_annulus;
      const Complex tau = e.reparam.translation;
      const double s = e.reparam.scale;
      const double inner_gap =
          std::max(piece.inner.radius - std::abs(tau - piece.inner.center), s * 1e-9) / s;
      const double outer_reach = (std::abs(piece.outer.center - tau) + piece.outer.radius) / s;
      ri = std::min(ri, inner_gap);
      ro = std::max(ro, outer_reach);
    }
    if (!(ro > 0)) throw std::invalid_argument("detect_convergence: no anchor annuli");
    for (int j = 0; j < 3; ++j)
      compacts.push_back({ri / (1 << j), ro * (1 << j)});
  }

  const QuadratureOptions cell_quad = [&] {
    QuadratureOptions q = opts.quadrature;
    q.base_angular = 16;
    return q;
  }();

  for (size_t ci = 0; ci < compacts.size(); ++ci) {
    const CompactSpec& comp = compacts[ci];
    CompactReport crep;
    crep.inner_radius = comp.inner;
    crep.outer_radius = comp.outer;

    for (size_t n = 0; n < seq.entries.size(); ++n) {
      const auto& e = seq.entries[n];
      const auto& dom = maps.entries[n].map.domain();
      const double reach = std::abs(e.reparam.translation - dom.center) + e.reparam.scale * comp.outer;
      if (reach <= dom.radius * (1.0 + 1e-9)) crep.indices_defined.push_back((int)n);
    }
    if (crep.indices_defined.empty()) {
      report.compacts.push_back(crep);
      continue;
    }

    const auto grid = compact_grid(comp, opts.grid_per_axis);

    // Explosion scan under the last defined map.
    const int last = crep.indices_defined.back();
    const auto& flast = maps.entries[last].map;
    const AffineMap rlast = seq.entries[last].reparam;
    auto disk_area = [&](Complex center, double radius) {
      const PlanarDisk source(rlast(center), rlast.scale * radius);
      return area_result(flast, source, true, cell_quad).value;
    };
    std::function<bool(Complex)> inside;
    if (comp.inner <= 0) {
      const double R = comp.outer;
      inside = [R](Complex z) { return std::abs(z) <= R; };
    } else {
      const double a = comp.inner, b = comp.outer;
      inside = [a, b](Complex z) {
        const double r = std::abs(z);
        return r >= a && r <= b;
      };
    }
    const double cell0 = 2.0 * comp.outer / std::max(4, opts.grid_per_axis / 2);
    ExplosionScan scan =
        scan_explosions(disk_area, inside, Complex(-comp.outer, -comp.outer),
                        Complex(comp.outer, comp.outer), cell0, eps * eps, opts.refine_depth);

    if (ci == 0) {
      for (const auto& p : scan.points) report.explosions.push_back(p);
    } else {
      // Outer compacts may re-discover the same point; keep new ones only.
      for (const auto& p : scan.points) {
        bool known = false;
        for (const auto& q : report.explosions)
          if (std::abs(p.location - q.location) < 4.0 * cell0 / (1 << opts.refine_depth))
            known = true;
        if (!known) report.explosions.push_back(p);
      }
    }

    // Mass conservation: each explosion carries at least eps^2 of the area
    // budget over this compact.
    const double total_area = disk_area(Complex(0, 0), comp.outer);
    if ((double)scan.points.size() * eps * eps > total_area * (1.0 + 1e-6) + 1e-12)
      throw geometry_error("detect_convergence: explosion count violates the area budget");

    // Cauchy test over the grid, away from flagged cells, using the best
    // window of three defined indices (two for short sequences).
    std::vector<Complex> test_pts;
    for (const auto& z : grid)
      if (!near_flagged(scan.flagged, z)) test_pts.push_back(z);

    auto sup_pair = [&](int i, int j, bool adjusted) {
      double sup = 0;
      const auto& fi = maps.entries[i].map;
      const auto& fj = maps.entries[j].map;
      const AffineMap& riM = seq.entries[i].reparam;
      const AffineMap& rjM = seq.entries[j].reparam;
      std::array<Complex, 2> base{Complex(0, 0), Complex(0, 0)};
      bool base_set = false;
      for (const auto& z : test_pts) {
        const TargetPoint a = fi.value(riM(z));
        const TargetPoint b = fj.value(rjM(z));
        if (adjusted && torus) {
          std::array<Complex, 2> diff{a.coords[0] - b.coords[0], a.coords[1] - b.coords[1]};
          if (!base_set) {
            base = diff;
            base_set = true;
          }
          std::array<Complex, 2> rel{diff[0] - base[0], diff[1] - base[1]};
          sup = std::max(sup, target.lattice_distance(rel));
        } else {
          sup = std::max(sup, target.distance(a, b));
        }
      }
      return sup;
    };

    const auto& defined = crep.indices_defined;
    double best_raw = std::numeric_limits<double>::infinity();
    double best_adj = std::numeric_limits<double>::infinity();
    if (defined.size() == 1) {
      best_raw = best_adj = 0.0;  // nothing to compare; trivially stable
    } else if (defined.size() == 2) {
      best_raw = sup_pair(defined[0], defined[1], false);
      best_adj = torus ? sup_pair(defined[0], defined[1], true) : best_raw;
    } else {
      for (size_t x = 0; x < defined.size(); ++x)
        for (size_t y = x + 1; y < defined.size(); ++y)
          for (size_t z = y + 1; z < defined.size(); ++z) {
            const double raw = std::max(sup_pair(defined[x], defined[y], false),
                                        sup_pair(defined[y], defined[z], false));
            best_raw = std::min(best_raw, raw);
            if (torus) {
              const double adj = std::max(sup_pair(defined[x], defined[y], true),
                                          sup_pair(defined[y], defined[z], true));
              best_adj = std::min(best_adj, adj);
            }
          }
      if (!torus) best_adj = best_raw;
    }
    crep.sup_distance_raw = best_raw;
    crep.sup_distance_adjusted = best_adj;
    crep.cauchy = best_adj <= opts.cauchy_tol;
    report.compacts.push_back(crep);

    if (ci == 0) {
      report.sample_grid = grid;
      const auto& fl = maps.entries[last].map;
      for (const auto& z : grid) report.limit_values.push_back(fl.value(rlast(z)));
    }
  }

  bool all_cauchy = true;
  for (const auto& c : report.compacts)
    if (!c.indices_defined.empty() && !c.cauchy) all_cauchy = false;
  report.verdict = all_cauchy ? ConvergenceVerdict::Converged : ConvergenceVerdict::Inconclusive;

  report.k_intersection_area = k_intersection_area(seq, maps, k, &report.k_area_by_neighborhood,
                                                   opts);
  // Bubble budget over the anchor compact of the last entry.
  {
    const auto& e = seq.entries.back();
    if (!e.anchor_disk && !e.anchor_annulus)
      throw std::invalid_argument("detect_convergence: entry without anchor object");
    double bound = 0;
    if (!e.budget_table.empty()) bound = e.budget_table.back();
    if (bound <= 0) {
      const auto& f = maps.entries.back().map;
      const Region reg = e.anchor_disk ? Region(*e.anchor_disk) : Region(*e.anchor_annulus);
      bound = area_result(f, reg, true, cell_quad).value;
    }
    report.bubble_count_bound = bubble_count_bound(bound, opts.rational_curve_area_floor);
  }
  return report;
}

BoundaryProbeReport boundary_collapse_probe(const HoloDiskMap& f, const PlanarDisk& window,
                                            const CompactSet& k, int n_index,
                                            const LimitOptions& opts) {
  BoundaryProbeReport report;
  const double eps = resolve_epsilon(opts, f.target());
  report.boundary_image_length = domain_boundary_length_in(f, window, opts.quadrature);
  if (report.boundary_image_length >= opts.boundary_length_threshold) {
    report.status = CollapseStatus::PreconditionUnmet;
    return report;
  }

  const QuadratureOptions cell_quad = [&] {
    QuadratureOptions q = opts.quadrature;
    q.base_angular = 16;
    return q;
  }();
  const PlanarDisk dom = f.domain();
  auto disk_area = [&](Complex center, double radius) {
    return area_result(f, PlanarDisk(center, radius), true, cell_quad).value;
  };
  auto inside = [&](Complex z) { return window.contains(z) && dom.contains(z); };
  const double cell0 = window.radius / 4;
  ExplosionScan scan = scan_explosions(
      disk_area, inside, window.center - Complex(window.radius, window.radius),
      window.center + Complex(window.radius, window.radius), cell0, eps * eps, opts.refine_depth);
  report.explosions = scan.points;

  // Image diameter and near-K mass away from the concentration cells.
  std::vector<TargetPoint> values;
  const int per_axis = std::max(8, opts.grid_per_axis);
  const double h = 2.0 * window.radius / per_axis;
  double persisting_mass = 0;
  const TargetModel& target = f.target();
  for (int iy = 0; iy < per_axis; ++iy)
    for (int ix = 0; ix < per_axis; ++ix) {
      const Complex z = window.center +
                        Complex(-window.radius + (ix + 0.5) * h, -window.radius + (iy + 0.5) * h);
      if (!inside(z) || near_flagged(scan.flagged, z)) continue;
      const TargetPoint v = f.value(z);
      values.push_back(v);
      if (in_neighborhood(target, k, n_index, v))
        persisting_mass += f.derivative_norm_sq(z) * h * h;
    }
  double diameter = 0;
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t j = i + 1; j < values.size(); ++j)
      diameter = std::max(diameter, target.distance(values[i], values[j]));
  report.diameter_outside_bubbles = diameter;
  if (diameter <= opts.collapse_diameter_tol) {
    report.status = CollapseStatus::CollapsesToPoint;
  } else {
    report.status = CollapseStatus::Persists;
    report.near_k_mass_persisting = persisting_mass;
  }
  return report;
}

double k_intersection_area(const ReparamSequence& seq, const DiskSequence& maps,
                           const CompactSet& k, std::vector<double>* table,
                           const LimitOptions& opts) {
  if (seq.entries.empty()) throw std::invalid_argument("k_intersection_area: empty sequence");
  const auto& e = seq.entries.back();
  const auto& f = maps.entries.back().map;
  Region anchor = e.anchor_disk ? Region(*e.anchor_disk) : Region(*e.anchor_annulus);
  std::vector<double> values;
  const long budget = 200000;
  for (size_t m = 0; m < k.schedule.size(); ++m)
    values.push_back(area_in_neighborhood(f, anchor, k, (int)m, budget));
  if (table) *table = values;
  return values.back();
}

}  // namespace ahlfors
