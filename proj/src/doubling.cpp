#include "ahlfors/doubling.hpp"

#include <algorithm>
#include <cmath>

#include "ahlfors/limits.hpp"
#include "disk_grid.hpp"

namespace ahlfors {

std::string to_string(LimitDomain d) { return d == LimitDomain::C ? "C" : "C-star"; }

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

FilterOutcome budget_filter(const DiskFamily& family, const std::vector<double>& records,
                            double threshold, double bound, const char* what) {
  if (records.size() != family.size())
    throw std::invalid_argument(std::string(what) + ": one record per disk required");
  FilterOutcome out;
  out.threshold = threshold;
  out.bound = bound;
  std::vector<size_t> keep;
  for (size_t i = 0; i < family.size(); ++i) {
    if (threshold > 0 && records[i] >= threshold) {
      ++out.removed;
    } else {
      keep.push_back(i);
      out.kept_records.push_back(records[i]);
    }
  }
  if ((double)out.removed > bound)
    throw geometry_error(std::string(what) + ": removal count " + std::to_string(out.removed) +
                         " exceeds the counting bound " + std::to_string(bound));
  out.kept = subset(family, keep);
  return out;
}

}  // namespace

FilterOutcome area_budget_filter(const DiskFamily& family, const std::vector<double>& doubled_areas,
                                 double eps, double a_n, double tol) {
  if (!(eps > 0)) throw std::invalid_argument("area_budget_filter: eps must be positive");
  return budget_filter(family, doubled_areas, 2.0 / eps, 0.5 * eps * a_n * (1.0 + tol),
                       "area_budget_filter");
}

FilterOutcome area_budget_filter(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                 double eps, double a_n, const QuadratureOptions& opts,
                                 double tol) {
  std::vector<double> areas;
  areas.reserve(family.size());
  for (const auto& d : family.disks)
    areas.push_back(area(f, scale_disk(d, lambda), /*clip_to_domain=*/true, opts));
  return area_budget_filter(family, areas, eps, a_n, tol);
}

FilterOutcome length_budget_filter(const DiskFamily& family,
                                   const std::vector<double>& doubled_lengths, double eps,
                                   double a_n, double l_n, double tol) {
  if (!(eps > 0)) throw std::invalid_argument("length_budget_filter: eps must be positive");
  const double threshold = (l_n > 0 && a_n > 0) ? 4.0 * l_n / (eps * a_n) : 0.0;
  return budget_filter(family, doubled_lengths, threshold, 0.25 * eps * a_n * (1.0 + tol),
                       "length_budget_filter");
}

FilterOutcome length_budget_filter(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                   double eps, double a_n, double l_n,
                                   const QuadratureOptions& opts, double tol) {
  std::vector<double> lengths;
  lengths.reserve(family.size());
  for (const auto& d : family.disks)
    lengths.push_back(domain_boundary_length_in(f, scale_disk(d, lambda), opts));
  return length_budget_filter(family, lengths, eps, a_n, l_n, tol);
}

ConfinementReport confinement_check(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                    const CompactSet& k, int n_index,
                                    const QuadratureOptions& opts) {
  ConfinementReport report;
  const PlanarDisk& dom = f.domain();
  for (size_t i = 0; i < family.size(); ++i) {
    const PlanarDisk scaled = scale_disk(family.disks[i], lambda);
    if (dom.contains_closure_of(scaled)) continue;
    report.confined = false;
    ConfinementViolation v;
    v.index = i;
    v.scaled_disk = scaled;
    v.boundary_image_length = domain_boundary_length_in(f, scaled, opts);
    LimitOptions lopts;
    lopts.quadrature = opts;
    const auto probe = boundary_collapse_probe(f, scaled, k, n_index, lopts);
    v.near_k_area_persists = probe.status == CollapseStatus::Persists;
    v.persisting_mass = probe.near_k_mass_persisting;
    report.violations.push_back(std::move(v));
  }
  return report;
}

DoubleExtraction disjoint_double_extract(const DiskFamily& family, double a_n, double eps_floor) {
  if (family.size() == 0)
    throw std::invalid_argument("disjoint_double_extract: empty family");
  std::vector<PlanarDisk> doubles;
  doubles.reserve(family.size());
  for (const auto& d : family.disks) doubles.push_back(scale_disk(d, 2.0));
  DoubleExtraction out;
  out.kept_indices = detail::greedy_disjoint_subset(doubles);
  if ((double)out.kept_indices.size() >= eps_floor * a_n) {
    out.distributed = true;
    out.kept = subset(family, out.kept_indices);
    out.kept.consistency_ratio = (a_n > 0) ? (double)out.kept.size() / a_n : 0;
  } else {
    out.distributed = false;
    out.concentrated_input = family;
  }
  return out;
}

DoublingResult iterate_doubling(const DiskFamily& germs, const HoloDiskMap& f,
                                const MeasureIndex& mu, double a_n, double l_n,
                                const CompactSet& k, int n_index, const DoublingOptions& opts) {
  if (germs.size() == 0)
    throw std::invalid_argument("iterate_doubling: empty germ family");

  DoublingResult result;
  DiskFamily current = germs;

  for (int level = 1; level <= opts.max_level; ++level) {
    const double lambda = std::pow(2.0, level);
    LevelRecord rec;
    rec.level = level;

    // Disjointness of the level-k doubles: scale the family to 2^{k-1} and
    // double it, keeping at least 1/keep_fraction_divisor of the family.
    DiskFamily half_scaled = current;
    for (auto& d : half_scaled.disks) d = scale_disk(d, lambda / 2.0);
    const double floor_count = (double)current.size() / opts.keep_fraction_divisor;
    const auto extraction = disjoint_double_extract(half_scaled, a_n, floor_count / a_n);
    if (!extraction.distributed) {
      result.status = DoublingStatus::Concentrated;
      result.concentrated_at_level = level;
      result.concentrated_family = current;
      break;
    }
    DiskFamily survivors = subset(current, extraction.kept_indices);

    const double eps = (double)survivors.size() / a_n;
    rec.eps = eps;

    // Area budget on the doubled images.
    std::vector<double> areas;
    areas.reserve(survivors.size());
    for (const auto& d : survivors.disks)
      areas.push_back(area(f, scale_disk(d, lambda), true, opts.quadrature));
    auto area_pass = area_budget_filter(survivors, areas, eps, a_n, opts.counting_tol);
    rec.removed_by_area = area_pass.removed;
    survivors = std::move(area_pass.kept);
    std::vector<double> kept_areas = std::move(area_pass.kept_records);

    // Length budget on the boundary arcs of the doubled disks.
    std::vector<double> lengths;
    lengths.reserve(survivors.size());
    for (const auto& d : survivors.disks) {
      const PlanarDisk scaled = scale_disk(d, lambda);
      // Interior disks never meet the boundary circle.
      if (f.domain().contains_closure_of(scaled)) {
        lengths.push_back(0.0);
      } else {
        lengths.push_back(domain_boundary_length_in(f, scaled, opts.quadrature));
      }
    }
    auto length_pass = length_budget_filter(survivors, lengths, eps, a_n, l_n, opts.counting_tol);
    rec.removed_by_length = length_pass.removed;
    {
      // keep areas aligned with the surviving disks
      std::vector<double> aligned;
      size_t j = 0;
      for (size_t i = 0; i < survivors.size(); ++i) {
        if (length_pass.threshold > 0 && lengths[i] >= length_pass.threshold) continue;
        aligned.push_back(kept_areas[i]);
        (void)j;
      }
      kept_areas = std::move(aligned);
    }
    survivors = std::move(length_pass.kept);

    // Confinement: discard violators, recording the probe outcome.
    const auto confinement = confinement_check(survivors, f, lambda, k, n_index, opts.quadrature);
    rec.confinement_violations = (long)confinement.violations.size();
    if (!confinement.confined) {
      std::vector<size_t> keep;
      std::vector<bool> bad(survivors.size(), false);
      for (const auto& v : confinement.violations) bad[v.index] = true;
      std::vector<double> kept_areas2;
      for (size_t i = 0; i < survivors.size(); ++i)
        if (!bad[i]) {
          keep.push_back(i);
          kept_areas2.push_back(kept_areas[i]);
        }
      survivors = subset(survivors, keep);
      kept_areas = std::move(kept_areas2);
    }

    if (survivors.size() == 0) {
      result.status = DoublingStatus::Exhausted;
      result.levels.push_back(rec);
      break;
    }

    rec.cardinality = (long)survivors.size();
    rec.budget_ck = kept_areas.empty() ? 0.0 : *std::max_element(kept_areas.begin(), kept_areas.end());
    result.budget_table.push_back(rec.budget_ck);
    result.levels.push_back(rec);
    result.achieved_level = level;
    current = std::move(survivors);
    current.consistency_ratio = (double)current.size() / a_n;
    result.status = DoublingStatus::Distributed;
  }

  if (result.status == DoublingStatus::Distributed) {
    result.final_family = current;
    // Diagonal selection: the survivors of the deepest level are exactly the
    // disks surviving the most levels; break ties by near-K mass, then by the
    // deterministic disk order.
    size_t best = 0;
    double best_mass = -1;
    for (size_t i = 0; i < current.size(); ++i) {
      const double m = mu.mass_in(current.disks[i]);
      if (m > best_mass ||
          (m == best_mass && detail::disk_order(current.disks[i], current.disks[best]))) {
        best = i;
        best_mass = m;
      }
    }
    result.selected_disk = current.disks[best];
    result.reparam = AffineMap::disk_onto(current.disks[best]);
  }
  return result;
}

}  // namespace ahlfors
