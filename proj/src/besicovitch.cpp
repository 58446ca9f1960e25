#include "ahlfors/besicovitch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "disk_grid.hpp"

namespace ahlfors {

using detail::DiskGrid;
using detail::disk_order;

double DiskFamily::total_mass() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0);
}

PlanarDisk smallest_unit_mass_disk(const MeasureIndex& mu, Complex center, double mass_target,
                                   double radius_floor, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (mu.total_mass() < mass_target)
    throw std::invalid_argument("smallest_unit_mass_disk: total mass below target");

  double lo = radius_floor;
  double hi = mu.enclosing_radius(center);
  const double granularity = std::max(mu.max_weight(), 1e-300);

  if (mu.mass_in(PlanarDisk(center, lo)) >= mass_target) {
    // Atomic mass at the center; the infimum radius is zero.
    if (degenerate) *degenerate = true;
    return PlanarDisk(center, radius_floor);
  }
  double mass_lo = mu.mass_in(PlanarDisk(center, lo));
  double mass_hi = mu.mass_in(PlanarDisk(center, hi));
  if (mass_hi < mass_target) {
    // Samples exactly on the enclosing circle are excluded by the open-disk
    // convention; widen once.
    hi *= 1.0 + 1e-9;
    mass_hi = mu.mass_in(PlanarDisk(center, hi));
  }
  for (int iter = 0; iter < 200; ++iter) {
    if (mass_hi - mass_lo <= granularity && mass_hi >= mass_target) break;
    if (hi - lo <= radius_floor) break;
    const double mid = 0.5 * (lo + hi);
    const double m = mu.mass_in(PlanarDisk(center, mid));
    if (m >= mass_target) {
      hi = mid;
      mass_hi = m;
    } else {
      lo = mid;
      mass_lo = m;
    }
  }
  return PlanarDisk(center, hi);
}

PlanarDisk smallest_unit_mass_disk(const PlanarMeasure& mu, Complex center, double mass_target,
                                   double radius_floor, bool* degenerate) {
  MeasureIndex index(mu);
  return smallest_unit_mass_disk(index, center, mass_target, radius_floor, degenerate);
}

std::vector<Complex> hex_candidate_centers(const PlanarDisk& within, long min_count) {
  if (min_count < 1) min_count = 1;
  // Hex cell area = sqrt(3)/2 * pitch^2; pick pitch so the disk holds >= min_count.
  double pitch = std::sqrt(2.0 * kPi * within.radius * within.radius /
                           (std::sqrt(3.0) * (double)min_count));
  std::vector<Complex> pts;
  for (int attempt = 0; attempt < 8; ++attempt) {
    pts.clear();
    const double dy = pitch * std::sqrt(3.0) / 2.0;
    const int rows = (int)std::ceil(within.radius / dy) + 1;
    for (int j = -rows; j <= rows; ++j) {
      const double y = j * dy;
      const double off = (j & 1) ? 0.5 * pitch : 0.0;
      const int cols = (int)std::ceil(within.radius / pitch) + 1;
      for (int i = -cols; i <= cols; ++i) {
        const Complex p = within.center + Complex(i * pitch + off, y);
        if (within.contains(p)) pts.push_back(p);
      }
    }
    if ((long)pts.size() >= min_count) return pts;
    pitch *= 0.85;
  }
  return pts;
}

std::vector<DiskFamily> besicovitch_extract(const DiskFamily& candidates, int max_subfamilies) {
  const size_t n = candidates.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return disk_order(candidates.disks[a], candidates.disks[b]);
  });

  double cell = 1e-12;
  for (const auto& d : candidates.disks) cell = std::max(cell, d.radius);

  std::vector<DiskFamily> subfamilies;
  std::vector<DiskGrid> grids;
  for (size_t idx : order) {
    const PlanarDisk& d = candidates.disks[idx];
    bool placed = false;
    for (size_t s = 0; s < subfamilies.size(); ++s) {
      if (!grids[s].conflicts(d, subfamilies[s].disks)) {
        grids[s].insert(subfamilies[s].disks.size(), d);
        subfamilies[s].disks.push_back(d);
        subfamilies[s].masses.push_back(candidates.masses.empty() ? 0.0 : candidates.masses[idx]);
        placed = true;
        break;
      }
    }
    if (!placed) {
      if ((int)subfamilies.size() >= max_subfamilies)
        throw geometry_error(
            "besicovitch_extract: subfamily count exceeds the configured bound; "
            "candidate centers violate the packing precondition");
      subfamilies.emplace_back();
      subfamilies.back().provenance = candidates.provenance + "/besicovitch";
      grids.emplace_back(cell);
      grids.back().insert(0, d);
      subfamilies.back().disks.push_back(d);
      subfamilies.back().masses.push_back(candidates.masses.empty() ? 0.0 : candidates.masses[idx]);
    }
  }
  return subfamilies;
}

DiskFamily select_consistent_family(const std::vector<DiskFamily>& subfamilies, double a_n) {
  const DiskFamily* best = nullptr;
  double best_mass = -1;
  for (const auto& f : subfamilies) {
    if (f.disks.empty()) continue;
    const double m = f.total_mass();
    if (m > best_mass) {
      best_mass = m;
      best = &f;
    }
  }
  if (!best) throw std::invalid_argument("select_consistent_family: all subfamilies empty");
  DiskFamily out = *best;
  out.consistency_ratio = (a_n > 0) ? (double)out.size() / a_n : 0.0;
  return out;
}

GermExtraction extract_germs(const PlanarMeasure& mu, const PlanarDisk& domain, double a_n,
                             const GermOptions& opts) {
  GermExtraction out;
  MeasureIndex index(mu);
  out.total_near_k_mass = index.total_mass();
  if (out.total_near_k_mass < opts.mass_target)
    throw std::invalid_argument("extract_germs: measure mass below the unit target");

  const long min_candidates = (long)std::ceil(opts.candidate_factor * std::max(a_n, 1.0));
  const auto centers = hex_candidate_centers(domain, min_candidates);

  DiskFamily candidates;
  candidates.provenance = "germs";
  candidates.disks.reserve(centers.size());
  candidates.masses.reserve(centers.size());
  for (const Complex& c : centers) {
    bool degenerate = false;
    PlanarDisk d = smallest_unit_mass_disk(index, c, opts.mass_target, opts.radius_floor,
                                           &degenerate);
    if (degenerate) ++out.degenerate_candidates;
    candidates.masses.push_back(index.mass_in(d));
    candidates.disks.push_back(std::move(d));
  }

  auto subfamilies = besicovitch_extract(candidates, opts.max_subfamilies);
  out.subfamily_count = (int)subfamilies.size();
  out.family = select_consistent_family(subfamilies, a_n);
  return out;
}

}  // namespace ahlfors
