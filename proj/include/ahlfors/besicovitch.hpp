// Germ construction: smallest unit-mass disks at candidate centers, greedy
// Besicovitch classification into disjoint subfamilies, and selection of the
// consistent family.
#pragma once

#include <string>
#include <vector>

#include "ahlfors/geometry.hpp"

namespace ahlfors {

struct DiskFamily {
  std::vector<PlanarDisk> disks;
  std::vector<double> masses;     // per-disk mu-mass, parallel to disks
  double consistency_ratio = 0;   // cardinality / a_n
  std::string provenance;

  size_t size() const { return disks.size(); }
  double total_mass() const;
};

// Smallest disk centered at `center` of mu-mass >= target, found by monotone
// bisection on the radius. The returned disk has mass in
// [target, target + mass granularity]. Degenerate atomic measures collapse to
// `radius_floor`; `degenerate`, when non-null, reports that case.
PlanarDisk smallest_unit_mass_disk(const MeasureIndex& mu, Complex center, double mass_target,
                                   double radius_floor = 1e-9, bool* degenerate = nullptr);
PlanarDisk smallest_unit_mass_disk(const PlanarMeasure& mu, Complex center, double mass_target,
                                   double radius_floor = 1e-9, bool* degenerate = nullptr);

// Hexagonal grid of candidate centers inside the disk, pitch chosen so that
// at least `min_count` candidates exist.
std::vector<Complex> hex_candidate_centers(const PlanarDisk& within, long min_count);

// Greedy first-fit classification by decreasing radius: each disk joins the
// first subfamily it is disjoint from, a new subfamily opening when needed.
// Throws geometry_error when more than `max_subfamilies` open up.
std::vector<DiskFamily> besicovitch_extract(const DiskFamily& candidates, int max_subfamilies);

// The subfamily of maximal total mass; its consistency ratio is set against
// the supplied a_n. Throws when every subfamily is empty.
DiskFamily select_consistent_family(const std::vector<DiskFamily>& subfamilies, double a_n);

// Germ pipeline: unit-mass disks at hex candidates over mu, Besicovitch
// classification, and selection. candidate_factor * a_n candidate centers.
struct GermOptions {
  double mass_target = 1.0;
  double candidate_factor = 4.0;
  int max_subfamilies = 19;
  double radius_floor = 1e-9;
};

struct GermExtraction {
  DiskFamily family;            // the selected consistent family F_n
  int subfamily_count = 0;
  long degenerate_candidates = 0;
  double total_near_k_mass = 0;  // mu total
};

GermExtraction extract_germs(const PlanarMeasure& mu, const PlanarDisk& domain, double a_n,
                             const GermOptions& opts = {});

}  // namespace ahlfors
