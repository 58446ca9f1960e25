// The distributed case: budget filters on doubled disks, confinement in the
// source disk, disjoint-doubling extraction, iteration to level 2^k, and the
// reparametrization sequence whose limit domain is C.
#pragma once

#include <optional>

#include "ahlfors/besicovitch.hpp"
#include "ahlfors/diskmaps.hpp"

namespace ahlfors {

enum class LimitDomain { C, CStar };

std::string to_string(LimitDomain d);

// The anchor object of one index: the selected germ disk (domain C) or the
// selected annulus (domain C*).
struct ReparamEntry {
  AffineMap reparam;
  std::optional<PlanarDisk> anchor_disk;
  std::optional<PlanarAnnulus> anchor_annulus;
  int achieved_level = 0;
  std::vector<double> budget_table;  // C_k per level (1-based level k at [k-1])
};

struct ReparamSequence {
  LimitDomain domain = LimitDomain::C;
  std::vector<ReparamEntry> entries;
};

struct FilterOutcome {
  DiskFamily kept;
  std::vector<double> kept_records;  // per-kept-disk doubled area / length
  long removed = 0;
  double threshold = 0;
  double bound = 0;  // the counting bound the removal count was checked against
};

// Removes disks whose recorded doubled-image area is >= 2/eps. Asserts the
// count of removals against (eps/2) a_n (1 + tol); a violation means the
// areas are inconsistent with disjoint unit-mass carriers.
FilterOutcome area_budget_filter(const DiskFamily& family, const std::vector<double>& doubled_areas,
                                 double eps, double a_n, double tol = 1e-6);
FilterOutcome area_budget_filter(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                 double eps, double a_n, const QuadratureOptions& opts = {},
                                 double tol = 1e-6);

// Removes disks whose doubled boundary-arc image length is >= 4 l_n/(eps a_n);
// removal count checked against (eps/4) a_n (1 + tol).
FilterOutcome length_budget_filter(const DiskFamily& family,
                                   const std::vector<double>& doubled_lengths, double eps,
                                   double a_n, double l_n, double tol = 1e-6);
FilterOutcome length_budget_filter(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                   double eps, double a_n, double l_n,
                                   const QuadratureOptions& opts = {}, double tol = 1e-6);

struct ConfinementViolation {
  size_t index = 0;
  PlanarDisk scaled_disk;
  double boundary_image_length = 0;
  bool near_k_area_persists = false;
  double persisting_mass = 0;
};

struct ConfinementReport {
  bool confined = true;
  std::vector<ConfinementViolation> violations;
};

// Checks lambda * d within the map domain for every disk; violators are
// probed with the half-disk boundary detector (limits module) and reported.
ConfinementReport confinement_check(const DiskFamily& family, const HoloDiskMap& f, double lambda,
                                    const CompactSet& k, int n_index,
                                    const QuadratureOptions& opts = {});

struct DoubleExtraction {
  bool distributed = false;
  DiskFamily kept;                // doubles pairwise disjoint (distributed case)
  std::vector<size_t> kept_indices;
  DiskFamily concentrated_input;  // carried along when extraction fails
};

// Greedy independent set in the intersection graph of the doubled disks,
// radius descending with lexicographic tiebreak. Distributed when at least
// eps_floor * a_n survive.
DoubleExtraction disjoint_double_extract(const DiskFamily& family, double a_n, double eps_floor);

struct LevelRecord {
  int level = 0;
  long cardinality = 0;
  double budget_ck = 0;
  long removed_by_area = 0;
  long removed_by_length = 0;
  long confinement_violations = 0;
  double eps = 0;
};

struct DoublingOptions {
  int max_level = 4;
  // Extraction must keep at least 1/keep_fraction_divisor of the current
  // family, else the concentrated branch is signalled.
  double keep_fraction_divisor = 8.0;
  double counting_tol = 1e-6;
  QuadratureOptions quadrature{};
};

enum class DoublingStatus { Distributed, Concentrated, Exhausted };

struct DoublingResult {
  DoublingStatus status = DoublingStatus::Exhausted;
  int achieved_level = 0;
  int concentrated_at_level = 0;     // set when status == Concentrated
  std::vector<LevelRecord> levels;
  DiskFamily final_family;           // survivors at the deepest level
  DiskFamily concentrated_family;    // the family to hand to the concentration module
  std::optional<PlanarDisk> selected_disk;
  std::optional<AffineMap> reparam;
  std::vector<double> budget_table;
};

// Runs the doubling loop for one index: extract disjoint doubles, filter by
// area and length budgets, confine, repeat. On success selects the germ
// surviving the most levels (ties by near-K mass, then deterministic order)
// and emits the affine map of the unit disk onto it.
DoublingResult iterate_doubling(const DiskFamily& germs, const HoloDiskMap& f,
                                const MeasureIndex& mu, double a_n, double l_n,
                                const CompactSet& k, int n_index, const DoublingOptions& opts);

}  // namespace ahlfors
