// The concentrated case: scale-separation pruning of the quadrupled germs,
// incidence graph, arborescence rewriting, vertex census, lineage extraction
// and thinning, length-6 annulus blocks, annulus doubling, and the C*-limit
// reparametrization.
#pragma once

#include "ahlfors/doubling.hpp"

namespace ahlfors {

// Disjoint quarter-disks of radius >= r/64 inside 5d: an area count gives
// (5 * 64)^2 of them at most.
inline constexpr long kPackingDegreeBound = 320L * 320L;

struct PruneResult {
  DiskFamily kept;
  std::vector<size_t> kept_indices;
  long removed = 0;
  long max_conflict_degree = 0;
};

// Keeps only disks of pairwise "franchement" different size: after pruning,
// intersecting doubles imply a radius ratio of at least 16. Greedy maximal
// independent set in the conflict graph (radius descending). Throws
// geometry_error when a conflict degree exceeds the packing bound.
PruneResult scale_separation_prune(const DiskFamily& quadrupled);

struct IncidenceGraph {
  std::vector<PlanarDisk> vertices;
  std::vector<std::vector<int>> out_edges;  // d -> d' with d' smaller, intersecting
  long edge_count = 0;
};

IncidenceGraph build_incidence_graph(const DiskFamily& family);

enum class VertexClass { Terminal, Simple, Multiple };

struct Arborescence {
  std::vector<PlanarDisk> vertices;
  std::vector<int> parent;  // -1 at roots
  std::vector<std::vector<int>> children;
  std::vector<VertexClass> classes;

  long roots() const;
};

struct ArborizeOptions {
  // Exhaustive ancestor/descendant containment check up to this many
  // vertices, sampled above it.
  size_t exhaustive_limit = 150;
  int samples = 512;
  double max_failure_rate = 0.0;
  unsigned long long sample_seed = 12345;
};

// Rewrites the incidence graph into a forest: in increasing radius order,
// each vertex's in-edges are replaced by the chain of their origins sorted by
// decreasing radius. Verifies reachability => containment in 2 * ancestor.
Arborescence arborize(const IncidenceGraph& g, const ArborizeOptions& opts = {});

struct CensusResult {
  long terminal = 0;
  long simple = 0;
  long multiple = 0;
  double non_simple_fraction = 0;  // (t + m) / total
  bool mostly_simple = false;
};

// Exact counts; asserts the forest identity m <= t.
CensusResult census(const Arborescence& a, double a_n, double mostly_simple_threshold = 0.2);

struct Lineage {
  std::vector<int> chain;  // vertex ids, largest disk first
};

struct LineageExtraction {
  std::vector<Lineage> lineages;
  long dropped_certificates = 0;  // edges without the 2d' in (3/4)d certificate
  long lineage_bound = 0;         // t + m + dropped, the asserted bound
};

// Deletes multiple vertices, splits the remainder into branchless chains and
// cuts every edge lacking the nesting certificate 2d' in (3/4)d.
LineageExtraction extract_lineages(const Arborescence& a, double certificate_factor = 0.75);

struct AnnulusRecord {
  PlanarAnnulus annulus;
  int lineage = 0;
  int block = 0;           // position along the thinned lineage
  int certifying_vertex = -1;  // vertex whose quarter-disk sits in the annulus
  double near_k_mass = 0;
  double modulus_lower_bound = 0;
};

struct AnnulusFamily {
  std::vector<AnnulusRecord> annuli;
  std::vector<std::vector<int>> thinned;  // block endpoints w_0..w_L per lineage
  std::vector<PlanarDisk> vertices;       // shared vertex disks
  long dropped_for_disjointness = 0;
};

// One annulus d1 \ d7 per length-6 block. Each must contain a quarter germ
// inside (3/4)d1 \ 2d7, which certifies near-K mass >= 1 - tol; throws
// geometry_error otherwise. A final sweep enforces pairwise disjointness.
AnnulusFamily build_annulus_family(const LineageExtraction& lineages,
                                   const std::vector<PlanarDisk>& vertices,
                                   const MeasureIndex& mu);

bool annuli_disjoint(const PlanarAnnulus& a, const PlanarAnnulus& b);

struct CircleSearchResult {
  double radius = 0;
  double image_length = 0;
};

// Length-area search: minimizes the image length of f over a log-spaced
// family of circles around the inner boundary center.
CircleSearchResult shortest_circle(const HoloDiskMap& f, const PlanarAnnulus& within,
                                   int candidates = 64, const QuadratureOptions& opts = {});

struct AnnulusLevelRecord {
  int level = 0;
  long cardinality = 0;
  double budget_ck = 0;
  long removed_by_area = 0;
  long removed_by_length = 0;
  long confinement_violations = 0;
  long max_overlap = 0;  // doubled annuli overlap count (<= 3 on chains)
  double eps = 0;
};

struct AnnulusDoublingOptions {
  int max_level = 2;
  double keep_fraction_divisor = 8.0;
  double comparability_threshold = 16.0;  // outer/inner size ratio for the terminal split
  int circle_candidates = 64;
  double counting_tol = 1e-6;
  QuadratureOptions quadrature{};
};

struct ConcentrationOutcome {
  int achieved_level = 0;
  bool level_capped = false;  // lineage too short for the requested level
  std::vector<AnnulusLevelRecord> levels;
  std::vector<double> budget_table;
  std::optional<AnnulusRecord> anchor;     // the selected annulus a_n
  std::optional<PlanarAnnulus> kept_piece;  // a_n, or the a+/a- side kept after splitting
  bool split_by_circle = false;
  CircleSearchResult circle;
  AffineMap reparam;  // origin -> inner boundary center, scale diam(a_n)
};

// Doubling of annuli along their lineages: 2a extends one block toward the
// root and one toward the leaf. Budget filters and confinement mirror the
// disk case; the terminal branch splits on inner/outer size comparability.
ConcentrationOutcome double_annuli_and_iterate(const AnnulusFamily& g0, const HoloDiskMap& f,
                                               const MeasureIndex& mu, const CompactSet& k,
                                               int n_index, double a_n, double l_n,
                                               const AnnulusDoublingOptions& opts = {});

}  // namespace ahlfors
