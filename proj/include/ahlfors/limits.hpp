// Gromov-style convergence as a numerical instrument: Cauchy testing of the
// reparametrized maps on a compact exhaustion, explosion detection by area
// concentration under dyadic refinement, the boundary collapse probe, and
// the K-intersection area of the limit.
#pragma once

#include "ahlfors/doubling.hpp"

namespace ahlfors {

struct ExplosionPoint {
  Complex location;      // in the limit-domain coordinates
  double mass = 0;       // concentrated image area at the finest refinement
};

struct CompactReport {
  double inner_radius = 0;  // 0 for disks of C
  double outer_radius = 0;
  std::vector<int> indices_defined;  // sequence indices defined on this compact
  double sup_distance_raw = 0;       // max over grid of target distance, best window
  double sup_distance_adjusted = 0;  // modulo target translations (tori)
  bool cauchy = false;
};

enum class ConvergenceVerdict { Converged, Inconclusive };

struct LimitReport {
  LimitDomain domain = LimitDomain::C;
  std::vector<CompactReport> compacts;
  std::vector<ExplosionPoint> explosions;
  std::vector<Complex> sample_grid;        // anchor-compact grid (limit-domain coords)
  std::vector<TargetPoint> limit_values;   // final-index values on the grid
  double k_intersection_area = 0;
  std::vector<double> k_area_by_neighborhood;  // per schedule index
  long bubble_count_bound = 0;
  double explosion_threshold = 0;  // the epsilon^2 used
  ConvergenceVerdict verdict = ConvergenceVerdict::Inconclusive;
};

struct LimitOptions {
  double epsilon = 0;        // 0: 1/8 of the target injectivity scale
  double cauchy_tol = 1e-3;
  int grid_per_axis = 17;
  int refine_depth = 4;
  double rational_curve_area_floor = 1.0;
  double collapse_diameter_tol = 1e-3;
  double boundary_length_threshold = 0.25;
  QuadratureOptions quadrature{};
};

// Compacts are disks of radius 2^j for domain C, and annuli
// [2^-j, 2^j]-scaled around the anchor for domain C*.
LimitReport detect_convergence(const ReparamSequence& seq, const DiskSequence& maps,
                               const CompactSet& k, const LimitOptions& opts = {});

enum class CollapseStatus { CollapsesToPoint, Persists, PreconditionUnmet };

struct BoundaryProbeReport {
  CollapseStatus status = CollapseStatus::PreconditionUnmet;
  double boundary_image_length = 0;
  double diameter_outside_bubbles = 0;
  std::vector<ExplosionPoint> explosions;
  double near_k_mass_persisting = 0;
};

// Samples the part of `window` inside the map domain (the half-disk model of
// 2d meeting the boundary); collapse holds when the image diameter away from
// concentration cells is below tolerance.
BoundaryProbeReport boundary_collapse_probe(const HoloDiskMap& f, const PlanarDisk& window,
                                            const CompactSet& k, int n_index,
                                            const LimitOptions& opts = {});

// Image area of the final reparametrized map over the anchor compact that
// lands in the shrinking neighborhoods of K; the returned value is the one at
// the deepest scheduled neighborhood, per-neighborhood values in `table`.
double k_intersection_area(const ReparamSequence& seq, const DiskSequence& maps,
                           const CompactSet& k, std::vector<double>* table = nullptr,
                           const LimitOptions& opts = {});

// floor(area bound / rational-curve area floor): how many bubbles the area
// budget admits.
long bubble_count_bound(double area_bound, double rational_curve_area_floor);

}  // namespace ahlfors
