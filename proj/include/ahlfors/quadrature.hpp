// Adaptive quadrature over disks, annuli and half-disks in polar coordinates
// with exact per-angle radial clipping, plus a 1-D engine for circular arcs.
// Refinement doubles the angular resolution and splits radial panels until
// two successive estimates agree to rtol, or max_depth is reached.
#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "ahlfors/geometry.hpp"

namespace ahlfors {

struct HalfDisk {
  PlanarDisk disk;
  double axis_angle = 0.0;  // region is the half on angles (axis, axis + pi)
};

using Region = std::variant<PlanarDisk, PlanarAnnulus, HalfDisk>;

struct QuadratureOptions {
  double rtol = 1e-4;
  double atol = 1e-12;
  int min_depth = 1;
  int max_depth = 7;
  int base_angular = 64;
};

struct QuadratureResult {
  double value = 0;
  double error_estimate = 0;
  int depth = 0;
  bool converged = false;
};

class quadrature_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Integrates `density` (a pointwise area density, e.g. |f'|^2 in the target
// metric) over region, optionally clipped to the open disk `clip`.
QuadratureResult integrate_region(const std::function<double(Complex)>& density,
                                  const Region& region, const std::optional<PlanarDisk>& clip,
                                  const QuadratureOptions& opts);

// Integrates `line_density` (e.g. |f'| in the target metric) along the arc
// z(t) = center + radius e^{it}, t in [t0, t1], optionally clipped to `clip`.
QuadratureResult integrate_arc(const std::function<double(Complex)>& line_density, Complex center,
                               double radius, double t0, double t1,
                               const std::optional<PlanarDisk>& clip,
                               const QuadratureOptions& opts);

// Raises quadrature_error unless r.converged.
double require_converged(const QuadratureResult& r, const char* what);

}  // namespace ahlfors
