#include "ahlfors/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace ahlfors {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

struct RadialPieces {
  std::array<RadialInterval, 4> iv;
  int n = 0;
  void push(RadialInterval r) {
    if (!r.empty() && n < 4) iv[n++] = r;
  }
};

// Radial cross-section of region (clipped) along the ray at angle theta from pivot.
RadialPieces cross_section(const Region& region, const std::optional<PlanarDisk>& clip,
                           Complex pivot, double theta) {
  RadialPieces out;
  RadialInterval base;
  RadialInterval hole{0, 0};
  bool has_hole = false;

  if (const auto* d = std::get_if<PlanarDisk>(&region)) {
    base = {0.0, d->radius};
  } else if (const auto* a = std::get_if<PlanarAnnulus>(&region)) {
    base = {0.0, a->outer.radius};
    hole = ray_disk_interval(pivot, theta, a->inner);
    has_hole = !hole.empty();
  } else {
    const auto& h = std::get<HalfDisk>(region);
    base = {0.0, h.disk.radius};
    // theta filtering happens in the caller via the angular range
  }

  if (clip) {
    RadialInterval c = ray_disk_interval(pivot, theta, *clip);
    base.lo = std::max(base.lo, c.lo);
    base.hi = std::min(base.hi, c.hi);
    if (base.empty()) return out;
  }
  if (base.empty()) return out;

  if (!has_hole) {
    out.push(base);
    return out;
  }
  hole.lo = std::max(hole.lo, base.lo);
  hole.hi = std::min(hole.hi, base.hi);
  if (hole.empty()) {
    out.push(base);
    return out;
  }
  out.push({base.lo, hole.lo});
  out.push({hole.hi, base.hi});
  return out;
}

Complex region_pivot(const Region& region) {
  if (const auto* d = std::get_if<PlanarDisk>(&region)) return d->center;
  if (const auto* a = std::get_if<PlanarAnnulus>(&region)) return a->outer.center;
  return std::get<HalfDisk>(region).disk.center;
}

std::pair<double, double> angular_range(const Region& region) {
  if (const auto* h = std::get_if<HalfDisk>(&region))
    return {h->axis_angle, h->axis_angle + kPi};
  return {0.0, 2.0 * kPi};
}

double sweep(const std::function<double(Complex)>& density, const Region& region,
             const std::optional<PlanarDisk>& clip, Complex pivot, int n_theta,
             int radial_panels) {
  const auto [th0, th1] = angular_range(region);
  const double dth = (th1 - th0) / n_theta;
  double total = 0;
  for (int it = 0; it < n_theta; ++it) {
    const double theta = th0 + (it + 0.5) * dth;
    const Complex u(std::cos(theta), std::sin(theta));
    const RadialPieces pieces = cross_section(region, clip, pivot, theta);
    double line = 0;
    for (int p = 0; p < pieces.n; ++p) {
      const double a = pieces.iv[p].lo, b = pieces.iv[p].hi;
      const double panel = (b - a) / radial_panels;
      for (int s = 0; s < radial_panels; ++s) {
        const double pa = a + s * panel, half = 0.5 * panel;
        const double mid = pa + half;
        for (int g = 0; g < 8; ++g) {
          const double r = mid + half * kGlNodes[g];
          line += kGlWeights[g] * half * density(pivot + r * u) * r;
        }
      }
    }
    total += line * dth;
  }
  return total;
}

}  // namespace

QuadratureResult integrate_region(const std::function<double(Complex)>& density,
                                  const Region& region, const std::optional<PlanarDisk>& clip,
                                  const QuadratureOptions& opts) {
  const Complex pivot = region_pivot(region);
  QuadratureResult res;
  double prev = 0;
  for (int depth = 0; depth <= opts.max_depth; ++depth) {
    const int n_theta = opts.base_angular << depth;
    const int panels = 1 << ((depth + 1) / 2);
    const double value = sweep(density, region, clip, pivot, n_theta, panels);
    res.depth = depth;
    if (depth > 0) {
      res.error_estimate = std::abs(value - prev);
      const double scale = std::max(std::abs(value), opts.atol / opts.rtol);
      if (depth >= opts.min_depth && res.error_estimate <= opts.rtol * scale + opts.atol) {
        res.value = value;
        res.converged = true;
        return res;
      }
    }
    prev = value;
    res.value = value;
  }
  return res;
}

QuadratureResult integrate_arc(const std::function<double(Complex)>& line_density, Complex center,
                               double radius, double t0, double t1,
                               const std::optional<PlanarDisk>& clip,
                               const QuadratureOptions& opts) {
  QuadratureResult res;
  if (t1 <= t0) {
    res.converged = true;
    return res;
  }

  // Clip the angular interval against the disk once; the pieces are fixed.
  std::vector<AngularInterval> pieces;
  if (clip) {
    for (const auto& arc : circle_arcs_inside_disk(center, radius, *clip)) {
      // Intersect [t0,t1] with the arc, testing both 2pi shifts.
      for (int shift = -1; shift <= 1; ++shift) {
        const double lo = std::max(t0, arc.lo + shift * 2.0 * kPi);
        const double hi = std::min(t1, arc.hi + shift * 2.0 * kPi);
        if (hi > lo) pieces.push_back({lo, hi});
      }
    }
  } else {
    pieces.push_back({t0, t1});
  }
  if (pieces.empty()) {
    res.converged = true;
    return res;
  }

  auto evaluate = [&](int segments_per_piece) {
    double total = 0;
    for (const auto& piece : pieces) {
      const double seg = (piece.hi - piece.lo) / segments_per_piece;
      for (int s = 0; s < segments_per_piece; ++s) {
        const double a = piece.lo + s * seg, half = 0.5 * seg, mid = a + half;
        for (int g = 0; g < 8; ++g) {
          const double t = mid + half * kGlNodes[g];
          const Complex z = center + radius * Complex(std::cos(t), std::sin(t));
          total += kGlWeights[g] * half * line_density(z) * radius;
        }
      }
    }
    return total;
  };

  double prev = 0;
  for (int depth = 0; depth <= opts.max_depth; ++depth) {
    const double value = evaluate(1 << depth);
    res.depth = depth;
    if (depth > 0) {
      res.error_estimate = std::abs(value - prev);
      const double scale = std::max(std::abs(value), opts.atol / opts.rtol);
      if (depth >= opts.min_depth && res.error_estimate <= opts.rtol * scale + opts.atol) {
        res.value = value;
        res.converged = true;
        return res;
      }
    }
    prev = value;
    res.value = value;
  }
  return res;
}

double require_converged(const QuadratureResult& r, const char* what) {
  if (!r.converged)
    throw quadrature_error(std::string(what) + ": quadrature did not reach tolerance (error " +
                           std::to_string(r.error_estimate) + " at depth " +
                           std::to_string(r.depth) + ")");
  return r.value;
}

}  // namespace ahlfors
