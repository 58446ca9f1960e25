// Parametric holomorphic maps f: D -> X stored as exact polynomial data
// (pairs of polynomials for the projective line), with quadrature of image
// area, boundary length, and pullback measures, plus the divergence and
// isoperimetry diagnostics of a disk sequence.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ahlfors/quadrature.hpp"
#include "ahlfors/targets.hpp"

namespace ahlfors {

// One polynomial with complex coefficients, constant term first.
using Polynomial = std::vector<Complex>;

Complex poly_eval(const Polynomial& p, Complex z);
Polynomial poly_derivative(const Polynomial& p);
// Coefficients of p(t + s z).
Polynomial poly_precompose_affine(const Polynomial& p, const AffineMap& r);

class HoloDiskMap {
public:
  // Torus targets: one polynomial per complex coordinate. Unit disk: one
  // polynomial. Projective line: numerator and denominator, never both zero
  // on the closed domain.
  HoloDiskMap(TargetModel target, std::vector<Polynomial> components,
              PlanarDisk domain = PlanarDisk(Complex(0, 0), 1.0));

  const TargetModel& target() const { return target_; }
  const PlanarDisk& domain() const { return domain_; }
  const std::vector<Polynomial>& components() const { return components_; }

  TargetPoint value(Complex z) const;
  // Squared metric norm of the derivative at z (the pullback area density).
  double derivative_norm_sq(Complex z) const;
  double derivative_norm(Complex z) const;

  // The map z -> f(r(z)) with domain r^{-1}(domain).
  HoloDiskMap precompose(const AffineMap& r) const;
  // Same polynomial data on another domain disk.
  HoloDiskMap with_domain(const PlanarDisk& d) const;

private:
  TargetModel target_;
  std::vector<Polynomial> components_;
  std::vector<Polynomial> derivatives_;
  PlanarDisk domain_;
};

// Pullback area of the region's part inside the map's domain (counted with
// multiplicity). Throws quadrature_error when the tolerance is not reached.
double area(const HoloDiskMap& f, const Region& region, bool clip_to_domain,
            const QuadratureOptions& opts = {});
QuadratureResult area_result(const HoloDiskMap& f, const Region& region, bool clip_to_domain,
                             const QuadratureOptions& opts = {});

struct CircularArc {
  Complex center{0, 0};
  double radius = 1;
  double t0 = 0;
  double t1 = 2 * kPi;
};

// Image length of the arc, optionally clipped to the closed domain disk.
double boundary_length(const HoloDiskMap& f, const CircularArc& arc, bool clip_to_domain,
                       const QuadratureOptions& opts = {});
// Image length of the part of the domain boundary circle inside `window`.
double domain_boundary_length_in(const HoloDiskMap& f, const PlanarDisk& window,
                                 const QuadratureOptions& opts = {});

// Weighted samples on the domain disk whose disk-masses approximate
// mu(d) = area of f(d) landing in the n-th neighborhood of K.
PlanarMeasure pullback_measure(const HoloDiskMap& f, const CompactSet& k, int n,
                               long sample_budget);

long pullback_min_budget();

struct DiskEntry {
  HoloDiskMap map;
  double area = 0;             // a_n
  double boundary_length = 0;  // l_n
  int neighborhood_index = 0;  // index into the CompactSet schedule
  bool synthetic = false;      // declared rather than recomputable values
};

struct DiskSequence {
  std::vector<DiskEntry> entries;
};

enum class SequenceVerdict { AhlforsDivergent, IsoperimetricallyBounded, Inconclusive };

std::string to_string(SequenceVerdict v);

struct AhlforsDiagnostics {
  std::vector<double> ratios;  // l_n / a_n
  double decay_exponent = 0;   // slope of log(ratio) against log(a_n)
  SequenceVerdict verdict = SequenceVerdict::Inconclusive;
  double delta = 0;  // min over n of (mass near K) / a_n
  std::vector<double> near_k_mass;
};

struct DiagnoseOptions {
  double divergent_threshold = 0.5;  // final ratio must sit below this
  double bounded_floor = 1.0;        // ratios above this mean a linear isoperimetric bound
  int window = 3;                    // monotone-decrease window
  long sample_budget = 200000;
  QuadratureOptions quadrature{};
};

AhlforsDiagnostics diagnose_sequence(const DiskSequence& s, const CompactSet& k,
                                     const DiagnoseOptions& opts = {});
// Variant with externally attached pullback measures (one per entry); used by
// synthetic generators whose measures are not recomputable from the map.
AhlforsDiagnostics diagnose_sequence(const DiskSequence& s, const CompactSet& k,
                                     const std::vector<PlanarMeasure>& attached,
                                     const DiagnoseOptions& opts = {});

struct IsoperimetricResult {
  double constant = 0;  // sup over the family of area / boundary length
  int excluded = 0;     // members under the degenerate-length floor
  std::vector<double> ratios;
};

// Degenerate-length floor avoiding division blowups.
inline constexpr double kLengthFloor = 1e-12;

IsoperimetricResult isoperimetric_constant(const std::vector<HoloDiskMap>& family,
                                           const QuadratureOptions& opts = {});

struct AhlforsRadiiOptions {
  double initial_threshold = 0.1;
  double threshold_factor = 0.5;
  int max_selected = 8;
  QuadratureOptions quadrature{};
};

// Concentric radii along which boundary length becomes negligible against
// area; the returned schedule violates any linear isoperimetric inequality.
// Throws std::runtime_error when no radius qualifies on the grid.
std::vector<double> ahlfors_radii(const HoloDiskMap& entire_curve,
                                  const std::vector<double>& radii_grid,
                                  const AhlforsRadiiOptions& opts = {});

}  // namespace ahlfors
