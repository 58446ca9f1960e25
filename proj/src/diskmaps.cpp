#include "ahlfors/diskmaps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ahlfors {

Complex poly_eval(const Polynomial& p, Complex z) {
  Complex acc(0, 0);
  for (size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
  return acc;
}

Polynomial poly_derivative(const Polynomial& p) {
  Polynomial d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back((double)i * p[i]);
  return d;
}

Polynomial poly_precompose_affine(const Polynomial& p, const AffineMap& r) {
  // p(t + s z) via repeated synthetic multiplication.
  Polynomial out(std::max<size_t>(p.size(), 1), Complex(0, 0));
  if (p.empty()) return out;
  // Horner in (t + s z): out = p_k, then out = out * (t + s z) + p_{k-1}.
  Polynomial acc{p.back()};
  for (size_t i = p.size() - 1; i-- > 0;) {
    Polynomial next(acc.size() + 1, Complex(0, 0));
    for (size_t j = 0; j < acc.size(); ++j) {
      next[j] += acc[j] * r.translation;
      next[j + 1] += acc[j] * r.scale;
    }
    next[0] += p[i];
    acc = std::move(next);
  }
  return acc;
}

HoloDiskMap::HoloDiskMap(TargetModel target, std::vector<Polynomial> components, PlanarDisk domain)
    : target_(std::move(target)), components_(std::move(components)), domain_(domain) {
  const size_t expected = (target_.kind() == TargetKind::FlatTorus) ? (size_t)target_.genus()
                          : (target_.kind() == TargetKind::ProjectiveLine) ? 2u
                                                                           : 1u;
  if (components_.size() != expected)
    throw std::invalid_argument("HoloDiskMap: wrong number of polynomial components");
  for (auto& c : components_) {
    if (c.empty()) c.push_back(Complex(0, 0));
    for (auto z : c)
      if (!is_finite(z)) throw std::invalid_argument("HoloDiskMap: non-finite coefficient");
  }
  if (target_.kind() == TargetKind::ProjectiveLine) {
    // Reject a denominator that is identically zero; common zeros on the
    // closed domain surface as non-finite values during evaluation.
    bool all_zero = true;
    for (auto z : components_[1]) all_zero = all_zero && std::abs(z) == 0.0;
    if (all_zero) throw std::invalid_argument("HoloDiskMap: zero denominator");
  }
  for (const auto& c : components_) derivatives_.push_back(poly_derivative(c));
}

TargetPoint HoloDiskMap::value(Complex z) const {
  switch (target_.kind()) {
    case TargetKind::FlatTorus: {
      std::array<Complex, 2> raw{poly_eval(components_[0], z), Complex(0, 0)};
      if (target_.genus() == 2) raw[1] = poly_eval(components_[1], z);
      return target_.make_point(raw);
    }
    case TargetKind::ProjectiveLine: {
      const Complex p = poly_eval(components_[0], z);
      const Complex q = poly_eval(components_[1], z);
      TargetPoint pt;
      if (std::abs(p) <= std::abs(q)) {
        pt.chart = 0;
        pt.coords[0] = p / q;
      } else {
        pt.chart = 1;
        pt.coords[0] = q / p;
      }
      if (!is_finite(pt.coords[0]))
        throw std::domain_error("HoloDiskMap: projective components vanish simultaneously");
      return pt;
    }
    case TargetKind::UnitDisk:
      return target_.make_point({poly_eval(components_[0], z), Complex(0, 0)});
  }
  return {};
}

double HoloDiskMap::derivative_norm_sq(Complex z) const {
  switch (target_.kind()) {
    case TargetKind::FlatTorus: {
      double s = std::norm(poly_eval(derivatives_[0], z));
      if (target_.genus() == 2) s += std::norm(poly_eval(derivatives_[1], z));
      return s;
    }
    case TargetKind::ProjectiveLine: {
      const Complex p = poly_eval(components_[0], z);
      const Complex q = poly_eval(components_[1], z);
      const Complex dp = poly_eval(derivatives_[0], z);
      const Complex dq = poly_eval(derivatives_[1], z);
      const double num = std::norm(dp * q - p * dq);
      const double den = std::norm(p) + std::norm(q);
      return num / (den * den);
    }
    case TargetKind::UnitDisk:
      return std::norm(poly_eval(derivatives_[0], z));
  }
  return 0;
}

double HoloDiskMap::derivative_norm(Complex z) const { return std::sqrt(derivative_norm_sq(z)); }

HoloDiskMap HoloDiskMap::precompose(const AffineMap& r) const {
  std::vector<Polynomial> comps;
  for (const auto& c : components_) comps.push_back(poly_precompose_affine(c, r));
  const AffineMap inv = r.inverse();
  return HoloDiskMap(target_, std::move(comps), apply(inv, domain_));
}

HoloDiskMap HoloDiskMap::with_domain(const PlanarDisk& d) const {
  return HoloDiskMap(target_, components_, d);
}

QuadratureResult area_result(const HoloDiskMap& f, const Region& region, bool clip_to_domain,
                             const QuadratureOptions& opts) {
  std::optional<PlanarDisk> clip;
  if (clip_to_domain) clip = f.domain();
  auto density = [&f](Complex z) { return f.derivative_norm_sq(z); };
  return integrate_region(density, region, clip, opts);
}

double area(const HoloDiskMap& f, const Region& region, bool clip_to_domain,
            const QuadratureOptions& opts) {
  return require_converged(area_result(f, region, clip_to_domain, opts), "area");
}

double boundary_length(const HoloDiskMap& f, const CircularArc& arc, bool clip_to_domain,
                       const QuadratureOptions& opts) {
  std::optional<PlanarDisk> clip;
  if (clip_to_domain) {
    // Closed domain: f is smooth up to the boundary, so widen by an ulp-scale
    // margin to keep the boundary circle itself integrable.
    clip = PlanarDisk(f.domain().center, f.domain().radius * (1.0 + 1e-12));
  }
  auto density = [&f](Complex z) { return f.derivative_norm(z); };
  return require_converged(integrate_arc(density, arc.center, arc.radius, arc.t0, arc.t1, clip, opts),
                           "boundary_length");
}

double domain_boundary_length_in(const HoloDiskMap& f, const PlanarDisk& window,
                                 const QuadratureOptions& opts) {
  const auto& dom = f.domain();
  double total = 0;
  auto density = [&f](Complex z) { return f.derivative_norm(z); };
  for (const auto& arc : circle_arcs_inside_disk(dom.center, dom.radius, window)) {
    total += require_converged(
        integrate_arc(density, dom.center, dom.radius, arc.lo, arc.hi, std::nullopt, opts),
        "domain_boundary_length_in");
  }
  return total;
}

long pullback_min_budget() { return 1000; }

PlanarMeasure pullback_measure(const HoloDiskMap& f, const CompactSet& k, int n,
                               long sample_budget) {
  if (sample_budget < pullback_min_budget())
    throw std::invalid_argument("pullback_measure: sample budget below minimum");
  if (n < 0 || (size_t)n >= k.schedule.size())
    throw std::invalid_argument("pullback_measure: neighborhood index outside schedule");

  const PlanarDisk& dom = f.domain();
  // Midpoint cells on a square grid covering the domain disk.
  const double h = dom.radius * std::sqrt(kPi / (double)sample_budget);
  const int cells = (int)std::ceil(2.0 * dom.radius / h);
  std::vector<PlanarMeasure::Sample> samples;
  samples.reserve((size_t)sample_budget);
  const TargetModel& target = f.target();
  for (int iy = 0; iy < cells; ++iy) {
    for (int ix = 0; ix < cells; ++ix) {
      const Complex z = dom.center + Complex(-dom.radius + (ix + 0.5) * h,
                                             -dom.radius + (iy + 0.5) * h);
      if (!dom.contains(z)) continue;
      const TargetPoint image = f.value(z);
      if (!in_neighborhood(target, k, n, image)) continue;
      const double w = f.derivative_norm_sq(z) * h * h;
      if (w > 0) samples.push_back({z, w});
    }
  }
  return PlanarMeasure(std::move(samples));
}

std::string to_string(SequenceVerdict v) {
  switch (v) {
    case SequenceVerdict::AhlforsDivergent:
      return "ahlfors-divergent";
    case SequenceVerdict::IsoperimetricallyBounded:
      return "isoperimetrically-bounded";
    case SequenceVerdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

static AhlforsDiagnostics diagnose_impl(const DiskSequence& s, const CompactSet& k,
                                        const std::vector<PlanarMeasure>* attached,
                                        const DiagnoseOptions& opts) {
  AhlforsDiagnostics diag;
  for (const auto& e : s.entries) {
    if (e.area <= 0) {
      diag.ratios.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    diag.ratios.push_back(e.boundary_length / e.area);
  }
  // Near-K mass fraction per index.
  double delta = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    double mass;
    if (attached && i < attached->size()) {
      mass = (*attached)[i].total_mass();
    } else if (e.synthetic) {
      mass = e.area;  // declared: synthetic families carry their mass near K
    } else {
      mass = pullback_measure(e.map, k, e.neighborhood_index, opts.sample_budget).total_mass();
    }
    diag.near_k_mass.push_back(mass);
    if (e.area > 0) delta = std::min(delta, mass / e.area);
  }
  diag.delta = std::isfinite(delta) ? delta : 0.0;

  if (s.entries.size() < 4) {
    diag.verdict = SequenceVerdict::Inconclusive;
    return diag;
  }

  // Least-squares slope of log(ratio) against log(a_n).
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (size_t i = 0; i < s.entries.size(); ++i) {
      const double a = s.entries[i].area, r = diag.ratios[i];
      if (!(a > 0) || !(r > 0) || !std::isfinite(r)) continue;
      const double x = std::log(a), y = std::log(r);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    if (m >= 2 && sxx * m - sx * sx > 1e-12)
      diag.decay_exponent = (sxy * m - sx * sy) / (sxx * m - sx * sx);
  }

  const int w = std::min<int>(opts.window, (int)diag.ratios.size() - 1);
  bool decreasing = true;
  for (size_t i = diag.ratios.size() - w; i < diag.ratios.size(); ++i)
    decreasing = decreasing && diag.ratios[i] < diag.ratios[i - 1];
  const double last = diag.ratios.back();

  if (decreasing && last < opts.divergent_threshold)
    diag.verdict = SequenceVerdict::AhlforsDivergent;
  else if (*std::min_element(diag.ratios.begin(), diag.ratios.end()) >= opts.bounded_floor)
    diag.verdict = SequenceVerdict::IsoperimetricallyBounded;
  else
    diag.verdict = SequenceVerdict::Inconclusive;
  return diag;
}

AhlforsDiagnostics diagnose_sequence(const DiskSequence& s, const CompactSet& k,
                                     const DiagnoseOptions& opts) {
  return diagnose_impl(s, k, nullptr, opts);
}

AhlforsDiagnostics diagnose_sequence(const DiskSequence& s, const CompactSet& k,
                                     const std::vector<PlanarMeasure>& attached,
                                     const DiagnoseOptions& opts) {
  return diagnose_impl(s, k, &attached, opts);
}

IsoperimetricResult isoperimetric_constant(const std::vector<HoloDiskMap>& family,
                                           const QuadratureOptions& opts) {
  IsoperimetricResult out;
  for (const auto& f : family) {
    const auto& dom = f.domain();
    const double len =
        boundary_length(f, CircularArc{dom.center, dom.radius, 0, 2 * kPi}, false, opts);
    if (len <= kLengthFloor) {
      ++out.excluded;
      continue;
    }
    const double a = area(f, dom, false, opts);
    out.ratios.push_back(a / len);
    out.constant = std::max(out.constant, a / len);
  }
  return out;
}

std::vector<double> ahlfors_radii(const HoloDiskMap& entire_curve,
                                  const std::vector<double>& radii_grid,
                                  const AhlforsRadiiOptions& opts) {
  if (radii_grid.empty()) throw std::invalid_argument("ahlfors_radii: empty grid");
  std::vector<double> areas, lengths;
  const Complex c = entire_curve.domain().center;
  for (double R : radii_grid) {
    const PlanarDisk dR(c, R);
    const HoloDiskMap fR = entire_curve.with_domain(dR);
    areas.push_back(area(fR, dR, false, opts.quadrature));
    lengths.push_back(boundary_length(fR, CircularArc{c, R, 0, 2 * kPi}, false, opts.quadrature));
  }
  if (!(areas.back() > 4.0 * areas.front()) || !(areas.back() > 0))
    throw std::runtime_error("ahlfors_radii: area does not grow along the grid");

  std::vector<double> selected;
  double threshold = opts.initial_threshold;
  size_t start = 0;
  while ((int)selected.size() < opts.max_selected) {
    bool found = false;
    for (size_t i = start; i < radii_grid.size(); ++i) {
      if (areas[i] > 0 && lengths[i] / areas[i] < threshold) {
        selected.push_back(radii_grid[i]);
        start = i + 1;
        found = true;
        break;
      }
    }
    if (!found) break;
    threshold *= opts.threshold_factor;
  }
  if (selected.empty())
    throw std::runtime_error("ahlfors_radii: no radius on the grid meets the threshold");
  return selected;
}

}  // namespace ahlfors
