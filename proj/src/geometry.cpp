#include "ahlfors/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace ahlfors {

bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

PlanarDisk::PlanarDisk(Complex c, double r) : center(c), radius(r) {
  if (!is_finite(c) || !std::isfinite(r) || !(r > 0.0))
    throw std::invalid_argument("PlanarDisk: radius must be positive and finite");
}

bool PlanarDisk::contains(Complex p) const { return std::abs(p - center) < radius; }

bool PlanarDisk::contains_closure_of(const PlanarDisk& d) const {
  return std::abs(d.center - center) + d.radius < radius;
}

PlanarAnnulus::PlanarAnnulus(PlanarDisk out, PlanarDisk in)
    : outer(std::move(out)), inner(std::move(in)) {
  if (!outer.contains_closure_of(inner))
    throw std::invalid_argument("PlanarAnnulus: closure(inner) must lie in interior(outer)");
}

bool PlanarAnnulus::contains(Complex p) const {
  return outer.contains(p) && std::abs(p - inner.center) > inner.radius;
}

AffineMap::AffineMap(Complex t, double s) : translation(t), scale(s) {
  if (!is_finite(t) || !std::isfinite(s) || !(s > 0.0))
    throw std::invalid_argument("AffineMap: scale must be positive and finite");
}

AffineMap AffineMap::inverse() const { return AffineMap(-translation / scale, 1.0 / scale); }

AffineMap AffineMap::disk_onto(const PlanarDisk& d) { return AffineMap(d.center, d.radius); }

AffineMap compose(const AffineMap& f, const AffineMap& g) {
  return AffineMap(f.translation + f.scale * g.translation, f.scale * g.scale);
}

PlanarDisk apply(const AffineMap& r, const PlanarDisk& d) {
  return PlanarDisk(r(d.center), r.scale * d.radius);
}

PlanarDisk scale_disk(const PlanarDisk& d, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("scale_disk: lambda must be positive");
  return PlanarDisk(d.center, d.radius * lambda);
}

bool disks_intersect(const PlanarDisk& a, const PlanarDisk& b) {
  // Open disks: boundary tangency does not count.
  return std::abs(a.center - b.center) < a.radius + b.radius;
}

bool disk_inside(const PlanarDisk& inner, const PlanarDisk& outer) {
  return outer.contains_closure_of(inner);
}

double annulus_modulus_lower_bound(const PlanarAnnulus& a) {
  const double dist = a.outer.radius - std::abs(a.inner.center - a.outer.center);
  const double ratio = dist / a.inner.radius;
  if (!(ratio > 1.0)) return 0.0;
  return std::log(ratio) / (2.0 * kPi);
}

PlanarMeasure::PlanarMeasure(std::vector<Sample> s) : samples(std::move(s)) {
  double total = 0;
  for (const auto& sm : samples) {
    if (!is_finite(sm.point) || !std::isfinite(sm.weight) || sm.weight < 0.0)
      throw std::invalid_argument("PlanarMeasure: weights must be finite and nonnegative");
    total += sm.weight;
  }
  if (!std::isfinite(total)) throw std::invalid_argument("PlanarMeasure: total mass not finite");
}

double PlanarMeasure::total_mass() const {
  double total = 0;
  for (const auto& s : samples) total += s.weight;
  return total;
}

double PlanarMeasure::max_weight() const {
  double m = 0;
  for (const auto& s : samples) m = std::max(m, s.weight);
  return m;
}

double measure_mass_in(const PlanarMeasure& mu, const PlanarDisk& d) {
  double total = 0;
  for (const auto& s : mu.samples)
    if (d.contains(s.point)) total += s.weight;
  return total;
}

double measure_mass_in(const PlanarMeasure& mu, const PlanarAnnulus& a) {
  double total = 0;
  for (const auto& s : mu.samples)
    if (a.contains(s.point)) total += s.weight;
  return total;
}

MeasureIndex::MeasureIndex(const PlanarMeasure& mu) : samples_(mu.samples) {
  total_ = mu.total_mass();
  max_weight_ = mu.max_weight();
  if (samples_.empty()) return;

  double xmin = samples_[0].point.real(), xmax = xmin;
  double ymin = samples_[0].point.imag(), ymax = ymin;
  for (const auto& s : samples_) {
    xmin = std::min(xmin, s.point.real());
    xmax = std::max(xmax, s.point.real());
    ymin = std::min(ymin, s.point.imag());
    ymax = std::max(ymax, s.point.imag());
    max_abs_ = std::max(max_abs_, std::abs(s.point));
  }
  const double w = std::max(xmax - xmin, 1e-12), h = std::max(ymax - ymin, 1e-12);
  // Aim for O(1) samples per bucket.
  const int target = std::max(1, (int)std::sqrt((double)samples_.size()));
  h_ = std::max(w, h) / target;
  x0_ = xmin;
  y0_ = ymin;
  nx_ = (int)std::floor(w / h_) + 1;
  ny_ = (int)std::floor(h / h_) + 1;
  cells_.resize((size_t)nx_ * ny_);
  for (uint32_t i = 0; i < samples_.size(); ++i) {
    const auto& p = samples_[i].point;
    int ix = std::min(nx_ - 1, std::max(0, (int)((p.real() - x0_) / h_)));
    int iy = std::min(ny_ - 1, std::max(0, (int)((p.imag() - y0_) / h_)));
    cells_[(size_t)iy * nx_ + ix].items.push_back(i);
  }
}

double MeasureIndex::mass_in(const PlanarDisk& d) const {
  if (samples_.empty()) return 0.0;
  int ix0 = std::max(0, (int)std::floor((d.center.real() - d.radius - x0_) / h_));
  int ix1 = std::min(nx_ - 1, (int)std::floor((d.center.real() + d.radius - x0_) / h_));
  int iy0 = std::max(0, (int)std::floor((d.center.imag() - d.radius - y0_) / h_));
  int iy1 = std::min(ny_ - 1, (int)std::floor((d.center.imag() + d.radius - y0_) / h_));
  double total = 0;
  for (int iy = iy0; iy <= iy1; ++iy)
    for (int ix = ix0; ix <= ix1; ++ix) {
      // Skip buckets entirely outside the disk.
      const double cx = x0_ + (ix + 0.5) * h_, cy = y0_ + (iy + 0.5) * h_;
      const double dx = std::abs(cx - d.center.real()), dy = std::abs(cy - d.center.imag());
      const double slack = 0.7071067811865476 * h_;
      if (std::hypot(dx, dy) > d.radius + slack + 1e-15) continue;
      for (uint32_t i : cells_[(size_t)iy * nx_ + ix].items)
        if (d.contains(samples_[i].point)) total += samples_[i].weight;
    }
  return total;
}

double MeasureIndex::enclosing_radius(Complex center) const {
  return std::abs(center) + max_abs_ + 1.0;
}

RadialInterval ray_disk_interval(Complex pivot, double theta, const PlanarDisk& d) {
  const Complex u(std::cos(theta), std::sin(theta));
  const Complex delta = d.center - pivot;
  const double b = delta.real() * u.real() + delta.imag() * u.imag();
  const double c = std::norm(delta) - d.radius * d.radius;
  const double disc = b * b - c;
  if (disc <= 0.0) return {};
  const double s = std::sqrt(disc);
  RadialInterval iv{b - s, b + s};
  iv.lo = std::max(iv.lo, 0.0);
  if (iv.hi <= iv.lo) return {};
  return iv;
}

std::vector<AngularInterval> circle_arcs_inside_disk(Complex center, double radius,
                                                     const PlanarDisk& d) {
  const Complex delta = d.center - center;
  const double dist = std::abs(delta);
  // Entirely inside / entirely outside.
  if (dist + radius < d.radius) return {{0.0, 2.0 * kPi}};
  if (dist >= radius + d.radius) return {};
  if (dist + d.radius <= radius) return {};  // d inside the circle, no arc covered
  // |c + R e^{it} - dc|^2 < r^2  <=>  cos(t - phi) > (R^2 + dist^2 - r^2) / (2 R dist)
  const double cosb = (radius * radius + dist * dist - d.radius * d.radius) / (2.0 * radius * dist);
  if (cosb >= 1.0) return {};
  if (cosb <= -1.0) return {{0.0, 2.0 * kPi}};
  const double beta = std::acos(cosb);
  const double phi = std::arg(delta);
  double lo = phi - beta, hi = phi + beta;
  // Normalize into [0, 2pi), splitting at the cut if needed.
  auto wrap = [](double t) {
    t = std::fmod(t, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    return t;
  };
  const double span = hi - lo;
  const double start = wrap(lo);
  if (start + span <= 2.0 * kPi) return {{start, start + span}};
  return {{start, 2.0 * kPi}, {0.0, start + span - 2.0 * kPi}};
}

}  // namespace ahlfors
