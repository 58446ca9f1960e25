// Planar primitives of the source disk: disks, annuli, affine maps of C,
// and discretized planar measures. Everything here is an immutable value;
// all operations are pure.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ahlfors {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

bool is_finite(Complex z);

// Thrown when an input family violates a geometric precondition the
// counting arguments rely on (packing degree, subfamily count, ...).
class geometry_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PlanarDisk {
  Complex center{0.0, 0.0};
  double radius = 1.0;

  PlanarDisk() = default;
  PlanarDisk(Complex c, double r);

  bool contains(Complex p) const;           // open disk
  bool contains_closure_of(const PlanarDisk& d) const;  // closure(d) subset of open disk
};

// Annulus between two nested disks; the inner disk need not be concentric.
struct PlanarAnnulus {
  PlanarDisk outer;
  PlanarDisk inner;

  PlanarAnnulus(PlanarDisk out, PlanarDisk in);

  bool contains(Complex p) const;  // open annulus: inside outer, outside closure(inner)
};

// Orientation-preserving similarity z -> translation + scale * z with
// positive real scale. Closed under composition and inversion.
struct AffineMap {
  Complex translation{0.0, 0.0};
  double scale = 1.0;

  AffineMap() = default;
  AffineMap(Complex t, double s);

  Complex operator()(Complex z) const { return translation + scale * z; }
  AffineMap inverse() const;

  // Maps the unit disk onto d.
  static AffineMap disk_onto(const PlanarDisk& d);
};

AffineMap compose(const AffineMap& f, const AffineMap& g);  // f after g
PlanarDisk apply(const AffineMap& r, const PlanarDisk& d);

PlanarDisk scale_disk(const PlanarDisk& d, double lambda);
bool disks_intersect(const PlanarDisk& a, const PlanarDisk& b);  // open overlap, tangency excluded
bool disk_inside(const PlanarDisk& inner, const PlanarDisk& outer);  // closure(inner) in interior(outer)

// Certified lower bound for the conformal modulus: the annulus contains the
// round annulus around inner.center of radii (inner.radius, dist to outer
// boundary), whose modulus is log(ratio)/2pi. Returns 0 when the ratio is <= 1.
double annulus_modulus_lower_bound(const PlanarAnnulus& a);

// Finite weighted point cloud; masses of disks are the only queries the
// construction ever makes of a measure.
struct PlanarMeasure {
  struct Sample {
    Complex point;
    double weight;
  };
  std::vector<Sample> samples;

  PlanarMeasure() = default;
  explicit PlanarMeasure(std::vector<Sample> s);

  double total_mass() const;
  double max_weight() const;
};

double measure_mass_in(const PlanarMeasure& mu, const PlanarDisk& d);
double measure_mass_in(const PlanarMeasure& mu, const PlanarAnnulus& a);

// Uniform-bucket spatial index over a measure, for repeated disk-mass
// queries. Query results sum samples in a deterministic (bucket, insertion)
// order, so masses are reproducible bit for bit within a build.
class MeasureIndex {
public:
  explicit MeasureIndex(const PlanarMeasure& mu);

  double mass_in(const PlanarDisk& d) const;
  double total_mass() const { return total_; }
  double max_weight() const { return max_weight_; }
  // Radius of a disk around `center` guaranteed to contain every sample.
  double enclosing_radius(Complex center) const;

private:
  struct Cell {
    std::vector<uint32_t> items;
  };
  std::vector<PlanarMeasure::Sample> samples_;
  std::vector<Cell> cells_;
  double x0_ = 0, y0_ = 0, h_ = 1;
  int nx_ = 0, ny_ = 0;
  double total_ = 0, max_weight_ = 0;
  double max_abs_ = 0;  // furthest sample from origin
};

// --- ray / arc clipping helpers used by the quadrature engine ---

// t-interval of { pivot + t*e^{i theta} : t >= 0 } inside the open disk d.
// Returns {0,0}-length interval when the ray misses the disk.
struct RadialInterval {
  double lo = 0, hi = 0;
  bool empty() const { return hi <= lo; }
};
RadialInterval ray_disk_interval(Complex pivot, double theta, const PlanarDisk& d);

// Angular interval(s) of the circle (center, radius) lying inside the open
// disk d, as intervals of the angle parameter. At most one interval modulo
// 2pi; it is returned split at the branch cut when needed.
struct AngularInterval {
  double lo = 0, hi = 0;
};
std::vector<AngularInterval> circle_arcs_inside_disk(Complex center, double radius,
                                                     const PlanarDisk& d);

}  // namespace ahlfors
