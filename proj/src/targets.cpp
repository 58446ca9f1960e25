#include "ahlfors/targets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ahlfors {

namespace {

// Gaussian elimination for the tiny 2g x 2g lattice basis.
void invert_matrix(const double* a, double* inv, int n) {
  double m[4][8];
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m[i][j] = a[j * n + i];  // column-major in
    for (int j = 0; j < n; ++j) m[i][n + j] = (i == j) ? 1.0 : 0.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-14)
      throw std::invalid_argument("TargetModel: lattice basis is degenerate");
    std::swap(m[piv], m[col]);
    const double d = m[col][col];
    for (int j = 0; j < 2 * n; ++j) m[col][j] /= d;
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = m[r][col];
      for (int j = 0; j < 2 * n; ++j) m[r][j] -= f * m[col][j];
    }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[j * n + i] = m[i][n + j];
}

double det_nxn(const double* a, int n) {
  double m[4][4];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i][j] = a[j * n + i];
  double det = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    if (std::abs(m[col][col]) < 1e-300) return 0.0;
    det *= m[col][col];
    for (int r = col + 1; r < n; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int j = col; j < n; ++j) m[r][j] -= f * m[col][j];
    }
  }
  return det;
}

void coords_to_real(const std::array<Complex, 2>& z, double* x, int g) {
  for (int i = 0; i < g; ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
}

std::array<Complex, 2> real_to_coords(const double* x, int g) {
  std::array<Complex, 2> z{Complex{0, 0}, Complex{0, 0}};
  for (int i = 0; i < g; ++i) z[i] = Complex(x[2 * i], x[2 * i + 1]);
  return z;
}

}  // namespace

TargetModel TargetModel::flat_torus(const std::vector<Complex>& lattice) {
  if (lattice.size() != 2)
    throw std::invalid_argument("flat_torus: expected 2 lattice generators");
  TargetModel m;
  m.kind_ = TargetKind::FlatTorus;
  m.genus_ = 1;
  m.basis_ = {};
  m.basis_[0] = lattice[0].real();
  m.basis_[1] = lattice[0].imag();
  m.basis_[2] = lattice[1].real();
  m.basis_[3] = lattice[1].imag();
  invert_matrix(m.basis_.data(), m.basis_inv_.data(), 2);
  m.det_ = std::abs(det_nxn(m.basis_.data(), 2));
  m.shortest_vector_ = std::min(std::abs(lattice[0]), std::abs(lattice[1]));
  // Shortest vector over small integer combinations; enough for reduced bases.
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) {
      if (a == 0 && b == 0) continue;
      m.shortest_vector_ =
          std::min(m.shortest_vector_, std::abs((double)a * lattice[0] + (double)b * lattice[1]));
    }
  return m;
}

TargetModel TargetModel::flat_torus_g2(const std::vector<std::array<Complex, 2>>& lattice) {
  if (lattice.size() != 4)
    throw std::invalid_argument("flat_torus_g2: expected 4 lattice generators");
  TargetModel m;
  m.kind_ = TargetKind::FlatTorus;
  m.genus_ = 2;
  m.basis_ = {};
  for (int c = 0; c < 4; ++c) {
    m.basis_[c * 4 + 0] = lattice[c][0].real();
    m.basis_[c * 4 + 1] = lattice[c][0].imag();
    m.basis_[c * 4 + 2] = lattice[c][1].real();
    m.basis_[c * 4 + 3] = lattice[c][1].imag();
  }
  invert_matrix(m.basis_.data(), m.basis_inv_.data(), 4);
  m.det_ = std::abs(det_nxn(m.basis_.data(), 4));
  m.shortest_vector_ = std::numeric_limits<double>::infinity();
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b)
      for (int c = -1; c <= 1; ++c)
        for (int d = -1; d <= 1; ++d) {
          if (!a && !b && !c && !d) continue;
          double v[4];
          for (int i = 0; i < 4; ++i)
            v[i] = a * m.basis_[0 + i] + b * m.basis_[4 + i] + c * m.basis_[8 + i] +
                   d * m.basis_[12 + i];
          m.shortest_vector_ =
              std::min(m.shortest_vector_, std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]));
        }
  return m;
}

TargetModel TargetModel::projective_line() {
  TargetModel m;
  m.kind_ = TargetKind::ProjectiveLine;
  m.genus_ = 1;
  return m;
}

TargetModel TargetModel::unit_disk() {
  TargetModel m;
  m.kind_ = TargetKind::UnitDisk;
  m.genus_ = 1;
  return m;
}

std::array<Complex, 2> TargetModel::reduce(const std::array<Complex, 2>& raw) const {
  if (kind_ != TargetKind::FlatTorus) return raw;
  const int n = 2 * genus_;
  double x[4], a[4], y[4];
  coords_to_real(raw, x, genus_);
  for (int i = 0; i < n; ++i) {
    a[i] = 0;
    for (int j = 0; j < n; ++j) a[i] += basis_inv_[j * n + i] * x[j];
    a[i] -= std::floor(a[i]);
  }
  for (int i = 0; i < n; ++i) {
    y[i] = 0;
    for (int j = 0; j < n; ++j) y[i] += basis_[j * n + i] * a[j];
  }
  return real_to_coords(y, genus_);
}

std::array<double, 4> TargetModel::torus_fractional(const std::array<Complex, 2>& raw) const {
  if (kind_ != TargetKind::FlatTorus)
    throw std::invalid_argument("torus_fractional: torus targets only");
  const int n = 2 * genus_;
  double x[4];
  coords_to_real(raw, x, genus_);
  std::array<double, 4> a{0, 0, 0, 0};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a[i] += basis_inv_[j * n + i] * x[j];
    a[i] -= std::floor(a[i]);
    if (a[i] >= 1.0) a[i] = 0.0;  // guard against floor rounding
  }
  return a;
}

TargetPoint TargetModel::make_point(const std::array<Complex, 2>& raw) const {
  TargetPoint p;
  switch (kind_) {
    case TargetKind::FlatTorus:
      p.coords = reduce(raw);
      break;
    case TargetKind::ProjectiveLine: {
      // Keep the chart coordinate inside the closed unit disk.
      Complex w = raw[0];
      if (std::abs(w) <= 1.0) {
        p.coords[0] = w;
        p.chart = 0;
      } else {
        p.coords[0] = 1.0 / w;
        p.chart = 1;
      }
      break;
    }
    case TargetKind::UnitDisk:
      if (std::abs(raw[0]) > 1.0 + 1e-9)
        throw std::domain_error("unit-disk target: point outside chart range");
      p.coords[0] = raw[0];
      break;
  }
  return p;
}

double TargetModel::metric_norm_sq(const TargetPoint& p, const TangentVector& v) const {
  switch (kind_) {
    case TargetKind::FlatTorus: {
      double s = 0;
      for (int i = 0; i < genus_; ++i) s += std::norm(v[i]);
      return s;
    }
    case TargetKind::ProjectiveLine: {
      const double w2 = std::norm(p.coords[0]);
      if (w2 > 1.0 + 1e-6) throw std::domain_error("projective line: point outside chart range");
      const double den = 1.0 + w2;
      return std::norm(v[0]) / (den * den);
    }
    case TargetKind::UnitDisk:
      if (std::abs(p.coords[0]) > 1.0 + 1e-9)
        throw std::domain_error("unit-disk target: point outside chart range");
      return std::norm(v[0]);
  }
  return 0;
}

double TargetModel::lattice_distance(const std::array<Complex, 2>& delta) const {
  const int n = 2 * genus_;
  double x[4], a[4];
  coords_to_real(delta, x, genus_);
  for (int i = 0; i < n; ++i) {
    a[i] = 0;
    for (int j = 0; j < n; ++j) a[i] += basis_inv_[j * n + i] * x[j];
    a[i] -= std::round(a[i]);
  }
  // Search the 3^n nearest translates; exact for reduced bases.
  double best = std::numeric_limits<double>::infinity();
  int off[4] = {0, 0, 0, 0};
  const int total = (n == 2) ? 9 : 81;
  for (int t = 0; t < total; ++t) {
    int rem = t;
    for (int i = 0; i < n; ++i) {
      off[i] = rem % 3 - 1;
      rem /= 3;
    }
    double s = 0;
    for (int i = 0; i < n; ++i) {
      double y = 0;
      for (int j = 0; j < n; ++j) y += basis_[j * n + i] * (a[j] + off[j]);
      s += y * y;
    }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

double TargetModel::distance(const TargetPoint& p, const TargetPoint& q) const {
  switch (kind_) {
    case TargetKind::FlatTorus: {
      std::array<Complex, 2> delta{p.coords[0] - q.coords[0], p.coords[1] - q.coords[1]};
      return lattice_distance(delta);
    }
    case TargetKind::ProjectiveLine: {
      // Chordal distance in homogeneous coordinates, compatible with the
      // Fubini-Study normalization used for the area form.
      const Complex pw = p.coords[0], qw = q.coords[0];
      Complex p0, p1, q0, q1;
      if (p.chart == 0) {
        p0 = pw;
        p1 = 1.0;
      } else {
        p0 = 1.0;
        p1 = pw;
      }
      if (q.chart == 0) {
        q0 = qw;
        q1 = 1.0;
      } else {
        q0 = 1.0;
        q1 = qw;
      }
      const double num = std::abs(p0 * q1 - p1 * q0);
      const double den = std::sqrt((std::norm(p0) + std::norm(p1)) * (std::norm(q0) + std::norm(q1)));
      return num / den;
    }
    case TargetKind::UnitDisk:
      return std::abs(p.coords[0] - q.coords[0]);
  }
  return 0;
}

double TargetModel::injectivity_scale() const {
  if (kind_ == TargetKind::FlatTorus) return 0.5 * shortest_vector_;
  return 1.0;
}

double TargetModel::fundamental_area() const {
  if (kind_ == TargetKind::FlatTorus) return det_;
  return kPi;
}

CompactSet CompactSet::whole_space(std::vector<double> schedule) {
  CompactSet k;
  k.parts.push_back(Primitive{PrimitiveKind::WholeSpace, {}, {}});
  k.schedule = std::move(schedule);
  k.validate();
  return k;
}

CompactSet CompactSet::single_ball(TargetPoint center, double radius,
                                   std::vector<double> schedule) {
  CompactSet k;
  Primitive p;
  p.kind = PrimitiveKind::Ball;
  p.ball = Ball{center, radius};
  k.parts.push_back(p);
  k.schedule = std::move(schedule);
  k.validate();
  return k;
}

CompactSet CompactSet::coordinate_tube(int coord_index, Complex value, double radius,
                                       std::vector<double> schedule) {
  CompactSet k;
  Primitive p;
  p.kind = PrimitiveKind::Tube;
  p.tube = Tube{coord_index, value, radius};
  k.parts.push_back(p);
  k.schedule = std::move(schedule);
  k.validate();
  return k;
}

void CompactSet::validate() const {
  if (parts.empty()) throw std::invalid_argument("CompactSet: no primitives");
  if (schedule.empty()) throw std::invalid_argument("CompactSet: empty neighborhood schedule");
  for (size_t i = 0; i + 1 < schedule.size(); ++i)
    if (!(schedule[i + 1] < schedule[i]))
      throw std::invalid_argument("CompactSet: schedule must be strictly decreasing");
  if (!(schedule.back() > 0)) throw std::invalid_argument("CompactSet: schedule must stay positive");
}

double distance_to(const TargetModel& m, const CompactSet& k, const TargetPoint& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& part : k.parts) {
    double d = 0;
    switch (part.kind) {
      case CompactSet::PrimitiveKind::WholeSpace:
        return 0.0;
      case CompactSet::PrimitiveKind::Ball:
        d = std::max(0.0, m.distance(p, part.ball.center) - part.ball.radius);
        break;
      case CompactSet::PrimitiveKind::Tube: {
        if (m.kind() != TargetKind::FlatTorus)
          throw std::invalid_argument("CompactSet: tubes are defined on tori only");
        std::array<Complex, 2> delta{Complex{0, 0}, Complex{0, 0}};
        delta[part.tube.coord_index] = p.coords[part.tube.coord_index] - part.tube.value;
        // Distance in the fixed coordinate, modulo the lattice, along that slice.
        d = std::max(0.0, m.lattice_distance(delta) - part.tube.radius);
        break;
      }
    }
    best = std::min(best, d);
  }
  return best;
}

bool in_compact(const TargetModel& m, const CompactSet& k, const TargetPoint& p) {
  return distance_to(m, k, p) <= 0.0;
}

bool in_neighborhood(const TargetModel& m, const CompactSet& k, int n, const TargetPoint& p) {
  if (n < 0 || (size_t)n >= k.schedule.size())
    throw std::invalid_argument("in_neighborhood: index outside schedule");
  return distance_to(m, k, p) < k.schedule[n];
}

TargetAreaDistribution::TargetAreaDistribution(const TargetModel* model, int cells_per_dim)
    : model_(model), cells_per_dim_(cells_per_dim) {
  if (cells_per_dim < 1) throw std::invalid_argument("TargetAreaDistribution: bad resolution");
}

void TargetAreaDistribution::add(const TargetPoint& p, double weight) {
  if (weight < 0) throw std::invalid_argument("TargetAreaDistribution: negative weight");
  int64_t key = 0;
  const int n = cells_per_dim_;
  auto clampi = [n](double frac) {
    int i = (int)(frac * n);
    return std::min(n - 1, std::max(0, i));
  };
  switch (model_->kind()) {
    case TargetKind::FlatTorus: {
      const int dim = 2 * model_->genus();
      const auto frac = model_->torus_fractional(p.coords);
      for (int i = 0; i < dim; ++i) key = key * n + clampi(frac[i]);
      break;
    }
    case TargetKind::ProjectiveLine: {
      // chart id, then a grid on the closed unit chart disk.
      key = p.chart;
      key = key * n + clampi((p.coords[0].real() + 1.0) / 2.0);
      key = key * n + clampi((p.coords[0].imag() + 1.0) / 2.0);
      break;
    }
    case TargetKind::UnitDisk: {
      key = clampi((p.coords[0].real() + 1.0) / 2.0);
      key = key * n + clampi((p.coords[0].imag() + 1.0) / 2.0);
      break;
    }
  }
  cells_[key] += weight;
  total_ += weight;
}

double TargetAreaDistribution::max_cell_mass() const {
  double m = 0;
  for (const auto& [k, v] : cells_) m = std::max(m, v);
  return m;
}

double TargetAreaDistribution::min_nonempty_cell_mass() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [k, v] : cells_) m = std::min(m, v);
  return cells_.empty() ? 0.0 : m;
}

}  // namespace ahlfors
