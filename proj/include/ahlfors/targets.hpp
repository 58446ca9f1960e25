// Model targets: flat tori C^g/Lambda (g = 1, 2), the projective line with
// the Fubini-Study metric, and the Euclidean unit disk used as a non-compact
// probe. Compact subsets come with a neighborhood radius schedule.
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "ahlfors/geometry.hpp"

namespace ahlfors {

enum class TargetKind { FlatTorus, ProjectiveLine, UnitDisk };

struct TargetPoint {
  std::array<Complex, 2> coords{Complex{0, 0}, Complex{0, 0}};
  int chart = 0;  // projective line only: 0 = w, 1 = 1/w
};

using TangentVector = std::array<Complex, 2>;

class TargetModel {
public:
  static TargetModel flat_torus(const std::vector<Complex>& lattice_g1);  // 2 generators in C
  // 4 generators in C^2, each given as a pair of complex numbers.
  static TargetModel flat_torus_g2(const std::vector<std::array<Complex, 2>>& lattice);
  static TargetModel projective_line();
  static TargetModel unit_disk();

  TargetKind kind() const { return kind_; }
  int genus() const { return genus_; }  // complex dimension for tori, 1 otherwise
  bool compact() const { return kind_ != TargetKind::UnitDisk; }

  // Reduces raw chart coordinates into the fundamental domain / preferred chart.
  TargetPoint make_point(const std::array<Complex, 2>& raw) const;

  double metric_norm_sq(const TargetPoint& p, const TangentVector& v) const;
  double distance(const TargetPoint& p, const TargetPoint& q) const;

  // Half the shortest lattice vector for tori; 1 for the other models.
  double injectivity_scale() const;

  // Lattice-reduced representative of a raw C^g vector (tori only).
  std::array<Complex, 2> reduce(const std::array<Complex, 2>& raw) const;
  // Fractional lattice coordinates in [0,1)^{2g} (tori only).
  std::array<double, 4> torus_fractional(const std::array<Complex, 2>& raw) const;
  // Shortest representative of a difference vector modulo the lattice.
  double lattice_distance(const std::array<Complex, 2>& delta) const;

  double fundamental_area() const;  // tori: |det B|; P1: pi; unit disk: pi

private:
  TargetKind kind_ = TargetKind::UnitDisk;
  int genus_ = 1;
  // Real 2g x 2g lattice basis (column major) and its inverse.
  std::array<double, 16> basis_{};
  std::array<double, 16> basis_inv_{};
  double shortest_vector_ = 1.0;
  double det_ = 1.0;
};

// Membership primitives: metric balls, sub-torus tubes (tori only: the set
// of points whose i-th coordinate lies within `radius` of `value`), or the
// whole space. A CompactSet is a finite union with a neighborhood schedule.
struct CompactSet {
  struct Ball {
    TargetPoint center;
    double radius;
  };
  struct Tube {
    int coord_index;  // 0 or 1
    Complex value;
    double radius;
  };
  enum class PrimitiveKind { WholeSpace, Ball, Tube };
  struct Primitive {
    PrimitiveKind kind = PrimitiveKind::WholeSpace;
    Ball ball{};
    Tube tube{};
  };

  std::vector<Primitive> parts;
  std::vector<double> schedule;  // strictly decreasing neighborhood radii

  static CompactSet whole_space(std::vector<double> schedule);
  static CompactSet single_ball(TargetPoint center, double radius, std::vector<double> schedule);
  static CompactSet coordinate_tube(int coord_index, Complex value, double radius,
                                    std::vector<double> schedule);

  void validate() const;
};

double distance_to(const TargetModel& m, const CompactSet& k, const TargetPoint& p);
bool in_neighborhood(const TargetModel& m, const CompactSet& k, int n, const TargetPoint& p);
bool in_compact(const TargetModel& m, const CompactSet& k, const TargetPoint& p);

// Cell-binned image-area bookkeeping; normalizing by total mass approximates
// the limit current of a disk family. Cells are stored sparsely.
class TargetAreaDistribution {
public:
  TargetAreaDistribution(const TargetModel* model, int cells_per_dim);

  void add(const TargetPoint& p, double weight);
  double total_mass() const { return total_; }
  double max_cell_mass() const;
  double min_nonempty_cell_mass() const;
  size_t nonempty_cells() const { return cells_.size(); }
  int cells_per_dim() const { return cells_per_dim_; }
  const std::map<int64_t, double>& cells() const { return cells_; }

private:
  const TargetModel* model_;
  int cells_per_dim_;
  std::map<int64_t, double> cells_;
  double total_ = 0;
};

template <typename Range>
TargetAreaDistribution accumulate_distribution(const TargetModel& m, const Range& images,
                                               int cells_per_dim = 64) {
  TargetAreaDistribution dist(&m, cells_per_dim);
  for (const auto& [point, weight] : images) dist.add(point, weight);
  return dist;
}

}  // namespace ahlfors
