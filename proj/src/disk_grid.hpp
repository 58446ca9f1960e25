// Internal: bucket grid over placed disks for fast open-intersection queries,
// and the deterministic greedy disjoint-subset extraction built on it.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "ahlfors/geometry.hpp"

namespace ahlfors::detail {

class DiskGrid {
public:
  explicit DiskGrid(double cell) : cell_(std::max(cell, 1e-300)) {}

  bool conflicts(const PlanarDisk& d, const std::vector<PlanarDisk>& all) const {
    const double reach = d.radius + max_radius_;
    const long ix0 = key(d.center.real() - reach), ix1 = key(d.center.real() + reach);
    const long iy0 = key(d.center.imag() - reach), iy1 = key(d.center.imag() + reach);
    for (long iy = iy0; iy <= iy1; ++iy)
      for (long ix = ix0; ix <= ix1; ++ix) {
        auto it = cells_.find(pack(ix, iy));
        if (it == cells_.end()) continue;
        for (size_t idx : it->second)
          if (disks_intersect(d, all[idx])) return true;
      }
    return false;
  }

  void insert(size_t idx, const PlanarDisk& d) {
    cells_[pack(key(d.center.real()), key(d.center.imag()))].push_back(idx);
    max_radius_ = std::max(max_radius_, d.radius);
  }

private:
  long key(double x) const {
    const double q = x / cell_;
    // Clamp: radii can span hundreds of orders of magnitude.
    if (q > 1e15) return (long)1e15;
    if (q < -1e15) return -(long)1e15;
    return (long)std::floor(q);
  }
  static int64_t pack(long ix, long iy) { return (int64_t)ix * 2000003 + iy; }
  double cell_;
  double max_radius_ = 0;
  std::map<int64_t, std::vector<size_t>> cells_;
};

inline bool disk_order(const PlanarDisk& a, const PlanarDisk& b) {
  if (a.radius != b.radius) return a.radius > b.radius;
  if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
  return a.center.imag() < b.center.imag();
}

// Indices (in input order) of a maximal pairwise-disjoint subset, chosen
// greedily by radius descending with lexicographic tiebreak.
inline std::vector<size_t> greedy_disjoint_subset(const std::vector<PlanarDisk>& disks) {
  std::vector<size_t> order(disks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return disk_order(disks[a], disks[b]); });
  double cell = 1e-12;
  for (const auto& d : disks) cell = std::max(cell, d.radius);
  DiskGrid grid(cell);
  std::vector<PlanarDisk> kept;
  std::vector<size_t> kept_idx;
  for (size_t idx : order) {
    if (grid.conflicts(disks[idx], kept)) continue;
    grid.insert(kept.size(), disks[idx]);
    kept.push_back(disks[idx]);
    kept_idx.push_back(idx);
  }
  std::sort(kept_idx.begin(), kept_idx.end());
  return kept_idx;
}

}  // namespace ahlfors::detail
