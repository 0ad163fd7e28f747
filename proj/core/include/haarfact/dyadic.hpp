#pragma once

#include <compare>
#include <cstdint>
#include <vector>

namespace haarfact {

// Half-open dyadic interval [pos/2^level, (pos+1)/2^level) of [0,1).
// Ordered by (level, pos), i.e. by tree level then left to right, which is
// exactly the order of the index iota = 2^level + pos.
struct DyadicInterval {
  int level = 0;
  std::int64_t pos = 0;

  friend auto operator<=>(const DyadicInterval&, const DyadicInterval&) = default;

  double measure() const;
  double left() const;
  double right() const;

  // left half is the "+1 side" of the Haar function, right half the "-1 side"
  DyadicInterval left_half() const;
  DyadicInterval right_half() const;
  DyadicInterval parent() const;  // throws for [0,1)

  bool contains(const DyadicInterval& other) const;           // other subset of this
  bool strictly_contains(const DyadicInterval& other) const;  // proper subset
  bool disjoint_from(const DyadicInterval& other) const;
};

// bijection D -> {1, 2, 3, ...}
std::int64_t iota_index(const DyadicInterval& I);
DyadicInterval from_iota(std::int64_t index);

// all 2^k intervals of level k, left to right
std::vector<DyadicInterval> level_intervals(int k);

// all of D_{<=n}, sorted by (level, pos); size 2^{n+1}-1
std::vector<DyadicInterval> intervals_up_to(int n);

// dimension of the span of {h_I : I in D_{<=n}}
inline std::int64_t y_dim(int n) { return (std::int64_t{1} << (n + 1)) - 1; }

// cell count at the canonical rendering resolution for ambient n
inline std::int64_t cell_count(int resolution) { return std::int64_t{1} << resolution; }

// Piecewise-constant function on [0,1): 2^resolution equal cells.
struct StepFunction {
  int resolution = 0;
  std::vector<double> values;  // size 2^resolution

  double integral() const;
};

// h_I rendered at 2^resolution cells: +1 on the left half of I, -1 on the
// right half, 0 elsewhere; requires level(I) + 1 <= resolution
StepFunction haar_step(const DyadicInterval& I, int resolution);

// index range [begin, end) of the cells of I at the given resolution
std::pair<std::int64_t, std::int64_t> cell_range(const DyadicInterval& I, int resolution);

}  // namespace haarfact
