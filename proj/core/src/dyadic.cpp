#include "haarfact/dyadic.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace haarfact {

namespace {

void check_valid(const DyadicInterval& I) {
  if (I.level < 0 || I.level > 62 || I.pos < 0 ||
      I.pos >= (std::int64_t{1} << I.level)) {
    throw std::invalid_argument("dyadic interval out of range");
  }
}

}  // namespace

double DyadicInterval::measure() const { return std::ldexp(1.0, -level); }

double DyadicInterval::left() const {
  return static_cast<double>(pos) * measure();
}

double DyadicInterval::right() const {
  return static_cast<double>(pos + 1) * measure();
}

DyadicInterval DyadicInterval::left_half() const {
  check_valid(*this);
  return {level + 1, 2 * pos};
}

DyadicInterval DyadicInterval::right_half() const {
  check_valid(*this);
  return {level + 1, 2 * pos + 1};
}

DyadicInterval DyadicInterval::parent() const {
  check_valid(*this);
  if (level == 0) throw std::invalid_argument("[0,1) has no parent");
  return {level - 1, pos / 2};
}

bool DyadicInterval::contains(const DyadicInterval& other) const {
  if (other.level < level) return false;
  return (other.pos >> (other.level - level)) == pos;
}

bool DyadicInterval::strictly_contains(const DyadicInterval& other) const {
  return other.level > level && contains(other);
}

bool DyadicInterval::disjoint_from(const DyadicInterval& other) const {
  return !contains(other) && !other.contains(*this);
}

std::int64_t iota_index(const DyadicInterval& I) {
  check_valid(I);
  return (std::int64_t{1} << I.level) + I.pos;
}

DyadicInterval from_iota(std::int64_t index) {
  if (index < 1) throw std::invalid_argument("iota index must be >= 1");
  int level = std::bit_width(static_cast<std::uint64_t>(index)) - 1;
  return {level, index - (std::int64_t{1} << level)};
}

std::vector<DyadicInterval> level_intervals(int k) {
  if (k < 0 || k > 62) throw std::invalid_argument("level out of range");
  std::vector<DyadicInterval> out;
  out.reserve(std::size_t{1} << k);
  for (std::int64_t i = 0; i < (std::int64_t{1} << k); ++i) out.push_back({k, i});
  return out;
}

std::vector<DyadicInterval> intervals_up_to(int n) {
  if (n < 0) throw std::invalid_argument("ambient level must be >= 0");
  std::vector<DyadicInterval> out;
  out.reserve(static_cast<std::size_t>(y_dim(n)));
  for (int k = 0; k <= n; ++k) {
    for (std::int64_t i = 0; i < (std::int64_t{1} << k); ++i) out.push_back({k, i});
  }
  return out;
}

double StepFunction::integral() const {
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

std::pair<std::int64_t, std::int64_t> cell_range(const DyadicInterval& I,
                                                 int resolution) {
  check_valid(I);
  if (I.level > resolution) {
    throw std::invalid_argument("interval finer than the rendering resolution");
  }
  int shift = resolution - I.level;
  return {I.pos << shift, (I.pos + 1) << shift};
}

StepFunction haar_step(const DyadicInterval& I, int resolution) {
  check_valid(I);
  if (I.level + 1 > resolution) {
    throw std::invalid_argument("haar_step needs level(I) + 1 <= resolution");
  }
  StepFunction f;
  f.resolution = resolution;
  f.values.assign(static_cast<std::size_t>(cell_count(resolution)), 0.0);
  auto [lb, le] = cell_range(I.left_half(), resolution);
  auto [rb, re] = cell_range(I.right_half(), resolution);
  for (std::int64_t c = lb; c < le; ++c) f.values[static_cast<std::size_t>(c)] = 1.0;
  for (std::int64_t c = rb; c < re; ++c) f.values[static_cast<std::size_t>(c)] = -1.0;
  return f;
}

}  // namespace haarfact
