#include "haarfact/faithful.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace haarfact {

namespace {

std::int64_t block_index(const AlmostFaithfulSystem& sys, const DyadicInterval& I) {
  if (I.level > sys.n) throw std::invalid_argument("index interval outside D_{<=n}");
  return iota_index(I) - 1;
}

// cell values of h~ = sum theta_K h_K: +theta on the left half of each
// interval, -theta on the right; stays in {-1, 0, +1} when the block is
// internally disjoint
std::vector<int> block_profile(const std::vector<SignedInterval>& block,
                               int resolution) {
  std::vector<int> values(static_cast<std::size_t>(cell_count(resolution)), 0);
  for (const auto& [K, theta] : block) {
    auto [b, e] = cell_range(K, resolution);
    const std::int64_t mid = b + (e - b) / 2;
    for (std::int64_t c = b; c < mid; ++c) values[static_cast<std::size_t>(c)] += theta;
    for (std::int64_t c = mid; c < e; ++c) values[static_cast<std::size_t>(c)] -= theta;
  }
  return values;
}

}  // namespace

const std::vector<SignedInterval>& AlmostFaithfulSystem::block(
    const DyadicInterval& I) const {
  return blocks.at(static_cast<std::size_t>(block_index(*this, I)));
}

std::vector<SignedInterval>& AlmostFaithfulSystem::block(const DyadicInterval& I) {
  return blocks.at(static_cast<std::size_t>(block_index(*this, I)));
}

SystemValidation validate(const AlmostFaithfulSystem& sys) {
  SystemValidation out;
  if (sys.n < 0 || sys.ambient < 0 ||
      sys.blocks.size() != static_cast<std::size_t>(y_dim(sys.n))) {
    out.detail = "block count does not match the index tree";
    return out;
  }
  for (const auto& block : sys.blocks) {
    for (const auto& [K, theta] : block) {
      if (theta != 1 && theta != -1) {
        out.detail = "sign must be +1 or -1";
        return out;
      }
      if (K.level > sys.ambient) {
        out.detail = "block interval finer than the ambient level";
        return out;
      }
    }
  }

  const int resolution = sys.ambient + 1;

  // (i) within-block disjointness and no interval shared across blocks
  std::set<std::int64_t> seen;
  for (const auto& block : sys.blocks) {
    std::vector<int> paint(static_cast<std::size_t>(cell_count(resolution)), 0);
    for (const auto& [K, theta] : block) {
      if (!seen.insert(iota_index(K)).second) {
        out.detail = "interval appears in two blocks";
        return out;
      }
      auto [b, e] = cell_range(K, resolution);
      for (std::int64_t c = b; c < e; ++c) {
        if (paint[static_cast<std::size_t>(c)]++) {
          out.detail = "overlapping intervals inside one block";
          return out;
        }
      }
    }
  }

  // (ii) successor blocks inside the parent's level sets; track equality and
  // root coverage for the faithful verdict
  bool faithful = true;
  const auto index_set = intervals_up_to(sys.n);
  for (const auto& I : index_set) {
    if (I.level == sys.n) continue;
    const auto profile = block_profile(sys.block(I), resolution);
    for (int side : {+1, -1}) {
      const DyadicInterval child = side > 0 ? I.left_half() : I.right_half();
      std::vector<char> covered(profile.size(), 0);
      for (const auto& [K, theta] : sys.block(child)) {
        auto [b, e] = cell_range(K, resolution);
        for (std::int64_t c = b; c < e; ++c) {
          if (profile[static_cast<std::size_t>(c)] != side) {
            out.detail = "successor block leaves the parent's level set";
            return out;
          }
          covered[static_cast<std::size_t>(c)] = 1;
        }
      }
      for (std::size_t c = 0; c < profile.size(); ++c) {
        if (profile[c] == side && !covered[c]) faithful = false;
      }
    }
  }
  {
    const auto root_profile = block_profile(sys.blocks[0], resolution);
    for (int v : root_profile) {
      if (v == 0) faithful = false;
    }
  }

  out.almost_faithful = true;
  out.faithful = faithful;

  // frequency detection: one interval level per index level, strictly increasing
  std::vector<int> freqs;
  bool has_freqs = true;
  for (int i = 0; i <= sys.n && has_freqs; ++i) {
    int level = -1;
    for (const auto& I : level_intervals(i)) {
      const auto& block = sys.block(I);
      if (block.empty()) {
        has_freqs = false;
        break;
      }
      for (const auto& [K, theta] : block) {
        if (level == -1) level = K.level;
        if (K.level != level) {
          has_freqs = false;
          break;
        }
      }
      if (!has_freqs) break;
    }
    if (!has_freqs) break;
    if (!freqs.empty() && level <= freqs.back()) has_freqs = false;
    freqs.push_back(level);
  }
  if (has_freqs) out.frequencies = std::move(freqs);
  return out;
}

HaarVector block_vector(const AlmostFaithfulSystem& sys, const DyadicInterval& I) {
  const auto& block = sys.block(I);
  if (block.empty()) throw std::invalid_argument("empty block has no block vector");
  HaarVector v = HaarVector::zero(sys.ambient);
  for (const auto& [K, theta] : block) v.coeffs[iota_index(K) - 1] += theta;
  return v;
}

double block_measure(const AlmostFaithfulSystem& sys, const DyadicInterval& I) {
  double total = 0.0;
  for (const auto& [K, theta] : sys.block(I)) total += K.measure();
  return total;
}

namespace {

// rows of the analysis operator: row iota(I)-1 has theta_K |K| / denom_I at
// the columns of B_I; columns of the synthesis operator are the h~_I
AlmostFaithfulOperators build_pair(const AlmostFaithfulSystem& sys,
                                   bool faithful_denominator) {
  AlmostFaithfulOperators out;
  out.B = OperatorMatrix(sys.n, sys.ambient);
  out.A = OperatorMatrix(sys.ambient, sys.n);
  const double mu = block_measure(sys, DyadicInterval{0, 0});
  double bound = 1.0 / mu;
  std::vector<double> level_max(static_cast<std::size_t>(sys.n) + 1, 0.0);
  for (const auto& I : intervals_up_to(sys.n)) {
    const auto& block = sys.block(I);
    if (block.empty()) throw std::invalid_argument("empty block in factorization pair");
    const std::int64_t row = iota_index(I) - 1;
    const double denom = faithful_denominator ? I.measure() : block_measure(sys, I);
    for (const auto& [K, theta] : block) {
      const std::int64_t col = iota_index(K) - 1;
      out.B.entries()(col, row) += theta;
      out.A.entries()(row, col) = theta * K.measure() / denom;
    }
    if (I.level > 0) {
      level_max[static_cast<std::size_t>(I.level)] =
          std::max(level_max[static_cast<std::size_t>(I.level)],
                   I.measure() / block_measure(sys, I) - 1.0 / mu);
    }
  }
  for (int k = 1; k <= sys.n; ++k) bound += level_max[static_cast<std::size_t>(k)];
  out.a_norm_bound = bound;
  return out;
}

}  // namespace

FaithfulOperators associated_faithful(const AlmostFaithfulSystem& sys) {
  if (!validate(sys).faithful) {
    throw std::invalid_argument("associated_faithful requires a faithful system");
  }
  auto pair = build_pair(sys, /*faithful_denominator=*/true);
  return FaithfulOperators{std::move(pair.B), std::move(pair.A)};
}

AlmostFaithfulOperators associated_almost(const AlmostFaithfulSystem& sys) {
  if (!validate(sys).almost_faithful) {
    throw std::invalid_argument("associated_almost requires an almost faithful system");
  }
  return build_pair(sys, /*faithful_denominator=*/false);
}

AlmostFaithfulSystem frequency_system(
    const std::vector<int>& frequencies, int ambient,
    const std::function<int(const DyadicInterval&)>& sign_of) {
  if (frequencies.empty()) throw std::invalid_argument("need at least one frequency");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (frequencies[i] < (i == 0 ? 0 : frequencies[i - 1] + 1)) {
      throw std::invalid_argument("frequencies must be strictly increasing and >= 0");
    }
  }
  const int n = static_cast<int>(frequencies.size()) - 1;
  if (ambient < 0) ambient = frequencies.back();
  if (frequencies.back() > ambient) {
    throw std::invalid_argument("last frequency exceeds the ambient level");
  }

  AlmostFaithfulSystem sys;
  sys.n = n;
  sys.ambient = ambient;
  sys.blocks.resize(static_cast<std::size_t>(y_dim(n)));

  const auto tile = [&](const DyadicInterval& piece, int target_level,
                        std::vector<SignedInterval>& into) {
    for (std::int64_t q = 0; q < (std::int64_t{1} << (target_level - piece.level)); ++q) {
      DyadicInterval K{target_level, (piece.pos << (target_level - piece.level)) + q};
      into.push_back({K, sign_of(K)});
    }
  };

  tile(DyadicInterval{0, 0}, frequencies[0], sys.blocks[0]);
  for (int i = 0; i < n; ++i) {
    for (const auto& I : level_intervals(i)) {
      for (const auto& [K, theta] : sys.block(I)) {
        // theta = +1: left half carries the +1 level set, right the -1
        const DyadicInterval plus = theta > 0 ? K.left_half() : K.right_half();
        const DyadicInterval minus = theta > 0 ? K.right_half() : K.left_half();
        tile(plus, frequencies[static_cast<std::size_t>(i) + 1],
             sys.block(I.left_half()));
        tile(minus, frequencies[static_cast<std::size_t>(i) + 1],
             sys.block(I.right_half()));
      }
    }
  }
  for (auto& block : sys.blocks) {
    std::sort(block.begin(), block.end(),
              [](const SignedInterval& a, const SignedInterval& b) {
                return a.interval < b.interval;
              });
  }
  return sys;
}

AlmostFaithfulSystem frequency_faithful(const std::vector<int>& frequencies,
                                        int ambient) {
  return frequency_system(frequencies, ambient,
                          [](const DyadicInterval&) { return 1; });
}

}  // namespace haarfact
