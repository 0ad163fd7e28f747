#include "haarfact/reduce_positive.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

namespace haarfact {

DiagonalPartition partition_by_diagonal(const OperatorMatrix& T, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
  if (!check_large_diagonal(T, delta, /*positive=*/false)) {
    throw std::invalid_argument("some normalized diagonal entry is below delta");
  }
  DiagonalPartition out;
  const Eigen::VectorXd d = diagonal(T);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    (d[i] > 0 ? out.positive : out.negative).push_back(from_iota(i + 1));
  }
  return out;
}

GenerationDecomposition generations(const Collection& collection) {
  GenerationDecomposition out;
  out.source = collection;
  std::set<std::int64_t> members;
  for (const auto& K : collection) members.insert(iota_index(K));
  for (const auto& K : collection) {
    std::size_t ancestors = 0;
    DyadicInterval walk = K;
    while (walk.level > 0) {
      walk = walk.parent();
      if (members.count(iota_index(walk))) ++ancestors;
    }
    if (out.generations.size() <= ancestors) out.generations.resize(ancestors + 1);
    out.generations[ancestors].push_back(K);
  }
  for (auto& gen : out.generations) std::sort(gen.begin(), gen.end());
  return out;
}

double collection_measure(const Collection& collection) {
  if (collection.empty()) return 0.0;
  int resolution = 0;
  for (const auto& K : collection) resolution = std::max(resolution, K.level);
  std::vector<char> painted(static_cast<std::size_t>(cell_count(resolution)), 0);
  for (const auto& K : collection) {
    auto [b, e] = cell_range(K, resolution);
    for (std::int64_t c = b; c < e; ++c) painted[static_cast<std::size_t>(c)] = 1;
  }
  std::int64_t covered = 0;
  for (char p : painted) covered += p;
  return std::ldexp(static_cast<double>(covered), -resolution);
}

SignAndScale select_sign_and_s(const OperatorMatrix& T, int N, int l, double delta) {
  const int ambient = T.ambient();
  if (N < 1 || l < 1) throw std::invalid_argument("need N >= 1 and l >= 1");
  if (ambient < 2 * l * N) {
    throw std::invalid_argument("ambient too small: need Ntilde >= 2 l N");
  }
  const auto parts = partition_by_diagonal(T, delta);
  const Eigen::VectorXd d = diagonal(T);

  // per-leaf majority count along the root-to-leaf chain of ambient+1 entries
  std::int64_t plus_leaves = 0;
  std::int64_t minus_leaves = 0;
  const std::int64_t leaves = std::int64_t{1} << ambient;
  for (std::int64_t t = 0; t < leaves; ++t) {
    int plus = 0;
    for (int k = 0; k <= ambient; ++k) {
      const std::int64_t idx = (std::int64_t{1} << k) + (t >> (ambient - k)) - 1;
      if (d[idx] > 0) ++plus;
    }
    // strict majority of the ambient+1 chain members
    if (2 * plus > ambient) ++plus_leaves;
    if (2 * (ambient + 1 - plus) > ambient) ++minus_leaves;
  }
  SignAndScale out;
  out.sigma = plus_leaves >= minus_leaves ? 1 : -1;
  out.leaf_cover = std::ldexp(
      static_cast<double>(out.sigma > 0 ? plus_leaves : minus_leaves), -ambient);

  const auto decomposition =
      generations(out.sigma > 0 ? parts.positive : parts.negative);
  const auto gen_measure = [&](int k) {
    return k < static_cast<int>(decomposition.generations.size())
               ? collection_measure(decomposition.generations[static_cast<std::size_t>(k)])
               : 0.0;
  };
  const double ratio_needed = std::exp2(-1.0 / l);
  for (int step = 0; step < l; ++step) {
    const int s = step * N;
    const double ms = gen_measure(s);
    const double msN = gen_measure(s + N);
    if (ms > 0.0 && msN >= ratio_needed * ms - 1e-12) {
      out.s = s;
      out.measure_s = ms;
      out.measure_sN = msN;
      return out;
    }
  }
  throw std::runtime_error("no generation offset reached the measure ratio");
}

SignedBlockChoice signs_by_conditional_expectation(const OperatorMatrix& T,
                                                   const Collection& block,
                                                   double delta) {
  if (block.empty()) throw std::invalid_argument("empty block");
  const std::size_t sz = block.size();
  SignedBlockChoice out;
  out.signs.assign(sz, 1);
  double value = 0.0;
  for (const auto& K : block) {
    const double dK = matrix_entry(T, K, K);
    if (dK < delta * K.measure() - 1e-12) {
      throw std::invalid_argument("block diagonal entry below delta");
    }
    value += dK;
  }
  // cross[i][j] = <h_i, T h_j> + <h_j, T h_i>; the conditional expectation
  // after fixing signs 0..j-1 is diag-sum + sum of fixed cross terms, so each
  // new sign just matches the sign of its fixed-so-far column sum
  std::vector<std::vector<double>> cross(sz, std::vector<double>(sz, 0.0));
  for (std::size_t i = 0; i < sz; ++i) {
    for (std::size_t j = i + 1; j < sz; ++j) {
      cross[i][j] = matrix_entry(T, block[i], block[j]) +
                    matrix_entry(T, block[j], block[i]);
    }
  }
  for (std::size_t j = 1; j < sz; ++j) {
    double fixed = 0.0;
    for (std::size_t i = 0; i < j; ++i) fixed += out.signs[i] * cross[i][j];
    out.signs[j] = fixed >= 0.0 ? 1 : -1;
    value += out.signs[j] * fixed;
  }
  out.value = value;
  return out;
}

bounds::BigInt ntilde_min(int N, double epsilon) {
  return bounds::ntilde_min(bounds::BigInt(N), bounds::rational_from(epsilon));
}

ReduceResult reduce_to_positive(const OperatorMatrix& T, int N, double delta,
                                double epsilon, bool allow_override) {
  const int ambient = T.ambient();
  if (N < 1) throw std::invalid_argument("need N >= 1");
  if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");

  ReduceResult out;
  out.override_used = bounds::BigInt(ambient) < ntilde_min(N, epsilon);
  if (out.override_used && !allow_override) {
    throw std::invalid_argument(
        "ambient below the guaranteed reduction size " +
        ntilde_min(N, epsilon).str() + "; pass allow_override to proceed");
  }
  const int l = ambient / (2 * N);
  if (l < 1) throw std::invalid_argument("ambient too small: need Ntilde >= 2N");
  out.l = l;

  const auto sel = select_sign_and_s(T, N, l, delta);
  out.sigma = sel.sigma;
  out.s = sel.s;
  out.leaf_cover = sel.leaf_cover;
  out.measure_s = sel.measure_s;
  out.measure_sN = sel.measure_sN;
  out.measure_inequality_ok =
      sel.measure_sN >=
      (1.0 - 1.0 / ((static_cast<double>(N) / epsilon + 1.0) * std::exp2(N))) *
              sel.measure_s -
          1e-12;

  const OperatorMatrix Ts = scale(out.sigma, T);
  const auto parts = partition_by_diagonal(Ts, delta);
  const auto decomposition = generations(parts.positive);
  const auto gen_at = [&](int k) -> const Collection& {
    static const Collection empty;
    return k < static_cast<int>(decomposition.generations.size())
               ? decomposition.generations[static_cast<std::size_t>(k)]
               : empty;
  };
  std::set<std::int64_t> members;
  for (const auto& K : parts.positive) members.insert(iota_index(K));

  auto& sys = out.system;
  sys.n = N;
  sys.ambient = ambient;
  sys.blocks.resize(static_cast<std::size_t>(y_dim(N)));

  // ownership: interval of generation s+k -> (index J it serves, its sign)
  std::map<std::int64_t, std::pair<DyadicInterval, int>> owner;

  const auto finish_block = [&](const DyadicInterval& J, Collection&& raw) {
    if (raw.empty()) {
      throw std::runtime_error(
          "empty block at index [" + std::to_string(J.level) + "," +
          std::to_string(J.pos) + "]: ambient too small for this operator");
    }
    std::sort(raw.begin(), raw.end());
    const auto choice = signs_by_conditional_expectation(Ts, raw, delta);
    auto& block = sys.block(J);
    for (std::size_t i = 0; i < raw.size(); ++i) {
      block.push_back({raw[i], choice.signs[i]});
      owner[iota_index(raw[i])] = {J, choice.signs[i]};
    }
  };

  finish_block(DyadicInterval{0, 0}, Collection(gen_at(out.s)));
  for (int k = 0; k < N; ++k) {
    std::map<std::int64_t, Collection> next;  // iota(child index) -> intervals
    for (const auto& K : gen_at(out.s + k + 1)) {
      // minimal strict ancestor inside the collection lies in generation s+k
      DyadicInterval walk = K;
      do {
        walk = walk.parent();
      } while (!members.count(iota_index(walk)));
      const auto it = owner.find(iota_index(walk));
      if (it == owner.end()) continue;  // ancestor serves no level-k index
      const auto& [J, theta] = it->second;
      if (J.level != k) continue;
      const bool on_plus_side = walk.left_half().contains(K) == (theta > 0);
      const DyadicInterval child = on_plus_side ? J.left_half() : J.right_half();
      next[iota_index(child)].push_back(K);
    }
    for (const auto& child : level_intervals(k + 1)) {
      auto it = next.find(iota_index(child));
      finish_block(child, it == next.end() ? Collection{} : std::move(it->second));
    }
  }

  auto ops = associated_almost(sys);
  out.a_bound = ops.a_norm_bound;
  out.Tpos = compose(ops.A, compose(Ts, ops.B));
  out.A = std::move(ops.A);
  out.B = std::move(ops.B);
  return out;
}

HaarMultiplier diagonal_sign_multiplier(const OperatorMatrix& T) {
  const Eigen::VectorXd d = diagonal(T);
  HaarMultiplier M = HaarMultiplier::zero(T.ambient());
  for (Eigen::Index i = 0; i < d.size(); ++i) M.entries[i] = d[i] >= 0 ? 1.0 : -1.0;
  return M;
}

}  // namespace haarfact
