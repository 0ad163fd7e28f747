#include "haarfact/diagonalize.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "haarfact/bounds.hpp"
#include "haarfact/rng.hpp"

namespace haarfact {

namespace {

// substream tags keeping the try-indexed sign draws independent
constexpr std::uint64_t kThetaStream = 0x7e7a5u;

Eigen::MatrixXd block_matrix(const AlmostFaithfulSystem& sys) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(y_dim(sys.ambient), y_dim(sys.n));
  for (const auto& I : intervals_up_to(sys.n)) {
    for (const auto& [K, theta] : sys.block(I)) {
      B(iota_index(K) - 1, iota_index(I) - 1) += theta;
    }
  }
  return B;
}

}  // namespace

double DiagonalizationParams::eta0() const {
  return std::ldexp(eta * delta, -(4 * n + 2));
}

int choose_m(int n, double gamma, double delta, double eta) {
  return bounds::choose_m(bounds::rational_from(gamma), bounds::rational_from(delta),
                          bounds::rational_from(eta), n);
}

AlmostFaithfulSystem random_faithful(int n, int m, int N, std::uint64_t seed) {
  if (n < 0 || m < 0) throw std::invalid_argument("need n, m >= 0");
  if (N < n + m) throw std::invalid_argument("ambient too small: need N >= n + m");
  std::vector<int> freqs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) freqs[static_cast<std::size_t>(i)] = m + i;
  return frequency_system(freqs, N, [seed](const DyadicInterval& K) {
    return Rng(seed, kThetaStream, static_cast<std::uint64_t>(iota_index(K))).sign();
  });
}

Eigen::MatrixXd gram(const OperatorMatrix& T, const AlmostFaithfulSystem& sys) {
  if (!T.square() || T.ambient() != sys.ambient) {
    throw std::invalid_argument("operator and system ambient mismatch");
  }
  const Eigen::MatrixXd B = block_matrix(sys);
  Eigen::VectorXd w(y_dim(sys.ambient));
  for (std::int64_t i = 0; i < w.size(); ++i) w[i] = from_iota(i + 1).measure();
  // X = B^T W (T B): X_{I,J} = sum_K B_{K,I} (TB)_{K,J} |K|
  return B.transpose() * (w.asDiagonal() * (T.entries() * B));
}

double expected_diagonal(const OperatorMatrix& T, const AlmostFaithfulSystem& sys,
                         const DyadicInterval& I) {
  const auto validation = validate(sys);
  if (!validation.frequencies) {
    throw std::invalid_argument("expected_diagonal needs a frequency system");
  }
  const int level = (*validation.frequencies)[static_cast<std::size_t>(I.level)];
  const std::int64_t base = (std::int64_t{1} << level) - 1;
  double sum = 0.0;
  for (std::int64_t p = 0; p < (std::int64_t{1} << level); ++p) {
    sum += T.entries()(base + p, base + p);
  }
  return I.measure() * sum / static_cast<double>(std::int64_t{1} << level);
}

DiagonalizationResult diagonalize_search(const OperatorMatrix& T,
                                         const DiagonalizationParams& params) {
  if (params.max_tries < 1) throw std::invalid_argument("max_tries must be >= 1");
  const int N = T.ambient();
  if (N < params.n + params.m) {
    throw std::invalid_argument("ambient too small: need N >= n + m");
  }
  const double tau_off = params.off_threshold.value_or(params.eta0());
  const double tau_diag = params.diag_threshold.value_or(params.eta0());

  const auto index_set = intervals_up_to(params.n);
  const std::int64_t dim = y_dim(params.n);

  DiagonalizationResult best;
  double best_score = std::numeric_limits<double>::infinity();

  for (int t = 0; t < params.max_tries; ++t) {
    DiagonalizationResult cur;
    cur.system = random_faithful(params.n, params.m, N,
                                 substream_seed(params.seed, static_cast<std::uint64_t>(t)));
    cur.gram = gram(T, cur.system);
    cur.tries_used = t + 1;

    cur.D = HaarMultiplier::zero(params.n);
    for (std::int64_t i = 0; i < dim; ++i) {
      cur.D.entries[i] = cur.gram(i, i) / from_iota(i + 1).measure();
    }
    for (std::int64_t i = 0; i < dim; ++i) {
      for (std::int64_t j = 0; j < dim; ++j) {
        if (i != j) cur.offdiag_max = std::max(cur.offdiag_max, std::abs(cur.gram(i, j)));
      }
    }
    for (const auto& I : index_set) {
      const std::int64_t i = iota_index(I) - 1;
      cur.diag_dev_max = std::max(
          cur.diag_dev_max, std::abs(cur.gram(i, i) - expected_diagonal(T, cur.system, I)));
    }
    cur.error_bound = std::ldexp(cur.offdiag_max, 4 * params.n + 2);
    cur.success = cur.offdiag_max < tau_off && cur.diag_dev_max < tau_diag;
    if (cur.success) return cur;

    const double score =
        std::max(cur.offdiag_max / tau_off, cur.diag_dev_max / tau_diag);
    if (score < best_score) {
      best_score = score;
      best = std::move(cur);
    }
  }
  best.tries_used = params.max_tries;
  return best;
}

ResidualCheck residual_check(const OperatorMatrix& T,
                             const DiagonalizationResult& result,
                             const SpaceSpec& spec, int budget,
                             std::uint64_t seed) {
  const auto factors = associated_faithful(result.system);
  ResidualCheck out;
  out.residual = subtract(compose(factors.Ahat, compose(T, factors.Bhat)),
                          result.D.to_operator());
  out.measured_lower_bound = op_norm_lower(out.residual, spec, budget, seed);
  return out;
}

}  // namespace haarfact
