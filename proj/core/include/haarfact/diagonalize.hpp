#pragma once

#include <cstdint>
#include <optional>

#include "haarfact/faithful.hpp"

namespace haarfact {

struct DiagonalizationParams {
  int n = 0;            // top level of the produced multiplier's index tree
  double gamma = 1.0;   // norm budget of the operator (advisory)
  double delta = 1.0;
  double eta = 1.0;
  int m = 1;  // first frequency; choose_m gives the certified value, desk runs override
  std::optional<double> off_threshold;   // default eta0
  std::optional<double> diag_threshold;  // default eta0
  int max_tries = 64;
  std::uint64_t seed = 0;

  // eta0 = eta delta / 2^{4n+2}, the proof's event threshold
  double eta0() const;
};

struct DiagonalizationResult {
  bool success = false;
  AlmostFaithfulSystem system;  // faithful, frequencies (m, ..., m+n)
  HaarMultiplier D;             // d_I = X_{I,I}/|I|
  Eigen::MatrixXd gram;         // X_{I,J} = <h~_I, T h~_J>
  double offdiag_max = 0.0;     // max_{I != J} |X_{I,J}|
  double diag_dev_max = 0.0;    // max_I |X_{I,I} - E X_{I,I}|
  int tries_used = 0;
  // proof-verbatim certified bound on ||Ahat T Bhat - D||, valid in every
  // space: 2^{4n+2} * offdiag_max
  double error_bound = 0.0;
};

// smallest m with 2^m > 2^{4(n+2)} (gamma/eta0)^4 (exact integer arithmetic)
int choose_m(int n, double gamma, double delta, double eta);

// faithful system with frequencies (m, m+1, ..., m+n) and per-interval random
// signs; deterministic per seed, independent of construction order.
// Requires ambient N >= n + m.
AlmostFaithfulSystem random_faithful(int n, int m, int N, std::uint64_t seed);

// X_{I,J} = <h~_I, T h~_J> over the system's index tree
Eigen::MatrixXd gram(const OperatorMatrix& T, const AlmostFaithfulSystem& sys);

// E_theta X_{I,I} = |I| * average over K at the level-(I) frequency of the
// normalized diagonal <h_K, T h_K>/|K|; requires a frequency system
double expected_diagonal(const OperatorMatrix& T, const AlmostFaithfulSystem& sys,
                         const DyadicInterval& I);

// resamples the random system until every off-diagonal |X_{I,J}| and every
// diagonal deviation |X_{I,I} - E X_{I,I}| is below its threshold; returns
// the best try found when max_tries is exhausted (success = false)
DiagonalizationResult diagonalize_search(const OperatorMatrix& T,
                                         const DiagonalizationParams& params);

struct ResidualCheck {
  OperatorMatrix residual;  // Ahat T Bhat - D on Y_n
  WitnessedBound measured_lower_bound;
};

// forms the factorization residual explicitly and measures a certified lower
// bound on its norm (to be compared against result.error_bound)
ResidualCheck residual_check(const OperatorMatrix& T,
                             const DiagonalizationResult& result,
                             const SpaceSpec& spec, int budget = 50,
                             std::uint64_t seed = 0);

}  // namespace haarfact
