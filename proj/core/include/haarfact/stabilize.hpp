#pragma once

#include "haarfact/bounds.hpp"
#include "haarfact/diagonalize.hpp"

namespace haarfact {

struct StabilizationParams {
  double gamma = 1.0;
  double delta = 1.0;
  double eta = 1.0 / 12.0;
  int m = 1;                      // first frequency of the diagonalization
  std::optional<int> ntilde;      // chain length; default: ntilde_chain formula
  std::optional<double> bin_width;  // default eta*delta/(n+1), or /K
  std::optional<double> off_threshold;
  std::optional<double> diag_threshold;
  int max_tries = 64;
  std::uint64_t seed = 0;
  std::optional<double> unconditional_K;  // set => unconditional-space mode
  SpaceSpec spec{};  // space used for norm estimates (Neumann q etc.)
};

struct StabilizationResult {
  std::vector<int> levels;  // pigeonholed chain levels k_0 < ... < k_n
  double c = 0.0;           // multiplier entry at [0, 2^{-k_0})
  HaarMultiplier Dstab;     // stabilized multiplier on Y_n
  double stab_error_bound = 0.0;  // bound on ||Dstab - c I||
  bool unconditional_mode = false;
  double K = 1.0;
  bool wide_bins = false;  // unconditional with K > n+1: bins wider than general
};

// chain length the pigeonhole argument requires: 2 n (n+1) ceil(gamma/(eta delta)) + 1,
// or 2 n ceil(K gamma/(eta delta)) + 1 with K-unconditionality
bounds::BigInt ntilde_chain(double gamma, double delta, double eta, int n,
                            std::optional<double> K = std::nullopt);

// Bins [-gamma, gamma] at the given width and returns the levels of the
// first n+1 entries (ascending) in the lowest-index bin holding at least
// n+1 of them; nullopt when no bin qualifies (chain too short).
std::optional<std::vector<int>> pigeonhole_levels(const std::vector<double>& entries,
                                                  double gamma, int n, double width);

// block average d^stab_I = sum_{K in B_I} d_K |K| / |I| over the canonical
// frequency system with the given levels; equals Ahat D Bhat
HaarMultiplier stabilized_multiplier(const HaarMultiplier& D,
                                     const std::vector<int>& levels);

// sum over levels k of max_{level(I)=k} |d^stab_I - c|; valid in every space
double center_and_bound(const HaarMultiplier& Dstab, double c);
// K-unconditional variant: K * max_I |d^stab_I - c|
double center_and_bound_unconditional(const HaarMultiplier& Dstab, double c,
                                      double K);

struct NeumannResult {
  OperatorMatrix inverse;
  double q = 0.0;      // contraction estimate for ||I - Q||
  double bound = 0.0;  // 1/(1-q) >= ||Q^{-1}||
};

// Direct solve for Q^{-1}, verified by multiplying back (<= 1e-10), with the
// Neumann bound from q = ||I - Q||; q defaults to the exact L2 value.
// Throws when q >= 1 or Q is singular.
NeumannResult neumann_invert(const OperatorMatrix& Q,
                             std::optional<double> q = std::nullopt);

struct StabilizeOutcome {
  double c = 0.0;
  // projectional certificate: A T B ~ c I on Y_n with A B = I exactly
  FactorizationCertificate certificate;
  StabilizationResult stabilization;
  DiagonalizationResult diagonalization;
};

// Diagonalize T at chain length ntilde, pigeonhole the root-chain entries
// into near-constant levels, and compress to Y_n: returns the scalar c and a
// projectional certificate with error = diagonalization error + center bound.
StabilizeOutcome stabilize(const OperatorMatrix& T, int n,
                           const StabilizationParams& params);

enum class FactorizeMode { PositiveDiagonal, IdentitySplit };

struct FactorizeResult {
  // non-projectional certificate: A' S B' = I on Y_n exactly, S per target
  FactorizationCertificate certificate;
  double c = 0.0;  // branch scalar: c, or 1-c on the identity-minus branch
  double q = 0.0;
  double neumann_bound = 0.0;  // 1/(1-q)
  StabilizationResult stabilization;
  DiagonalizationResult diagonalization;
};

// Full pipeline: stabilize, pick the branch (identity_split takes I - T when
// c < 1/2), invert Q = (1/c) A S B by Neumann, and return the exact identity
// factorization with constant_bound = 1/(c (1-q)); the branch scalar c is the
// split-mode factor-2 source, since the kept branch has c >= 1/2.
FactorizeResult factorize(const OperatorMatrix& T, int n,
                          const StabilizationParams& params, FactorizeMode mode);

}  // namespace haarfact
