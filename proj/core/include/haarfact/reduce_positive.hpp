#pragma once

#include "haarfact/bounds.hpp"
#include "haarfact/faithful.hpp"

namespace haarfact {

using Collection = std::vector<DyadicInterval>;

struct DiagonalPartition {
  Collection positive;  // <h_K, T h_K> >= delta |K|
  Collection negative;  // <h_K, T h_K> <= -delta |K|
};

// splits D_{<=ambient} by diagonal sign; throws unless the diagonal is
// delta-large in the signed sense
DiagonalPartition partition_by_diagonal(const OperatorMatrix& T, double delta);

struct GenerationDecomposition {
  // generations[k] = members with exactly k strict ancestors in the source;
  // each generation is an antichain, sorted by (level, pos)
  std::vector<Collection> generations;
  Collection source;
};

GenerationDecomposition generations(const Collection& collection);

// measure of the union (members may nest in arbitrary collections)
double collection_measure(const Collection& collection);

struct SignAndScale {
  int sigma = 1;            // diagonal sign to work with (-1 flips T)
  int s = 0;                // chosen generation offset, a multiple of N
  double measure_s = 0.0;   // |G_s*|
  double measure_sN = 0.0;  // |G_{s+N}*|
  double leaf_cover = 0.0;  // measure where the sigma side covers > Ntilde/2
                            // of the root-to-leaf chain
};

// Picks the diagonal sign whose majority-covered leaf set has measure >= 1/2
// (ties to +1), then scans s in {0, N, ..., (l-1)N} for the first
// |G_{s+N}*| >= 2^{-1/l} |G_s*|. Requires ambient >= 2 l N.
SignAndScale select_sign_and_s(const OperatorMatrix& T, int N, int l, double delta);

struct SignedBlockChoice {
  std::vector<int> signs;  // aligned with the input block order
  double value;            // achieved <h~, T h~>, at least the diagonal sum
};

// Greedy derandomization: fixes each sign to maximize the conditional
// expectation of <h~, T h~> given the signs already fixed (unfixed cross
// terms vanish in expectation). Guarantees value >= sum of diagonal entries
// >= delta * |block*|; throws if some diagonal entry is below delta |K|.
SignedBlockChoice signs_by_conditional_expectation(const OperatorMatrix& T,
                                                   const Collection& block,
                                                   double delta);

// ambient size required for the guaranteed reduction: 2 N ceil(N/eps + 1) 2^N
bounds::BigInt ntilde_min(int N, double epsilon);

struct ReduceResult {
  AlmostFaithfulSystem system;
  OperatorMatrix A;     // Y_Ntilde -> Y_N
  OperatorMatrix B;     // Y_N -> Y_Ntilde
  OperatorMatrix Tpos;  // A (sigma T) B, delta-large positive diagonal
  double a_bound = 1.0;  // ||A|| bound from the block measures
  int sigma = 1;
  int s = 0;
  int l = 1;
  double leaf_cover = 0.0;
  double measure_s = 0.0;
  double measure_sN = 0.0;
  // the telescoping-measure inequality that yields a_bound <= 2(1+eps);
  // reported, not assumed, when running under an ambient override
  bool measure_inequality_ok = false;
  bool override_used = false;
};

// Builds the block system from generations of the majority diagonal side
// (blocks inside the parent level sets, signs by conditional expectations)
// and compresses sigma T to a delta-large positive-diagonal operator on Y_N.
ReduceResult reduce_to_positive(const OperatorMatrix& T, int N, double delta,
                                double epsilon, bool allow_override = false);

// one-line alternative when unconditionality is available: compose with the
// diagonal-sign multiplier, T M_sigma, which has positive diagonal |d_I|
HaarMultiplier diagonal_sign_multiplier(const OperatorMatrix& T);

}  // namespace haarfact
