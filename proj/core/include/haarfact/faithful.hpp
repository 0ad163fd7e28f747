#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "haarfact/operators.hpp"

namespace haarfact {

struct SignedInterval {
  DyadicInterval interval;
  int sign = 1;  // +1 or -1

  friend bool operator==(const SignedInterval&, const SignedInterval&) = default;
};

// Block system over the index tree D_{<=n}: each index interval I owns a
// block B_I of signed intervals (K, theta_K) inside [0,1) at levels <= ambient,
// with successor blocks sitting inside the +-1 level sets of the parent's
// block function h~_I = sum theta_K h_K. Blocks are indexed by iota(I)-1.
struct AlmostFaithfulSystem {
  int n = 0;
  int ambient = 0;
  std::vector<std::vector<SignedInterval>> blocks;

  const std::vector<SignedInterval>& block(const DyadicInterval& I) const;
  std::vector<SignedInterval>& block(const DyadicInterval& I);
};

struct SystemValidation {
  bool almost_faithful = false;
  bool faithful = false;
  std::optional<std::vector<int>> frequencies;
  std::string detail;  // first failed check, empty when almost faithful
};

// Checks the block-system conditions: (i) intervals pairwise disjoint within
// each block and no interval shared across blocks; (ii) successor blocks
// inside the parent's +-1 level sets. Faithful additionally means the
// inclusions in (ii) are equalities and the root block covers [0,1).
// Frequencies are reported when every block of index level i lives on one
// interval level k_i and k_0 < k_1 < ... < k_n. Never throws.
SystemValidation validate(const AlmostFaithfulSystem& sys);

// h~_I = sum_{K in B_I} theta_K h_K as a vector in Y_ambient
HaarVector block_vector(const AlmostFaithfulSystem& sys, const DyadicInterval& I);

// |B_I*| = total measure of the block's intervals
double block_measure(const AlmostFaithfulSystem& sys, const DyadicInterval& I);

struct FaithfulOperators {
  OperatorMatrix Bhat;  // Y_n -> Y_ambient, h_I -> h~_I
  OperatorMatrix Ahat;  // Y_ambient -> Y_n, y -> sum_I (<h~_I, y>/|I|) h_I
};

// Factorization pair of a faithful system: Ahat * Bhat = I on Y_n exactly
// (dyadic-rational arithmetic) and both have norm one in every space.
// Throws if the system is not faithful.
FaithfulOperators associated_faithful(const AlmostFaithfulSystem& sys);

struct AlmostFaithfulOperators {
  OperatorMatrix B;  // Y_n -> Y_ambient, h_I -> h~_I
  OperatorMatrix A;  // Y_ambient -> Y_n, y -> sum_I (<h~_I, y>/|B_I*|) h_I
  // ||A|| <= 1/mu + sum_{k=1}^n max_{level(I)=k} (|I|/|B_I*| - 1/mu),
  // mu = |B_root*|; collapses to 1 for faithful systems. ||B|| <= 1 always.
  double a_norm_bound = 1.0;
};

// Factorization pair of an almost faithful system: A * B = I on Y_n.
// Throws if not almost faithful or if some block is empty.
AlmostFaithfulOperators associated_almost(const AlmostFaithfulSystem& sys);

// Shared frequency-system builder: B_root = all of D_{k_0} and B of each
// successor index = all K of the next frequency inside the parent's level
// set, with theta chosen per interval by sign_of. Always faithful.
AlmostFaithfulSystem frequency_system(
    const std::vector<int>& frequencies, int ambient,
    const std::function<int(const DyadicInterval&)>& sign_of);

// Canonical deterministic faithful system with the given frequencies and
// theta identically +1. ambient = -1 means the last frequency.
AlmostFaithfulSystem frequency_faithful(const std::vector<int>& frequencies,
                                        int ambient = -1);

}  // namespace haarfact
