#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>

namespace haarfact::bounds {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

// exact value of the double (binary expansion); throws on non-finite input
BigRat rational_from(double x);

BigInt floor_rat(const BigRat& q);
BigInt ceil_rat(const BigRat& q);

// exact floor(log2(q)) for q > 0
long floor_log2(const BigRat& q);

// eta = eps / (6 (1 + eps))
BigRat eta_from_epsilon(const BigRat& eps);

// level threshold guaranteeing the general factorization:
// 42 n (n+1) ceil(G/(eta delta)) + 42 + floor(4 log2(G/(eta delta)))
BigInt nmin(const BigRat& gamma, const BigRat& delta, const BigRat& eps,
            const BigInt& n);

// unconditional-space variant: 42 n ceil(K G/(eta delta)) + 42 + same log term
BigInt nmin_unconditional(const BigRat& gamma, const BigRat& delta,
                          const BigRat& eps, const BigInt& n, const BigRat& K);

// ambient size required by the positive-diagonal reduction:
// 2 N ceil(N/eps + 1) 2^N
BigInt ntilde_min(const BigInt& N, const BigRat& eps);

// chain length for the stabilization pigeonhole: 2 n (n+1) ceil(G/(eta delta)) + 1
BigInt ntilde_chain(const BigRat& gamma, const BigRat& delta, const BigRat& eta,
                    const BigInt& n);
// with K-unconditionality: 2 n ceil(K G/(eta delta)) + 1
BigInt ntilde_chain_unconditional(const BigRat& gamma, const BigRat& delta,
                                  const BigRat& eta, const BigInt& n,
                                  const BigRat& K);

// full composition: ntilde_min at N = nmin(2(1+eps) G, delta, eps, n)
// (unconditional nmin when K is given)
BigInt corollary_ntilde(const BigRat& gamma, const BigRat& delta,
                        const BigRat& eps, const BigInt& n,
                        const std::optional<BigRat>& K = std::nullopt);

// smallest m with 2^m > 2^{4(n+2)} (G/eta0)^4, eta0 = eta delta / 2^{4n+2}
int choose_m(const BigRat& gamma, const BigRat& delta, const BigRat& eta, int n);

}  // namespace haarfact::bounds
