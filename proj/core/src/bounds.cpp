#include "haarfact/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace haarfact::bounds {

BigRat rational_from(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  if (x == 0.0) return BigRat(0);
  int exp = 0;
  // 53-bit integer mantissa times 2^exp, exactly
  const double mant = std::frexp(x, &exp);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  exp -= 53;
  BigRat q(scaled);
  if (exp >= 0) {
    q *= BigRat(BigInt(1) << exp);
  } else {
    q /= BigRat(BigInt(1) << -exp);
  }
  return q;
}

BigInt floor_rat(const BigRat& q) {
  BigInt num = numerator(q);
  BigInt den = denominator(q);  // positive by normalization
  BigInt quo = num / den;
  if (quo * den > num) --quo;  // integer division truncates toward zero
  return quo;
}

BigInt ceil_rat(const BigRat& q) { return -floor_rat(-q); }

long floor_log2(const BigRat& q) {
  if (q <= 0) throw std::invalid_argument("floor_log2 needs a positive value");
  const BigInt num = numerator(q);
  const BigInt den = denominator(q);
  // msb gives floor(log2) of an integer; correct the off-by-one by comparison
  const long guess = static_cast<long>(msb(num)) - static_cast<long>(msb(den));
  // 2^guess <= q or not: check both candidates exactly
  const auto pow2_le = [&](long e) {
    return e >= 0 ? (BigInt(1) << e) * den <= num : den <= (BigInt(1) << -e) * num;
  };
  return pow2_le(guess) ? guess : guess - 1;
}

BigRat eta_from_epsilon(const BigRat& eps) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  return eps / (6 * (1 + eps));
}

namespace {

void check_positive(const BigRat& gamma, const BigRat& delta, const BigRat& e) {
  if (gamma <= 0 || delta <= 0 || e <= 0) {
    throw std::invalid_argument("bound inputs must be positive");
  }
}

}  // namespace

BigInt nmin(const BigRat& gamma, const BigRat& delta, const BigRat& eps,
            const BigInt& n) {
  check_positive(gamma, delta, eps);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  const BigRat ratio = gamma / (eta_from_epsilon(eps) * delta);
  return 42 * n * (n + 1) * ceil_rat(ratio) + 42 +
         BigInt(floor_log2(ratio * ratio * ratio * ratio));
}

BigInt nmin_unconditional(const BigRat& gamma, const BigRat& delta,
                          const BigRat& eps, const BigInt& n, const BigRat& K) {
  check_positive(gamma, delta, eps);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  const BigRat ratio = gamma / (eta_from_epsilon(eps) * delta);
  return 42 * n * ceil_rat(K * ratio) + 42 +
         BigInt(floor_log2(ratio * ratio * ratio * ratio));
}

BigInt ntilde_min(const BigInt& N, const BigRat& eps) {
  if (N <= 0 || eps <= 0) throw std::invalid_argument("inputs must be positive");
  if (N > 1000000) throw std::invalid_argument("N too large for 2^N arithmetic");
  return 2 * N * ceil_rat(BigRat(N) / eps + 1) *
         (BigInt(1) << static_cast<unsigned>(N));
}

BigInt ntilde_chain(const BigRat& gamma, const BigRat& delta, const BigRat& eta,
                    const BigInt& n) {
  check_positive(gamma, delta, eta);
  return 2 * n * (n + 1) * ceil_rat(gamma / (eta * delta)) + 1;
}

BigInt ntilde_chain_unconditional(const BigRat& gamma, const BigRat& delta,
                                  const BigRat& eta, const BigInt& n,
                                  const BigRat& K) {
  check_positive(gamma, delta, eta);
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  return 2 * n * ceil_rat(K * gamma / (eta * delta)) + 1;
}

BigInt corollary_ntilde(const BigRat& gamma, const BigRat& delta,
                        const BigRat& eps, const BigInt& n,
                        const std::optional<BigRat>& K) {
  const BigRat boosted = 2 * (1 + eps) * gamma;
  const BigInt N = K ? nmin_unconditional(boosted, delta, eps, n, *K)
                     : nmin(boosted, delta, eps, n);
  return ntilde_min(N, eps);
}

int choose_m(const BigRat& gamma, const BigRat& delta, const BigRat& eta, int n) {
  check_positive(gamma, delta, eta);
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  // eta0 = eta delta / 2^{4n+2}; threshold 2^{4(n+2)} (G/eta0)^4
  const BigRat ratio = (gamma / (eta * delta)) * BigRat(BigInt(1) << (4 * n + 2));
  const BigRat threshold =
      BigRat(BigInt(1) << (4 * (n + 2))) * ratio * ratio * ratio * ratio;
  // smallest m with 2^m strictly above the threshold
  const long m = floor_log2(threshold) + 1;
  return static_cast<int>(m < 0 ? 0 : m);
}

}  // namespace haarfact::bounds
