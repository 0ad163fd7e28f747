#include <limits>
#include <stdexcept>

#include "doctest.h"
#include "haarfact/bounds.hpp"

using namespace haarfact::bounds;

TEST_SUITE("bounds") {

TEST_CASE("rational_from is the exact binary value") {
  CHECK(rational_from(0.5) == BigRat(1, 2));
  CHECK(rational_from(-1.25) == BigRat(-5, 4));
  CHECK(rational_from(0.0) == BigRat(0));
  // 0.1 is not exactly representable; the stored double is this dyadic
  CHECK(rational_from(0.1) ==
        BigRat(BigInt("3602879701896397"), BigInt("36028797018963968")));
  CHECK_THROWS_AS(rational_from(std::numeric_limits<double>::infinity()), std::exception);
  CHECK_THROWS_AS(rational_from(std::numeric_limits<double>::quiet_NaN()), std::exception);
}

TEST_CASE("floor, ceil, and log2 on rationals") {
  CHECK(floor_rat(BigRat(7, 2)) == 3);
  CHECK(floor_rat(BigRat(-7, 2)) == -4);
  CHECK(floor_rat(BigRat(4)) == 4);
  CHECK(ceil_rat(BigRat(7, 2)) == 4);
  CHECK(ceil_rat(BigRat(-7, 2)) == -3);
  CHECK(ceil_rat(BigRat(4)) == 4);
  CHECK(floor_log2(BigRat(1)) == 0);
  CHECK(floor_log2(BigRat(3, 2)) == 0);
  CHECK(floor_log2(BigRat(2)) == 1);
  CHECK(floor_log2(BigRat(1, 2)) == -1);
  CHECK(floor_log2(BigRat(3)) == 1);
  CHECK(floor_log2(BigRat(7, 8)) == -1);
  CHECK(floor_log2(BigRat(1, 3)) == -2);
  CHECK_THROWS_AS(floor_log2(BigRat(0)), std::exception);
}

TEST_CASE("eta from epsilon") {
  CHECK(eta_from_epsilon(BigRat(1)) == BigRat(1, 12));
  CHECK(eta_from_epsilon(BigRat(1, 2)) == BigRat(1, 18));
  CHECK_THROWS_AS(eta_from_epsilon(BigRat(0)), std::exception);
}

TEST_CASE("pinned level thresholds") {
  CHECK(nmin(BigRat(1), BigRat(1), BigRat(1), BigInt(1)) == 1064);
  CHECK(nmin(BigRat(1), BigRat(1), BigRat(1), BigInt(0)) == 56);
  CHECK(nmin(BigRat(2), BigRat(1), BigRat(1), BigInt(1)) == 2076);
  CHECK(nmin_unconditional(BigRat(1), BigRat(1), BigRat(1), BigInt(1), BigRat(1)) == 560);
  CHECK(nmin_unconditional(BigRat(1), BigRat(1), BigRat(1), BigInt(1), BigRat(2)) == 1064);
  CHECK(nmin_unconditional(BigRat(4), BigRat(1), BigRat(1), BigInt(0), BigRat(1)) == 64);
}

TEST_CASE("pinned reduction sizes") {
  CHECK(ntilde_min(BigInt(3), BigRat(1)) == 192);
  CHECK(ntilde_min(BigInt(1), BigRat(1)) == 8);
  CHECK(ntilde_min(BigInt(2), BigRat(1, 2)) == BigInt(2) * 2 * 5 * 4);
  CHECK_THROWS_AS(ntilde_min(BigInt(0), BigRat(1)), std::exception);
  CHECK_THROWS_AS(ntilde_min(BigInt(2000000), BigRat(1)), std::exception);
}

TEST_CASE("pinned chain lengths") {
  CHECK(ntilde_chain(BigRat(1), BigRat(1), BigRat(1, 12), BigInt(1)) == 49);
  CHECK(ntilde_chain_unconditional(BigRat(1), BigRat(1), BigRat(1, 12), BigInt(1),
                                   BigRat(1)) == 25);
}

TEST_CASE("pinned first frequencies") {
  CHECK(choose_m(BigRat(1), BigRat(1), BigRat(1, 2), 0) == 21);
  CHECK(choose_m(BigRat(1), BigRat(1), BigRat(1), 0) == 17);
  CHECK(choose_m(BigRat(1), BigRat(1), BigRat(1, 12), 1) == 51);
  // monotone: smaller eta can only demand a larger m
  CHECK(choose_m(BigRat(1), BigRat(1), BigRat(1, 4), 0) >=
        choose_m(BigRat(1), BigRat(1), BigRat(1, 2), 0));
  CHECK(choose_m(BigRat(1), BigRat(1), BigRat(1, 2), 0) >=
        choose_m(BigRat(1), BigRat(1), BigRat(1), 0));
}

TEST_CASE("2^m beats the fourth-power threshold, minimally") {
  // definition check at n=0, gamma=delta=1, eta=1/2:
  // eta0 = 1/8, threshold = 2^8 * 8^4 = 2^20, smallest strict m = 21
  const int m = choose_m(BigRat(1), BigRat(1), BigRat(1, 2), 0);
  const BigRat threshold = BigRat(BigInt(1) << 20);
  CHECK((BigRat(BigInt(1) << static_cast<unsigned>(m)) > threshold));
  CHECK_FALSE((BigRat(BigInt(1) << static_cast<unsigned>(m - 1)) > threshold));
}

TEST_CASE("composed corollary size") {
  CHECK(corollary_ntilde(BigRat(1), BigRat(1), BigRat(1), BigInt(0), BigRat(1)) ==
        BigInt("153476910693263469445120"));
  // general mode grows with n
  CHECK(corollary_ntilde(BigRat(1), BigRat(1), BigRat(1), BigInt(0)) <
        corollary_ntilde(BigRat(1), BigRat(1), BigRat(1), BigInt(1)));
}

TEST_CASE("input guards") {
  CHECK_THROWS_AS(nmin(BigRat(0), BigRat(1), BigRat(1), BigInt(1)), std::exception);
  CHECK_THROWS_AS(nmin(BigRat(1), BigRat(1), BigRat(1), BigInt(-1)), std::exception);
  CHECK_THROWS_AS(
      nmin_unconditional(BigRat(1), BigRat(1), BigRat(1), BigInt(1), BigRat(1, 2)),
      std::exception);
  CHECK_THROWS_AS(ntilde_chain(BigRat(1), BigRat(1), BigRat(0), BigInt(1)), std::exception);
}

}  // TEST_SUITE
