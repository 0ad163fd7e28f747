#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "haarfact/faithful.hpp"
#include "haarfact/operators.hpp"
#include "haarfact/reduce_positive.hpp"
#include "haarfact/rng.hpp"
#include "haarfact/spaces.hpp"
#include "test_support.hpp"

using namespace haarfact;

namespace {

HaarMultiplier by_level(int ambient, const std::vector<double>& levels) {
  HaarMultiplier M = HaarMultiplier::zero(ambient);
  for (const auto& I : intervals_up_to(ambient)) {
    M.entry(I) = levels[static_cast<std::size_t>(I.level)];
  }
  return M;
}

}  // namespace

TEST_SUITE("reduce") {

TEST_CASE("partition by diagonal sign") {
  const auto all_pos = partition_by_diagonal(OperatorMatrix::identity(2), 0.5);
  CHECK(all_pos.positive.size() == 7);
  CHECK(all_pos.negative.empty());

  const auto all_neg =
      partition_by_diagonal(scale(-1.0, OperatorMatrix::identity(2)), 0.5);
  CHECK(all_neg.positive.empty());
  CHECK(all_neg.negative.size() == 7);

  const HaarMultiplier M = by_level(2, {0.5, -0.5, 0.5});
  const auto mixed = partition_by_diagonal(M.to_operator(), 0.5);
  CHECK(mixed.positive.size() == 5);
  CHECK(mixed.negative.size() == 2);

  const HaarMultiplier small = by_level(2, {0.5, 0.1, 0.5});
  CHECK_THROWS_AS(partition_by_diagonal(small.to_operator(), 0.5), std::exception);
}

TEST_CASE("generation decomposition examples") {
  const Collection hand{DyadicInterval{0, 0}, DyadicInterval{1, 0}, DyadicInterval{1, 1},
                        DyadicInterval{2, 0}};
  const GenerationDecomposition g = generations(hand);
  REQUIRE(g.generations.size() == 3);
  CHECK(g.generations[0] == Collection{DyadicInterval{0, 0}});
  CHECK(g.generations[1] == Collection{DyadicInterval{1, 0}, DyadicInterval{1, 1}});
  CHECK(g.generations[2] == Collection{DyadicInterval{2, 0}});

  const GenerationDecomposition full = generations(intervals_up_to(3));
  REQUIRE(full.generations.size() == 4);
  for (int k = 0; k <= 3; ++k) {
    CHECK(full.generations[static_cast<std::size_t>(k)] == level_intervals(k));
  }

  const GenerationDecomposition anti = generations(level_intervals(2));
  REQUIRE(anti.generations.size() == 1);
  CHECK(anti.generations[0].size() == 4);

  CHECK(generations({}).generations.empty());
}

TEST_CASE("generations match iterated peeling on random collections") {
  Rng rng(41, 12);
  for (int trial = 0; trial < 50; ++trial) {
    Collection coll;
    for (const auto& I : intervals_up_to(4)) {
      if (rng.u01() < 0.35) coll.push_back(I);
    }
    const auto direct = generations(coll).generations;
    const auto peeled = testing::brute_peel_generations(coll);
    REQUIRE(direct.size() == peeled.size());
    for (std::size_t k = 0; k < direct.size(); ++k) CHECK(direct[k] == peeled[k]);
  }
}

TEST_CASE("collection measure handles nesting") {
  CHECK(collection_measure(level_intervals(2)) == 1.0);
  CHECK(collection_measure({DyadicInterval{0, 0}, DyadicInterval{3, 1}}) == 1.0);
  CHECK(collection_measure({DyadicInterval{2, 0}, DyadicInterval{2, 3}}) == 0.5);
  CHECK(collection_measure({}) == 0.0);
}

TEST_CASE("sign and scale selection") {
  const SignAndScale pos = select_sign_and_s(OperatorMatrix::identity(4), 1, 2, 0.5);
  CHECK(pos.sigma == 1);
  CHECK(pos.s == 0);
  CHECK(pos.leaf_cover == 1.0);
  CHECK(pos.measure_s == 1.0);
  CHECK(pos.measure_sN == 1.0);

  const SignAndScale neg =
      select_sign_and_s(scale(-1.0, OperatorMatrix::identity(4)), 1, 2, 0.5);
  CHECK(neg.sigma == -1);
  CHECK(neg.s == 0);

  // level 2 negative, everything else positive: majority side is +
  const HaarMultiplier M = by_level(4, {0.5, 0.5, -0.5, 0.5, 0.5});
  const SignAndScale mixed = select_sign_and_s(M.to_operator(), 1, 2, 0.5);
  CHECK(mixed.sigma == 1);
  CHECK(mixed.s == 0);
  CHECK(mixed.leaf_cover == 1.0);
  CHECK(mixed.measure_s == 1.0);
  CHECK(mixed.measure_sN == 1.0);

  CHECK_THROWS_AS(select_sign_and_s(OperatorMatrix::identity(2), 1, 2, 0.5),
                  std::exception);
}

TEST_CASE("greedy signs meet the diagonal guarantee") {
  // multiplier: cross terms vanish, value is exactly the diagonal sum
  const HaarMultiplier M = by_level(2, {0.9, 0.7, 0.6});
  const Collection block{DyadicInterval{1, 0}, DyadicInterval{2, 2},
                         DyadicInterval{2, 3}};
  const SignedBlockChoice choice =
      signs_by_conditional_expectation(M.to_operator(), block, 0.5);
  const double diag_sum = 0.7 * 0.5 + 0.6 * 0.25 + 0.6 * 0.25;
  CHECK(choice.value == doctest::Approx(diag_sum).epsilon(1e-14));

  // two intervals: the optimal closed form is diag + |cross|
  OperatorMatrix T = OperatorMatrix::identity(1);
  Rng rng(9, 13);
  for (Eigen::Index c = 0; c < 3; ++c) {
    for (Eigen::Index r = 0; r < 3; ++r) T.entries()(r, c) += 0.1 * rng.normal();
  }
  const Collection pair{DyadicInterval{1, 0}, DyadicInterval{1, 1}};
  const SignedBlockChoice two = signs_by_conditional_expectation(T, pair, 0.3);
  const double cross = matrix_entry(T, pair[0], pair[1]) + matrix_entry(T, pair[1], pair[0]);
  const double diag = matrix_entry(T, pair[0], pair[0]) + matrix_entry(T, pair[1], pair[1]);
  CHECK(two.value == doctest::Approx(diag + std::abs(cross)).epsilon(1e-12));
  CHECK(two.signs[0] * two.signs[1] == (cross >= 0 ? 1 : -1));

  CHECK_THROWS_AS(
      signs_by_conditional_expectation(scale(0.1, OperatorMatrix::identity(1)), pair, 0.5),
      std::exception);
}

TEST_CASE("greedy signs beat the sign average and match their own value") {
  const SpaceSpec l2{2.0, RademacherMode::Constant};
  Rng shape(51, 14);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OperatorMatrix T = random_operator(4, 1.0, 0.5, OperatorMode::Positive, seed, l2);
    // random antichain of up to 12 intervals, split-grown from the root
    Collection block{DyadicInterval{0, 0}};
    while (block.size() < 12) {
      const std::size_t pick = shape.below(block.size());
      const DyadicInterval chosen = block[pick];
      if (chosen.level >= 4) break;
      block.erase(block.begin() + static_cast<std::ptrdiff_t>(pick));
      block.push_back(chosen.left_half());
      block.push_back(chosen.right_half());
    }
    const SignedBlockChoice choice = signs_by_conditional_expectation(T, block, 0.5);
    CHECK(choice.value >=
          testing::brute_sign_average(T, block) - 1e-12);
    CHECK(choice.value ==
          doctest::Approx(testing::sign_value(T, block, choice.signs)).epsilon(1e-12));
    double diag_sum = 0.0;
    for (const auto& K : block) diag_sum += matrix_entry(T, K, K);
    CHECK(choice.value >= diag_sum - 1e-12);
    CHECK(diag_sum >= 0.5 * collection_measure(block) - 1e-12);
  }
}

TEST_CASE("required ambient size") {
  CHECK(ntilde_min(3, 1.0) == 192);
  CHECK(ntilde_min(1, 1.0) == 8);
  CHECK(ntilde_min(2, 1.0) < ntilde_min(3, 1.0));
  CHECK(ntilde_min(2, 0.5) >= ntilde_min(2, 1.0));
  CHECK_THROWS_AS(ntilde_min(0, 1.0), std::exception);
}

TEST_CASE("reduce the identity") {
  const ReduceResult r = reduce_to_positive(OperatorMatrix::identity(8), 1, 0.5, 1.0);
  CHECK_FALSE(r.override_used);
  CHECK(r.sigma == 1);
  CHECK(r.a_bound == doctest::Approx(1.0));
  CHECK(r.measure_inequality_ok);
  CHECK(max_abs(r.Tpos.entries() - Eigen::MatrixXd::Identity(3, 3)) <= 1e-12);
  CHECK(max_abs(r.A.entries() * r.B.entries() - Eigen::MatrixXd::Identity(3, 3)) <=
        1e-12);

  const ReduceResult flip =
      reduce_to_positive(scale(-1.0, OperatorMatrix::identity(8)), 1, 0.5, 1.0);
  CHECK(flip.sigma == -1);
  CHECK(max_abs(flip.Tpos.entries() - Eigen::MatrixXd::Identity(3, 3)) <= 1e-12);
}

TEST_CASE("guaranteed regime meets the certified bounds") {
  const SpaceSpec l2{2.0, RademacherMode::Constant};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const OperatorMatrix T = random_operator(8, 1.0, 0.5, OperatorMode::Signed, seed, l2);
    const ReduceResult r = reduce_to_positive(T, 1, 0.5, 1.0);
    CHECK_FALSE(r.override_used);
    CHECK(r.measure_inequality_ok);
    CHECK(r.a_bound <= 4.0 + 1e-12);  // 2 (1 + eps)
    CHECK(check_large_diagonal(r.Tpos, 0.5, /*positive=*/true));
    CHECK(validate(r.system).almost_faithful);
    // Tpos is exactly the compression of sigma T
    const Eigen::MatrixXd direct =
        r.A.entries() * (r.sigma * T.entries()) * r.B.entries();
    CHECK(max_abs(direct - r.Tpos.entries()) <= 1e-12);
    CHECK(max_abs(r.A.entries() * r.B.entries() - Eigen::MatrixXd::Identity(3, 3)) <=
          1e-10);
  }
}

TEST_CASE("override regime still produces a positive diagonal") {
  const SpaceSpec l2{2.0, RademacherMode::Constant};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const OperatorMatrix T = random_operator(6, 1.0, 0.5, OperatorMode::Signed, seed, l2);
    CHECK_THROWS_AS(reduce_to_positive(T, 2, 0.5, 1.0, /*allow_override=*/false),
                    std::exception);
    const ReduceResult r = reduce_to_positive(T, 2, 0.5, 1.0, /*allow_override=*/true);
    CHECK(r.override_used);
    CHECK(check_large_diagonal(r.Tpos, 0.5, /*positive=*/true));
    CHECK(max_abs(r.A.entries() * r.B.entries() - Eigen::MatrixXd::Identity(7, 7)) <=
          1e-10);
    // every block pairs sigma T up to at least delta times its measure
    const OperatorMatrix sigmaT = scale(static_cast<double>(r.sigma), T);
    for (const auto& I : intervals_up_to(2)) {
      const HaarVector h = block_vector(r.system, I);
      const double pairing = dual_pairing(h, apply(sigmaT, h));
      CHECK(pairing >= 0.5 * block_measure(r.system, I) - 1e-12);
    }
  }
}

TEST_CASE("diagonal sign multiplier positivizes the diagonal") {
  const SpaceSpec l2{2.0, RademacherMode::Constant};
  const OperatorMatrix T = random_operator(4, 1.0, 0.5, OperatorMode::Signed, 3, l2);
  const HaarMultiplier S = diagonal_sign_multiplier(T);
  for (Eigen::Index i = 0; i < S.entries.size(); ++i) {
    CHECK(std::abs(S.entries[i]) == 1.0);
  }
  CHECK(check_large_diagonal(compose(T, S.to_operator()), 0.5, /*positive=*/true));
}

}  // TEST_SUITE
