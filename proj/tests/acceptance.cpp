// Acceptance gate: one pass/fail line per criterion, nonzero exit on failure.
// Every identity is recomputed here from the returned operators; recorded
// fields are cross-checked rather than trusted.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "haarfact/bounds.hpp"
#include "haarfact/diagonalize.hpp"
#include "haarfact/faithful.hpp"
#include "haarfact/operators.hpp"
#include "haarfact/reduce_positive.hpp"
#include "haarfact/rng.hpp"
#include "haarfact/spaces.hpp"
#include "haarfact/stabilize.hpp"
#include "test_support.hpp"

using namespace haarfact;

namespace {

struct CriterionResult {
  bool pass = false;
  std::string detail;
};

std::string fmt(double value) {
  std::ostringstream out;
  out.precision(3);
  out << value;
  return out.str();
}

const SpaceSpec kL2{2.0, RademacherMode::Constant};

const AscentOptions kAudit{/*max_sweeps=*/4, /*rel_tol=*/1e-6, /*refine_top=*/2,
                           /*coordinate_candidates=*/true};

// ---------------------------------------------------------------- criterion 1
CriterionResult exact_identities() {
  double worst = 0.0;
  int count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const int n = static_cast<int>(seed % 4);
    const int N = n + 1 + static_cast<int>(seed % static_cast<std::uint64_t>(9 - n));

    const AlmostFaithfulSystem faithful = testing::random_faithful_system(n, N, seed);
    const FaithfulOperators hat = associated_faithful(faithful);
    const Eigen::MatrixXd hat_product = hat.Ahat.entries() * hat.Bhat.entries();
    worst = std::max(worst, max_abs(hat_product - Eigen::MatrixXd::Identity(
                                                      y_dim(n), y_dim(n))));
    ++count;

    const AlmostFaithfulSystem almost = testing::random_almost_system(n, N, seed);
    const AlmostFaithfulOperators ops = associated_almost(almost);
    const Eigen::MatrixXd product = ops.A.entries() * ops.B.entries();
    worst = std::max(worst, max_abs(product - Eigen::MatrixXd::Identity(
                                                   y_dim(n), y_dim(n))));
    ++count;
  }
  CriterionResult r;
  r.pass = count == 200 && worst <= 1e-10;
  r.detail = "200 systems, worst inverse residual " + fmt(worst);
  return r;
}

// ---------------------------------------------------------------- criterion 2
CriterionResult norm_bound_audits() {
  double worst_excess = -1.0;  // how far any measured bound sits above its cap
  std::string culprit = "none";
  const auto note = [&](double measured, double cap, const char* what) {
    if (measured - cap > worst_excess) {
      worst_excess = measured - cap;
      culprit = what;
    }
  };

  for (const SpaceSpec& spec : testing::spec_grid()) {
    const int max_ambient = spec.mode == RademacherMode::Independent ? 4 : 7;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const int n = static_cast<int>(seed % 4);
      const int N =
          n + 1 + static_cast<int>(seed % static_cast<std::uint64_t>(max_ambient - n));

      const auto faithful = testing::random_faithful_system(n, N, seed);
      const FaithfulOperators hat = associated_faithful(faithful);
      note(op_norm_lower(hat.Bhat, spec, 6, seed, kAudit).value, 1.0 + 1e-6, "Bhat");
      note(op_norm_lower(hat.Ahat, spec, 6, seed, kAudit).value, 1.0 + 1e-6, "Ahat");

      const auto almost = testing::random_almost_system(n, N, seed);
      const AlmostFaithfulOperators ops = associated_almost(almost);
      note(op_norm_lower(ops.B, spec, 6, seed, kAudit).value, 1.0 + 1e-6, "B");
      note(op_norm_lower(ops.A, spec, 6, seed, kAudit).value, ops.a_norm_bound + 1e-6,
           "A");
    }
  }

  // centered multiplier bound dominates the measured norm of M - m_root I
  int multipliers = 0;
  for (const SpaceSpec& spec : testing::spec_grid()) {
    Rng rng(7, 400 + static_cast<std::uint64_t>(spec.mode == RademacherMode::Constant));
    for (int trial = 0; trial < 17; ++trial) {
      const int ambient = 1 + static_cast<int>(rng.below(3));  // 1..3
      HaarMultiplier M = HaarMultiplier::zero(ambient);
      for (Eigen::Index i = 0; i < M.entries.size(); ++i) {
        M.entries[i] = rng.uniform(-2.0, 2.0);
      }
      HaarMultiplier centered = M;
      centered.entries.array() -= M.entries[0];
      note(op_norm_lower(centered.to_operator(), spec, 6, rng.bits(), kAudit).value,
           multiplier_center_bound(M) + 1e-9, "centered multiplier");
      ++multipliers;
    }
  }

  CriterionResult r;
  r.pass = worst_excess <= 0.0 && multipliers >= 100;
  r.detail = std::to_string(multipliers) + " multipliers, worst bound slack " +
             fmt(-worst_excess) + " (tightest: " + culprit + ")";
  return r;
}

// ---------------------------------------------------------------- criterion 3
CriterionResult duality_identity() {
  double worst_product = 0.0;
  double worst_gap = 1e9;  // witnessed lower bound minus the closed form
  const AscentOptions canonical{/*max_sweeps=*/0, /*rel_tol=*/1e-6,
                                /*refine_top=*/1, /*coordinate_candidates=*/true};
  for (const double p : {1.0, 1.5, 2.0, 3.0,
                         std::numeric_limits<double>::infinity()}) {
    for (const RademacherMode mode :
         {RademacherMode::Constant, RademacherMode::Independent}) {
      const SpaceSpec spec{p, mode};
      for (const DyadicInterval& I : intervals_up_to(8)) {
        const double product = haar_norm(I, spec) * haar_dual_norm(I, spec);
        worst_product =
            std::max(worst_product, std::abs(product - I.measure()) / I.measure());

        const HaarVector f = HaarVector::basis(I.level, I);
        const WitnessedBound wb = dual_norm_lower_bound(f, spec, 1, 17, canonical);
        const double closed = I.measure() / haar_norm(I, spec);
        worst_gap = std::min(worst_gap, wb.value - closed);
        if (wb.value > haar_dual_norm(I, spec) + 1e-9) {
          CriterionResult r;
          r.detail = "witnessed bound exceeds the dual norm";
          return r;
        }
      }
    }
  }
  CriterionResult r;
  r.pass = worst_product <= 1e-12 && worst_gap >= -1e-6;
  r.detail = "product defect " + fmt(worst_product) + ", witness slack " +
             fmt(worst_gap);
  return r;
}

// ---------------------------------------------------------------- criterion 4
CriterionResult diagonalization_statistics() {
  const OperatorMatrix T = random_operator(9, 1.0, 0.5, OperatorMode::None, 42, kL2);
  if (std::abs(op_norm_exact_l2(T) - 1.0) > 1e-9) {
    return {false, "generator missed the certified unit norm"};
  }

  constexpr int kSeeds = 1000;
  const auto index = intervals_up_to(1);
  std::vector<std::vector<double>> samples(9);
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
    const AlmostFaithfulSystem sys = random_faithful(1, 8, 9, seed);
    const Eigen::MatrixXd X = gram(T, sys);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        samples[static_cast<std::size_t>(3 * a + b)].push_back(X(a, b));
      }
    }
  }

  double worst_mean_ratio = 0.0;  // |mean| / (4 stderr) over off-diagonal pairs
  double worst_off_var = 0.0;
  double worst_diag_var = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      const auto& s = samples[static_cast<std::size_t>(3 * a + b)];
      double mean = 0.0;
      for (const double v : s) mean += v;
      mean /= static_cast<double>(s.size());
      double var = 0.0;
      for (const double v : s) var += (v - mean) * (v - mean);
      var /= static_cast<double>(s.size() - 1);
      if (a == b) {
        worst_diag_var = std::max(worst_diag_var, var);
      } else {
        const double stderr_est = std::sqrt(var / static_cast<double>(s.size()));
        worst_mean_ratio = std::max(worst_mean_ratio, std::abs(mean) / (4 * stderr_est));
        worst_off_var = std::max(worst_off_var, var);
      }
    }
  }

  CriterionResult r;
  r.pass = worst_mean_ratio <= 1.0 && worst_off_var <= 1.0 / 16.0 &&
           worst_diag_var <= 3.0 / 16.0;
  r.detail = "max |mean|/4se " + fmt(worst_mean_ratio) + ", off var " +
             fmt(worst_off_var) + " <= 1/16, diag var " + fmt(worst_diag_var) +
             " <= 3/16";
  return r;
}

// ---------------------------------------------------------------- criterion 5
CriterionResult diagonalization_search() {
  int successes = 0;
  int residual_ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const OperatorMatrix T = random_operator(9, 1.0, 0.5, OperatorMode::None, seed, kL2);
    DiagonalizationParams params;
    params.n = 1;
    params.m = 8;
    params.off_threshold = 0.025;  // 0.05 * min |I| over the index set
    params.diag_threshold = 0.025;
    params.max_tries = 50;
    params.seed = seed;
    const DiagonalizationResult result = diagonalize_search(T, params);
    if (!result.success) continue;
    ++successes;
    const ResidualCheck check = residual_check(T, result, kL2, 50, seed);
    if (check.measured_lower_bound.value <= result.error_bound + 1e-12) ++residual_ok;
  }
  CriterionResult r;
  r.pass = successes >= 45 && residual_ok == successes;
  r.detail = std::to_string(successes) + "/50 searches converged, " +
             std::to_string(residual_ok) + " residual checks passed";
  return r;
}

// ---------------------------------------------------------------- criterion 6
CriterionResult end_to_end_factorization() {
  int ok = 0;
  double worst_residual = 0.0;
  double worst_algebra = 0.0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    try {
      const OperatorMatrix T =
          random_operator(9, 1.0, 0.5, OperatorMode::Positive, seed, kL2);
      StabilizationParams params;
      params.gamma = 1.0;
      params.delta = 0.5;
      params.eta = 1.0 / 12.0;
      params.m = 6;
      params.ntilde = 3;
      params.bin_width = 0.5;
      params.off_threshold = 0.01;
      params.diag_threshold = 0.05;
      params.max_tries = 50;
      params.seed = seed;
      params.spec = kL2;

      bool seed_ok = true;
      for (const FactorizeMode mode :
           {FactorizeMode::PositiveDiagonal, FactorizeMode::IdentitySplit}) {
        const FactorizeResult result = factorize(T, 1, params, mode);
        const auto& cert = result.certificate;

        OperatorMatrix S = T;
        if (cert.target == FactorTarget::IdentityMinusT) {
          S = subtract(OperatorMatrix::identity(9), T);
        }
        Eigen::MatrixXd factored =
            cert.A.entries() * S.entries() * cert.B.entries();
        factored.diagonal().array() -= 1.0;
        const double residual = max_abs(factored);
        worst_residual = std::max(worst_residual, residual);
        if (residual > 1e-8) seed_ok = false;

        // proof algebra: the recorded constant is exactly 1 / (c (1 - q))
        const double algebra =
            std::abs(cert.constant_bound * result.c * (1.0 - result.q) - 1.0);
        worst_algebra = std::max(worst_algebra, algebra);
        if (algebra > 1e-9) seed_ok = false;

        if (mode == FactorizeMode::PositiveDiagonal) {
          if (cert.target != FactorTarget::T) seed_ok = false;
        } else {
          const bool keep_T = result.stabilization.c >= 0.5;
          if ((cert.target == FactorTarget::T) != keep_T) seed_ok = false;
        }
      }
      if (seed_ok) ++ok;
    } catch (const std::exception&) {
      // counted as a failed seed
    }
  }
  CriterionResult r;
  r.pass = ok >= 20;
  r.detail = std::to_string(ok) + "/25 seeds, worst residual " + fmt(worst_residual) +
             ", worst constant-algebra defect " + fmt(worst_algebra);
  return r;
}

// ---------------------------------------------------------------- criterion 7
CriterionResult gamlen_gaudet_reduction() {
  int positive = 0;
  int norms_ok = 0;
  int composed_ok = 0;
  double worst_residual = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    try {
      const OperatorMatrix T =
          random_operator(8, 1.0, 0.5, OperatorMode::Signed, seed, kL2);
      const ReduceResult red =
          reduce_to_positive(T, 2, 0.5, 1.0, /*allow_override=*/true);
      if (!check_large_diagonal(red.Tpos, 0.5, /*positive=*/true)) continue;
      ++positive;

      const double b_norm = op_norm_lower(red.B, kL2, 6, seed, kAudit).value;
      const double a_norm = op_norm_lower(red.A, kL2, 6, seed, kAudit).value;
      if (b_norm <= 1.0 + 1e-6 && a_norm <= red.a_bound + 1e-6) ++norms_ok;

      StabilizationParams params;
      params.gamma = 8.0;  // generous pigeonhole range for the compressed chain
      params.delta = 0.5;
      params.eta = 1.0 / 12.0;
      params.m = 1;
      params.ntilde = 1;
      params.bin_width = 1.0;
      params.off_threshold = 0.05;
      params.diag_threshold = 0.45;
      params.max_tries = 50;
      params.seed = seed;
      params.spec = kL2;
      const FactorizeResult fact =
          factorize(red.Tpos, 0, params, FactorizeMode::PositiveDiagonal);
      const OperatorMatrix A2 =
          scale(static_cast<double>(red.sigma), compose(fact.certificate.A, red.A));
      const OperatorMatrix B2 = compose(red.B, fact.certificate.B);
      Eigen::MatrixXd full = A2.entries() * T.entries() * B2.entries();
      full.diagonal().array() -= 1.0;
      const double residual = max_abs(full);
      worst_residual = std::max(worst_residual, residual);
      if (residual <= 1e-8) ++composed_ok;
    } catch (const std::exception&) {
      // counted against the 100% requirement
    }
  }
  CriterionResult r;
  r.pass = positive == 50 && norms_ok == 50 && composed_ok == 50;
  r.detail = std::to_string(positive) + "/50 positive, " + std::to_string(norms_ok) +
             " norm audits, " + std::to_string(composed_ok) +
             " composed runs, worst residual " + fmt(worst_residual);
  return r;
}

// ---------------------------------------------------------------- criterion 8
CriterionResult arithmetic_reproduction() {
  using bounds::BigInt;
  using bounds::BigRat;
  const bool ok = bounds::nmin(BigRat(1), BigRat(1), BigRat(1), BigInt(1)) == 1064 &&
                  bounds::nmin_unconditional(BigRat(1), BigRat(1), BigRat(1), BigInt(1),
                                             BigRat(1)) == 560 &&
                  bounds::ntilde_min(BigInt(3), BigRat(1)) == 192 &&
                  bounds::choose_m(BigRat(1), BigRat(1), BigRat(1, 2), 0) == 21;
  CriterionResult r;
  r.pass = ok;
  r.detail = "nmin 1064, unconditional 560, reduction size 192, first frequency 21";
  return r;
}

// ---------------------------------------------------------------- criterion 9
CriterionResult oracle_equivalences() {
  // exact independent-mode norm vs full sign enumeration
  for (int ambient = 0; ambient <= 3; ++ambient) {
    Rng rng(99, 500 + static_cast<std::uint64_t>(ambient));
    for (const double p : {1.0, 2.0, 3.0}) {
      const SpaceSpec spec{p, RademacherMode::Independent};
      for (int trial = 0; trial < 3; ++trial) {
        HaarVector x = HaarVector::zero(ambient);
        for (Eigen::Index i = 0; i < x.coeffs.size(); ++i) {
          x.coeffs[i] = rng.uniform(-1.0, 1.0);
        }
        if (std::abs(hshs_norm_exact(x, spec) - testing::brute_independent_norm(x, p)) >
            1e-12) {
          return {false, "independent norm disagrees with the sign enumeration"};
        }
      }
    }
  }

  // chain quantity vs per-leaf enumeration
  Rng rng(99, 600);
  for (int trial = 0; trial < 40; ++trial) {
    const int ambient = static_cast<int>(rng.below(5));
    HaarMultiplier M = HaarMultiplier::zero(ambient);
    for (Eigen::Index i = 0; i < M.entries.size(); ++i) {
      M.entries[i] = rng.uniform(-2.0, 2.0);
    }
    if (std::abs(su_quantity(M) - testing::brute_su(M)) > 1e-12) {
      return {false, "chain quantity disagrees with the leaf enumeration"};
    }
  }

  // generations vs peeling on every subset of the depth-3 tree
  const auto universe = intervals_up_to(3);
  for (std::uint32_t mask = 0; mask < (1u << 15); ++mask) {
    Collection coll;
    for (std::size_t i = 0; i < universe.size(); ++i) {
      if (mask & (1u << i)) coll.push_back(universe[i]);
    }
    if (generations(coll).generations != testing::brute_peel_generations(coll)) {
      return {false, "generation decomposition disagrees with peeling"};
    }
  }

  // greedy signs vs exhaustive sign average on blocks of size <= 12
  Rng shape(99, 700);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const OperatorMatrix T = random_operator(4, 1.0, 0.5, OperatorMode::Positive,
                                             seed, kL2);
    Collection block{DyadicInterval{0, 0}};
    const int splits = static_cast<int>(shape.below(11));
    for (int step = 0; step < splits; ++step) {
      const std::size_t pick = shape.below(block.size());
      const DyadicInterval chosen = block[pick];
      if (chosen.level >= 4) continue;
      block.erase(block.begin() + static_cast<std::ptrdiff_t>(pick));
      block.push_back(chosen.left_half());
      block.push_back(chosen.right_half());
    }
    const SignedBlockChoice choice = signs_by_conditional_expectation(T, block, 0.5);
    if (choice.value < testing::brute_sign_average(T, block) - 1e-12) {
      return {false, "greedy signs fell below the exhaustive average"};
    }
    if (std::abs(choice.value - testing::sign_value(T, block, choice.signs)) > 1e-12) {
      return {false, "greedy sign value does not match its own sign pattern"};
    }
  }

  return {true, "norms, chains, generations and greedy signs all match brute force"};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<CriterionResult()> run;
  };
  const std::vector<Entry> criteria{
      {"exact inverse identities", exact_identities},
      {"operator norm audits", norm_bound_audits},
      {"duality identity", duality_identity},
      {"diagonalization statistics", diagonalization_statistics},
      {"diagonalization search", diagonalization_search},
      {"end-to-end factorization", end_to_end_factorization},
      {"positive-diagonal reduction", gamlen_gaudet_reduction},
      {"arithmetic reproduction", arithmetic_reproduction},
      {"oracle equivalences", oracle_equivalences},
  };

  int passed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = criteria[k].run();
    } catch (const std::exception& e) {
      result.pass = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%zu/9] %s %s — %s (%.1fs)\n", k + 1,
                result.pass ? "PASS" : "FAIL", criteria[k].name, result.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (result.pass) ++passed;
  }
  std::printf("ACCEPTANCE: %d/9 passed\n", passed);
  return passed == 9 ? 0 : 1;
}
