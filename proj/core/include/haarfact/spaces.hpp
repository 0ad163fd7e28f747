#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>

#include "haarfact/dyadic.hpp"

namespace haarfact {

enum class RademacherMode { Constant, Independent };

// Norm parameters: base space L^p on [0,1) (p = infinity allowed) and the
// Rademacher wiring of the averaged norm. Constant mode collapses to the
// plain L^p norm of the synthesized function; Independent mode averages
// |sum_I eps_I a_I h_I| over independent signs, one per interval.
struct SpaceSpec {
  double p = 2.0;
  RademacherMode mode = RademacherMode::Constant;
};

inline constexpr double kInfiniteExponent = std::numeric_limits<double>::infinity();

void validate_spec(const SpaceSpec& spec);  // throws unless p >= 1

// Finite Haar expansion sum a_I h_I over I in D_{<=ambient};
// coeffs[iota_index(I) - 1] = a_I.
struct HaarVector {
  int ambient = 0;
  Eigen::VectorXd coeffs;

  static HaarVector zero(int ambient);
  static HaarVector basis(int ambient, const DyadicInterval& I, double value = 1.0);
  double coeff(const DyadicInterval& I) const;
  double& coeff(const DyadicInterval& I);
};

void validate_vector(const HaarVector& x);

// render at resolution ambient + 1 (every h_I is exactly +-1/0 on cells)
StepFunction haar_synthesis(const HaarVector& x);

// inverse of synthesis; requires resolution >= 1 and a mean-zero input
HaarVector haar_analysis(const StepFunction& f);

// L^p norm of a step function, exact cell arithmetic
double base_norm(const StepFunction& f, double p);

struct NormResult {
  double value = 0.0;
  double stderr_estimate = 0.0;  // zero for exact evaluations
};

struct MonteCarloOptions {
  int samples = 10000;
  std::uint64_t seed = 0;
  int batches = 16;  // batch-means standard error
};

// Exact evaluation. Constant mode: L^p norm of the synthesis. Independent
// mode: full sign average per cell (cost ~4^ambient, refuse above the cap).
double hshs_norm_exact(const HaarVector& x, const SpaceSpec& spec, int cap = 12);

// Seeded Monte Carlo sign average; deterministic per (seed, samples) because
// each sample draws from its own counter-derived substream.
NormResult hshs_norm_mc(const HaarVector& x, const SpaceSpec& spec,
                        const MonteCarloOptions& opt);

struct NormMethod {
  enum class Kind { Exact, MonteCarlo };
  Kind kind = Kind::Exact;
  MonteCarloOptions mc{};
  int exact_cap = 12;

  static NormMethod exact(int cap = 12) { return {Kind::Exact, {}, cap}; }
  static NormMethod monte_carlo(int samples, std::uint64_t seed) {
    return {Kind::MonteCarlo, {samples, seed, 16}, 12};
  }
};

NormResult hshs_norm(const HaarVector& x, const SpaceSpec& spec,
                     const NormMethod& method = NormMethod::exact());

// integral pairing sum_I a_I b_I |I| (functionals are Haar expansions too)
double dual_pairing(const HaarVector& f, const HaarVector& x);

// closed forms: ||h_I|| = |I|^{1/p} in both modes, and the dual norm is
// |I| / ||h_I||
double haar_norm(const DyadicInterval& I, const SpaceSpec& spec);
double haar_dual_norm(const DyadicInterval& I, const SpaceSpec& spec);

struct WitnessedBound {
  double value = 0.0;
  HaarVector witness;
};

struct AscentOptions {
  int max_sweeps = 50;
  double rel_tol = 1e-6;
  int refine_top = 0;  // 0 = refine every candidate
  bool coordinate_candidates = true;
};

// Certified lower bound for ||f||_{Y*}: max over candidates of <f,x>/||x||_Y,
// candidates = f itself, coordinate directions in the support of f, and
// `budget` seeded random vectors, each refined by per-coordinate ascent.
WitnessedBound dual_norm_lower_bound(const HaarVector& f, const SpaceSpec& spec,
                                     int budget, std::uint64_t seed,
                                     const AscentOptions& opt = {});

// restriction of x to the coefficients of one level (helper for level tests)
HaarVector level_restriction(const HaarVector& x, int k);

}  // namespace haarfact
