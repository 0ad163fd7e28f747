#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "haarfact/spaces.hpp"

namespace haarfact {

// Linear map Y_domain -> Y_codomain stored densely in Haar coordinates:
// column iota(J)-1 holds the Haar coefficients of T h_J. Most operators are
// square (domain == codomain == ambient); the rectangular shape carries the
// compression/embedding maps of factorization certificates.
class OperatorMatrix {
 public:
  OperatorMatrix() : OperatorMatrix(0, 0) {}
  OperatorMatrix(int domain, int codomain);
  OperatorMatrix(int domain, int codomain, Eigen::MatrixXd entries);

  static OperatorMatrix identity(int ambient);

  int domain() const { return domain_; }
  int codomain() const { return codomain_; }
  bool square() const { return domain_ == codomain_; }
  int ambient() const;  // throws unless square

  const Eigen::MatrixXd& entries() const { return m_; }
  Eigen::MatrixXd& entries() { return m_; }

  // optional certified norm bound carried as metadata by generators
  std::optional<double> norm_bound() const { return norm_bound_; }
  void set_norm_bound(double bound) { norm_bound_ = bound; }

 private:
  int domain_;
  int codomain_;
  Eigen::MatrixXd m_;
  std::optional<double> norm_bound_;
};

// operator diagonal in the Haar basis; entries[iota(I)-1] = m_I
struct HaarMultiplier {
  int ambient = 0;
  Eigen::VectorXd entries;

  static HaarMultiplier zero(int ambient);
  static HaarMultiplier constant(int ambient, double value);
  double entry(const DyadicInterval& I) const;
  double& entry(const DyadicInterval& I);
  OperatorMatrix to_operator() const;
};

void validate_multiplier(const HaarMultiplier& M);

HaarVector apply(const OperatorMatrix& T, const HaarVector& x);
OperatorMatrix compose(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix subtract(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix scale(double factor, const OperatorMatrix& T);

// integral pairing <h_I, T h_J>
double matrix_entry(const OperatorMatrix& T, const DyadicInterval& I,
                    const DyadicInterval& J);

// normalized diagonal d_I = <h_I, T h_I> / |I|, indexed by iota(I)-1
Eigen::VectorXd diagonal(const OperatorMatrix& T);

// positive: d_I >= delta for every I; signed: |d_I| >= delta
bool check_large_diagonal(const OperatorMatrix& T, double delta, bool positive);

// level-sum bound for ||M - m_root I||: sum over levels k >= 1 of
// max_{|I| = 2^-k} |m_I - m_root|; valid in every spec
double multiplier_center_bound(const HaarMultiplier& M);

// max over root-to-leaf chains of the entry total variation plus the
// terminal magnitude; comparable to the L^1 multiplier norm
double su_quantity(const HaarMultiplier& M);

// exact operator norm for spec (2, Constant): largest singular value after
// conjugating by the diagonal measure weights
double op_norm_exact_l2(const OperatorMatrix& T);

// certified lower bound on the operator norm in the given spec: max ratio
// over seeded random starts and coordinate directions, refined by
// per-coordinate ascent (valid lower bound regardless of budget)
WitnessedBound op_norm_lower(const OperatorMatrix& T, const SpaceSpec& spec,
                             int budget = 200, std::uint64_t seed = 0,
                             const AscentOptions& opt = {});

// conservative upper bound valid in the given spec: exact in (2, Constant),
// column-sum bound sum_J ||T h_J|| / ||h_J|| otherwise
double op_norm_upper_surrogate(const OperatorMatrix& T, const SpaceSpec& spec);

enum class OperatorMode { Positive, Signed, None };

// T = D + rho E: D a multiplier with uniform entries in [delta, gamma]
// (positive), +-[delta, gamma] (signed) or zero (none); E a seeded dense
// perturbation; rho sized so a computable norm surrogate stays <= gamma.
// The certified bound is recorded as metadata.
OperatorMatrix random_operator(int ambient, double gamma, double delta,
                               OperatorMode mode, std::uint64_t seed,
                               const SpaceSpec& spec);

enum class FactorTarget { T, IdentityMinusT };

// Outcome of one factorization stage: S ~ A * target * B on Y_n with
// operators A: Y_N -> Y_n and B: Y_n -> Y_N. "projectional" records A*B = I.
struct FactorizationCertificate {
  OperatorMatrix A;
  OperatorMatrix B;
  FactorTarget target = FactorTarget::T;
  bool projectional = false;
  double constant_bound = 1.0;  // bound on ||A|| * ||B||, stage algebra
  double error_bound = 0.0;     // certified bound on ||S - A * target * B||
  double residual = 0.0;        // measured max-abs of S - A * target * B
  double c = 1.0;               // scalar of the factored operator S = c * I
  // desk runs override the certified chain length / first frequency; record
  // both what ran and what the guarantee would demand (at the chain used)
  int ntilde_used = 0;
  int m_used = 0;
  std::string ntilde_required;  // exact integer, decimal string (can be huge)
  int m_required = 0;
};

double max_abs(const Eigen::MatrixXd& m);

}  // namespace haarfact
