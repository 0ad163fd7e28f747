#include "haarfact/operators.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "haarfact/rng.hpp"
#include "ascent_detail.hpp"

namespace haarfact {

OperatorMatrix::OperatorMatrix(int domain, int codomain)
    : domain_(domain), codomain_(codomain) {
  if (domain < 0 || codomain < 0) throw std::invalid_argument("negative ambient level");
  m_ = Eigen::MatrixXd::Zero(y_dim(codomain), y_dim(domain));
}

OperatorMatrix::OperatorMatrix(int domain, int codomain, Eigen::MatrixXd entries)
    : domain_(domain), codomain_(codomain), m_(std::move(entries)) {
  if (domain < 0 || codomain < 0) throw std::invalid_argument("negative ambient level");
  if (m_.rows() != y_dim(codomain) || m_.cols() != y_dim(domain)) {
    throw std::invalid_argument("matrix shape does not match the stated levels");
  }
}

OperatorMatrix OperatorMatrix::identity(int ambient) {
  OperatorMatrix T(ambient, ambient);
  T.m_.setIdentity();
  return T;
}

int OperatorMatrix::ambient() const {
  if (!square()) throw std::logic_error("ambient() requires a square operator");
  return domain_;
}

HaarMultiplier HaarMultiplier::zero(int ambient) {
  if (ambient < 0) throw std::invalid_argument("negative ambient level");
  HaarMultiplier M;
  M.ambient = ambient;
  M.entries = Eigen::VectorXd::Zero(y_dim(ambient));
  return M;
}

HaarMultiplier HaarMultiplier::constant(int ambient, double value) {
  HaarMultiplier M = zero(ambient);
  M.entries.setConstant(value);
  return M;
}

double HaarMultiplier::entry(const DyadicInterval& I) const {
  std::int64_t idx = iota_index(I) - 1;
  if (idx >= entries.size()) throw std::invalid_argument("interval outside ambient span");
  return entries[idx];
}

double& HaarMultiplier::entry(const DyadicInterval& I) {
  std::int64_t idx = iota_index(I) - 1;
  if (idx >= entries.size()) throw std::invalid_argument("interval outside ambient span");
  return entries[idx];
}

OperatorMatrix HaarMultiplier::to_operator() const {
  validate_multiplier(*this);
  OperatorMatrix T(ambient, ambient);
  T.entries() = entries.asDiagonal();
  return T;
}

void validate_multiplier(const HaarMultiplier& M) {
  if (M.ambient < 0 || M.entries.size() != y_dim(M.ambient)) {
    throw std::invalid_argument("multiplier entry count does not match ambient level");
  }
}

HaarVector apply(const OperatorMatrix& T, const HaarVector& x) {
  validate_vector(x);
  if (x.ambient != T.domain()) {
    throw std::invalid_argument("operator domain does not match vector ambient");
  }
  HaarVector y;
  y.ambient = T.codomain();
  y.coeffs = T.entries() * x.coeffs;
  return y;
}

OperatorMatrix compose(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  if (lhs.domain() != rhs.codomain()) {
    throw std::invalid_argument("composition shape mismatch");
  }
  return OperatorMatrix(rhs.domain(), lhs.codomain(), lhs.entries() * rhs.entries());
}

OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.domain() != b.domain() || a.codomain() != b.codomain()) {
    throw std::invalid_argument("addition shape mismatch");
  }
  return OperatorMatrix(a.domain(), a.codomain(), a.entries() + b.entries());
}

OperatorMatrix subtract(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.domain() != b.domain() || a.codomain() != b.codomain()) {
    throw std::invalid_argument("subtraction shape mismatch");
  }
  return OperatorMatrix(a.domain(), a.codomain(), a.entries() - b.entries());
}

OperatorMatrix scale(double factor, const OperatorMatrix& T) {
  return OperatorMatrix(T.domain(), T.codomain(), factor * T.entries());
}

double matrix_entry(const OperatorMatrix& T, const DyadicInterval& I,
                    const DyadicInterval& J) {
  const std::int64_t row = iota_index(I) - 1;
  const std::int64_t col = iota_index(J) - 1;
  if (row >= T.entries().rows() || col >= T.entries().cols()) {
    throw std::invalid_argument("interval outside the operator shape");
  }
  return T.entries()(row, col) * I.measure();
}

Eigen::VectorXd diagonal(const OperatorMatrix& T) {
  if (!T.square()) throw std::logic_error("diagonal requires a square operator");
  return T.entries().diagonal();
}

bool check_large_diagonal(const OperatorMatrix& T, double delta, bool positive) {
  const Eigen::VectorXd d = diagonal(T);
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double v = positive ? d[i] : std::abs(d[i]);
    if (v < delta) return false;
  }
  return true;
}

double multiplier_center_bound(const HaarMultiplier& M) {
  validate_multiplier(M);
  const double center = M.entries[0];
  double bound = 0.0;
  for (int k = 1; k <= M.ambient; ++k) {
    double level_max = 0.0;
    const std::int64_t base = (std::int64_t{1} << k) - 1;
    for (std::int64_t p = 0; p < (std::int64_t{1} << k); ++p) {
      level_max = std::max(level_max, std::abs(M.entries[base + p] - center));
    }
    bound += level_max;
  }
  return bound;
}

double su_quantity(const HaarMultiplier& M) {
  validate_multiplier(M);
  const int n = M.ambient;
  // bottom-up best chain value from each node downwards
  std::vector<double> best(static_cast<std::size_t>(y_dim(n)), 0.0);
  for (std::int64_t p = 0; p < (std::int64_t{1} << n); ++p) {
    const std::int64_t idx = (std::int64_t{1} << n) + p - 1;
    best[static_cast<std::size_t>(idx)] = std::abs(M.entries[idx]);
  }
  for (int k = n - 1; k >= 0; --k) {
    const std::int64_t base = (std::int64_t{1} << k) - 1;
    const std::int64_t child_base = (std::int64_t{1} << (k + 1)) - 1;
    for (std::int64_t p = 0; p < (std::int64_t{1} << k); ++p) {
      const double here = M.entries[base + p];
      double v = 0.0;
      for (std::int64_t q = 2 * p; q <= 2 * p + 1; ++q) {
        v = std::max(v, std::abs(here - M.entries[child_base + q]) +
                            best[static_cast<std::size_t>(child_base + q)]);
      }
      best[static_cast<std::size_t>(base + p)] = v;
    }
  }
  return best[0];
}

namespace {

Eigen::VectorXd measure_weights(int ambient) {
  Eigen::VectorXd w(y_dim(ambient));
  for (std::int64_t i = 0; i < w.size(); ++i) {
    w[i] = from_iota(i + 1).measure();
  }
  return w;
}

}  // namespace

double op_norm_exact_l2(const OperatorMatrix& T) {
  // the L^2(dt) norm in Haar coordinates is the weighted l2 norm with
  // weights |I|; conjugate by the square roots and take the top singular value
  const Eigen::VectorXd wd = measure_weights(T.domain()).cwiseSqrt();
  const Eigen::VectorXd wc = measure_weights(T.codomain()).cwiseSqrt();
  Eigen::MatrixXd S = wc.asDiagonal() * T.entries() * wd.cwiseInverse().asDiagonal();
  if (S.rows() <= 2 && S.cols() <= 2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(S);
  return svd.singularValues()(0);
}

WitnessedBound op_norm_lower(const OperatorMatrix& T, const SpaceSpec& spec,
                             int budget, std::uint64_t seed,
                             const AscentOptions& opt) {
  validate_spec(spec);
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");
  const Eigen::Index dim = T.entries().cols();

  const auto ratio_of = [&](const Eigen::VectorXd& coeffs) -> double {
    HaarVector x{T.domain(), coeffs};
    const double denom = hshs_norm_exact(x, spec);
    if (denom <= 1e-300) return 0.0;
    HaarVector y{T.codomain(), T.entries() * coeffs};
    return hshs_norm_exact(y, spec) / denom;
  };

  WitnessedBound best;
  best.witness = HaarVector::zero(T.domain());

  std::vector<Eigen::VectorXd> candidates;
  if (opt.coordinate_candidates) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
      e[i] = 1.0;
      candidates.push_back(std::move(e));
    }
  }
  for (int r = 0; r < budget; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = rng.normal();
    candidates.push_back(std::move(v));
  }
  if (candidates.empty()) candidates.push_back(Eigen::VectorXd::Ones(dim));

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = ratio_of(candidates[i]);
    scored.emplace_back(v, i);
    if (v > best.value) {
      best.value = v;
      best.witness.coeffs = candidates[i];
    }
  }

  if (opt.max_sweeps > 0) {
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t refine = scored.size();
    if (opt.refine_top > 0) refine = std::min<std::size_t>(refine, opt.refine_top);
    for (std::size_t r = 0; r < refine; ++r) {
      Eigen::VectorXd x = candidates[scored[r].second];
      const double v = detail::coordinate_ascent(x, scored[r].first, ratio_of, opt);
      if (v > best.value) {
        best.value = v;
        best.witness.coeffs = x;
      }
    }
  }
  return best;
}

double op_norm_upper_surrogate(const OperatorMatrix& T, const SpaceSpec& spec) {
  validate_spec(spec);
  if (spec.p == 2.0 && spec.mode == RademacherMode::Constant) {
    return op_norm_exact_l2(T);
  }
  // column-sum bound: ||T x|| <= sum_J |a_J| ||T h_J|| and |a_J| ||h_J|| <= ||x||
  double bound = 0.0;
  for (Eigen::Index j = 0; j < T.entries().cols(); ++j) {
    HaarVector col{T.codomain(), T.entries().col(j)};
    bound += hshs_norm_exact(col, spec) / haar_norm(from_iota(j + 1), spec);
  }
  return bound;
}

OperatorMatrix random_operator(int ambient, double gamma, double delta,
                               OperatorMode mode, std::uint64_t seed,
                               const SpaceSpec& spec) {
  validate_spec(spec);
  if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
  if (mode != OperatorMode::None && (delta <= 0.0 || delta > gamma)) {
    throw std::invalid_argument("need 0 < delta <= gamma");
  }
  const std::int64_t dim = y_dim(ambient);

  HaarMultiplier D = HaarMultiplier::zero(ambient);
  if (mode != OperatorMode::None) {
    Rng rng(seed, 0);
    for (std::int64_t i = 0; i < dim; ++i) {
      double v = rng.uniform(delta, gamma);
      if (mode == OperatorMode::Signed) v *= rng.sign();
      D.entries[i] = v;
    }
  }

  Eigen::MatrixXd E(dim, dim);
  {
    Rng rng(seed, 1);
    for (std::int64_t c = 0; c < dim; ++c) {
      for (std::int64_t r = 0; r < dim; ++r) E(r, c) = rng.normal();
    }
    // keep the drawn diagonal exact: the perturbation is purely off-diagonal
    // whenever a diagonal condition was requested
    if (mode != OperatorMode::None) E.diagonal().setZero();
  }
  const OperatorMatrix Dop = D.to_operator();
  const OperatorMatrix Eop(ambient, ambient, E);

  double surrogate_d;
  if (mode == OperatorMode::None) {
    surrogate_d = 0.0;
  } else if (spec.p == 2.0 && spec.mode == RademacherMode::Constant) {
    surrogate_d = D.entries.cwiseAbs().maxCoeff();
  } else {
    surrogate_d = std::abs(D.entries[0]) + multiplier_center_bound(D);
  }
  const double surrogate_e = op_norm_upper_surrogate(Eop, spec);
  const double rho = surrogate_e > 0.0 ? std::max(0.0, gamma - surrogate_d) / surrogate_e : 0.0;

  OperatorMatrix T = add(Dop, scale(rho, Eop));
  T.set_norm_bound(std::min(gamma, surrogate_d + rho * surrogate_e));
  return T;
}

double max_abs(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

}  // namespace haarfact
