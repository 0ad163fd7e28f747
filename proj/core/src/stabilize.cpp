#include "haarfact/stabilize.hpp"

#include <Eigen/LU>
#include <cmath>
#include <stdexcept>

namespace haarfact {

bounds::BigInt ntilde_chain(double gamma, double delta, double eta, int n,
                            std::optional<double> K) {
  const auto g = bounds::rational_from(gamma);
  const auto d = bounds::rational_from(delta);
  const auto e = bounds::rational_from(eta);
  if (K) {
    return bounds::ntilde_chain_unconditional(g, d, e, n, bounds::rational_from(*K));
  }
  return bounds::ntilde_chain(g, d, e, n);
}

std::optional<std::vector<int>> pigeonhole_levels(const std::vector<double>& entries,
                                                  double gamma, int n, double width) {
  if (gamma <= 0.0 || width <= 0.0) {
    throw std::invalid_argument("need positive gamma and bin width");
  }
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  const int bins = static_cast<int>(std::ceil(2.0 * gamma / width));
  std::vector<std::vector<int>> members(static_cast<std::size_t>(bins));
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (std::abs(entries[k]) > gamma + 1e-9) {
      throw std::invalid_argument("chain entry exceeds the norm budget gamma");
    }
    int b = static_cast<int>(std::floor((entries[k] + gamma) / width));
    b = std::max(0, std::min(bins - 1, b));
    members[static_cast<std::size_t>(b)].push_back(static_cast<int>(k));
  }
  for (const auto& bin : members) {
    if (bin.size() >= static_cast<std::size_t>(n) + 1) {
      return std::vector<int>(bin.begin(), bin.begin() + n + 1);
    }
  }
  return std::nullopt;
}

HaarMultiplier stabilized_multiplier(const HaarMultiplier& D,
                                     const std::vector<int>& levels) {
  validate_multiplier(D);
  if (levels.empty()) throw std::invalid_argument("need at least one level");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (levels[i] < (i == 0 ? 0 : levels[i - 1] + 1) || levels[i] > D.ambient) {
      throw std::invalid_argument("levels must be strictly increasing within [0, ntilde]");
    }
  }
  const auto sys = frequency_faithful(levels, D.ambient);
  HaarMultiplier out = HaarMultiplier::zero(sys.n);
  for (const auto& I : intervals_up_to(sys.n)) {
    double sum = 0.0;
    for (const auto& [K, theta] : sys.block(I)) sum += D.entry(K) * K.measure();
    out.entry(I) = sum / I.measure();
  }
  return out;
}

double center_and_bound(const HaarMultiplier& Dstab, double c) {
  validate_multiplier(Dstab);
  double total = 0.0;
  for (int k = 0; k <= Dstab.ambient; ++k) {
    double level_max = 0.0;
    for (const auto& I : level_intervals(k)) {
      level_max = std::max(level_max, std::abs(Dstab.entry(I) - c));
    }
    total += level_max;
  }
  return total;
}

double center_and_bound_unconditional(const HaarMultiplier& Dstab, double c,
                                      double K) {
  validate_multiplier(Dstab);
  if (K < 1.0) throw std::invalid_argument("K must be >= 1");
  double dev = 0.0;
  for (Eigen::Index i = 0; i < Dstab.entries.size(); ++i) {
    dev = std::max(dev, std::abs(Dstab.entries[i] - c));
  }
  return K * dev;
}

NeumannResult neumann_invert(const OperatorMatrix& Q, std::optional<double> q) {
  if (!Q.square()) throw std::invalid_argument("Neumann inversion needs a square operator");
  NeumannResult out;
  out.q = q ? *q : op_norm_exact_l2(subtract(OperatorMatrix::identity(Q.ambient()), Q));
  if (out.q >= 1.0) {
    throw std::runtime_error("Neumann inversion requires ||I - Q|| < 1");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(Q.entries());
  if (!lu.isInvertible()) throw std::runtime_error("singular operator in Neumann inversion");
  OperatorMatrix inv(Q.ambient(), Q.ambient(), lu.inverse());
  if (max_abs(Q.entries() * inv.entries() -
              Eigen::MatrixXd::Identity(Q.entries().rows(), Q.entries().cols())) > 1e-10) {
    throw std::runtime_error("inverse failed the multiply-back verification");
  }
  out.inverse = std::move(inv);
  out.bound = 1.0 / (1.0 - out.q);
  return out;
}

StabilizeOutcome stabilize(const OperatorMatrix& T, int n,
                           const StabilizationParams& params) {
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  int ntilde;
  if (params.ntilde) {
    ntilde = *params.ntilde;
  } else {
    const auto required = ntilde_chain(params.gamma, params.delta, params.eta, n,
                                       params.unconditional_K);
    if (required > 40) {
      throw std::invalid_argument(
          "certified chain length " + required.str() +
          " is infeasible here; pass an explicit ntilde override");
    }
    ntilde = required.convert_to<int>();
  }
  if (ntilde < n) throw std::invalid_argument("chain length must be at least n");

  DiagonalizationParams dp;
  dp.n = ntilde;
  dp.gamma = params.gamma;
  dp.delta = params.delta;
  dp.eta = params.eta;
  dp.m = params.m;
  dp.off_threshold = params.off_threshold;
  dp.diag_threshold = params.diag_threshold;
  dp.max_tries = params.max_tries;
  dp.seed = params.seed;

  StabilizeOutcome out;
  out.diagonalization = diagonalize_search(T, dp);
  if (!out.diagonalization.success) {
    throw std::runtime_error("diagonalization search exhausted max_tries");
  }

  std::vector<double> chain(static_cast<std::size_t>(ntilde) + 1);
  for (int k = 0; k <= ntilde; ++k) {
    chain[static_cast<std::size_t>(k)] =
        out.diagonalization.D.entry(DyadicInterval{k, 0});
  }
  const bool unconditional = params.unconditional_K.has_value();
  const double K = params.unconditional_K.value_or(1.0);
  const double width = params.bin_width.value_or(
      unconditional ? params.eta * params.delta / K
                    : params.eta * params.delta / (n + 1));
  const auto levels = pigeonhole_levels(chain, params.gamma, n, width);
  if (!levels) {
    throw std::runtime_error(
        "pigeonhole found no bin with n+1 chain entries; raise ntilde");
  }

  auto& stab = out.stabilization;
  stab.levels = *levels;
  stab.c = chain[static_cast<std::size_t>(stab.levels[0])];
  stab.Dstab = stabilized_multiplier(out.diagonalization.D, stab.levels);
  stab.unconditional_mode = unconditional;
  stab.K = K;
  stab.wide_bins = unconditional && K > static_cast<double>(n) + 1.0;
  stab.stab_error_bound =
      unconditional ? center_and_bound_unconditional(stab.Dstab, stab.c, K)
                    : center_and_bound(stab.Dstab, stab.c);
  out.c = stab.c;

  const auto freq = associated_faithful(frequency_faithful(stab.levels, ntilde));
  const auto diag = associated_faithful(out.diagonalization.system);

  auto& cert = out.certificate;
  cert.A = compose(freq.Ahat, diag.Ahat);
  cert.B = compose(diag.Bhat, freq.Bhat);
  cert.target = FactorTarget::T;
  cert.projectional = true;
  cert.constant_bound = 1.0;
  cert.error_bound = out.diagonalization.error_bound + stab.stab_error_bound;
  cert.c = stab.c;
  cert.ntilde_used = ntilde;
  cert.m_used = params.m;
  cert.ntilde_required =
      ntilde_chain(params.gamma, params.delta, params.eta, n, params.unconditional_K)
          .str();
  cert.m_required = choose_m(ntilde, params.gamma, params.delta, params.eta);
  Eigen::MatrixXd atb = cert.A.entries() * T.entries() * cert.B.entries();
  atb.diagonal().array() -= stab.c;
  cert.residual = max_abs(atb);
  return out;
}

FactorizeResult factorize(const OperatorMatrix& T, int n,
                          const StabilizationParams& params, FactorizeMode mode) {
  if (mode == FactorizeMode::PositiveDiagonal &&
      !check_large_diagonal(T, params.delta, /*positive=*/true)) {
    throw std::invalid_argument(
        "positive-diagonal mode requires a delta-large positive diagonal");
  }
  auto st = stabilize(T, n, params);

  FactorizeResult out;
  out.stabilization = st.stabilization;
  out.diagonalization = std::move(st.diagonalization);

  OperatorMatrix S = T;
  FactorTarget target = FactorTarget::T;
  double c = st.c;
  if (mode == FactorizeMode::IdentitySplit && c < 0.5) {
    // A (I - T) B = A B - A T B = (1 - c) I - (A T B - c I): same pair, same
    // error, scalar 1 - c >= 1/2
    S = subtract(OperatorMatrix::identity(T.ambient()), T);
    target = FactorTarget::IdentityMinusT;
    c = 1.0 - c;
  }
  if (c <= 0.0) throw std::runtime_error("stabilized scalar is not positive");
  out.c = c;

  const OperatorMatrix Q =
      scale(1.0 / c, compose(st.certificate.A, compose(S, st.certificate.B)));
  std::optional<double> q;
  if (!(params.spec.p == 2.0 && params.spec.mode == RademacherMode::Constant)) {
    q = st.certificate.error_bound / c;  // conservative: exact L2 unavailable
  }
  const NeumannResult inv = neumann_invert(Q, q);
  out.q = inv.q;
  out.neumann_bound = inv.bound;

  auto& cert = out.certificate;
  cert.A = scale(1.0 / c, st.certificate.A);
  cert.B = compose(st.certificate.B, inv.inverse);
  cert.target = target;
  cert.projectional = false;
  // the branch scalar already carries the split-mode factor 2 (c >= 1/2)
  cert.constant_bound = inv.bound / c;
  cert.error_bound = 0.0;  // identity holds by construction; residual is solve noise
  cert.c = 1.0;
  cert.ntilde_used = st.certificate.ntilde_used;
  cert.m_used = st.certificate.m_used;
  cert.ntilde_required = st.certificate.ntilde_required;
  cert.m_required = st.certificate.m_required;
  Eigen::MatrixXd asb = cert.A.entries() * S.entries() * cert.B.entries();
  asb.diagonal().array() -= 1.0;
  cert.residual = max_abs(asb);
  return out;
}

}  // namespace haarfact
