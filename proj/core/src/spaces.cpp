#include "haarfact/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ascent_detail.hpp"
#include "haarfact/rng.hpp"

namespace haarfact {

void validate_spec(const SpaceSpec& spec) {
  if (std::isnan(spec.p) || spec.p < 1.0) {
    throw std::invalid_argument("space exponent must satisfy p >= 1");
  }
}

HaarVector HaarVector::zero(int ambient) {
  if (ambient < 0) throw std::invalid_argument("ambient level must be >= 0");
  HaarVector x;
  x.ambient = ambient;
  x.coeffs = Eigen::VectorXd::Zero(y_dim(ambient));
  return x;
}

HaarVector HaarVector::basis(int ambient, const DyadicInterval& I, double value) {
  HaarVector x = zero(ambient);
  x.coeff(I) = value;
  return x;
}

double HaarVector::coeff(const DyadicInterval& I) const {
  std::int64_t idx = iota_index(I) - 1;
  if (idx >= coeffs.size()) throw std::invalid_argument("interval outside ambient span");
  return coeffs[idx];
}

double& HaarVector::coeff(const DyadicInterval& I) {
  std::int64_t idx = iota_index(I) - 1;
  if (idx >= coeffs.size()) throw std::invalid_argument("interval outside ambient span");
  return coeffs[idx];
}

void validate_vector(const HaarVector& x) {
  if (x.ambient < 0 || x.coeffs.size() != y_dim(x.ambient)) {
    throw std::invalid_argument("coefficient count does not match ambient level");
  }
}

StepFunction haar_synthesis(const HaarVector& x) {
  validate_vector(x);
  const int R = x.ambient + 1;
  StepFunction f;
  f.resolution = R;
  f.values.assign(static_cast<std::size_t>(cell_count(R)), 0.0);
  for (std::int64_t c = 0; c < cell_count(R); ++c) {
    double v = 0.0;
    for (int k = 0; k <= x.ambient; ++k) {
      const std::int64_t p = c >> (R - k);
      const double a = x.coeffs[(std::int64_t{1} << k) + p - 1];
      if (a == 0.0) continue;
      const bool right_half = (c >> (R - k - 1)) & 1;
      v += right_half ? -a : a;
    }
    f.values[static_cast<std::size_t>(c)] = v;
  }
  return f;
}

HaarVector haar_analysis(const StepFunction& f) {
  if (f.resolution < 1 || f.values.size() != static_cast<std::size_t>(cell_count(f.resolution))) {
    throw std::invalid_argument("step function malformed or resolution < 1");
  }
  double scale = 0.0;
  for (double v : f.values) scale = std::max(scale, std::abs(v));
  if (std::abs(f.integral()) > 1e-10 * std::max(1.0, scale)) {
    throw std::invalid_argument("analysis requires a mean-zero step function");
  }
  const int N = f.resolution - 1;
  HaarVector x = HaarVector::zero(N);
  std::vector<double> avg = f.values;  // running cell averages, coarsened in place
  for (int j = N; j >= 0; --j) {
    const std::int64_t count = cell_count(j);
    for (std::int64_t p = 0; p < count; ++p) {
      const double lo = avg[static_cast<std::size_t>(2 * p)];
      const double hi = avg[static_cast<std::size_t>(2 * p + 1)];
      x.coeffs[(std::int64_t{1} << j) + p - 1] = 0.5 * (lo - hi);
      avg[static_cast<std::size_t>(p)] = 0.5 * (lo + hi);
    }
  }
  return x;
}

double base_norm(const StepFunction& f, double p) {
  if (std::isnan(p) || p < 1.0) throw std::invalid_argument("exponent must satisfy p >= 1");
  if (f.values.empty()) throw std::invalid_argument("empty step function");
  const double inv_cells = 1.0 / static_cast<double>(f.values.size());
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (p == 1.0) {
    double s = 0.0;
    for (double v : f.values) s += std::abs(v);
    return s * inv_cells;
  }
  if (p == 2.0) {
    double s = 0.0;
    for (double v : f.values) s += v * v;
    return std::sqrt(s * inv_cells);
  }
  double s = 0.0;
  for (double v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * inv_cells, 1.0 / p);
}

namespace {

// Exact Independent-mode integrand: the sign average of |sum eps_I a_I h_I|
// is constant on every level-N interval (flipping the finest sign maps the
// two child cells onto each other), so one value per member of D_N suffices.
// Depth-first walk shares partial-sum lists across sibling subtrees and
// skips zero coefficients, so vectors supported on few levels stay cheap.
class SignAverager {
 public:
  explicit SignAverager(const HaarVector& x)
      : x_(x), out_(static_cast<std::size_t>(cell_count(x.ambient))), scratch_(x.ambient + 1) {}

  std::vector<double> run() {
    std::vector<double> root{x_.coeffs[0]};  // global sign symmetry: fix the root sign
    descend(0, 0, root);
    return std::move(out_);
  }

 private:
  void descend(int level, std::int64_t pos, std::vector<double>& sums) {
    if (level == x_.ambient) {
      double acc = 0.0;
      for (double s : sums) acc += std::abs(s);
      out_[static_cast<std::size_t>(pos)] = acc / static_cast<double>(sums.size());
      return;
    }
    const int child_level = level + 1;
    for (std::int64_t child = 2 * pos; child <= 2 * pos + 1; ++child) {
      const double a = x_.coeffs[(std::int64_t{1} << child_level) + child - 1];
      if (a == 0.0) {
        descend(child_level, child, sums);
      } else {
        std::vector<double>& next = scratch_[static_cast<std::size_t>(child_level)];
        next.resize(2 * sums.size());
        for (std::size_t i = 0; i < sums.size(); ++i) {
          next[2 * i] = sums[i] + a;
          next[2 * i + 1] = sums[i] - a;
        }
        descend(child_level, child, next);
      }
    }
  }

  const HaarVector& x_;
  std::vector<double> out_;
  std::vector<std::vector<double>> scratch_;
};

}  // namespace

double hshs_norm_exact(const HaarVector& x, const SpaceSpec& spec, int cap) {
  validate_vector(x);
  validate_spec(spec);
  if (x.ambient > cap) {
    throw std::invalid_argument("exact evaluation refused above the ambient cap");
  }
  if (spec.mode == RademacherMode::Constant) {
    return base_norm(haar_synthesis(x), spec.p);
  }
  SignAverager averager(x);
  StepFunction g;
  g.resolution = x.ambient;
  g.values = averager.run();
  return base_norm(g, spec.p);
}

NormResult hshs_norm_mc(const HaarVector& x, const SpaceSpec& spec,
                        const MonteCarloOptions& opt) {
  validate_vector(x);
  validate_spec(spec);
  if (opt.samples < 1) throw std::invalid_argument("need at least one sample");
  if (spec.mode == RademacherMode::Constant) {
    // the single Rademacher factors out of the absolute value, so the
    // average is deterministic
    return {base_norm(haar_synthesis(x), spec.p), 0.0};
  }
  const int batches = std::max(1, std::min(opt.batches, opt.samples));
  const std::size_t cells = static_cast<std::size_t>(cell_count(x.ambient + 1));
  std::vector<double> pooled(cells, 0.0);
  std::vector<std::vector<double>> batch_sum(static_cast<std::size_t>(batches),
                                             std::vector<double>(cells, 0.0));
  std::vector<int> batch_count(static_cast<std::size_t>(batches), 0);

  HaarVector signed_x = x;
  for (int t = 0; t < opt.samples; ++t) {
    Rng rng(opt.seed, static_cast<std::uint64_t>(t));
    for (Eigen::Index i = 0; i < x.coeffs.size(); ++i) {
      signed_x.coeffs[i] = x.coeffs[i] * static_cast<double>(rng.sign());
    }
    StepFunction f = haar_synthesis(signed_x);
    const std::size_t b = static_cast<std::size_t>(t % batches);
    ++batch_count[b];
    for (std::size_t c = 0; c < cells; ++c) {
      const double v = std::abs(f.values[c]);
      pooled[c] += v;
      batch_sum[b][c] += v;
    }
  }

  StepFunction g;
  g.resolution = x.ambient + 1;
  g.values.assign(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    g.values[c] = pooled[c] / static_cast<double>(opt.samples);
  }
  NormResult result;
  result.value = base_norm(g, spec.p);

  if (batches >= 2) {
    std::vector<double> theta(static_cast<std::size_t>(batches), 0.0);
    StepFunction gb;
    gb.resolution = x.ambient + 1;
    gb.values.assign(cells, 0.0);
    for (int b = 0; b < batches; ++b) {
      for (std::size_t c = 0; c < cells; ++c) {
        gb.values[c] = batch_sum[static_cast<std::size_t>(b)][c] /
                       static_cast<double>(batch_count[static_cast<std::size_t>(b)]);
      }
      theta[static_cast<std::size_t>(b)] = base_norm(gb, spec.p);
    }
    double mean = 0.0;
    for (double v : theta) mean += v;
    mean /= static_cast<double>(batches);
    double var = 0.0;
    for (double v : theta) var += (v - mean) * (v - mean);
    var /= static_cast<double>(batches - 1);
    result.stderr_estimate = std::sqrt(var / static_cast<double>(batches));
  }
  return result;
}

NormResult hshs_norm(const HaarVector& x, const SpaceSpec& spec, const NormMethod& method) {
  if (method.kind == NormMethod::Kind::Exact) {
    return {hshs_norm_exact(x, spec, method.exact_cap), 0.0};
  }
  return hshs_norm_mc(x, spec, method.mc);
}

double dual_pairing(const HaarVector& f, const HaarVector& x) {
  validate_vector(f);
  validate_vector(x);
  if (f.ambient != x.ambient) {
    throw std::invalid_argument("pairing requires matching ambient levels");
  }
  double s = 0.0;
  for (int k = 0; k <= f.ambient; ++k) {
    const double measure = std::ldexp(1.0, -k);
    const std::int64_t base = (std::int64_t{1} << k) - 1;
    for (std::int64_t p = 0; p < (std::int64_t{1} << k); ++p) {
      s += f.coeffs[base + p] * x.coeffs[base + p] * measure;
    }
  }
  return s;
}

double haar_norm(const DyadicInterval& I, const SpaceSpec& spec) {
  validate_spec(spec);
  // a single Haar function sees no cancellation across signs, so both modes
  // give the L^p norm |I|^{1/p}
  if (std::isinf(spec.p)) return 1.0;
  return std::pow(I.measure(), 1.0 / spec.p);
}

double haar_dual_norm(const DyadicInterval& I, const SpaceSpec& spec) {
  return I.measure() / haar_norm(I, spec);
}

HaarVector level_restriction(const HaarVector& x, int k) {
  validate_vector(x);
  if (k < 0 || k > x.ambient) throw std::invalid_argument("level outside ambient range");
  HaarVector out = HaarVector::zero(x.ambient);
  const std::int64_t base = (std::int64_t{1} << k) - 1;
  for (std::int64_t p = 0; p < (std::int64_t{1} << k); ++p) {
    out.coeffs[base + p] = x.coeffs[base + p];
  }
  return out;
}

WitnessedBound dual_norm_lower_bound(const HaarVector& f, const SpaceSpec& spec,
                                     int budget, std::uint64_t seed,
                                     const AscentOptions& opt) {
  validate_vector(f);
  validate_spec(spec);
  if (budget < 0) throw std::invalid_argument("budget must be >= 0");

  const auto objective = [&](const Eigen::VectorXd& coeffs) -> double {
    HaarVector x{f.ambient, coeffs};
    const double denom = hshs_norm_exact(x, spec);
    if (denom <= 1e-300) return 0.0;
    return std::abs(dual_pairing(f, x)) / denom;
  };

  WitnessedBound best;
  best.witness = HaarVector::zero(f.ambient);
  if (f.coeffs.cwiseAbs().maxCoeff() == 0.0) return best;

  std::vector<Eigen::VectorXd> candidates;
  candidates.push_back(f.coeffs);
  if (opt.coordinate_candidates) {
    for (Eigen::Index i = 0; i < f.coeffs.size(); ++i) {
      if (f.coeffs[i] != 0.0) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(f.coeffs.size());
        e[i] = 1.0;
        candidates.push_back(std::move(e));
      }
    }
  }
  for (int r = 0; r < budget; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd v(f.coeffs.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
    candidates.push_back(std::move(v));
  }

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const double v = objective(candidates[i]);
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
      const double v = detail::coordinate_ascent(x, scored[r].first, objective, opt);
      if (v > best.value) {
        best.value = v;
        best.witness.coeffs = x;
      }
    }
  }
  return best;
}

}  // namespace haarfact
