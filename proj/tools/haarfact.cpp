// Command-line front end: bound calculators, operator generation, norm
// estimation, and the diagonalize / factorize / reduce pipeline, with JSON
// files as the interchange format.
//
// Exit codes: 0 success, 1 a requested check or search failed, 2 bad input
// or an internal precondition violation.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "haarfact/bounds.hpp"
#include "haarfact/diagonalize.hpp"
#include "haarfact/reduce_positive.hpp"
#include "haarfact/scenario.hpp"
#include "haarfact/serialization.hpp"
#include "haarfact/stabilize.hpp"

using namespace haarfact;

namespace {

double parse_p(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF" || text == "infinity")
    return kInfiniteExponent;
  return std::stod(text);
}

RademacherMode parse_rademacher(const std::string& text) {
  if (text == "constant") return RademacherMode::Constant;
  if (text == "independent") return RademacherMode::Independent;
  throw std::runtime_error("unknown rademacher mode: " + text);
}

SpaceSpec make_spec(const std::string& p, const std::string& rademacher) {
  SpaceSpec spec{parse_p(p), parse_rademacher(rademacher)};
  validate_spec(spec);
  return spec;
}

std::string rat_str(const bounds::BigRat& q) {
  return q.str() + " (~" + std::to_string(q.convert_to<double>()) + ")";
}

// ---------------------------------------------------------------- nmin ----

struct NminOpts {
  int n = 0;
  double gamma = 1.0;
  double delta = 1.0;
  double epsilon = 1.0;
  std::optional<double> K;
};

int run_nmin(const NminOpts& o) {
  const auto gamma = bounds::rational_from(o.gamma);
  const auto delta = bounds::rational_from(o.delta);
  const auto eps = bounds::rational_from(o.epsilon);
  const auto eta = bounds::eta_from_epsilon(eps);
  const bounds::BigInt n = o.n;

  std::cout << "eta = " << rat_str(eta) << "\n";
  std::cout << "nmin = " << bounds::nmin(gamma, delta, eps, n).str() << "\n";
  std::cout << "ntilde_chain = " << bounds::ntilde_chain(gamma, delta, eta, n).str()
            << "\n";
  std::cout << "choose_m = " << bounds::choose_m(gamma, delta, eta, o.n) << "\n";
  std::cout << "corollary_ntilde = "
            << bounds::corollary_ntilde(gamma, delta, eps, n).str() << "\n";
  if (o.K) {
    const auto K = bounds::rational_from(*o.K);
    std::cout << "nmin_unconditional(K=" << *o.K << ") = "
              << bounds::nmin_unconditional(gamma, delta, eps, n, K).str() << "\n";
    std::cout << "ntilde_chain_unconditional(K=" << *o.K << ") = "
              << bounds::ntilde_chain_unconditional(gamma, delta, eta, n, K).str()
              << "\n";
    std::cout << "corollary_ntilde_unconditional(K=" << *o.K << ") = "
              << bounds::corollary_ntilde(gamma, delta, eps, n, K).str() << "\n";
  }
  return 0;
}

// -------------------------------------------------------- gen-operator ----

struct GenOpts {
  int ambient = 0;
  double gamma = 1.0;
  double delta = 0.5;
  std::string mode = "positive";
  std::uint64_t seed = 0;
  std::string p = "2";
  std::string rademacher = "constant";
  std::string out;
};

int run_gen(const GenOpts& o) {
  OperatorMode mode;
  if (o.mode == "positive")
    mode = OperatorMode::Positive;
  else if (o.mode == "signed")
    mode = OperatorMode::Signed;
  else if (o.mode == "none")
    mode = OperatorMode::None;
  else
    throw std::runtime_error("unknown mode: " + o.mode);

  const auto spec = make_spec(o.p, o.rademacher);
  const auto T = random_operator(o.ambient, o.gamma, o.delta, mode, o.seed, spec);
  save_json(operator_to_json(T), o.out);
  std::cout << "ambient = " << o.ambient << " (dim " << y_dim(o.ambient) << ")\n";
  if (T.norm_bound()) std::cout << "norm_bound = " << *T.norm_bound() << "\n";
  std::cout << "wrote " << o.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- norm ----

struct NormOpts {
  std::string vector_path;
  std::string operator_path;
  std::string p = "2";
  std::string rademacher = "constant";
  std::string method = "exact";
  int cap = 12;
  int samples = 10000;
  int budget = 200;
  std::optional<std::uint64_t> seed;
};

int run_norm(const NormOpts& o) {
  const auto spec = make_spec(o.p, o.rademacher);
  std::cout << std::setprecision(12);
  if (!o.vector_path.empty()) {
    const auto x = vector_from_json(load_json(o.vector_path));
    if (o.method == "exact") {
      std::cout << "norm = " << hshs_norm_exact(x, spec, o.cap) << "\n";
    } else if (o.method == "mc") {
      if (!o.seed) throw std::runtime_error("--seed is required for mc estimates");
      MonteCarloOptions mc;
      mc.samples = o.samples;
      mc.seed = *o.seed;
      const auto r = hshs_norm_mc(x, spec, mc);
      std::cout << "norm = " << r.value << "\n";
      std::cout << "stderr = " << r.stderr_estimate << "\n";
    } else {
      throw std::runtime_error("unknown method: " + o.method);
    }
    return 0;
  }
  const auto T = operator_from_json(load_json(o.operator_path));
  if (!o.seed) throw std::runtime_error("--seed is required for operator bounds");
  const auto lower = op_norm_lower(T, spec, o.budget, *o.seed);
  std::cout << "lower_bound = " << lower.value << "\n";
  std::cout << "upper_surrogate = " << op_norm_upper_surrogate(T, spec) << "\n";
  if (spec.p == 2.0 && spec.mode == RademacherMode::Constant)
    std::cout << "exact_l2 = " << op_norm_exact_l2(T) << "\n";
  if (T.norm_bound()) std::cout << "declared_bound = " << *T.norm_bound() << "\n";
  return 0;
}

// ---------------------------------------------------------- diagonalize ----

struct DiagOpts {
  std::string operator_path;
  int n = 0;
  int m = 1;
  double gamma = 1.0;
  double delta = 1.0;
  double eta = 1.0;
  std::optional<double> off_threshold;
  std::optional<double> diag_threshold;
  int max_tries = 64;
  std::uint64_t seed = 0;
  std::string out;
};

int run_diagonalize(const DiagOpts& o) {
  const auto T = operator_from_json(load_json(o.operator_path));
  DiagonalizationParams params;
  params.n = o.n;
  params.gamma = o.gamma;
  params.delta = o.delta;
  params.eta = o.eta;
  params.m = o.m;
  params.off_threshold = o.off_threshold;
  params.diag_threshold = o.diag_threshold;
  params.max_tries = o.max_tries;
  params.seed = o.seed;

  const auto result = diagonalize_search(T, params);
  std::cout << std::setprecision(12);
  std::cout << (result.success ? "success" : "FAILED (best try reported)") << "\n";
  std::cout << "offdiag_max = " << result.offdiag_max << "\n";
  std::cout << "diag_dev_max = " << result.diag_dev_max << "\n";
  std::cout << "tries_used = " << result.tries_used << "\n";
  std::cout << "error_bound = " << result.error_bound << "\n";
  if (!o.out.empty()) {
    Json j;
    j["success"] = result.success;
    j["offdiag_max"] = result.offdiag_max;
    j["diag_dev_max"] = result.diag_dev_max;
    j["tries_used"] = result.tries_used;
    j["error_bound"] = result.error_bound;
    j["system"] = system_to_json(result.system);
    j["diagonal"] = multiplier_to_json(result.D);
    save_json(j, o.out);
    std::cout << "wrote " << o.out << "\n";
  }
  return result.success ? 0 : 1;
}

// ------------------------------------------------------------ factorize ----

struct FactOpts {
  std::string operator_path;
  std::string mode = "positive";
  int n = 0;
  std::optional<int> ntilde;
  std::optional<int> m;
  double gamma = 1.0;
  double delta = 0.5;
  std::optional<double> eta;
  double epsilon = 1.0;
  std::optional<double> bin_width;
  std::optional<double> off_threshold;
  std::optional<double> diag_threshold;
  std::optional<double> K;
  int max_tries = 50;
  std::uint64_t seed = 0;
  std::string p = "2";
  std::string rademacher = "constant";
  double residual_tol = 1e-8;
  std::string certificate_out;
};

int run_factorize(const FactOpts& o) {
  const auto T = operator_from_json(load_json(o.operator_path));
  FactorizeMode mode;
  if (o.mode == "positive")
    mode = FactorizeMode::PositiveDiagonal;
  else if (o.mode == "split")
    mode = FactorizeMode::IdentitySplit;
  else
    throw std::runtime_error("unknown mode: " + o.mode);

  const double eta = o.eta ? *o.eta : o.epsilon / (6.0 * (1.0 + o.epsilon));
  StabilizationParams params;
  params.gamma = o.gamma;
  params.delta = o.delta;
  params.eta = eta;
  params.m = o.m ? *o.m : choose_m(o.n, o.gamma, o.delta, eta);
  params.ntilde = o.ntilde;
  params.bin_width = o.bin_width;
  params.off_threshold = o.off_threshold;
  params.diag_threshold = o.diag_threshold;
  params.max_tries = o.max_tries;
  params.seed = o.seed;
  params.unconditional_K = o.K;
  params.spec = make_spec(o.p, o.rademacher);

  const auto result = factorize(T, o.n, params, mode);
  std::cout << std::setprecision(12);
  std::cout << "target = "
            << (result.certificate.target == FactorTarget::T ? "T" : "I-T") << "\n";
  std::cout << "c = " << result.c << "\n";
  std::cout << "q = " << result.q << "\n";
  std::cout << "neumann_bound = " << result.neumann_bound << "\n";
  std::cout << "constant_bound = " << result.certificate.constant_bound << "\n";
  std::cout << "residual = " << result.certificate.residual << "\n";
  std::cout << "diagonalize_tries = " << result.diagonalization.tries_used << "\n";
  if (!o.certificate_out.empty()) {
    save_json(certificate_to_json(result.certificate), o.certificate_out);
    std::cout << "wrote " << o.certificate_out << "\n";
  }
  if (result.certificate.residual > o.residual_tol) {
    std::cout << "RESIDUAL CHECK FAILED (tol " << o.residual_tol << ")\n";
    return 1;
  }
  return 0;
}

// ------------------------------------------------------- reduce-positive ----

struct ReduceOpts {
  std::string operator_path;
  int N = 0;
  double delta = 0.5;
  double epsilon = 1.0;
  bool allow_override = false;
  std::string out;
  std::string sign_multiplier_out;
};

int run_reduce(const ReduceOpts& o) {
  const auto T = operator_from_json(load_json(o.operator_path));
  if (!o.sign_multiplier_out.empty()) {
    save_json(multiplier_to_json(diagonal_sign_multiplier(T)), o.sign_multiplier_out);
    std::cout << "wrote " << o.sign_multiplier_out << "\n";
  }
  const auto result = reduce_to_positive(T, o.N, o.delta, o.epsilon, o.allow_override);
  std::cout << std::setprecision(12);
  std::cout << "sigma = " << result.sigma << "\n";
  std::cout << "s = " << result.s << ", l = " << result.l << "\n";
  std::cout << "leaf_cover = " << result.leaf_cover << "\n";
  std::cout << "measure_s = " << result.measure_s << ", measure_sN = "
            << result.measure_sN << "\n";
  std::cout << "measure_inequality_ok = "
            << (result.measure_inequality_ok ? "true" : "false") << "\n";
  std::cout << "a_bound = " << result.a_bound << "\n";
  const bool positive = check_large_diagonal(result.Tpos, o.delta, true);
  std::cout << "positive_diagonal = " << (positive ? "true" : "false") << "\n";
  if (!o.out.empty()) {
    Json j;
    j["system"] = system_to_json(result.system);
    j["A"] = operator_to_json(result.A);
    j["B"] = operator_to_json(result.B);
    j["Tpos"] = operator_to_json(result.Tpos);
    j["a_bound"] = result.a_bound;
    j["sigma"] = result.sigma;
    j["s"] = result.s;
    j["l"] = result.l;
    j["measure_inequality_ok"] = result.measure_inequality_ok;
    j["override_used"] = result.override_used;
    save_json(j, o.out);
    std::cout << "wrote " << o.out << "\n";
  }
  return positive ? 0 : 1;
}

// ----------------------------------------------------------------- run ----

struct RunOpts {
  std::string config_path;
  std::string report_json;
  std::string report_csv;
};

int run_run(const RunOpts& o) {
  auto config = config_from_json(load_json(o.config_path));
  if (!o.report_json.empty()) config.report_json = o.report_json;
  if (!o.report_csv.empty()) config.report_csv = o.report_csv;

  const auto report = run_scenario(config);
  std::cout << std::setprecision(12);
  for (const auto& seed : report.seeds)
    if (!seed.ok)
      std::cout << "seed " << seed.seed << ": FAILED (" << seed.error << ")\n";
  std::cout << "seeds = " << report.seeds.size() << "\n";
  std::cout << "success_rate = " << report.success_rate << "\n";
  std::cout << "max_residual = " << report.max_residual << "\n";
  std::cout << "assertions_passed = "
            << (report.assertions_passed ? "true" : "false") << "\n";
  if (!config.report_json.empty()) std::cout << "wrote " << config.report_json << "\n";
  if (!config.report_csv.empty()) std::cout << "wrote " << config.report_csv << "\n";
  return report.assertions_passed ? 0 : 1;
}

// --------------------------------------------------- verify-certificate ----

struct VerifyOpts {
  std::string certificate_path;
  std::string operator_path;
  double tol = 1e-8;
  double proj_tol = 1e-10;
};

int run_verify(const VerifyOpts& o) {
  const auto cert = certificate_from_json(load_json(o.certificate_path));
  const auto T = operator_from_json(load_json(o.operator_path));
  const auto S = cert.target == FactorTarget::T
                     ? T
                     : subtract(OperatorMatrix::identity(T.ambient()), T);
  auto asb = compose(cert.A, compose(S, cert.B));
  asb.entries().diagonal().array() -= cert.c;
  const double measured = max_abs(asb.entries());
  const double allowed = cert.error_bound + o.tol;

  std::cout << std::setprecision(12);
  std::cout << "measured_residual = " << measured << "\n";
  std::cout << "declared_error_bound = " << cert.error_bound << "\n";
  bool ok = measured <= allowed;
  std::cout << "residual_ok = " << (ok ? "true" : "false") << " (tol " << o.tol
            << ")\n";
  if (cert.projectional) {
    auto ab = compose(cert.A, cert.B);
    ab.entries().diagonal().array() -= 1.0;
    const double proj = max_abs(ab.entries());
    const bool proj_ok = proj <= o.proj_tol;
    std::cout << "projectional_residual = " << proj << "\n";
    std::cout << "projectional_ok = " << (proj_ok ? "true" : "false") << "\n";
    ok = ok && proj_ok;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"constructive factorization toolkit for Haar-system operators"};
  app.require_subcommand(1);
  int rc = 0;

  NminOpts nmin_opts;
  auto* nmin = app.add_subcommand("nmin", "print the guaranteed-size bounds");
  nmin->add_option("--n", nmin_opts.n, "target index")->required();
  nmin->add_option("--gamma", nmin_opts.gamma, "norm budget");
  nmin->add_option("--delta", nmin_opts.delta, "diagonal lower bound");
  nmin->add_option("--epsilon", nmin_opts.epsilon, "constant slack");
  nmin->add_option("--K", nmin_opts.K, "unconditionality constant");
  nmin->callback([&] { rc = run_nmin(nmin_opts); });

  GenOpts gen_opts;
  auto* gen = app.add_subcommand("gen-operator", "generate a seeded test operator");
  gen->add_option("--ambient", gen_opts.ambient, "ambient index")->required();
  gen->add_option("--gamma", gen_opts.gamma, "norm budget");
  gen->add_option("--delta", gen_opts.delta, "diagonal lower bound");
  gen->add_option("--mode", gen_opts.mode, "positive|signed|none");
  gen->add_option("--seed", gen_opts.seed, "rng seed")->required();
  gen->add_option("--p", gen_opts.p, "exponent (number or inf)");
  gen->add_option("--rademacher", gen_opts.rademacher, "constant|independent");
  gen->add_option("--out", gen_opts.out, "output operator JSON")->required();
  gen->callback([&] { rc = run_gen(gen_opts); });

  NormOpts norm_opts;
  auto* norm = app.add_subcommand("norm", "norms of vectors and operators");
  auto* nv = norm->add_option("--vector", norm_opts.vector_path, "vector JSON");
  auto* no = norm->add_option("--operator", norm_opts.operator_path, "operator JSON");
  nv->excludes(no);
  norm->add_option("--p", norm_opts.p, "exponent (number or inf)");
  norm->add_option("--rademacher", norm_opts.rademacher, "constant|independent");
  norm->add_option("--method", norm_opts.method, "exact|mc (vectors)");
  norm->add_option("--cap", norm_opts.cap, "exact sign-average interval cap");
  norm->add_option("--samples", norm_opts.samples, "mc sample count");
  norm->add_option("--budget", norm_opts.budget, "ascent starts (operators)");
  norm->add_option("--seed", norm_opts.seed, "rng seed (mc / operator bounds)");
  norm->callback([&] {
    if (norm_opts.vector_path.empty() && norm_opts.operator_path.empty())
      throw CLI::ValidationError("norm", "one of --vector / --operator is required");
    rc = run_norm(norm_opts);
  });

  DiagOpts diag_opts;
  auto* diag = app.add_subcommand("diagonalize",
                                  "randomized diagonalization of an operator");
  diag->add_option("--operator", diag_opts.operator_path, "operator JSON")->required();
  diag->add_option("--n", diag_opts.n, "target index")->required();
  diag->add_option("--m", diag_opts.m, "first frequency")->required();
  diag->add_option("--gamma", diag_opts.gamma, "norm budget");
  diag->add_option("--delta", diag_opts.delta, "diagonal lower bound");
  diag->add_option("--eta", diag_opts.eta, "accuracy parameter");
  diag->add_option("--off-threshold", diag_opts.off_threshold, "off-diagonal cap");
  diag->add_option("--diag-threshold", diag_opts.diag_threshold, "diagonal dev cap");
  diag->add_option("--max-tries", diag_opts.max_tries, "resampling budget");
  diag->add_option("--seed", diag_opts.seed, "rng seed")->required();
  diag->add_option("--out", diag_opts.out, "output JSON (system + diagonal)");
  diag->callback([&] { rc = run_diagonalize(diag_opts); });

  FactOpts fact_opts;
  auto* fact = app.add_subcommand("factorize",
                                  "factor the identity through T or I-T");
  fact->add_option("--operator", fact_opts.operator_path, "operator JSON")->required();
  fact->add_option("--mode", fact_opts.mode, "positive|split");
  fact->add_option("--n", fact_opts.n, "target index")->required();
  fact->add_option("--ntilde", fact_opts.ntilde, "stabilization chain length");
  fact->add_option("--m", fact_opts.m, "first frequency (default: certified scale)");
  fact->add_option("--gamma", fact_opts.gamma, "norm budget");
  fact->add_option("--delta", fact_opts.delta, "diagonal lower bound");
  fact->add_option("--eta", fact_opts.eta, "accuracy (default eps/(6(1+eps)))");
  fact->add_option("--epsilon", fact_opts.epsilon, "constant slack");
  fact->add_option("--bin-width", fact_opts.bin_width, "pigeonhole bin width");
  fact->add_option("--off-threshold", fact_opts.off_threshold, "off-diagonal cap");
  fact->add_option("--diag-threshold", fact_opts.diag_threshold, "diagonal dev cap");
  fact->add_option("--K", fact_opts.K, "unconditionality constant");
  fact->add_option("--max-tries", fact_opts.max_tries, "resampling budget");
  fact->add_option("--seed", fact_opts.seed, "rng seed")->required();
  fact->add_option("--p", fact_opts.p, "exponent (number or inf)");
  fact->add_option("--rademacher", fact_opts.rademacher, "constant|independent");
  fact->add_option("--residual-tol", fact_opts.residual_tol, "acceptance tolerance");
  fact->add_option("--certificate-out", fact_opts.certificate_out,
                   "output certificate JSON");
  fact->callback([&] { rc = run_factorize(fact_opts); });

  ReduceOpts red_opts;
  auto* red = app.add_subcommand(
      "reduce-positive", "compress a signed diagonal to a positive one");
  red->add_option("--operator", red_opts.operator_path, "operator JSON")->required();
  red->add_option("--N", red_opts.N, "target index")->required();
  red->add_option("--delta", red_opts.delta, "diagonal lower bound");
  red->add_option("--epsilon", red_opts.epsilon, "constant slack");
  red->add_flag("--override", red_opts.allow_override,
                "run below the guaranteed ambient size");
  red->add_option("--out", red_opts.out, "output JSON (system, A, B, Tpos)");
  red->add_option("--sign-multiplier-out", red_opts.sign_multiplier_out,
                  "write the diagonal-sign multiplier instead of reducing");
  red->callback([&] { rc = run_reduce(red_opts); });

  RunOpts run_opts;
  auto* run = app.add_subcommand("run", "run a scenario config end to end");
  run->add_option("--config", run_opts.config_path, "scenario JSON")->required();
  run->add_option("--report-json", run_opts.report_json, "override report path");
  run->add_option("--report-csv", run_opts.report_csv, "override csv path");
  run->callback([&] { rc = run_run(run_opts); });

  VerifyOpts ver_opts;
  auto* ver = app.add_subcommand("verify-certificate",
                                 "recheck a certificate against its operator");
  ver->add_option("--certificate", ver_opts.certificate_path, "certificate JSON")
      ->required();
  ver->add_option("--operator", ver_opts.operator_path, "operator JSON")->required();
  ver->add_option("--tol", ver_opts.tol, "residual tolerance");
  ver->add_option("--proj-tol", ver_opts.proj_tol, "projectional tolerance");
  ver->callback([&] { rc = run_verify(ver_opts); });

  try {
    CLI11_PARSE(app, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
