#include "haarfact/scenario.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace haarfact {

namespace {

double ms_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

StabilizationParams stabilization_params(const ScenarioConfig& config,
                                         std::uint64_t seed) {
  StabilizationParams params;
  params.gamma = config.gamma;
  params.delta = config.delta;
  params.eta = config.eta();
  params.m = config.overrides.m.value_or(1);
  params.ntilde = config.overrides.ntilde;
  params.bin_width = config.overrides.bin_width;
  params.off_threshold = config.overrides.off_threshold;
  params.diag_threshold = config.overrides.diag_threshold;
  params.max_tries = config.max_tries;
  params.seed = seed;
  params.spec = config.spec;
  return params;
}

}  // namespace

double ScenarioConfig::eta() const {
  if (eta_override) return *eta_override;
  return epsilon / (6.0 * (1.0 + epsilon));
}

int ScenarioConfig::generator_ambient() const {
  if (mode == ScenarioMode::SignedDiagonal) {
    // default: the smallest ambient the reduction accepts at target level N
    const int N = overrides.N.value_or(1);
    return overrides.Ntilde.value_or(2 * N);
  }
  // default: exactly what the stabilization chain needs
  const int m = overrides.m.value_or(1);
  const int ntilde = overrides.ntilde.value_or(n);
  return overrides.N.value_or(ntilde + m);
}

RunReport run_scenario(const ScenarioConfig& config) {
  if (config.seeds.empty()) throw std::invalid_argument("scenario needs seeds");
  validate_spec(config.spec);

  RunReport report;
  report.config = config;
  int successes = 0;

  for (const std::uint64_t seed : config.seeds) {
    SeedOutcome outcome;
    outcome.seed = seed;
    try {
      const auto t_gen = std::chrono::steady_clock::now();
      const bool signed_mode = config.mode == ScenarioMode::SignedDiagonal;
      const OperatorMatrix T = random_operator(
          config.generator_ambient(), config.gamma, config.delta,
          config.mode == ScenarioMode::Positive ? OperatorMode::Positive
                                                : OperatorMode::Signed,
          seed, config.spec);
      outcome.timings.push_back({"generate", ms_since(t_gen)});

      OperatorMatrix stage = T;  // operator fed to factorize
      OperatorMatrix reduce_A, reduce_B;
      int sigma = 1;
      if (signed_mode) {
        const auto t_red = std::chrono::steady_clock::now();
        const int N = config.overrides.N.value_or(1);
        auto red = reduce_to_positive(T, N, config.delta, config.epsilon,
                                      /*allow_override=*/true);
        outcome.sigma = sigma = red.sigma;
        outcome.a_bound = red.a_bound;
        stage = std::move(red.Tpos);
        reduce_A = std::move(red.A);
        reduce_B = std::move(red.B);
        outcome.timings.push_back({"reduce", ms_since(t_red)});
      }

      const auto t_fact = std::chrono::steady_clock::now();
      const auto fact = factorize(stage, config.n, stabilization_params(config, seed),
                                  config.mode == ScenarioMode::Split
                                      ? FactorizeMode::IdentitySplit
                                      : FactorizeMode::PositiveDiagonal);
      outcome.timings.push_back({"factorize", ms_since(t_fact)});

      outcome.certificate = fact.certificate;
      if (signed_mode) {
        // pull the factorization back through the reduction:
        // I = A' Tpos B' = (sigma A' A_red) T (B_red B')
        auto& cert = outcome.certificate;
        cert.A = scale(sigma, compose(fact.certificate.A, reduce_A));
        cert.B = compose(reduce_B, fact.certificate.B);
        cert.constant_bound = outcome.a_bound * fact.certificate.constant_bound;
        Eigen::MatrixXd full = cert.A.entries() * T.entries() * cert.B.entries();
        full.diagonal().array() -= 1.0;
        cert.residual = max_abs(full);
      }
      outcome.residual = outcome.certificate.residual;
      outcome.c = fact.c;
      outcome.q = fact.q;
      outcome.constant_bound = outcome.certificate.constant_bound;
      outcome.offdiag_max = fact.diagonalization.offdiag_max;
      outcome.diag_dev_max = fact.diagonalization.diag_dev_max;
      outcome.error_bound = fact.diagonalization.error_bound;
      outcome.tries_used = fact.diagonalization.tries_used;

      if (outcome.residual > config.residual_tol) {
        outcome.error = "residual above tolerance";
      } else {
        outcome.ok = true;
      }
    } catch (const std::exception& e) {
      outcome.error = e.what();
    }
    if (outcome.ok) ++successes;
    report.max_residual = std::max(report.max_residual, outcome.residual);
    report.seeds.push_back(std::move(outcome));
  }

  report.success_rate =
      static_cast<double>(successes) / static_cast<double>(config.seeds.size());
  report.assertions_passed = report.success_rate >= config.min_success_rate;

  if (!config.report_json.empty()) save_json(report_to_json(report), config.report_json);
  if (!config.report_csv.empty()) {
    std::ofstream out(config.report_csv);
    if (!out) throw std::runtime_error("cannot open for writing: " + config.report_csv);
    out << report_csv(report);
  }
  return report;
}

Json config_to_json(const ScenarioConfig& config) {
  Json j;
  j["spec"] = spec_to_json(config.spec);
  j["n"] = config.n;
  j["gamma"] = config.gamma;
  j["delta"] = config.delta;
  j["epsilon"] = config.epsilon;
  if (config.eta_override) j["eta"] = *config.eta_override;
  switch (config.mode) {
    case ScenarioMode::Positive: j["mode"] = "positive"; break;
    case ScenarioMode::Split: j["mode"] = "split"; break;
    case ScenarioMode::SignedDiagonal: j["mode"] = "signed-diagonal"; break;
  }
  Json ov = Json::object();
  if (config.overrides.ntilde) ov["ntilde"] = *config.overrides.ntilde;
  if (config.overrides.m) ov["m"] = *config.overrides.m;
  if (config.overrides.N) ov["N"] = *config.overrides.N;
  if (config.overrides.Ntilde) ov["Ntilde"] = *config.overrides.Ntilde;
  if (config.overrides.off_threshold) ov["off_threshold"] = *config.overrides.off_threshold;
  if (config.overrides.diag_threshold) ov["diag_threshold"] = *config.overrides.diag_threshold;
  if (config.overrides.bin_width) ov["bin_width"] = *config.overrides.bin_width;
  j["overrides"] = std::move(ov);
  j["seeds"] = config.seeds;
  j["max_tries"] = config.max_tries;
  j["min_success_rate"] = config.min_success_rate;
  j["residual_tol"] = config.residual_tol;
  if (!config.report_json.empty()) j["report_json"] = config.report_json;
  if (!config.report_csv.empty()) j["report_csv"] = config.report_csv;
  return j;
}

ScenarioConfig config_from_json(const Json& j) {
  ScenarioConfig config;
  config.spec = spec_from_json(j.at("spec"));
  config.n = j.at("n").get<int>();
  config.gamma = j.value("gamma", config.gamma);
  config.delta = j.value("delta", config.delta);
  config.epsilon = j.value("epsilon", config.epsilon);
  if (j.contains("eta")) config.eta_override = j["eta"].get<double>();
  const auto mode = j.at("mode").get<std::string>();
  if (mode == "positive") {
    config.mode = ScenarioMode::Positive;
  } else if (mode == "split") {
    config.mode = ScenarioMode::Split;
  } else if (mode == "signed-diagonal") {
    config.mode = ScenarioMode::SignedDiagonal;
  } else {
    throw std::invalid_argument("unknown scenario mode: " + mode);
  }
  if (j.contains("overrides")) {
    const auto& ov = j["overrides"];
    if (ov.contains("ntilde")) config.overrides.ntilde = ov["ntilde"].get<int>();
    if (ov.contains("m")) config.overrides.m = ov["m"].get<int>();
    if (ov.contains("N")) config.overrides.N = ov["N"].get<int>();
    if (ov.contains("Ntilde")) config.overrides.Ntilde = ov["Ntilde"].get<int>();
    if (ov.contains("off_threshold")) {
      config.overrides.off_threshold = ov["off_threshold"].get<double>();
    }
    if (ov.contains("diag_threshold")) {
      config.overrides.diag_threshold = ov["diag_threshold"].get<double>();
    }
    if (ov.contains("bin_width")) config.overrides.bin_width = ov["bin_width"].get<double>();
  }
  config.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  config.max_tries = j.value("max_tries", config.max_tries);
  config.min_success_rate = j.value("min_success_rate", config.min_success_rate);
  config.residual_tol = j.value("residual_tol", config.residual_tol);
  config.report_json = j.value("report_json", std::string{});
  config.report_csv = j.value("report_csv", std::string{});
  return config;
}

Json report_to_json(const RunReport& report) {
  Json j;
  j["schema_version"] = report.schema_version;
  j["config"] = config_to_json(report.config);
  Json seeds = Json::array();
  for (const auto& outcome : report.seeds) {
    Json s;
    s["seed"] = outcome.seed;
    s["ok"] = outcome.ok;
    if (!outcome.error.empty()) s["error"] = outcome.error;
    if (outcome.ok || outcome.residual > 0.0) {
      s["certificate"] = certificate_to_json(outcome.certificate);
    }
    s["residual"] = outcome.residual;
    s["c"] = outcome.c;
    s["q"] = outcome.q;
    s["constant_bound"] = outcome.constant_bound;
    s["achieved"] = Json{{"offdiag_max", outcome.offdiag_max},
                         {"diag_dev_max", outcome.diag_dev_max},
                         {"error_bound", outcome.error_bound},
                         {"tries_used", outcome.tries_used}};
    if (report.config.mode == ScenarioMode::SignedDiagonal) {
      s["reduce"] = Json{{"sigma", outcome.sigma}, {"a_bound", outcome.a_bound}};
    }
    seeds.push_back(std::move(s));
  }
  j["seeds"] = std::move(seeds);
  j["aggregate"] = Json{{"success_rate", report.success_rate},
                        {"max_residual", report.max_residual},
                        {"assertions_passed", report.assertions_passed}};
  return j;
}

std::string report_csv(const RunReport& report) {
  std::ostringstream out;
  out.precision(17);
  out << "seed,stage,ok,time_ms,tries_used,offdiag_max,diag_dev_max,error_bound,"
         "c,q,residual,constant_bound\n";
  for (const auto& outcome : report.seeds) {
    for (const auto& [stage, ms] : outcome.timings) {
      out << outcome.seed << ',' << stage << ',' << (outcome.ok ? 1 : 0) << ','
          << ms << ',';
      if (stage == "factorize") {
        out << outcome.tries_used << ',' << outcome.offdiag_max << ','
            << outcome.diag_dev_max << ',' << outcome.error_bound << ','
            << outcome.c << ',' << outcome.q << ',' << outcome.residual << ','
            << outcome.constant_bound;
      } else {
        out << ",,,,,,,";
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace haarfact
