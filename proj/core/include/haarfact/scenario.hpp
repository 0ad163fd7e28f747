#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haarfact/reduce_positive.hpp"
#include "haarfact/serialization.hpp"
#include "haarfact/stabilize.hpp"

namespace haarfact {

enum class ScenarioMode { Positive, Split, SignedDiagonal };

struct ScenarioOverrides {
  std::optional<int> ntilde;  // stabilization chain length
  std::optional<int> m;       // first diagonalization frequency
  std::optional<int> N;       // operator ambient (positive/split), reduction
                              // target level (signed-diagonal)
  std::optional<int> Ntilde;  // generator ambient in signed-diagonal mode
  std::optional<double> off_threshold;
  std::optional<double> diag_threshold;
  std::optional<double> bin_width;
};

struct ScenarioConfig {
  SpaceSpec spec{};
  int n = 0;
  double gamma = 1.0;
  double delta = 0.5;
  double epsilon = 1.0;
  std::optional<double> eta_override;  // default eps/(6(1+eps))
  ScenarioMode mode = ScenarioMode::Positive;
  ScenarioOverrides overrides{};
  std::vector<std::uint64_t> seeds;
  int max_tries = 50;
  double min_success_rate = 0.0;  // 0 disables the aggregate assertion
  double residual_tol = 1e-8;
  std::string report_json;  // output paths; empty skips the file
  std::string report_csv;

  double eta() const;
  // ambient of the generated operator for each mode (defaults documented in
  // scenario.cpp); never below the stabilization needs
  int generator_ambient() const;
};

struct StageTiming {
  std::string stage;
  double ms = 0.0;
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // set when !ok
  FactorizationCertificate certificate;
  double residual = 0.0;
  double c = 0.0;
  double q = 0.0;
  double constant_bound = 0.0;
  // achieved diagonalization quality
  double offdiag_max = 0.0;
  double diag_dev_max = 0.0;
  double error_bound = 0.0;
  int tries_used = 0;
  // signed-diagonal extras
  int sigma = 1;
  double a_bound = 1.0;
  std::vector<StageTiming> timings;  // CSV only; kept out of the JSON report
};

struct RunReport {
  int schema_version = 1;
  ScenarioConfig config;
  std::vector<SeedOutcome> seeds;
  double success_rate = 0.0;
  double max_residual = 0.0;
  bool assertions_passed = true;
};

// per-seed pipeline: generate -> (reduce in signed-diagonal mode) ->
// factorize; failures are recorded per seed and never abort the sweep
RunReport run_scenario(const ScenarioConfig& config);

Json config_to_json(const ScenarioConfig& config);
ScenarioConfig config_from_json(const Json& j);

// deterministic per (config, seeds): timings are deliberately excluded
Json report_to_json(const RunReport& report);
// one row per (seed, stage) with timing and achieved thresholds
std::string report_csv(const RunReport& report);

}  // namespace haarfact
