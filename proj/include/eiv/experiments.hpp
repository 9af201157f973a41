#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eiv/diagnostics.hpp"
#include "eiv/io.hpp"
#include "eiv/sampler.hpp"
#include "eiv/simulate.hpp"

namespace eiv {

struct ExperimentOptions {
  long iterations = 100000;
  long burn_in = 10000;
  int replicates = 5;
  std::uint64_t seed = 1;
  InitStrategy init = InitStrategy::prior_mode;
  unsigned threads = 0;  // 0: worker_count()
};

/// Workers for replicate fan-out: EIV_GIBBS_THREADS if set, else the
/// hardware concurrency.
unsigned worker_count();

/// Mixing summary of one replicate, over the beta coordinates.
struct ReplicateSummary {
  Scenario scenario;
  int replicate = 0;
  std::uint64_t seed = 0;
  long stored = 0;
  Eigen::Index d = 0;
  double mess = 0.0;
  double se_eig_min = 0.0;
  double se_eig_max = 0.0;
  bool pseudo_determinant = false;
};

/// Simulates a fresh data set for each replicate and runs one chain on it.
/// Replicate r uses chain seed `seed + r`.
std::vector<ReplicateSummary> run_replicates(const std::vector<Scenario>& scenarios, const ExperimentOptions& options);

/// The (m, p) = (1, 1), (2, 7), (3, 7) scaling runs.
std::vector<ReplicateSummary> run_scaling_experiment(const ExperimentOptions& options);
/// Heavy-tailed covariate error with df = 2 and df = 10.
std::vector<ReplicateSummary> run_misspec_experiment(const ExperimentOptions& options);

/// Median of a group's mESS or largest SE eigenvalue.
double median_mess(const std::vector<ReplicateSummary>& rows, const std::string& scenario_name);
double median_se_eig_max(const std::vector<ReplicateSummary>& rows, const std::string& scenario_name);

std::string format_replicate_summaries(const std::vector<ReplicateSummary>& rows);

/// The univariate classical-xy regression of log black-hole mass on log
/// velocity dispersion with known measurement errors (columns log_sigma,
/// log_sigma_err, log_mbh, log_mbh_err; errors are standard deviations).
ModelConfig msigma_model(const fs::path& data_file);

struct AstroResult {
  ChainOutput chain;          // gamma, log det Sigma and Sigma
  std::vector<std::string> parameters;  // alpha, beta, sigma2
  Matrix traces;              // stored x 3
  DiagnosticsReport report;   // over the three traces, lags 0..20
  bool sane = false;
  std::string sanity_message;
};

AstroResult run_astro_experiment(const fs::path& data_file, const ExperimentOptions& options);
std::string format_astro_acf(const AstroResult& result);
std::string format_astro_summary(const AstroResult& result);

/// Every stored value finite and every stored Sigma positive definite.
/// Returns an empty string when the chain passes.
std::string chain_sanity(const ChainOutput& chain);

}  // namespace eiv
