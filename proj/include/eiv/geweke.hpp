#pragma once

#include <string>
#include <vector>

#include "eiv/model.hpp"
#include "eiv/rng.hpp"
#include "eiv/sampler.hpp"

namespace eiv {

enum class GewekeMode {
  successive_conditional,  // Gibbs sweeps alternated with data regeneration
  prior_vs_prior,          // both samples are independent joint draws (null check)
};

struct GewekeOptions {
  long iterations = 10000;
  GewekeMode mode = GewekeMode::successive_conditional;
  KernelFaults faults;
};

struct GewekeStatistic {
  std::string name;
  double marginal_mean = 0.0;
  double successive_mean = 0.0;
  double marginal_se = 0.0;
  double successive_se = 0.0;  // batch-means standard error
  double z = 0.0;
};

struct GewekeReport {
  Variant variant = Variant::berkson_x;
  long iterations = 0;
  long diverged_at = 0;    // 0 if the successive chain completed
  std::string divergence;  // what failed at that iteration
  std::vector<GewekeStatistic> stats;

  double fraction_within(double bound) const;
  double max_abs_z() const;
};

/// Joint-distribution test. Marginal-conditional draws sample the parameters
/// and latents from the prior and then the data; the successive-conditional
/// chain alternates gibbs_step with fresh data given the parameters (Y, plus
/// X for classical models). Berkson X is held fixed. Test functions are every
/// gamma coordinate, every A coordinate, the Sigma entries, log det Sigma and
/// drift_value. Rejects the general variant and priors that cannot be drawn
/// from (a0 < m).
GewekeReport geweke_validate(const ModelConfig& config, const GewekeOptions& options, RngStream& rng);

/// A small proper-prior model of the given variant with random Z (first
/// column 1), Berkson X and error covariances; Y is a placeholder.
ModelConfig geweke_test_config(Variant variant, Eigen::Index n, Eigen::Index m, Eigen::Index p, Eigen::Index q,
                               RngStream& rng);

}  // namespace eiv
