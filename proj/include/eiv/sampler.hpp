#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "eiv/model.hpp"
#include "eiv/rng.hpp"

namespace eiv {

/// Random streams for one chain: a global stream for the Sigma and
/// coefficient draws and one stream per latent row, so the latent updates
/// are independent of the order they run in.
class SweepRng {
 public:
  SweepRng(std::uint64_t seed, std::uint64_t replicate, Eigen::Index n);

  RngStream& global() noexcept { return global_; }
  RngStream& latent(Eigen::Index i) { return latent_.at(static_cast<std::size_t>(i)); }
  Eigen::Index latent_count() const noexcept { return static_cast<Eigen::Index>(latent_.size()); }

 private:
  RngStream global_;
  std::vector<RngStream> latent_;
};

/// Deliberate kernel defects, used only to check that validation catches them.
struct KernelFaults {
  bool transpose_latent_coefficients = false;  // use B^T in place of B (needs p == m)
};

/// One deterministic-scan sweep: Sigma | A, gamma, then gamma | A, Sigma,
/// then every A_i | gamma, Sigma. The incoming Sigma is never read.
ChainState gibbs_step(const ChainState& state, const GeneralDensity& g, SweepRng& rng,
                      const KernelFaults& faults = {});

/// Which coordinates a chain stores besides gamma and log det Sigma.
struct StoreSelection {
  bool sigma = false;   // Sigma.k.l, k <= l
  bool latent = false;  // A.i.j

  /// "gamma", "all", or a comma list drawn from {gamma, sigma, latent}.
  static StoreSelection parse(std::string_view text);
  std::string to_string() const;
};

struct RunSpec {
  long iterations = 1000;
  long burn_in = 0;
  long thin = 1;
  std::uint64_t seed = 1;
  int replicates = 1;
  StoreSelection store;

  void validate() const;
  long stored_rows() const { return (iterations - burn_in) / thin; }
};

struct ChainMetadata {
  std::uint64_t seed = 0;
  int replicate = 0;
  double wall_seconds = 0.0;
  std::string variant = "general";
  Eigen::Index n = 0, m = 0, p = 0, q = 0;
  long iterations = 0, burn_in = 0, thin = 1;
};

struct ChainOutput {
  Matrix draws;  // stored iterations x coordinates
  std::vector<std::string> labels;
  ChainMetadata meta;

  /// Column index of a label; throws contract_violation if absent.
  Eigen::Index column(std::string_view label) const;
  /// All columns whose label starts with `prefix`.
  Matrix columns_with_prefix(std::string_view prefix) const;
};

std::vector<std::string> chain_labels(const GeneralDensity& g, const StoreSelection& store);
Vector chain_row(const ChainState& state, const GeneralDensity& g, const StoreSelection& store);

/// A rows = d_i, gamma = c0, Sigma = B0 / max(a0 + m + 1, m + 2).
ChainState init_default(const GeneralDensity& g);

/// As init_default, with A rows moved to d_i + 10 D_i^{1/2} z.
ChainState init_overdispersed(const GeneralDensity& g, RngStream& rng);

enum class InitStrategy { prior_mode, overdispersed };

/// Seed for a replicate: spec.seed + replicate.
std::uint64_t replicate_seed(const RunSpec& spec, int replicate);

ChainOutput run_chain(const GeneralDensity& g, const RunSpec& spec, const ChainState& init, int replicate = 0,
                      std::string_view variant = "general");
ChainOutput run_chain(const GeneralDensity& g, const RunSpec& spec, InitStrategy init = InitStrategy::prior_mode,
                      int replicate = 0, std::string_view variant = "general");

}  // namespace eiv
