#pragma once

#include <cstdint>
#include <random>

namespace eiv {

/// Mixes two 64-bit words into a stream identifier (splitmix64 finalizer).
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b);

/// A seeded random stream. The engine state is a pure function of
/// (seed, stream), so the same pair and call sequence always reproduce the
/// same draws, and distinct stream ids give independently seeded engines.
///
/// A stream is a value: copy it to hand it to another worker, but never share
/// one instance between two threads.
class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// A child stream, deterministic in (seed, stream, id).
  RngStream substream(std::uint64_t id) const;

  double normal();
  double uniform();
  /// Gamma with the given shape and scale (mean shape * scale).
  double gamma(double shape, double scale);
  double chi_squared(double df);

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  engine_type engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace eiv
