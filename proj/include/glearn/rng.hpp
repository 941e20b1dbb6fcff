#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace glearn {

// Seed streams. Every random draw in the library comes from a generator
// seeded by derive_seed(base, stream, index), so independent consumers never
// share a sequence and results do not depend on evaluation order.
enum class Stream : std::uint64_t {
  Market = 1,
  Universe = 2,
  Realized = 3,
  Action = 4,
  Evaluation = 5,
};

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t splitmix64(std::uint64_t z);

/// seed' = splitmix64(base ^ splitmix64(stream * 2^32 + index)).
std::uint64_t derive_seed(std::uint64_t base, Stream stream, std::uint64_t index = 0);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// Portable generator: std::mt19937_64 (bit-exact across standard libraries)
/// with hand-written uniform and normal transforms, since the std
/// distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace glearn
