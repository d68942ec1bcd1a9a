#pragma once

#include <cstdint>
#include <random>

#include "amg/numerics/tensor.hpp"

namespace amg {

/// Seeded random stream. Uniform bits come from std::mt19937_64, whose output
/// sequence is fixed by the standard; the floating-point transforms are done
/// here rather than through <random> distributions, which are not portable.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  /// Number of 64-bit words drawn so far.
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  double normal();

  /// Mixes a parent seed with a stream index (splitmix64 finalizer).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// I.i.d. standard normal entries.
Tensor gaussian_sample(const Shape& shape, RngStream& rng);

}  // namespace amg
