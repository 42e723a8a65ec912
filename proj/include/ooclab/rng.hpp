#pragma once

#include <cmath>
#include <cstdint>

namespace ooclab {

/// SplitMix64 generator. Every stochastic step in the pipeline draws from an
/// instance of this class, so identical seeds give bit-identical runs on any
/// platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random mantissa bits.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal deviate. Box-Muller on consecutive uniform pairs; the
  /// cosine branch is returned first, the sine branch on the next call.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    if (u1 == 0.0) u1 = 0x1.0p-53;  // keep log() finite
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// One SplitMix64 step starting from the given state.
inline std::uint64_t splitmix64_output(std::uint64_t state) {
  return SplitMix64(state).next_u64();
}

/// Seed for an independent sub-stream identified by an integer id.
/// Indexed derivation (never draw-order dependent) is what makes parallel
/// execution bit-identical to sequential.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t id) {
  return splitmix64_output(seed ^ splitmix64_output(id));
}

}  // namespace ooclab
