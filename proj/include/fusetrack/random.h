// SPDX-License-Identifier: MIT

#ifndef FUSETRACK_RANDOM_H_
#define FUSETRACK_RANDOM_H_

#include <cmath>
#include <cstdint>

namespace fusetrack {

/// splitmix64 generator with portable uniform and Gaussian draws.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_{seed} {}

  std::uint64_t Next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double Uniform() { return double(Next() >> 11) * 0x1.0p-53; }
  double Uniform(double low, double high) {
    return low + (high - low) * Uniform();
  }
  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) { return Next() % n; }

  // Box-Muller, one sample per call.
  double Gaussian() {
    double u1 = 1.0 - Uniform();
    double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::uint64_t state_;
};

// Derives an independent stream seed for a sub-task (view, frame, ...).
inline std::uint64_t DeriveSeed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 mixer{seed ^ (stream * 0xd1342543de82ef95ULL + 1)};
  return mixer.Next();
}

}  // namespace fusetrack

#endif  // FUSETRACK_RANDOM_H_
