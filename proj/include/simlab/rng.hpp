#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace simlab {

// Role constants for deriving sub-seeds from a single experiment seed.
// sub_seed = seed XOR role. Documented in the README; keep stable.
inline constexpr std::uint64_t kDatasetSeedRole = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kInitSeedRole = 0xC2B2AE3D27D4EB4Full;
inline constexpr std::uint64_t kRotationSeedRole = 0x165667B19E3779F9ull;

// Deterministic generator: mt19937_64 with hand-rolled uniform/normal
// transforms so streams do not depend on the standard library's
// distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Standard normal via Box-Muller; one spare cached.
  double normal();

  double sign() { return uniform01() < 0.5 ? -1.0 : 1.0; }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Haar-distributed orthogonal matrix: QR of a seeded Gaussian matrix with
// the diagonal of R sign-corrected.
Eigen::MatrixXd haar_orthogonal(int d, std::uint64_t seed);

}  // namespace simlab
