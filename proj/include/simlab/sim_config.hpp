#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace simlab {

// Data-generating process: s Gaussian clusters on the first s coordinate
// axes of R^d, cluster p centered at mu_p * e_p with shared per-direction
// standard deviations sigma. Optionally one extra cluster at the origin.
struct SimConfig {
  int d = 0;  // ambient dimensionality
  int s = 0;  // number of axis clusters, 1 <= s <= d
  int n = 1;  // samples per cluster (finite-sample mode only)
  Eigen::VectorXd mu;     // length d, entries beyond s must be 0
  Eigen::VectorXd sigma;  // length d, entries beyond s must be 0
  bool include_origin_cluster = false;
  std::optional<std::uint64_t> rotation_seed;  // Haar rotation of all points

  int cluster_count() const { return include_origin_cluster ? s + 1 : s; }
  bool rotated() const { return rotation_seed.has_value(); }

  // Throws std::invalid_argument when any invariant fails.
  void validate() const;
};

// Binary index selecting which cluster means are combined into a test point.
struct TestIndex {
  std::vector<int> v;  // entries in {0, 1}, length s

  static TestIndex ones(int s) { return TestIndex{std::vector<int>(s, 1)}; }
  static TestIndex zeros(int s) { return TestIndex{std::vector<int>(s, 0)}; }
  // Bit p of mask = component p.
  static TestIndex from_mask(unsigned mask, int s);
  unsigned to_mask() const;

  void validate(int s) const;
};

}  // namespace simlab
