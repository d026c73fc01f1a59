#include "simlab/sim_config.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simlab {

void SimConfig::validate() const {
  if (d <= 0) throw std::invalid_argument("SimConfig: d must be positive");
  if (s < 1 || s > d)
    throw std::invalid_argument("SimConfig: s must satisfy 1 <= s <= d");
  if (n <= 0) throw std::invalid_argument("SimConfig: n must be positive");
  if (mu.size() != d || sigma.size() != d)
    throw std::invalid_argument("SimConfig: mu and sigma must have length d");
  for (int p = 0; p < d; ++p) {
    if (!std::isfinite(mu[p]) || !std::isfinite(sigma[p]))
      throw std::invalid_argument("SimConfig: mu and sigma must be finite");
    if (mu[p] < 0 || sigma[p] < 0)
      throw std::invalid_argument("SimConfig: mu and sigma must be nonnegative");
    if (p >= s && (mu[p] != 0.0 || sigma[p] != 0.0))
      throw std::invalid_argument(
          "SimConfig: mu and sigma must vanish beyond the first s entries");
  }
}

TestIndex TestIndex::from_mask(unsigned mask, int s) {
  TestIndex idx;
  idx.v.resize(s);
  for (int p = 0; p < s; ++p) idx.v[p] = (mask >> p) & 1u;
  return idx;
}

unsigned TestIndex::to_mask() const {
  unsigned m = 0;
  for (size_t p = 0; p < v.size(); ++p)
    if (v[p]) m |= 1u << p;
  return m;
}

void TestIndex::validate(int s) const {
  if (static_cast<int>(v.size()) != s)
    throw std::invalid_argument("TestIndex: length must equal s (got " +
                                std::to_string(v.size()) + ", want " +
                                std::to_string(s) + ")");
  for (int x : v)
    if (x != 0 && x != 1)
      throw std::invalid_argument("TestIndex: entries must be 0 or 1");
}

}  // namespace simlab
