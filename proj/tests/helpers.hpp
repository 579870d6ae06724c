#pragma once

#include <complex>
#include <random>
#include <vector>

#include "polyvf/poly.hpp"

namespace testing_util {

using polyvf::cplx;

// Random simple roots in the unit-ish disk, shifted so the sum is exactly 0
// up to rounding.
inline std::vector<polyvf::Root> random_centered_roots(std::mt19937_64& rng, int d, double spread = 1.0) {
  std::normal_distribution<double> n(0.0, spread);
  std::vector<polyvf::Root> r(d);
  cplx sum = 0.0;
  for (auto& x : r) {
    x.position = {n(rng), n(rng)};
    sum += x.position;
  }
  for (auto& x : r) x.position -= sum / double(d);
  return r;
}

inline double min_pairwise(const std::vector<polyvf::Root>& r) {
  double m = 1e300;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j) m = std::min(m, std::abs(r[i].position - r[j].position));
  return m;
}

}  // namespace testing_util
