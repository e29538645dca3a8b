#pragma once

#include <apd/fourier.hpp>
#include <apd/random.hpp>
#include <apd/space.hpp>

#include <cstdint>
#include <vector>

namespace apd::testing {

inline GFunction random_function(const Space& space, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(space.size());
  for (double& x : v) x = rng.uniform();
  return GFunction(space, std::move(v));
}

inline GFunction random_indicator(const Space& space, double density, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(space.size());
  for (double& x : v) x = rng.uniform() < density ? 1.0 : 0.0;
  return GFunction(space, std::move(v));
}

/// f(x) = 1 when the first coordinate of x is 0.
inline GFunction first_coordinate_zero(const Space& space) {
  std::vector<double> v(space.size());
  for (Index x = 0; x < v.size(); ++x) v[x] = space.coord(Point{x}, 0) == 0 ? 1.0 : 0.0;
  return GFunction(space, std::move(v));
}

}  // namespace apd::testing
