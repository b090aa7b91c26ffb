#pragma once

// Test-only helpers: random distribution generators and small fixtures.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "infoq/dist.hpp"

namespace infoq::testing {

inline Variable var(std::string name, std::size_t n) {
  Variable v{std::move(name), {}};
  for (std::size_t i = 0; i < n; ++i) v.support.push_back(std::to_string(i));
  return v;
}

inline JointDistribution fair_coin(const std::string& name = "X") { return {{var(name, 2)}, {0.5, 0.5}}; }

// Mass 1/3 on (x, y) in {(0,0), (1,0), (1,1)}.
inline JointDistribution three_cell() { return {{var("X", 2), var("Y", 2)}, {1.0 / 3, 0.0, 1.0 / 3, 1.0 / 3}}; }

// Positive random tensor: exponential draws plus a floor, normalized.
inline JointDistribution random_distribution(std::mt19937_64& rng, const std::vector<std::string>& names,
                                             const std::vector<std::size_t>& sizes, double floor = 1e-3) {
  std::vector<Variable> vars;
  std::size_t cells = 1;
  for (std::size_t i = 0; i < names.size(); ++i) {
    vars.push_back(var(names[i], sizes[i]));
    cells *= sizes[i];
  }
  std::exponential_distribution<double> draw(1.0);
  std::vector<double> probs(cells);
  double sum = 0.0;
  for (double& p : probs) sum += (p = draw(rng) + floor);
  for (double& p : probs) p /= sum;
  return {std::move(vars), std::move(probs)};
}

inline JointDistribution random_distribution(std::mt19937_64& rng, const std::vector<std::string>& names,
                                             std::size_t min_support = 2, std::size_t max_support = 4) {
  std::uniform_int_distribution<std::size_t> size(min_support, max_support);
  std::vector<std::size_t> sizes;
  for (std::size_t i = 0; i < names.size(); ++i) sizes.push_back(size(rng));
  return random_distribution(rng, names, sizes);
}

inline std::size_t random_outcome(std::mt19937_64& rng, const JointDistribution& d, const std::string& name) {
  std::uniform_int_distribution<std::size_t> pick(0, d.variable(name).size() - 1);
  return pick(rng);
}

}  // namespace infoq::testing
