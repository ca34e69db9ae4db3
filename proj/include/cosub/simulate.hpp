#pragma once

#include <cstdint>
#include <vector>

#include "cosub/data.hpp"
#include "cosub/rng.hpp"

namespace cosub {

struct SimConfig {
  int n = 200;
  int v_count = 15;
  int k0 = 4;  // true clusters
  int h0 = 3;  // true mixture components
  long long customers_per_agency = 500;
  std::vector<std::vector<double>> p0;   // K0 x V true choice probabilities
  std::vector<std::vector<double>> nu0;  // K0 x H0 true mixing rows
  std::vector<std::vector<double>> pi0;  // H0 x L true edge probabilities
  std::uint64_t seed = 1;

  void validate() const;
};

// The benchmark scenario: 200 agencies in 4 equal clusters over 15 products,
// 500 mono-product customers each, H0 = 3 network regimes. Clusters 1 and 2
// share everything except products 1 and 9 swapped in the choice
// probabilities; clusters 3 and 4 likewise with products 3 and 7. Component 1
// has one dense community among products 1-10; component 2 has hub products
// {1,4,8,12}; component 3 equals component 2 with product 4 dropped from the
// hubs.
SimConfig default_scenario();

struct SimTruth {
  std::vector<int> C0;  // 0-based true cluster per agency
  std::vector<int> G0;  // 0-based true component per agency
};

struct Simulation {
  Dataset data;
  SimTruth truth;
};

Simulation generate(const SimConfig& cfg);

}  // namespace cosub
