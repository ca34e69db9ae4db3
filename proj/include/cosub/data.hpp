#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cosub/common.hpp"

namespace cosub {

// Number of unordered product pairs among V products.
inline int pair_count(int v_count) { return v_count * (v_count - 1) / 2; }

// Maps a 1-based product pair (v, u) with v > u to the 0-based slot of the
// lower-triangular vectorization, in the fixed order
// (2,1),(3,1),...,(V,1),(3,2),...,(V,2),...,(V,V-1).
int pair_index(int v, int u, int v_count);

// Inverse of pair_index: slot l -> (v, u) with v > u, 1-based.
std::pair<int, int> pair_from_index(int l, int v_count);

// Lower-triangular vectorization of a symmetric hollow binary adjacency
// matrix over v_count products.
struct EdgeVector {
  int v_count = 0;
  std::vector<std::uint8_t> bits;

  EdgeVector() = default;
  explicit EdgeVector(int v) : v_count(v), bits(pair_count(v), 0) {
    if (v < 2) throw ValidationError("EdgeVector requires at least 2 products");
  }

  int edge_slots() const { return static_cast<int>(bits.size()); }
  std::uint8_t at(int v, int u) const { return bits[pair_index(v, u, v_count)]; }
  void set(int v, int u, std::uint8_t value) { bits[pair_index(v, u, v_count)] = value; }

  void validate() const;
};

// Round trip with a dense row-major V x V matrix.
EdgeVector vectorize_lower(const std::vector<int>& matrix, int v_count);
std::vector<int> devectorize(const EdgeVector& edges);

struct AgencyRecord {
  std::string agency_id;
  std::vector<long long> choice_counts;  // n_iv, one per product
  EdgeVector network;

  long long total_choices() const;
};

struct Dataset {
  int v_count = 0;
  std::vector<AgencyRecord> agencies;

  int n() const { return static_cast<int>(agencies.size()); }
  void validate() const;
};

// Raw co-subscription counts for one agency: pair counts c_vu and per-product
// multi-product customer counts m_v.
struct CosubCounts {
  int v_count = 0;
  std::vector<long long> pair_counts;     // indexed by pair_index
  std::vector<long long> product_counts;  // m_v, 1-based product v at [v-1]
};

// Thresholding rule: edge iff c_vu / (m_v + m_u - c_vu) strictly exceeds tau;
// pairs whose union of multi-product customers is empty get no edge.
EdgeVector threshold_network(const CosubCounts& counts, double tau);

// Fraction of (agency, pair) entries whose edge indicator differs between the
// two thresholds.
double threshold_sensitivity(const std::vector<CosubCounts>& data, double tau_a, double tau_b);

}  // namespace cosub
