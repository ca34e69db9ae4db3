#include "cosub/data.hpp"

#include <set>
#include <sstream>

namespace cosub {

int pair_index(int v, int u, int v_count) {
  if (u < 1 || v <= u || v > v_count) {
    std::ostringstream msg;
    msg << "invalid product pair (" << v << "," << u << ") for V=" << v_count;
    throw ValidationError(msg.str());
  }
  // Column-major lower triangle: column u holds V-u entries.
  const int offset = (u - 1) * v_count - u * (u - 1) / 2;
  return offset + (v - u - 1);
}

std::pair<int, int> pair_from_index(int l, int v_count) {
  if (l < 0 || l >= pair_count(v_count)) {
    std::ostringstream msg;
    msg << "edge index " << l << " out of range for V=" << v_count;
    throw ValidationError(msg.str());
  }
  int u = 1;
  while (l >= v_count - u) {
    l -= v_count - u;
    ++u;
  }
  return {u + 1 + l, u};
}

void EdgeVector::validate() const {
  if (v_count < 2) throw ValidationError("EdgeVector requires at least 2 products");
  if (static_cast<int>(bits.size()) != pair_count(v_count)) {
    std::ostringstream msg;
    msg << "EdgeVector for V=" << v_count << " must have " << pair_count(v_count)
        << " entries, got " << bits.size();
    throw ValidationError(msg.str());
  }
  for (std::size_t l = 0; l < bits.size(); ++l) {
    if (bits[l] != 0 && bits[l] != 1) {
      std::ostringstream msg;
      msg << "EdgeVector entry " << l << " is " << int(bits[l]) << ", expected 0 or 1";
      throw ValidationError(msg.str());
    }
  }
}

EdgeVector vectorize_lower(const std::vector<int>& matrix, int v_count) {
  if (static_cast<int>(matrix.size()) != v_count * v_count) {
    throw ValidationError("adjacency matrix size does not match V");
  }
  auto entry = [&](int v, int u) { return matrix[(v - 1) * v_count + (u - 1)]; };
  for (int v = 1; v <= v_count; ++v) {
    if (entry(v, v) != 0) {
      std::ostringstream msg;
      msg << "adjacency diagonal entry (" << v << "," << v << ") must be 0";
      throw ValidationError(msg.str());
    }
    for (int u = 1; u < v; ++u) {
      const int a = entry(v, u);
      if (a != 0 && a != 1) {
        std::ostringstream msg;
        msg << "adjacency entry (" << v << "," << u << ") is " << a << ", expected 0 or 1";
        throw ValidationError(msg.str());
      }
      if (a != entry(u, v)) {
        std::ostringstream msg;
        msg << "adjacency matrix asymmetric at (" << v << "," << u << ")";
        throw ValidationError(msg.str());
      }
    }
  }
  EdgeVector edges(v_count);
  for (int u = 1; u < v_count; ++u)
    for (int v = u + 1; v <= v_count; ++v)
      edges.set(v, u, static_cast<std::uint8_t>(entry(v, u)));
  return edges;
}

std::vector<int> devectorize(const EdgeVector& edges) {
  edges.validate();
  const int V = edges.v_count;
  std::vector<int> matrix(V * V, 0);
  for (int u = 1; u < V; ++u) {
    for (int v = u + 1; v <= V; ++v) {
      const int a = edges.at(v, u);
      matrix[(v - 1) * V + (u - 1)] = a;
      matrix[(u - 1) * V + (v - 1)] = a;
    }
  }
  return matrix;
}

long long AgencyRecord::total_choices() const {
  long long total = 0;
  for (long long c : choice_counts) total += c;
  return total;
}

void Dataset::validate() const {
  if (v_count < 2) throw ValidationError("dataset requires at least 2 products");
  std::set<std::string> seen;
  for (const auto& agency : agencies) {
    if (!seen.insert(agency.agency_id).second) {
      throw ValidationError("duplicate agency_id '" + agency.agency_id + "'");
    }
    if (static_cast<int>(agency.choice_counts.size()) != v_count) {
      throw ValidationError("agency '" + agency.agency_id + "' has wrong choice-count length");
    }
    for (long long c : agency.choice_counts) {
      if (c < 0) throw ValidationError("agency '" + agency.agency_id + "' has negative counts");
    }
    if (agency.total_choices() < 1) {
      throw ValidationError("agency '" + agency.agency_id + "' has no mono-product customers");
    }
    if (agency.network.v_count != v_count) {
      throw ValidationError("agency '" + agency.agency_id + "' network has wrong V");
    }
    agency.network.validate();
  }
}

EdgeVector threshold_network(const CosubCounts& counts, double tau) {
  if (tau <= 0.0 || tau >= 1.0) throw ValidationError("threshold tau must lie in (0,1)");
  const int V = counts.v_count;
  if (static_cast<int>(counts.product_counts.size()) != V ||
      static_cast<int>(counts.pair_counts.size()) != pair_count(V)) {
    throw ValidationError("co-subscription counts have inconsistent dimensions");
  }
  EdgeVector edges(V);
  for (int u = 1; u < V; ++u) {
    for (int v = u + 1; v <= V; ++v) {
      const long long c = counts.pair_counts[pair_index(v, u, V)];
      const long long mv = counts.product_counts[v - 1];
      const long long mu = counts.product_counts[u - 1];
      if (c < 0 || c > mv || c > mu) {
        std::ostringstream msg;
        msg << "pair (" << v << "," << u << "): co-subscription count " << c
            << " inconsistent with product counts " << mv << ", " << mu;
        throw ValidationError(msg.str());
      }
      const long long in_union = mv + mu - c;
      const bool edge = in_union > 0 &&
                        static_cast<double>(c) / static_cast<double>(in_union) > tau;
      edges.set(v, u, edge ? 1 : 0);
    }
  }
  return edges;
}

double threshold_sensitivity(const std::vector<CosubCounts>& data, double tau_a, double tau_b) {
  if (data.empty()) throw ValidationError("threshold_sensitivity needs at least one agency");
  long long differing = 0;
  long long total = 0;
  for (const auto& counts : data) {
    const EdgeVector a = threshold_network(counts, tau_a);
    const EdgeVector b = threshold_network(counts, tau_b);
    for (int l = 0; l < a.edge_slots(); ++l) differing += a.bits[l] != b.bits[l];
    total += a.edge_slots();
  }
  return static_cast<double>(differing) / static_cast<double>(total);
}

}  // namespace cosub
