#include "cosub/simulate.hpp"

#include <cmath>
#include <numeric>

#include "cosub/distributions.hpp"

namespace cosub {

namespace {

void check_simplex_rows(const std::vector<std::vector<double>>& rows, int dim,
                        const char* name) {
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim) {
      throw ValidationError(std::string("sim config: bad row length in ") + name);
    }
    double total = 0.0;
    for (double x : row) {
      if (!(x >= 0.0)) throw ValidationError(std::string("sim config: negative entry in ") + name);
      total += x;
    }
    if (std::fabs(total - 1.0) > 1e-9) {
      throw ValidationError(std::string("sim config: row of ") + name + " does not sum to 1");
    }
  }
}

std::vector<double> normalized(std::vector<double> row) {
  const double total = std::accumulate(row.begin(), row.end(), 0.0);
  for (double& x : row) x /= total;
  return row;
}

std::vector<double> with_swapped(std::vector<double> row, int a, int b) {
  std::swap(row[a - 1], row[b - 1]);
  return row;
}

}  // namespace

void SimConfig::validate() const {
  if (n < 1 || v_count < 2 || k0 < 1 || h0 < 1 || customers_per_agency < 1) {
    throw ValidationError("sim config: n, V, K0, H0, n_i must all be positive (V >= 2)");
  }
  if (static_cast<int>(p0.size()) != k0 || static_cast<int>(nu0.size()) != k0 ||
      static_cast<int>(pi0.size()) != h0) {
    throw ValidationError("sim config: p0/nu0 need K0 rows and pi0 needs H0 rows");
  }
  check_simplex_rows(p0, v_count, "p0");
  check_simplex_rows(nu0, h0, "nu0");
  for (const auto& row : pi0) {
    if (static_cast<int>(row.size()) != pair_count(v_count)) {
      throw ValidationError("sim config: pi0 rows must have length V(V-1)/2");
    }
    for (double x : row) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw ValidationError("sim config: pi0 entries must lie in [0,1]");
      }
    }
  }
}

SimConfig default_scenario() {
  SimConfig cfg;
  const int V = cfg.v_count;

  // Mono-product choices concentrate 3/4 of the mass on four popular
  // products; the cluster pairs differ only by the stated swaps.
  std::vector<double> base_a(V, 0.25 / (V - 4));
  base_a[0] = 0.30;   // product 1
  base_a[1] = 0.20;   // product 2
  base_a[4] = 0.15;   // product 5
  base_a[11] = 0.10;  // product 12
  base_a = normalized(base_a);
  std::vector<double> base_b(V, 0.25 / (V - 4));
  base_b[2] = 0.30;   // product 3
  base_b[3] = 0.20;   // product 4
  base_b[7] = 0.15;   // product 8
  base_b[12] = 0.10;  // product 13
  base_b = normalized(base_b);
  cfg.p0 = {base_a, with_swapped(base_a, 1, 9), base_b, with_swapped(base_b, 3, 7)};

  cfg.nu0 = {{0.9, 0.05, 0.05}, {0.9, 0.05, 0.05}, {0.05, 0.9, 0.05}, {0.05, 0.05, 0.9}};

  const double lo = 0.1;
  std::vector<double> community(pair_count(V), lo);
  std::vector<double> hubs(pair_count(V), lo);
  std::vector<double> hubs_no4(pair_count(V), lo);
  const auto is_hub = [](int v) { return v == 1 || v == 4 || v == 8 || v == 12; };
  for (int u = 1; u < V; ++u) {
    for (int v = u + 1; v <= V; ++v) {
      const int l = pair_index(v, u, V);
      if (v <= 10 && u <= 10) community[l] = 0.8;
      if (is_hub(v) || is_hub(u)) hubs[l] = 0.75;
      if ((is_hub(v) && v != 4) || (is_hub(u) && u != 4)) hubs_no4[l] = 0.75;
    }
  }
  cfg.pi0 = {community, hubs, hubs_no4};
  return cfg;
}

Simulation generate(const SimConfig& cfg) {
  cfg.validate();
  const RngStream root(cfg.seed);
  Simulation sim;
  sim.data.v_count = cfg.v_count;
  const int L = pair_count(cfg.v_count);
  for (int i = 0; i < cfg.n; ++i) {
    const int k = static_cast<int>(static_cast<long long>(i) * cfg.k0 / cfg.n);
    RngStream rng = root.derived(static_cast<std::uint64_t>(i));
    AgencyRecord rec;
    rec.agency_id = "a" + std::to_string(i + 1);
    rec.choice_counts = sample_multinomial(cfg.customers_per_agency, cfg.p0[k], rng);
    const int g = sample_categorical(cfg.nu0[k], rng);
    rec.network = EdgeVector(cfg.v_count);
    for (int l = 0; l < L; ++l) {
      rec.network.bits[l] = rng.uniform() < cfg.pi0[g][l] ? 1 : 0;
    }
    sim.data.agencies.push_back(std::move(rec));
    sim.truth.C0.push_back(k);
    sim.truth.G0.push_back(g);
  }
  sim.data.validate();
  return sim;
}

}  // namespace cosub
