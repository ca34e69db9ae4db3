#pragma once

#include <optional>
#include <string>

#include "cosub/gibbs.hpp"
#include "cosub/summary.hpp"

namespace cosub {

// Mann-Whitney AUC of the probability vector against the observed edges,
// with ties counted half; missing when the network has no edges or no
// non-edges.
std::optional<double> auc(const EdgeVector& a, std::span<const double> pibar);

// (fpr, tpr) points of the ROC curve, one per distinct score threshold.
std::vector<std::pair<double, double>> roc_points(const EdgeVector& a,
                                                  std::span<const double> pibar);

// Standardized L1 distance sum_v |n_v/n - p_hat_v| / V.
double choice_fit_distance(std::span<const long long> counts, std::span<const double> p_hat);

struct OccupancyReport {
  double median_occupied = 0.0;
  std::vector<double> median_lambda_last;  // per component
  bool increase_H = false;
  bool increase_R = false;
};

// INCREASE_H when the posterior median of the occupied-component count hits
// the bound; INCREASE_R when every component's last shrinkage weight has
// posterior median above 0.05.
OccupancyReport occupancy_check(std::span<const OccupancySample> samples,
                                const Hyperparameters& hp);

// Posterior mean of the agency-specific edge probabilities pi^(G_i).
std::vector<double> agency_edge_probs(std::span<const TraceRecord> trace, int agency_index);

struct AgencyFit {
  std::string agency_id;
  std::optional<double> auc;
  double epsilon = 0.0;
  bool flagged = false;
};

struct FitReport {
  std::vector<AgencyFit> per_agency;
  OccupancyReport occupancy;
  double auc_flag_threshold = 0.75;
};

FitReport fit_report(const Dataset& data, const PosteriorSummary& summary,
                     std::span<const OccupancySample> occupancy, const Hyperparameters& hp,
                     double auc_flag_threshold = 0.75);

// Successive-conditional correctness harness: compares moments of tracked
// statistics between forward prior-and-data simulation and a chain that
// alternates full Gibbs sweeps with data regeneration.
struct GewekeConfig {
  Hyperparameters hp;
  int n = 6;
  int customers_per_agency = 20;
  int rounds = 10000;
  std::uint64_t seed = 7;
  TestHooks hooks;
};

GewekeConfig geweke_default_config();

struct GewekeStatistic {
  std::string name;
  double forward_mean = 0.0;
  double chain_mean = 0.0;
  double z = 0.0;
};

std::vector<GewekeStatistic> geweke_harness(const GewekeConfig& cfg);

}  // namespace cosub
