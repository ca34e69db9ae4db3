#pragma once

#include <functional>
#include <span>

#include "cosub/model.hpp"
#include "cosub/rng.hpp"

namespace cosub {

struct ChainConfig {
  int iterations = 5000;
  int burnin = 1000;
  int thin = 1;
  std::uint64_t seed = 1;

  void validate() const;
  int retained() const { return (iterations - burnin + thin - 1) / thin; }
};

// Snapshot of one retained sweep. Cluster labels are canonicalized by first
// appearance in agency order.
struct TraceRecord {
  int iteration = 0;
  std::vector<int> C;
  std::vector<int> G;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> nu;
  std::vector<double> Z;
  std::vector<Eigen::MatrixXd> Xbar;
  std::vector<std::vector<double>> theta;
  double log_joint = 0.0;
};

// Validation-only switches; the CLI never sets these.
struct TestHooks {
  bool reseat_prior_only = false;  // drop likelihood terms in the reseating weights
  bool corrupt_z_update = false;   // drop the -n_h/2 centering in the Z update
};

// Per retained sweep: occupied component count and the last shrinkage weight
// of each component, for the occupancy diagnostics.
struct OccupancySample {
  int occupied = 0;
  std::vector<double> lambda_last;
};

struct RunResult {
  int records_emitted = 0;
  std::vector<double> log_joint;  // one entry per sweep, including burn-in
  std::vector<OccupancySample> occupancy;
};

// Numeric failure inside a chain, annotated with the sweep it happened in.
class ChainError : public NumericError {
 public:
  ChainError(const std::string& msg, int iteration)
      : NumericError(msg), iteration(iteration) {}
  int iteration;
};

// Closed-form reseating marginals for a newly opened cluster.
double marginal_choices_new_cluster(std::span<const long long> counts,
                                    std::span<const double> alpha);
double marginal_component_new_cluster(int H);

class GibbsSampler {
 public:
  explicit GibbsSampler(const Hyperparameters& hp, TestHooks hooks = {});

  const Hyperparameters& hp() const { return hp_; }

  // All agencies in one cluster; everything else from the priors.
  ModelState init_state(const Dataset& data, RngStream& rng) const;

  // Algorithm steps, in sweep order.
  void update_choice_probs(ModelState& s, const Dataset& d, RngStream& rng) const;       // [1]
  void allocate_components(ModelState& s, const Dataset& d, RngStream& rng) const;       // [2]
  void update_mixing_probs(ModelState& s, RngStream& rng) const;                         // [3]
  void update_polya_gamma(ModelState& s, const Dataset& d, RngStream& rng) const;        // [4.1]
  void update_shared_similarity(ModelState& s, const Dataset& d, RngStream& rng) const;  // [4.2]
  void update_latent_coords(ModelState& s, const Dataset& d, RngStream& rng) const;      // [4.3]
  void update_shrinkage(ModelState& s, RngStream& rng) const;                            // [4.4]
  void refresh_edge_probs(ModelState& s) const;                                          // [5]
  void reseat_clusters(ModelState& s, const Dataset& d, RngStream& rng) const;           // [6]

  // One full pass [1]..[6] plus label canonicalization; sweep_id keys the
  // RNG substreams so inner loops may be scheduled in any order.
  void sweep(ModelState& s, const Dataset& d, std::uint64_t sweep_id, const RngStream& root) const;

  // Steps [1]..[5] only, with the partition held fixed.
  void sweep_conditional(ModelState& s, const Dataset& d, std::uint64_t sweep_id,
                         const RngStream& root) const;

  // Analytic full-conditional parameters; the update steps draw from exactly
  // these, and the correctness tests ratio them against the joint density.
  std::vector<double> choice_posterior_alpha(const ModelState& s, const Dataset& d, int k) const;
  std::vector<double> component_log_weights(const ModelState& s, const Dataset& d, int i) const;
  std::vector<double> mixing_posterior_alpha(const ModelState& s, int k) const;
  std::pair<double, double> similarity_posterior(const ModelState& s, const Dataset& d,
                                                 int l) const;  // mean, variance
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> coord_posterior(const ModelState& s,
                                                              const Dataset& d, int h,
                                                              int v) const;  // eta, precision
  std::pair<double, double> shrinkage_posterior(const ModelState& s, int h,
                                                int r) const;  // shape, rate

  // Reseating weights for agency i computed on a detached copy: entries
  // 0..K-1 follow the post-removal cluster order, the last entry opens a new
  // cluster. Exposed for the conditional-ratio tests.
  std::vector<double> reseat_log_weights(ModelState s, const Dataset& d, int i) const;

  static void canonicalize_labels(ModelState& s);

 private:
  struct ComponentAggregates {
    std::vector<int> n_h;
    std::vector<std::vector<double>> edge_totals;  // per component, length L
  };
  ComponentAggregates aggregate_components(const ModelState& s, const Dataset& d) const;

  void detach_agency(ModelState& s, int i) const;
  std::vector<double> reseat_log_weights_detached(const ModelState& s, const Dataset& d,
                                                  int i) const;

  Hyperparameters hp_;
  TestHooks hooks_;
};

using TraceSink = std::function<void(const TraceRecord&)>;

// Full Gibbs run; thinned post-burn-in records go to the sink.
RunResult run_chain(const Dataset& data, const Hyperparameters& hp, const ChainConfig& cfg,
                    const TraceSink& sink, TestHooks hooks = {});

// One retained sweep of the partition-frozen rerun used for posterior
// summaries: cluster rows of p and nu plus the component edge probabilities.
struct ConditionalSample {
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> nu;
  std::vector<std::vector<double>> pi;
};
using ConditionalSink = std::function<void(const ConditionalSample&)>;

RunResult run_conditional_chain(const Dataset& data, const Hyperparameters& hp,
                                const std::vector<int>& partition, const ChainConfig& cfg,
                                const ConditionalSink& sink);

}  // namespace cosub
