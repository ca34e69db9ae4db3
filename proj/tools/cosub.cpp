// Command-line surface: simulate -> fit -> summarize -> strategies ->
// diagnostics, all operating on a run directory. Exit codes: 0 success,
// 1 runtime/numeric failure, 2 usage or ingestion error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosub/common.hpp"
#include "cosub/diagnostics.hpp"
#include "cosub/distributions.hpp"
#include "cosub/gibbs.hpp"
#include "cosub/io.hpp"
#include "cosub/simulate.hpp"
#include "cosub/strategy.hpp"
#include "cosub/summary.hpp"
#include "cosub/trace_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cosub;

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&t, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& err) {
    throw ParseError(path + ": " + err.what());
  }
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_run_json(const fs::path& dir, json& doc, const std::string& status) {
  doc["version"] = kVersion;
  doc["status"] = status;
  if (!doc.contains("started_at")) doc["started_at"] = now_iso8601();
  if (status != "running") doc["finished_at"] = now_iso8601();
  write_text_file(dir / "run.json", doc.dump(2) + "\n");
}

// ---- hyperparameter plumbing ----

json hyper_to_json(const Hyperparameters& hp) {
  json doc;
  doc["alpha_c"] = hp.alpha_c;
  doc["a1"] = hp.a1;
  doc["a2"] = hp.a2;
  doc["H"] = hp.H;
  doc["R"] = hp.R;
  doc["alpha"] = hp.alpha;
  doc["mu"] = hp.mu;
  doc["sigma2"] = hp.sigma2;
  doc["alpha_hash"] = fnv1a_hex(json(hp.alpha).dump());
  doc["mu_hash"] = fnv1a_hex(json(hp.mu).dump());
  return doc;
}

Hyperparameters hyper_from_json(const json& doc) {
  Hyperparameters hp;
  hp.alpha_c = doc.at("alpha_c").get<double>();
  hp.a1 = doc.at("a1").get<double>();
  hp.a2 = doc.at("a2").get<double>();
  hp.H = doc.at("H").get<int>();
  hp.R = doc.at("R").get<int>();
  hp.alpha = doc.at("alpha").get<std::vector<double>>();
  hp.mu = doc.at("mu").get<std::vector<double>>();
  hp.sigma2 = doc.at("sigma2").get<std::vector<double>>();
  hp.validate();
  return hp;
}

// Fields present in the file replace the empirical values.
void apply_hyper_overrides(Hyperparameters& hp, const json& doc, int v_count) {
  if (doc.contains("alpha_c")) hp.alpha_c = doc["alpha_c"].get<double>();
  if (doc.contains("a1")) hp.a1 = doc["a1"].get<double>();
  if (doc.contains("a2")) hp.a2 = doc["a2"].get<double>();
  if (doc.contains("H")) hp.H = doc["H"].get<int>();
  if (doc.contains("R")) hp.R = doc["R"].get<int>();
  if (doc.contains("alpha")) {
    hp.alpha = doc["alpha"].get<std::vector<double>>();
    if (static_cast<int>(hp.alpha.size()) != v_count) {
      throw ParseError("hyper file: $.alpha must have length V=" + std::to_string(v_count));
    }
  }
  if (doc.contains("mu")) {
    hp.mu = doc["mu"].get<std::vector<double>>();
    if (static_cast<int>(hp.mu.size()) != pair_count(v_count)) {
      throw ParseError("hyper file: $.mu must have length V(V-1)/2");
    }
  }
  if (doc.contains("sigma2")) {
    if (doc["sigma2"].is_number()) {
      hp.sigma2.assign(pair_count(v_count), doc["sigma2"].get<double>());
    } else {
      hp.sigma2 = doc["sigma2"].get<std::vector<double>>();
      if (static_cast<int>(hp.sigma2.size()) != pair_count(v_count)) {
        throw ParseError("hyper file: $.sigma2 must be a scalar or have length V(V-1)/2");
      }
    }
  }
}

// ---- scenario config ----

std::vector<std::vector<double>> matrix_field(const json& doc, const char* key, int rows,
                                              int cols) {
  const auto& node = doc.at(key);
  if (!node.is_array() || static_cast<int>(node.size()) != rows) {
    throw ParseError(std::string("config: $.") + key + " must have " + std::to_string(rows) +
                     " rows");
  }
  std::vector<std::vector<double>> out;
  for (int r = 0; r < rows; ++r) {
    if (!node[r].is_array() || static_cast<int>(node[r].size()) != cols) {
      throw ParseError(std::string("config: $.") + key + "[" + std::to_string(r) +
                       "]: expected " + std::to_string(cols) + " numbers, got " +
                       std::to_string(node[r].size()));
    }
    out.push_back(node[r].get<std::vector<double>>());
  }
  return out;
}

SimConfig sim_config_from_json(const json& doc) {
  const SimConfig defaults = default_scenario();
  SimConfig cfg = defaults;
  for (const auto& [key, value] : doc.items()) {
    if (key != "n" && key != "V" && key != "K0" && key != "H0" && key != "n_i" &&
        key != "seed" && key != "p0" && key != "nu0" && key != "pi0") {
      throw ParseError("config: unknown key $." + key);
    }
    (void)value;
  }
  if (doc.contains("n")) cfg.n = doc["n"].get<int>();
  if (doc.contains("V")) cfg.v_count = doc["V"].get<int>();
  if (doc.contains("K0")) cfg.k0 = doc["K0"].get<int>();
  if (doc.contains("H0")) cfg.h0 = doc["H0"].get<int>();
  if (doc.contains("n_i")) cfg.customers_per_agency = doc["n_i"].get<long long>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
  const bool shape_changed =
      cfg.v_count != defaults.v_count || cfg.k0 != defaults.k0 || cfg.h0 != defaults.h0;
  if (doc.contains("p0")) {
    cfg.p0 = matrix_field(doc, "p0", cfg.k0, cfg.v_count);
  } else if (shape_changed) {
    throw ParseError("config: $.p0 is required when V, K0 or H0 differ from the defaults");
  }
  if (doc.contains("nu0")) {
    cfg.nu0 = matrix_field(doc, "nu0", cfg.k0, cfg.h0);
  } else if (shape_changed) {
    throw ParseError("config: $.nu0 is required when V, K0 or H0 differ from the defaults");
  }
  if (doc.contains("pi0")) {
    cfg.pi0 = matrix_field(doc, "pi0", cfg.h0, pair_count(cfg.v_count));
  } else if (shape_changed) {
    throw ParseError("config: $.pi0 is required when V, K0 or H0 differ from the defaults");
  }
  try {
    cfg.validate();
  } catch (const ValidationError& err) {
    throw ParseError(std::string("config: ") + err.what());
  }
  return cfg;
}

json sim_config_to_json(const SimConfig& cfg) {
  json doc;
  doc["n"] = cfg.n;
  doc["V"] = cfg.v_count;
  doc["K0"] = cfg.k0;
  doc["H0"] = cfg.h0;
  doc["n_i"] = cfg.customers_per_agency;
  doc["seed"] = cfg.seed;
  doc["p0"] = cfg.p0;
  doc["nu0"] = cfg.nu0;
  doc["pi0"] = cfg.pi0;
  return doc;
}

// ---- subcommand payloads ----

struct SimulateArgs {
  std::string out_dir;
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& args) {
  SimConfig cfg =
      args.config_path.empty() ? default_scenario() : sim_config_from_json(read_json_file(args.config_path));
  if (args.seed) cfg.seed = *args.seed;

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  json run;
  run["command"] = "simulate";
  run["seed"] = cfg.seed;
  run["config"] = sim_config_to_json(cfg);
  run["config_hash"] = fnv1a_hex(run["config"].dump());
  write_run_json(dir, run, "running");

  const Simulation sim = generate(cfg);
  write_choices_csv((dir / "choices.csv").string(), sim.data);
  write_networks_csv((dir / "networks.csv").string(), sim.data);

  json truth;
  json c0 = json::array(), g0 = json::array();
  for (int c : sim.truth.C0) c0.push_back(c + 1);
  for (int g : sim.truth.G0) g0.push_back(g + 1);
  truth["C0"] = std::move(c0);
  truth["G0"] = std::move(g0);
  truth["p0"] = cfg.p0;
  truth["nu0"] = cfg.nu0;
  truth["pi0"] = cfg.pi0;
  write_text_file(dir / "truth.json", truth.dump(2) + "\n");

  write_run_json(dir, run, "completed");
  std::cout << "simulated " << sim.data.n() << " agencies over " << sim.data.v_count
            << " products into " << args.out_dir << "\n";
  return 0;
}

struct FitArgs {
  std::string choices_path;
  std::string networks_path;
  bool edge_list = false;
  std::string out_dir;
  int iterations = 5000;
  int burnin = 1000;
  int thin = 1;
  int H = 15;
  int R = 10;
  double alpha_c = 1.0;
  std::uint64_t seed = 1;
  std::string hyper_path;
  // Set when the flag was given explicitly, to take precedence over the file.
  bool H_explicit = false, R_explicit = false, alpha_c_explicit = false;
};

int cmd_fit(const FitArgs& args) {
  const Dataset data = load_dataset(args.choices_path, args.networks_path,
                                    args.edge_list ? NetworkFormat::EdgeList
                                                   : NetworkFormat::Dense);
  Hyperparameters hp = empirical_hyperparameters(data, args.H, args.R, args.alpha_c);
  if (!args.hyper_path.empty()) {
    apply_hyper_overrides(hp, read_json_file(args.hyper_path), data.v_count);
    if (args.H_explicit) hp.H = args.H;
    if (args.R_explicit) hp.R = args.R;
    if (args.alpha_c_explicit) hp.alpha_c = args.alpha_c;
  }
  hp.validate();

  ChainConfig cfg;
  cfg.iterations = args.iterations;
  cfg.burnin = args.burnin;
  cfg.thin = args.thin;
  cfg.seed = args.seed;
  cfg.validate();

  fs::create_directories(args.out_dir);
  const fs::path dir(args.out_dir);
  json run;
  run["command"] = "fit";
  run["seed"] = cfg.seed;
  run["config"] = {{"iterations", cfg.iterations},
                   {"burnin", cfg.burnin},
                   {"thin", cfg.thin}};
  run["data"] = {{"choices", args.choices_path},
                 {"networks", args.networks_path},
                 {"edge_list", args.edge_list},
                 {"n", data.n()},
                 {"v_count", data.v_count}};
  run["hyperparameters"] = hyper_to_json(hp);
  run["config_hash"] = fnv1a_hex(run["config"].dump() + run["hyperparameters"].dump());
  write_run_json(dir, run, "running");

  std::ofstream trace(dir / "trace.jsonl");
  if (!trace) throw std::runtime_error("cannot write trace file");
  int written = 0;
  try {
    const RunResult result = run_chain(data, hp, cfg, [&](const TraceRecord& rec) {
      trace << trace_record_to_json(rec) << "\n";
      if (++written % 500 == 0) {
        std::cerr << "iteration " << rec.iteration << " / " << cfg.iterations << "\n";
      }
    });
    trace.close();
    if (!trace) throw std::runtime_error("trace write failed");

    const auto occupancy = occupancy_check(result.occupancy, hp);
    json warnings = json::array();
    if (occupancy.increase_H) warnings.push_back("INCREASE_H");
    if (occupancy.increase_R) warnings.push_back("INCREASE_R");
    run["warnings"] = warnings;
    run["records"] = result.records_emitted;
    run["final_log_joint"] = result.log_joint.back();
    write_run_json(dir, run, "completed");
    std::cout << "fit completed: " << result.records_emitted << " retained sweeps in "
              << args.out_dir << "\n";
    for (const auto& warning : warnings) {
      std::cout << "warning: " << warning.get<std::string>()
                << (warning == "INCREASE_H" ? " (all mixture components occupied)"
                                            : " (last latent dimension still heavy)")
                << "\n";
    }
    return 0;
  } catch (const ChainError& err) {
    run["error"] = err.what();
    run["iteration_reached"] = err.iteration;
    write_run_json(dir, run, "failed");
    throw;
  }
}

struct RunContext {
  fs::path dir;
  json run;
  Dataset data;
  Hyperparameters hp;
};

RunContext load_fit_run(const std::string& run_dir) {
  RunContext ctx;
  ctx.dir = run_dir;
  ctx.run = read_json_file((ctx.dir / "run.json").string());
  if (ctx.run.value("command", "") != "fit") {
    throw ValidationError(run_dir + ": run.json does not describe a fit run");
  }
  if (ctx.run.value("status", "") != "completed") {
    throw ValidationError(run_dir + ": fit run is not completed (status=" +
                          ctx.run.value("status", "?") + ")");
  }
  const auto& data_node = ctx.run.at("data");
  ctx.data = load_dataset(data_node.at("choices").get<std::string>(),
                          data_node.at("networks").get<std::string>(),
                          data_node.value("edge_list", false) ? NetworkFormat::EdgeList
                                                              : NetworkFormat::Dense);
  ctx.hp = hyper_from_json(ctx.run.at("hyperparameters"));
  if (!fs::exists(ctx.dir / "trace.jsonl")) {
    throw ValidationError(run_dir + ": trace.jsonl is missing; run `cosub fit` first");
  }
  return ctx;
}

json quantiles_to_json(const QuantileSummary& q) {
  return json{{"mean", q.mean}, {"q25", q.q25}, {"q50", q.q50}, {"q75", q.q75}};
}

QuantileSummary quantiles_from_json(const json& doc) {
  QuantileSummary q;
  q.mean = doc.at("mean").get<std::vector<double>>();
  q.q25 = doc.at("q25").get<std::vector<double>>();
  q.q50 = doc.at("q50").get<std::vector<double>>();
  q.q75 = doc.at("q75").get<std::vector<double>>();
  return q;
}

struct SummarizeArgs {
  std::string run_dir;
  int sweeps = 2000;
  int burnin = 500;
};

int cmd_summarize(const SummarizeArgs& args) {
  RunContext ctx = load_fit_run(args.run_dir);
  const int n = ctx.data.n();

  PartitionCounter counter;
  for_each_trace_record((ctx.dir / "trace.jsonl").string(), [&](const TraceRecord& rec) {
    if (static_cast<int>(rec.C.size()) != n) {
      throw ParseError("trace.jsonl: partition length does not match the dataset");
    }
    counter.add(rec.C);
  });
  const PartitionEstimate map = counter.map_partition();

  ChainConfig cond;
  cond.iterations = args.sweeps;
  cond.burnin = args.burnin;
  cond.thin = 1;
  cond.seed = ctx.run.at("seed").get<std::uint64_t>() ^ 0x636f6e64ULL;  // distinct stream
  std::vector<ConditionalSample> samples;
  samples.reserve(cond.retained());
  run_conditional_chain(ctx.data, ctx.hp, map.partition, cond,
                        [&](const ConditionalSample& s) { samples.push_back(s); });
  const PosteriorSummary summary = summarize_conditional(samples, map);

  json doc;
  json partition = json::array();
  for (int c : map.partition) partition.push_back(c + 1);
  json ids = json::array();
  for (const auto& agency : ctx.data.agencies) ids.push_back(agency.agency_id);
  doc["map_partition"] = std::move(partition);
  doc["agency_ids"] = std::move(ids);
  doc["frequency"] = map.frequency;
  doc["k_hat"] = map.k_hat;
  doc["cluster_sizes"] = summary.cluster_sizes;
  doc["conditional"] = {{"sweeps", args.sweeps}, {"burnin", args.burnin}, {"seed", cond.seed}};
  json clusters = json::array();
  for (int k = 0; k < map.k_hat; ++k) {
    json entry;
    entry["cluster"] = k + 1;
    entry["size"] = summary.cluster_sizes[k];
    entry["p_hat"] = quantiles_to_json(summary.p_hat[k]);
    entry["pibar_hat"] = quantiles_to_json(summary.pibar_hat[k]);
    entry["nu_hat"] = summary.nu_hat[k];
    entry["stability"] = summary.offer_stability[k];
    clusters.push_back(std::move(entry));
  }
  doc["clusters"] = std::move(clusters);
  doc["pi_components"] = summary.pi_components;
  write_text_file(ctx.dir / "summary.json", doc.dump(2) + "\n");

  const int V = ctx.data.v_count;
  {
    std::ofstream csv(ctx.dir / "p_hat.csv");
    csv << "cluster,v,mean,q25,q50,q75\n";
    for (int k = 0; k < map.k_hat; ++k) {
      const auto& q = summary.p_hat[k];
      for (int v = 0; v < V; ++v) {
        csv << k + 1 << ',' << v + 1 << ',' << q.mean[v] << ',' << q.q25[v] << ','
            << q.q50[v] << ',' << q.q75[v] << "\n";
      }
    }
  }
  {
    std::ofstream csv(ctx.dir / "pibar_hat.csv");
    csv << "cluster,v,u,mean,q25,q50,q75\n";
    for (int k = 0; k < map.k_hat; ++k) {
      const auto& q = summary.pibar_hat[k];
      for (int l = 0; l < pair_count(V); ++l) {
        const auto [v, u] = pair_from_index(l, V);
        csv << k + 1 << ',' << v << ',' << u << ',' << q.mean[l] << ',' << q.q25[l] << ','
            << q.q50[l] << ',' << q.q75[l] << "\n";
      }
    }
  }
  std::cout << "K_hat=" << map.k_hat << " map_frequency=" << map.frequency << "\n";
  return 0;
}

PosteriorSummary summary_from_json(const json& doc, int expected_n) {
  PosteriorSummary summary;
  const auto partition = doc.at("map_partition").get<std::vector<int>>();
  if (expected_n > 0 && static_cast<int>(partition.size()) != expected_n) {
    throw ValidationError("summary.json: map_partition does not match the dataset");
  }
  for (int c : partition) summary.map.partition.push_back(c - 1);
  summary.map.frequency = doc.at("frequency").get<double>();
  summary.map.k_hat = doc.at("k_hat").get<int>();
  summary.cluster_sizes = doc.at("cluster_sizes").get<std::vector<int>>();
  for (const auto& entry : doc.at("clusters")) {
    summary.p_hat.push_back(quantiles_from_json(entry.at("p_hat")));
    summary.pibar_hat.push_back(quantiles_from_json(entry.at("pibar_hat")));
    summary.nu_hat.push_back(entry.at("nu_hat").get<std::vector<double>>());
    summary.offer_stability.push_back(entry.at("stability").get<std::vector<double>>());
  }
  summary.pi_components = doc.at("pi_components").get<std::vector<std::vector<double>>>();
  return summary;
}

struct StrategiesArgs {
  std::string run_dir;
  int multi = 0;
};

int cmd_strategies(const StrategiesArgs& args) {
  const fs::path dir(args.run_dir);
  if (!fs::exists(dir / "summary.json")) {
    throw ValidationError(args.run_dir +
                          ": summary.json is missing; run `cosub summarize` first");
  }
  const json doc = read_json_file((dir / "summary.json").string());
  const PosteriorSummary summary = summary_from_json(doc, 0);
  if (args.multi < 0 || args.multi > 3) {
    throw ValidationError("--multi must lie in 1..3 (exhaustive subset search)");
  }

  std::vector<std::vector<double>> pibar_means, p_means;
  for (int k = 0; k < summary.map.k_hat; ++k) {
    pibar_means.push_back(summary.pibar_hat[k].mean);
    p_means.push_back(summary.p_hat[k].mean);
  }
  const StrategyTable table = build_strategy_table(pibar_means, p_means,
                                                   summary.cluster_sizes,
                                                   summary.offer_stability);
  {
    std::ofstream csv(dir / "strategies.csv");
    csv << "cluster,k_size,v,u_best,best_prob,e,stability\n";
    for (const auto& row : table.rows) {
      csv << row.cluster << ',' << row.cluster_size << ',' << row.product << ','
          << row.best << ',' << row.best_prob << ',' << row.indicator << ','
          << row.stability << "\n";
    }
  }
  json out;
  json rows = json::array();
  for (const auto& row : table.rows) {
    rows.push_back({{"cluster", row.cluster},
                    {"k_size", row.cluster_size},
                    {"v", row.product},
                    {"u_best", row.best},
                    {"best_prob", row.best_prob},
                    {"e", row.indicator},
                    {"stability", row.stability}});
  }
  out["rows"] = std::move(rows);
  if (args.multi >= 1) {
    json blocks = json::array();
    const int V = static_cast<int>(summary.p_hat[0].mean.size());
    for (int k = 0; k < summary.map.k_hat; ++k) {
      for (int v = 1; v <= V; ++v) {
        const auto offer = multi_offer(summary.nu_hat[k], summary.pi_components, v,
                                       args.multi);
        blocks.push_back({{"cluster", k + 1},
                          {"v", v},
                          {"M", args.multi},
                          {"products", offer.products},
                          {"joint_prob", offer.joint_prob}});
      }
    }
    out["multi"] = std::move(blocks);
  }
  write_text_file(dir / "strategies.json", out.dump(2) + "\n");
  std::cout << "wrote strategies for " << summary.map.k_hat << " clusters\n";
  return 0;
}

struct DiagnosticsArgs {
  std::string run_dir;
  double auc_flag = 0.75;
};

int cmd_diagnostics(const DiagnosticsArgs& args) {
  RunContext ctx = load_fit_run(args.run_dir);
  if (!fs::exists(ctx.dir / "summary.json")) {
    throw ValidationError(args.run_dir +
                          ": summary.json is missing; run `cosub summarize` first");
  }
  const PosteriorSummary summary =
      summary_from_json(read_json_file((ctx.dir / "summary.json").string()), ctx.data.n());

  // Occupancy samples and agency-specific edge probabilities come from the
  // trace; both are accumulated in one streaming pass.
  std::vector<OccupancySample> occupancy;
  std::vector<int> flagged;
  {
    FitReport probe;
    for (int i = 0; i < ctx.data.n(); ++i) {
      const int k = summary.map.partition[i];
      const auto a = auc(ctx.data.agencies[i].network, summary.pibar_hat[k].mean);
      if (a && *a < args.auc_flag) flagged.push_back(i);
    }
  }
  std::vector<std::vector<double>> flagged_probs(flagged.size());
  int trace_records = 0;
  for_each_trace_record((ctx.dir / "trace.jsonl").string(), [&](const TraceRecord& rec) {
    ++trace_records;
    OccupancySample occ;
    std::vector<char> used(ctx.hp.H, 0);
    for (int g : rec.G) used[g] = 1;
    for (char u : used) occ.occupied += u;
    for (const auto& theta : rec.theta) {
      occ.lambda_last.push_back(shrinkage_weights(theta).back());
    }
    occupancy.push_back(std::move(occ));
    for (std::size_t j = 0; j < flagged.size(); ++j) {
      const auto pi = compute_component_probs(rec.Z, rec.Xbar[rec.G[flagged[j]]]);
      if (flagged_probs[j].empty()) flagged_probs[j].assign(pi.pi.size(), 0.0);
      for (std::size_t l = 0; l < pi.pi.size(); ++l) flagged_probs[j][l] += pi.pi[l];
    }
  });
  for (auto& probs : flagged_probs) {
    for (double& x : probs) x /= trace_records;
  }

  const FitReport report = fit_report(ctx.data, summary, occupancy, ctx.hp, args.auc_flag);

  json doc;
  doc["auc_flag_threshold"] = args.auc_flag;
  json per_agency = json::array();
  int with_auc = 0, above = 0;
  double max_eps = 0.0;
  for (const auto& fit : report.per_agency) {
    json entry;
    entry["agency_id"] = fit.agency_id;
    entry["auc"] = fit.auc ? json(*fit.auc) : json(nullptr);
    entry["epsilon"] = fit.epsilon;
    entry["flagged"] = fit.flagged;
    per_agency.push_back(std::move(entry));
    if (fit.auc) {
      ++with_auc;
      above += *fit.auc > args.auc_flag;
    }
    max_eps = std::max(max_eps, fit.epsilon);
  }
  doc["per_agency"] = std::move(per_agency);
  doc["occupancy"] = {{"median_occupied", report.occupancy.median_occupied},
                      {"H", ctx.hp.H},
                      {"increase_H", report.occupancy.increase_H},
                      {"median_lambda_last", report.occupancy.median_lambda_last},
                      {"R", ctx.hp.R},
                      {"increase_R", report.occupancy.increase_R}};
  json flagged_doc = json::object();
  for (std::size_t j = 0; j < flagged.size(); ++j) {
    flagged_doc[ctx.data.agencies[flagged[j]].agency_id] = flagged_probs[j];
  }
  doc["flagged_agency_edge_probs"] = std::move(flagged_doc);
  doc["summary"] = {{"max_epsilon", max_eps},
                    {"auc_fraction_above_threshold",
                     with_auc > 0 ? static_cast<double>(above) / with_auc : 0.0}};
  write_text_file(ctx.dir / "diagnostics.json", doc.dump(2) + "\n");

  {
    std::ofstream csv(ctx.dir / "auc.csv");
    csv << "agency_id,auc,epsilon,flagged\n";
    for (const auto& fit : report.per_agency) {
      csv << fit.agency_id << ',';
      if (fit.auc) csv << *fit.auc;
      csv << ',' << fit.epsilon << ',' << (fit.flagged ? 1 : 0) << "\n";
    }
  }
  {
    std::ofstream csv(ctx.dir / "roc.csv");
    csv << "agency_id,fpr,tpr\n";
    for (int i = 0; i < ctx.data.n(); ++i) {
      const int k = summary.map.partition[i];
      for (const auto& [fpr, tpr] :
           roc_points(ctx.data.agencies[i].network, summary.pibar_hat[k].mean)) {
        csv << ctx.data.agencies[i].agency_id << ',' << fpr << ',' << tpr << "\n";
      }
    }
  }
  std::cout << "max_epsilon=" << max_eps << " auc_above_threshold="
            << (with_auc > 0 ? static_cast<double>(above) / with_auc : 0.0) << " flagged="
            << flagged.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustered joint modeling of product choices and co-subscription networks"};
  app.require_subcommand(1);

  SimulateArgs sim_args;
  std::uint64_t sim_seed = 0;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim->add_option("--out", sim_args.out_dir, "output directory")->required();
  sim->add_option("--config", sim_args.config_path, "scenario config JSON")
      ->check(CLI::ExistingFile);
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "RNG seed");

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Run the Gibbs sampler on a dataset");
  fit->add_option("--choices", fit_args.choices_path, "choices CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--networks", fit_args.networks_path, "networks CSV")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_flag("--edge-list", fit_args.edge_list, "networks file is an edge list");
  fit->add_option("--out", fit_args.out_dir, "run directory")->required();
  fit->add_option("--iters", fit_args.iterations, "total Gibbs sweeps");
  fit->add_option("--burnin", fit_args.burnin, "discarded sweeps");
  fit->add_option("--thin", fit_args.thin, "keep every k-th sweep");
  auto* h_opt = fit->add_option("--H", fit_args.H, "mixture component bound");
  auto* r_opt = fit->add_option("--R", fit_args.R, "latent dimension bound");
  auto* ac_opt = fit->add_option("--alpha-c", fit_args.alpha_c, "CRP concentration");
  fit->add_option("--seed", fit_args.seed, "RNG seed");
  fit->add_option("--hyper", fit_args.hyper_path, "hyperparameter override JSON")
      ->check(CLI::ExistingFile);

  SummarizeArgs sum_args;
  auto* summarize = app.add_subcommand("summarize", "MAP partition and posterior summaries");
  summarize->add_option("--run", sum_args.run_dir, "run directory")->required();
  summarize->add_option("--sweeps", sum_args.sweeps, "conditional sweeps");
  summarize->add_option("--burnin", sum_args.burnin, "conditional burn-in");

  StrategiesArgs strat_args;
  auto* strategies = app.add_subcommand("strategies", "Cross-sell strategy tables");
  strategies->add_option("--run", strat_args.run_dir, "run directory")->required();
  strategies->add_option("--multi", strat_args.multi, "multi-offer size M (1..3)");

  DiagnosticsArgs diag_args;
  auto* diagnostics = app.add_subcommand("diagnostics", "Fit assessment and occupancy");
  diagnostics->add_option("--run", diag_args.run_dir, "run directory")->required();
  diagnostics->add_option("--auc-flag", diag_args.auc_flag, "AUC flag threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      if (sim_seed_opt->count() > 0) sim_args.seed = sim_seed;
      return cmd_simulate(sim_args);
    }
    if (fit->parsed()) {
      fit_args.H_explicit = h_opt->count() > 0;
      fit_args.R_explicit = r_opt->count() > 0;
      fit_args.alpha_c_explicit = ac_opt->count() > 0;
      return cmd_fit(fit_args);
    }
    if (summarize->parsed()) return cmd_summarize(sum_args);
    if (strategies->parsed()) return cmd_strategies(strat_args);
    if (diagnostics->parsed()) return cmd_diagnostics(diag_args);
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
