#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetune/cloud/client.hpp"
#include "hetune/hecore/params.hpp"
#include "hetune/seeker.hpp"

namespace hetune::harness {

using nlohmann::json;

enum class Backend { plaintext, reference, rlwe };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend b);

struct ExperimentConfig {
  std::string name = "custom";
  std::string plant_name = "custom";  // G1, G2, G3 or custom
  plant::TransferFunction plant;
  pid::Theta theta0;
  double dt = 0.01;
  double settling_time = 1.0;
  double r_hat = 1.0;
  double alpha = 1.0;
  double gamma = 0.01;
  int k_max = 50;
  double noise_percent = 0.0;  // noise std in % of y_inf
  bool noise_in_feedback = true;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  Backend backend = Backend::plaintext;
  std::string he_preset = "paper";  // chain and ring; backend taken from `backend`
  cloud::Transport transport = cloud::Transport::in_process;
  bool transcripts = false;
  std::optional<std::uint64_t> key_seed;  // derived per seed when set
  std::string out_dir = "out";

  /// g1-paper, g2-paper, g3-paper.
  static ExperimentConfig preset(std::string_view name);
  /// Either a full object or {"preset": name, ...overrides}.
  static ExperimentConfig from_json(const json& j);
  json to_json() const;
  /// Throws ConfigError on any invalid field.
  void validate() const;

  seeker::SeekerConfig seeker_config(std::uint64_t seed) const;
  he::HeParams he_params() const;
  int horizon() const { return seeker_config(0).horizon(); }
};

/// Outcome of one tuning run, with noise-free costs evaluated at every
/// accepted theta(k).
struct RunSummary {
  std::uint64_t seed = 0;
  seeker::TuningTrace trace;
  std::vector<double> cost_history;  // J(theta(0)) .. J(theta(K))
  std::vector<bool> stable_history;
  std::optional<cloud::ClientTimings> timings;

  double initial_cost() const { return cost_history.front(); }
  double final_cost() const { return cost_history.back(); }
  bool all_stable() const;
  bool improved() const { return final_cost() < initial_cost(); }
};

/// Runs one seed with the configured backend; no files written.
RunSummary run_one(const ExperimentConfig& cfg, std::uint64_t seed,
                   const std::optional<std::string>& transcript_path = std::nullopt);

json summary_json(const RunSummary& run);
/// Aggregates over seeds: median reduction, all improved, all stable.
json aggregate_json(const std::vector<RunSummary>& runs);

double median(std::vector<double> v);

/// Writes traces, step responses, transcripts and report.json to
/// cfg.out_dir; returns the report.
json cmd_tune(const ExperimentConfig& cfg);

struct PaperRow {
  std::string plant;
  int k;
  std::optional<double> sigma;
  pid::Theta theta;
};
const std::vector<PaperRow>& paper_table();

/// All three plants x {noise 0, 5} x seeds, Table-1-shaped comparison.
json cmd_bench_paper(const std::string& out_dir, Backend backend,
                     const std::vector<std::uint64_t>& seeds);

/// Re-runs tuning with N reduced by each percentage.
json cmd_n_sweep(const ExperimentConfig& cfg, const std::vector<double>& reductions);

/// Median encrypt, decrypt and per-sample evaluation latency (RLWE only).
json cmd_timing(const ExperimentConfig& cfg, int repetitions);

/// Writes params.json, secret.key (mode 0600) and evaluation.key. `preset`
/// is a preset name or a path to a JSON parameter file.
json cmd_keygen(const std::string& preset, const std::string& out_dir);

struct LoadedKeys {
  he::HeParams params;
  std::shared_ptr<const he::HeContext> context;
  std::shared_ptr<const he::SecretKeyMaterial> keys;
};
LoadedKeys load_keys(const std::string& dir);

json cmd_replay(const std::string& transcript_path);

}  // namespace hetune::harness
