#include <algorithm>
#include <cmath>
#include <limits>
#include <array>

#include "hetune/errors.hpp"
#include "hetune/harness.hpp"

namespace hetune::harness {

double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

bool RunSummary::all_stable() const {
  return std::all_of(stable_history.begin(), stable_history.end(), [](bool b) { return b; });
}

RunSummary run_one(const ExperimentConfig& cfg, std::uint64_t seed,
                   const std::optional<std::string>& transcript_path) {
  const auto scfg = cfg.seeker_config(seed);
  RunSummary run;
  run.seed = seed;
  if (cfg.backend == Backend::plaintext) {
    run.trace = seeker::run_tuning(cfg.plant, cfg.theta0, scfg);
  } else {
    cloud::EncryptedRunOptions opt;
    opt.params = cfg.he_params();
    opt.transport = cfg.transport;
    opt.transcript_path = transcript_path;
    if (cfg.key_seed) opt.key_seed = *cfg.key_seed ^ (seed * 0x9e3779b97f4a7c15ULL);
    auto result = cloud::run_encrypted_tuning(cfg.plant, cfg.theta0, scfg, opt);
    run.trace = std::move(result.trace);
    run.timings = result.timings;
  }

  // Reported costs are noise-free so that runs with and without measurement
  // noise are compared on the same footing.
  const seeker::ClosedLoopExperiment experiment(cfg.plant, scfg);
  auto record = [&](const pid::Theta& theta) {
    const bool stable = experiment.stable(theta);
    run.stable_history.push_back(stable);
    run.cost_history.push_back(stable ? experiment.noise_free_cost(theta)
                                      : std::numeric_limits<double>::infinity());
  };
  for (const auto& rec : run.trace.records) record(rec.theta);
  record(run.trace.final_theta);
  return run;
}

json summary_json(const RunSummary& run) {
  json j = {
      {"seed", run.seed},
      {"iterations", run.trace.records.size()},
      {"halted", run.trace.halted},
      {"halt_reason", run.trace.halt_reason},
      {"initial_theta", pid::to_json(run.trace.initial)},
      {"final_theta", pid::to_json(run.trace.final_theta)},
      {"initial_cost", run.initial_cost()},
      {"final_cost", std::isfinite(run.final_cost()) ? json(run.final_cost()) : json(nullptr)},
      {"improved", run.improved()},
      {"stable_initial", run.stable_history.front()},
      {"stable_final", run.stable_history.back()},
      {"stable_all", run.all_stable()},
  };
  json history = json::array();
  for (double c : run.cost_history) history.push_back(std::isfinite(c) ? json(c) : json(nullptr));
  j["cost_history"] = history;
  if (run.timings) {
    const auto& t = *run.timings;
    j["timings"] = {
        {"encrypt_ms_mean", t.encryptions ? t.encrypt_ms / t.encryptions : 0.0},
        {"decrypt_ms_mean", t.decryptions ? t.decrypt_ms / t.decryptions : 0.0},
        {"iteration_s_mean",
         run.trace.records.empty() ? 0.0 : t.round_trip_ms / 1000.0 / run.trace.records.size()},
    };
  }
  return j;
}

json aggregate_json(const std::vector<RunSummary>& runs) {
  std::vector<double> reductions, finals;
  bool all_improved = true, all_stable = true, any_halted = false;
  std::array<std::vector<double>, 4> params;
  for (const auto& r : runs) {
    reductions.push_back(1.0 - r.final_cost() / r.initial_cost());
    finals.push_back(r.final_cost());
    all_improved = all_improved && r.improved();
    all_stable = all_stable && r.all_stable();
    any_halted = any_halted || r.trace.halted;
    const auto a = r.trace.final_theta.as_array();
    for (int i = 0; i < 4; ++i) params[i].push_back(a[i]);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
  };
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {
      {"runs", runs.size()},
      {"median_cost_reduction", finite_or_null(median(reductions))},
      {"median_final_cost", finite_or_null(median(finals))},
      {"all_improved", all_improved},
      {"all_stable", all_stable},
      {"any_halted", any_halted},
      {"mean_final_theta",
       {{"Kp", mean(params[0])}, {"Ki", mean(params[1])}, {"Kd", mean(params[2])},
        {"Tf", mean(params[3])}}},
  };
}

const std::vector<PaperRow>& paper_table() {
  static const std::vector<PaperRow> rows = {
      {"G1", 0, std::nullopt, {4.08, 0.45, 9.33, 0.50}},
      {"G1", 50, 0.0, {3.24, 0.22, 9.93, 0.36}},
      {"G1", 50, 5.0, {3.64, 0.22, 10.33, 0.10}},
      {"G2", 0, std::nullopt, {1.11, 14.61, 0.02, 1e-3}},
      {"G2", 50, 0.0, {0.96, 22.94, 0.03, 9e-4}},
      {"G2", 50, 5.0, {0.81, 22.15, 0.04, 7e-4}},
      {"G3", 0, std::nullopt, {3.53, 0.21, 14.82, 0.50}},
      {"G3", 50, 0.0, {2.72, 0.10, 19.83, 0.40}},
      {"G3", 50, 5.0, {3.02, 0.09, 18.25, 0.39}},
  };
  return rows;
}

}  // namespace hetune::harness
