// Command line front end: tune, bench-paper, n-sweep, timing, keygen, replay.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hetune/errors.hpp"
#include "hetune/harness.hpp"

using namespace hetune;
using harness::ExperimentConfig;
using harness::json;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::vector<std::uint64_t> seeds;
  std::string backend;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "experiment config (JSON)");
  cmd->add_option("--preset", o.preset, "g1-paper, g2-paper or g3-paper");
  cmd->add_option("--seed", o.seeds, "seed(s); replaces the configured list");
  cmd->add_option("--backend", o.backend, "plaintext, reference or rlwe");
  cmd->add_option("--out", o.out, "output directory");
}

ExperimentConfig load_config(const CommonOptions& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream in(o.config_path);
    if (!in) throw ConfigError("cannot open config " + o.config_path);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed config: ") + e.what());
    }
    cfg = ExperimentConfig::from_json(j);
  } else if (!o.preset.empty()) {
    cfg = ExperimentConfig::preset(o.preset);
  } else {
    throw ConfigError("give --config or --preset");
  }
  if (!o.seeds.empty()) cfg.seeds = o.seeds;
  if (!o.backend.empty()) cfg.backend = harness::parse_backend(o.backend);
  if (!o.out.empty()) cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

void print_summary(const json& report) {
  for (const auto& run : report.at("runs")) {
    std::cout << "seed " << run.at("seed") << ": J " << run.at("initial_cost") << " -> "
              << run.at("final_cost") << ", stable_all " << run.at("stable_all")
              << ", final " << run.at("final_theta").dump() << "\n";
  }
  std::cout << "summary " << report.at("summary").dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encrypted extremum-seeking PID tuning simulator"};
  app.require_subcommand(1);

  CommonOptions tune_opts;
  auto* tune = app.add_subcommand("tune", "run tunings and write traces and report.json");
  add_common(tune, tune_opts);

  std::string bench_out = "out/bench";
  std::string bench_backend = "plaintext";
  std::vector<std::uint64_t> bench_seeds{1, 2, 3, 4, 5};
  auto* bench = app.add_subcommand("bench-paper", "all plants x noise {0, 5}% x seeds");
  bench->add_option("--out", bench_out, "output directory");
  bench->add_option("--backend", bench_backend, "plaintext, reference or rlwe");
  bench->add_option("--seed", bench_seeds, "seeds");

  CommonOptions sweep_opts;
  std::vector<double> reductions{0, 25, 50, 70};
  auto* sweep = app.add_subcommand("n-sweep", "repeat tuning with the horizon N reduced");
  add_common(sweep, sweep_opts);
  sweep->add_option("--reductions", reductions, "percent reductions of N")->delimiter(',');

  CommonOptions timing_opts;
  int repetitions = 50;
  std::string timing_he = "";
  auto* timing = app.add_subcommand("timing", "encrypt/decrypt/per-sample latency (rlwe)");
  add_common(timing, timing_opts);
  timing->add_option("--repetitions", repetitions, "samples to time");
  timing->add_option("--he-preset", timing_he, "paper or test");

  std::string key_preset = "paper";
  std::string key_out = "keys";
  auto* keygen = app.add_subcommand("keygen", "generate key material");
  keygen->add_option("--preset", key_preset, "parameter preset name or JSON file");
  keygen->add_option("--out", key_out, "output directory");

  std::string transcript;
  auto* replay = app.add_subcommand("replay", "re-execute the cloud side of a transcript");
  replay->add_option("transcript", transcript, "JSONL transcript")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*tune) {
      print_summary(harness::cmd_tune(load_config(tune_opts)));
    } else if (*bench) {
      const json r = harness::cmd_bench_paper(bench_out, harness::parse_backend(bench_backend),
                                              bench_seeds);
      for (const auto& e : r.at("experiments")) {
        std::cout << e.at("preset").get<std::string>() << " sigma " << e.at("sigma") << ": "
                  << e.at("summary").dump() << "\n";
      }
      std::cout << "table written to " << bench_out << "/table1_comparison.csv\n";
    } else if (*sweep) {
      const json r = harness::cmd_n_sweep(load_config(sweep_opts), reductions);
      for (const auto& row : r.at("sweep")) {
        std::cout << "-" << row.at("reduction_percent") << "% N=" << row.at("N") << ": "
                  << row.at("summary").dump() << "\n";
      }
    } else if (*timing) {
      if (timing_opts.backend.empty()) timing_opts.backend = "rlwe";
      ExperimentConfig cfg = load_config(timing_opts);
      if (!timing_he.empty()) cfg.he_preset = timing_he;
      std::cout << harness::cmd_timing(cfg, repetitions).dump(2) << "\n";
    } else if (*keygen) {
      std::cout << harness::cmd_keygen(key_preset, key_out).dump(2) << "\n";
    } else if (*replay) {
      const json r = harness::cmd_replay(transcript);
      std::cout << r.dump(2) << "\n";
      return r.at("identical").get<bool>() ? 0 : 3;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
