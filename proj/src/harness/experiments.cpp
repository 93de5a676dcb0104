#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hetune/errors.hpp"
#include "hetune/harness.hpp"
#include "hetune/hecore/serialize.hpp"

namespace hetune::harness {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

void write_step_csv(const fs::path& path, const seeker::ClosedLoopExperiment& ex,
                    const pid::Theta& theta) {
  std::ofstream out(path, std::ios::trunc);
  out << "t,y\n";
  const auto y = ex.noise_free_response(theta);
  char buf[64];
  for (std::size_t n = 0; n < y.size(); ++n) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", n * ex.config().dt, y[n]);
    out << buf;
  }
}

void write_private(const fs::path& path, const he::Bytes& data) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw ConfigError("cannot create " + path.string());
  ::fchmod(fd, 0600);  // also tighten a pre-existing file
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t w = ::write(fd, data.data() + done, data.size() - done);
    if (w <= 0) {
      ::close(fd);
      throw ConfigError("write failed for " + path.string());
    }
    done += static_cast<std::size_t>(w);
  }
  ::close(fd);
}

void write_bytes(const fs::path& path, const he::Bytes& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw ConfigError("cannot write " + path.string());
}

he::Bytes read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  return he::Bytes(std::istreambuf_iterator<char>(in), {});
}

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace

json cmd_tune(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  std::vector<RunSummary> runs;
  json per_seed = json::array();
  for (auto seed : cfg.seeds) {
    std::optional<std::string> transcript;
    if (cfg.transcripts && cfg.backend != Backend::plaintext) {
      transcript = (out / ("transcript_seed" + std::to_string(seed) + ".jsonl")).string();
    }
    RunSummary run = run_one(cfg, seed, transcript);
    {
      std::ofstream csv(out / ("trace_seed" + std::to_string(seed) + ".csv"), std::ios::trunc);
      seeker::write_trace_csv(csv, run.trace);
    }
    const seeker::ClosedLoopExperiment ex(cfg.plant, cfg.seeker_config(seed));
    write_step_csv(out / ("step_seed" + std::to_string(seed) + "_initial.csv"), ex, run.trace.initial);
    write_step_csv(out / ("step_seed" + std::to_string(seed) + "_final.csv"), ex,
                   run.trace.final_theta);
    json s = summary_json(run);
    if (transcript) s["transcript"] = *transcript;
    per_seed.push_back(s);
    runs.push_back(std::move(run));
  }
  json report = {{"config", cfg.to_json()}, {"runs", per_seed}, {"summary", aggregate_json(runs)}};
  write_json(out / "report.json", report);
  return report;
}

json cmd_bench_paper(const std::string& out_dir, Backend backend,
                     const std::vector<std::uint64_t>& seeds) {
  const fs::path out = out_dir;
  fs::create_directories(out);
  json experiments = json::array();
  json table = json::array();
  for (const char* name : {"g1-paper", "g2-paper", "g3-paper"}) {
    for (double sigma : {0.0, 5.0}) {
      ExperimentConfig cfg = ExperimentConfig::preset(name);
      cfg.noise_percent = sigma;
      cfg.seeds = seeds;
      cfg.backend = backend;
      cfg.out_dir = (out / (std::string(name) + "-sigma" + std::to_string(static_cast<int>(sigma)))).string();
      const json report = cmd_tune(cfg);
      experiments.push_back({{"preset", name}, {"sigma", sigma}, {"summary", report.at("summary")},
                             {"out_dir", cfg.out_dir}});
      for (const auto& row : paper_table()) {
        if (row.plant != cfg.plant_name || row.k != 50 || row.sigma != sigma) continue;
        table.push_back({{"plant", row.plant},
                         {"k", 50},
                         {"sigma", sigma},
                         {"ours_mean", report.at("summary").at("mean_final_theta")},
                         {"paper", pid::to_json(row.theta)}});
      }
    }
  }
  std::string text = "plant,k,sigma,source,Kp,Ki,Kd,Tf\n";
  char buf[160];
  for (const auto& row : paper_table()) {
    const auto t = row.theta;
    std::snprintf(buf, sizeof buf, "%s,%d,%s,paper,%g,%g,%g,%g\n", row.plant.c_str(), row.k,
                  row.sigma ? std::to_string(static_cast<int>(*row.sigma)).c_str() : "-", t.Kp,
                  t.Ki, t.Kd, t.Tf);
    text += buf;
  }
  for (const auto& row : table) {
    const auto& m = row.at("ours_mean");
    std::snprintf(buf, sizeof buf, "%s,50,%d,ours,%.4g,%.4g,%.4g,%.4g\n",
                  row.at("plant").get<std::string>().c_str(), row.at("sigma").get<int>(),
                  m.at("Kp").get<double>(), m.at("Ki").get<double>(), m.at("Kd").get<double>(),
                  m.at("Tf").get<double>());
    text += buf;
  }
  write_text(out / "table1_comparison.csv", text);
  json report = {{"backend", std::string(to_string(backend))},
                 {"seeds", seeds},
                 {"experiments", experiments},
                 {"table1", table}};
  write_json(out / "bench_report.json", report);
  return report;
}

json cmd_n_sweep(const ExperimentConfig& base, const std::vector<double>& reductions) {
  base.validate();
  for (double r : reductions) {
    if (!(r >= 0.0 && r < 100.0)) throw ConfigError("N reductions must lie in [0, 100) percent");
  }
  const fs::path out = base.out_dir;
  fs::create_directories(out);
  json rows = json::array();
  for (double r : reductions) {
    ExperimentConfig cfg = base;
    cfg.settling_time = base.settling_time * (1.0 - r / 100.0);
    cfg.validate();
    std::vector<RunSummary> runs;
    json per_seed = json::array();
    for (auto seed : cfg.seeds) {
      RunSummary run = run_one(cfg, seed);
      per_seed.push_back({{"seed", seed},
                          {"converged", run.improved() && run.all_stable() && !run.trace.halted},
                          {"unstable", !run.all_stable() || run.trace.halted},
                          {"initial_cost", run.initial_cost()},
                          {"final_cost", std::isfinite(run.final_cost()) ? json(run.final_cost())
                                                                          : json(nullptr)},
                          {"final_theta", pid::to_json(run.trace.final_theta)}});
      runs.push_back(std::move(run));
    }
    rows.push_back({{"reduction_percent", r},
                    {"N", cfg.horizon()},
                    {"runs", per_seed},
                    {"summary", aggregate_json(runs)}});
  }
  json report = {{"config", base.to_json()}, {"sweep", rows}};
  write_json(out / "n_sweep_report.json", report);
  return report;
}

json cmd_timing(const ExperimentConfig& cfg, int repetitions) {
  if (cfg.backend != Backend::rlwe) {
    throw ConfigError("timing is only meaningful on the rlwe backend");
  }
  if (repetitions < 1) throw ConfigError("repetitions must be positive");
  cfg.validate();
  auto ctx = he::HeContext::create(cfg.he_params());
  he::ChaChaRng rng = he::ChaChaRng::from_os();
  auto keys = std::make_shared<const he::SecretKeyMaterial>(he::keygen(*ctx, rng));
  he::Encryptor enc(ctx, keys, he::ChaChaRng::from_os());
  he::Decryptor dec(ctx, keys);
  auto evaluator = std::make_shared<const he::Evaluator>(ctx, keys->evaluation_key());
  const auto scfg = cfg.seeker_config(cfg.seeds.front());
  auto pre = std::make_shared<const cloud::CloudPrecomp>(cloud::precompute(enc, scfg));
  const int N = cfg.horizon();
  cloud::CloudSession session(evaluator, pre, N, std::mt19937_64(cfg.seeds.front()));
  session.begin_iteration();

  std::mt19937_64 values(7);
  std::uniform_real_distribution<double> y_dist(0.0, 1.5 * cfg.r_hat);
  std::vector<double> enc_ms, dec_ms, eval_ms;
  int n = 0;
  for (int i = 0; i < repetitions; ++i) {
    auto t0 = Clock::now();
    const he::Ciphertext ct = enc.encrypt(y_dist(values));
    enc_ms.push_back(elapsed_ms(t0));
    t0 = Clock::now();
    volatile double sink = dec.decrypt(ct);
    (void)sink;
    dec_ms.push_back(elapsed_ms(t0));
    if (session.phase() == cloud::CloudSession::Phase::ready) {
      session.finish_iteration();
      session.begin_iteration();
      n = 0;
    }
    t0 = Clock::now();
    session.ingest_sample(session.active_run(), n, ct);
    eval_ms.push_back(elapsed_ms(t0));
    n = session.expected_sample();
  }
  const double per_sample = median(eval_ms);
  json report = {
      {"backend", "rlwe"},
      {"ring_dimension", ctx->ring_dimension()},
      {"levels", ctx->top_level()},
      {"repetitions", repetitions},
      {"N", N},
      {"enc_ms", median(enc_ms)},
      {"dec_ms", median(dec_ms)},
      {"per_sample_ms", per_sample},
      {"projected_iteration_s", 2.0 * N * per_sample / 1000.0},
      {"paper_reference",
       {{"enc_dec_ms", 2.0}, {"per_sample_ms", 11.0}, {"iteration_s_range", {5.5, 55.0}}}},
  };
  fs::create_directories(cfg.out_dir);
  write_json(fs::path(cfg.out_dir) / "timing_report.json", report);
  return report;
}

json cmd_keygen(const std::string& preset, const std::string& out_dir) {
  he::HeParams params;
  if (fs::exists(preset) && fs::is_regular_file(preset)) {
    std::ifstream in(preset);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed parameter file: ") + e.what());
    }
    params = he::params_from_json(j);
  } else {
    params = he::HeParams::preset(preset);
  }
  params.validate();
  auto ctx = he::HeContext::create(params);
  he::ChaChaRng rng = he::ChaChaRng::from_os();
  const he::SecretKeyMaterial keys = he::keygen(*ctx, rng);

  const fs::path out = out_dir;
  fs::create_directories(out);
  write_json(out / "params.json", he::params_to_json(params));
  write_private(out / "secret.key", he::serialize(keys));
  write_bytes(out / "evaluation.key", he::serialize(*keys.evaluation_key()));
  return {{"params", he::params_to_json(params)},
          {"levels", params.levels()},
          {"ring_dimension", params.ring_dimension},
          {"chain_bits", static_cast<double>(msb(params.chain_product()) + 1)},
          {"files", {"params.json", "secret.key", "evaluation.key"}}};
}

LoadedKeys load_keys(const std::string& dir) {
  const fs::path in = dir;
  std::ifstream pf(in / "params.json");
  if (!pf) throw ConfigError("missing params.json in " + dir);
  json j;
  try {
    j = json::parse(pf);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed params.json: ") + e.what());
  }
  LoadedKeys out;
  out.params = he::params_from_json(j);
  out.context = he::HeContext::create(out.params);
  out.keys = std::make_shared<const he::SecretKeyMaterial>(
      he::deserialize_secret_key(read_bytes(in / "secret.key"), *out.context));
  const auto evk = he::deserialize_evaluation_key(read_bytes(in / "evaluation.key"), *out.context);
  if (!(evk == *out.keys->evaluation_key())) {
    throw FormatError("evaluation.key does not belong to secret.key");
  }
  return out;
}

json cmd_replay(const std::string& transcript_path) {
  std::ifstream in(transcript_path);
  if (!in) throw ConfigError("cannot open transcript " + transcript_path);
  const auto r = cloud::replay_transcript(in);
  return {{"transcript", transcript_path},
          {"iterations", r.iterations},
          {"frames_compared", r.frames_compared},
          {"identical", r.identical},
          {"detail", r.detail}};
}

}  // namespace hetune::harness
