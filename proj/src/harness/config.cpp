#include <cmath>

#include "hetune/errors.hpp"
#include "hetune/harness.hpp"
#include "hetune/hecore/serialize.hpp"

namespace hetune::harness {

Backend parse_backend(std::string_view name) {
  if (name == "plaintext") return Backend::plaintext;
  if (name == "reference") return Backend::reference;
  if (name == "rlwe") return Backend::rlwe;
  throw ConfigError("unknown backend '" + std::string(name) +
                    "' (expected plaintext, reference or rlwe)");
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::plaintext:
      return "plaintext";
    case Backend::reference:
      return "reference";
    case Backend::rlwe:
      return "rlwe";
  }
  return "?";
}

namespace {

cloud::Transport parse_transport(std::string_view name) {
  if (name == "in-process") return cloud::Transport::in_process;
  if (name == "tcp") return cloud::Transport::tcp;
  throw ConfigError("unknown transport '" + std::string(name) + "'");
}

std::string_view transport_name(cloud::Transport t) {
  return t == cloud::Transport::tcp ? "tcp" : "in-process";
}

ExperimentConfig paper_preset(plant::PlantId id, double dt, double ts) {
  ExperimentConfig cfg;
  cfg.plant_name = std::string(plant::to_string(id));
  cfg.name = "g" + cfg.plant_name.substr(1) + "-paper";
  cfg.plant = plant::benchmark_plant(id);
  cfg.theta0 = pid::initial_theta(id);
  cfg.dt = dt;
  cfg.settling_time = ts;
  cfg.alpha = 1.0;
  cfg.gamma = 0.01;
  cfg.k_max = 50;
  return cfg;
}

}  // namespace

ExperimentConfig ExperimentConfig::preset(std::string_view name) {
  if (name == "g1-paper") return paper_preset(plant::PlantId::G1, 0.01, 50.0);
  if (name == "g2-paper") return paper_preset(plant::PlantId::G2, 1e-4, 0.05);
  if (name == "g3-paper") return paper_preset(plant::PlantId::G3, 0.01, 80.0);
  throw ConfigError("unknown experiment preset '" + std::string(name) + "'");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  try {
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = preset(j.at("preset").get<std::string>());
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("plant")) {
      const json& p = j.at("plant");
      if (p.is_string()) {
        const auto id = plant::parse_plant_id(p.get<std::string>());
        cfg.plant_name = std::string(plant::to_string(id));
        cfg.plant = plant::benchmark_plant(id);
        if (!j.contains("theta0")) cfg.theta0 = pid::initial_theta(id);
      } else {
        cfg.plant_name = "custom";
        cfg.plant = plant::plant_from_json(p);
        if (!j.contains("theta0")) throw ConfigError("custom plants need theta0");
      }
    } else if (!j.contains("preset")) {
      throw ConfigError("config needs a plant or a preset");
    }
    if (j.contains("theta0")) cfg.theta0 = pid::theta_from_json(j.at("theta0"));
    cfg.dt = j.value("dt", cfg.dt);
    cfg.settling_time = j.value("settling_time", cfg.settling_time);
    cfg.r_hat = j.value("r_hat", cfg.r_hat);
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.k_max = j.value("k_max", cfg.k_max);
    cfg.noise_percent = j.value("noise_percent", cfg.noise_percent);
    cfg.noise_in_feedback = j.value("noise_in_feedback", cfg.noise_in_feedback);
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("backend")) cfg.backend = parse_backend(j.at("backend").get<std::string>());
    cfg.he_preset = j.value("he_preset", cfg.he_preset);
    if (j.contains("transport")) cfg.transport = parse_transport(j.at("transport").get<std::string>());
    cfg.transcripts = j.value("transcripts", cfg.transcripts);
    if (j.contains("key_seed") && !j.at("key_seed").is_null())
      cfg.key_seed = j.at("key_seed").get<std::uint64_t>();
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.validate();
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("experiment config: ") + e.what());
  }
}

json ExperimentConfig::to_json() const {
  json j = {
      {"name", name},
      {"theta0", pid::to_json(theta0)},
      {"dt", dt},
      {"settling_time", settling_time},
      {"N", horizon()},
      {"r_hat", r_hat},
      {"alpha", alpha},
      {"gamma", gamma},
      {"k_max", k_max},
      {"noise_percent", noise_percent},
      {"noise_in_feedback", noise_in_feedback},
      {"seeds", seeds},
      {"backend", std::string(to_string(backend))},
      {"he_preset", he_preset},
      {"transport", std::string(transport_name(transport))},
      {"transcripts", transcripts},
      {"key_seed", key_seed ? json(*key_seed) : json(nullptr)},
      {"out_dir", out_dir},
  };
  if (plant_name == "custom") {
    j["plant"] = {{"num", plant.num}, {"den", plant.den}, {"delay", 0.0}};
  } else {
    j["plant"] = plant_name;
  }
  return j;
}

void ExperimentConfig::validate() const {
  const auto tf = plant.normalized();
  if (!tf.is_proper()) throw ConfigError("plant must be proper");
  theta0.validate();
  if (!(noise_percent >= 0.0) || !std::isfinite(noise_percent))
    throw ConfigError("noise_percent must be nonnegative");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  seeker_config(0).validate();
  if (backend != Backend::plaintext) he_params().validate();
}

seeker::SeekerConfig ExperimentConfig::seeker_config(std::uint64_t seed) const {
  seeker::SeekerConfig s;
  s.alpha = alpha;
  s.gamma = gamma;
  s.k_max = k_max;
  s.dt = dt;
  s.settling_time = settling_time;
  s.r_hat = r_hat;
  s.noise.std_fraction = noise_percent / 100.0;
  s.noise.in_feedback = noise_in_feedback;
  s.seed = seed;
  return s;
}

he::HeParams ExperimentConfig::he_params() const {
  he::HeParams p = he::HeParams::preset(he_preset);
  if (backend == Backend::reference) p.backend = he::BackendKind::reference;
  if (backend == Backend::rlwe) p.backend = he::BackendKind::rlwe;
  return p;
}

}  // namespace hetune::harness
