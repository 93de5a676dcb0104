#include "hetune/seeker.hpp"

#include <cmath>

#include "hetune/errors.hpp"

namespace hetune::seeker {

int Mask::index() const {
  int idx = 0;
  for (int i = 0; i < 4; ++i)
    if (h[i] < 0) idx |= 1 << i;
  return idx;
}

Mask Mask::from_index(int index) {
  if (index < 0 || index >= kMaskCount) throw ConfigError("mask index out of range");
  Mask m;
  for (int i = 0; i < 4; ++i) m.h[i] = (index >> i) & 1 ? -1 : 1;
  return m;
}

Vec4 Mask::perturbation(double gamma) const {
  return {gamma * h[0], gamma * h[1], gamma * h[2], gamma * h[3]};
}

int sample_mask_index(std::mt19937_64& rng) {
  // Four independent fair bits.
  return static_cast<int>(rng() >> 60);
}

Mask sample_mask(std::mt19937_64& rng) { return Mask::from_index(sample_mask_index(rng)); }

int SeekerConfig::horizon() const {
  return static_cast<int>(std::llround(settling_time / dt));
}

void SeekerConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (k_max < 1) throw ConfigError("k_max must be at least 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(settling_time > 0.0) || !std::isfinite(settling_time))
    throw ConfigError("settling time must be positive");
  if (r_hat == 0.0 || !std::isfinite(r_hat)) throw ConfigError("r_hat must be nonzero");
  if (!(noise.std_fraction >= 0.0)) throw ConfigError("noise level must be nonnegative");
  if (horizon() < 2) throw ConfigError("horizon N = round(Ts/dt) must be at least 2");
}

Streams Streams::from_seed(std::uint64_t seed) {
  const auto lo = static_cast<std::uint32_t>(seed);
  const auto hi = static_cast<std::uint32_t>(seed >> 32);
  std::seed_seq mask_seq{lo, hi, 0x6d61736bu};
  std::seed_seq noise_seq{lo, hi, 0x6e6f6973u};
  return {std::mt19937_64(mask_seq), std::mt19937_64(noise_seq)};
}

std::vector<double> trapezoid_weights(int N) {
  if (N < 2) throw ConfigError("trapezoid weights need N >= 2");
  std::vector<double> w(N, 1.0);
  w.front() = 0.5;
  w.back() = 0.5;
  return w;
}

double cost(std::span<const double> y, double r_hat, std::span<const double> w) {
  if (r_hat == 0.0) throw ConfigError("r_hat must be nonzero");
  if (y.size() != w.size() || y.empty()) throw ConfigError("cost: length mismatch");
  double acc = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double e = 1.0 - y[n] / r_hat;
    acc += w[n] * e * e;
  }
  return acc / static_cast<double>(y.size());
}

Vec4 spsa_gradient(double j_plus, double j_minus, const Vec4& d) {
  Vec4 g{};
  for (int i = 0; i < 4; ++i) {
    if (d[i] == 0.0) throw ConfigError("SPSA perturbation has a zero component");
    g[i] = (j_plus - j_minus) / (2.0 * d[i]);
  }
  return g;
}

Vec4 relative_step(double j_plus, double j_minus, const Vec4& d, double alpha) {
  Vec4 g = spsa_gradient(j_plus, j_minus, d);
  for (auto& v : g) v = -alpha * v;
  return g;
}

ClosedLoopExperiment::ClosedLoopExperiment(plant::TransferFunction plant, SeekerConfig cfg)
    : plant_ss_(plant::tf_to_ss(plant)), cfg_(cfg) {
  cfg_.validate();
  weights_ = trapezoid_weights(cfg_.horizon());
}

plant::StateSpace ClosedLoopExperiment::loop(const Theta& theta) const {
  theta.validate();
  return plant::closed_loop(plant_ss_, plant::tf_to_ss(pid::pid_tf(theta)));
}

plant::DiscreteLoop ClosedLoopExperiment::discrete_loop(const Theta& theta) const {
  return plant::discretize_zoh(loop(theta), cfg_.dt);
}

std::vector<double> ClosedLoopExperiment::response(const Theta& theta,
                                                   std::mt19937_64& noise_rng) const {
  return plant::step_response(discrete_loop(theta), cfg_.r_hat, horizon(), cfg_.noise,
                              noise_rng);
}

std::vector<double> ClosedLoopExperiment::noise_free_response(const Theta& theta) const {
  std::mt19937_64 unused(0);
  return plant::step_response(discrete_loop(theta), cfg_.r_hat, horizon(), {}, unused);
}

double ClosedLoopExperiment::cost(const Theta& theta, std::mt19937_64& noise_rng) const {
  return seeker::cost(response(theta, noise_rng), cfg_.r_hat, weights_);
}

double ClosedLoopExperiment::noise_free_cost(const Theta& theta) const {
  return seeker::cost(noise_free_response(theta), cfg_.r_hat, weights_);
}

bool ClosedLoopExperiment::stable(const Theta& theta) const {
  return plant::is_stable(loop(theta));
}

StepOutcome seek_step(const Theta& theta, int k, const CostOracle& oracle,
                      const SeekerConfig& cfg, std::mt19937_64& mask_rng) {
  IterationRecord rec;
  rec.k = k;
  rec.theta = theta;
  rec.mask = sample_mask(mask_rng);
  const Vec4 d = rec.mask.perturbation(cfg.gamma);
  const auto [plus, minus] = pid::perturb(theta, d);
  rec.j_plus = oracle(plus);
  rec.j_minus = oracle(minus);
  rec.dtheta = relative_step(rec.j_plus, rec.j_minus, d, cfg.alpha);
  return {pid::update(theta, rec.dtheta), rec};
}

TuningTrace run_tuning(const Theta& theta0, const CostOracle& oracle,
                       const SeekerConfig& cfg, std::mt19937_64& mask_rng) {
  cfg.validate();
  theta0.validate();
  TuningTrace trace;
  trace.initial = theta0;
  Theta theta = theta0;
  for (int k = 0; k < cfg.k_max; ++k) {
    try {
      auto outcome = seek_step(theta, k, oracle, cfg, mask_rng);
      theta = outcome.next;
      trace.records.push_back(outcome.record);
    } catch (const PositivityViolation& e) {
      trace.halted = true;
      trace.halt_reason = "iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
  }
  trace.final_theta = theta;
  return trace;
}

TuningTrace run_tuning(const plant::TransferFunction& plant, const Theta& theta0,
                       const SeekerConfig& cfg) {
  ClosedLoopExperiment experiment(plant, cfg);
  Streams streams = Streams::from_seed(cfg.seed);
  CostOracle oracle = [&](const Theta& t) { return experiment.cost(t, streams.noise); };
  return run_tuning(theta0, oracle, cfg, streams.masks);
}

Vec4 replay_dtheta(const IterationRecord& record, double alpha, double gamma) {
  return relative_step(record.j_plus, record.j_minus, record.mask.perturbation(gamma), alpha);
}

}  // namespace hetune::seeker
