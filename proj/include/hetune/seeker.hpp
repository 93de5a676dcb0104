#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "hetune/pid.hpp"
#include "hetune/plant.hpp"

namespace hetune::seeker {

using pid::Theta;
using pid::Vec4;

/// Sign mask h in {-1, +1}^4. Index bit i set means h_i = -1, so index 0 is
/// (+1, +1, +1, +1) and index 15 is (-1, -1, -1, -1).
struct Mask {
  std::array<int, 4> h{1, 1, 1, 1};

  int index() const;
  static Mask from_index(int index);
  /// d = gamma h.
  Vec4 perturbation(double gamma) const;

  friend bool operator==(const Mask&, const Mask&) = default;
};

inline constexpr int kMaskCount = 16;

int sample_mask_index(std::mt19937_64& rng);
Mask sample_mask(std::mt19937_64& rng);

struct SeekerConfig {
  double alpha = 1.0;
  double gamma = 0.01;
  int k_max = 50;
  double dt = 0.01;
  double settling_time = 1.0;
  double r_hat = 1.0;
  plant::NoiseOptions noise;
  std::uint64_t seed = 0;

  /// N = round(settling_time / dt).
  int horizon() const;
  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

/// Independent random streams of one tuning run, derived from its seed.
/// Mask draws and measurement noise never share state, so the same seed
/// gives the same masks and noise in plaintext and encrypted runs.
struct Streams {
  std::mt19937_64 masks;
  std::mt19937_64 noise;

  static Streams from_seed(std::uint64_t seed);
};

/// w_0 = w_{N-1} = 1/2, otherwise 1.
std::vector<double> trapezoid_weights(int N);

/// (1/N) sum_n w_n (1 - y_n / r_hat)^2 with N = y.size().
double cost(std::span<const double> y, double r_hat, std::span<const double> w);

/// Component i: (J_plus - J_minus) / (2 d_i).
Vec4 spsa_gradient(double j_plus, double j_minus, const Vec4& d);

/// Descent step -alpha * spsa_gradient(j_plus, j_minus, d).
Vec4 relative_step(double j_plus, double j_minus, const Vec4& d, double alpha);

/// Closed loop of a fixed plant under a filtered PID controller, simulated
/// from rest over the configured horizon.
class ClosedLoopExperiment {
 public:
  ClosedLoopExperiment(plant::TransferFunction plant, SeekerConfig cfg);

  plant::StateSpace loop(const Theta& theta) const;
  plant::DiscreteLoop discrete_loop(const Theta& theta) const;
  /// Recorded y(0..N-1) with the configured measurement noise.
  std::vector<double> response(const Theta& theta, std::mt19937_64& noise_rng) const;
  std::vector<double> noise_free_response(const Theta& theta) const;
  double cost(const Theta& theta, std::mt19937_64& noise_rng) const;
  double noise_free_cost(const Theta& theta) const;
  bool stable(const Theta& theta) const;

  const SeekerConfig& config() const { return cfg_; }
  const std::vector<double>& weights() const { return weights_; }
  int horizon() const { return static_cast<int>(weights_.size()); }

 private:
  plant::StateSpace plant_ss_;
  SeekerConfig cfg_;
  std::vector<double> weights_;
};

using CostOracle = std::function<double(const Theta&)>;

struct IterationRecord {
  int k = 0;
  Mask mask;
  Theta theta;  // theta(k), before the update
  double j_plus = 0.0;
  double j_minus = 0.0;
  Vec4 dtheta{};
};

struct TuningTrace {
  Theta initial;
  Theta final_theta;
  std::vector<IterationRecord> records;
  bool halted = false;  // stopped early by the positivity guard
  std::string halt_reason;
};

struct StepOutcome {
  Theta next;
  IterationRecord record;
};

/// One iteration: draw h, evaluate J at theta o (1 + gamma h) and then at
/// theta o (1 - gamma h), apply the relative descent step. Throws
/// PositivityViolation when the step would flip a sign.
StepOutcome seek_step(const Theta& theta, int k, const CostOracle& oracle,
                      const SeekerConfig& cfg, std::mt19937_64& mask_rng);

TuningTrace run_tuning(const Theta& theta0, const CostOracle& oracle,
                       const SeekerConfig& cfg, std::mt19937_64& mask_rng);

/// Plant-driven tuning with the streams of cfg.seed.
TuningTrace run_tuning(const plant::TransferFunction& plant, const Theta& theta0,
                       const SeekerConfig& cfg);

/// Recomputes a record's update from its own fields.
Vec4 replay_dtheta(const IterationRecord& record, double alpha, double gamma);

/// Columns k, h1..h4, Kp, Ki, Kd, Tf, Jplus, Jminus, dTheta1..4; numbers in
/// round-trip precision.
void write_trace_csv(std::ostream& out, const TuningTrace& trace);
std::vector<IterationRecord> read_trace_csv(std::istream& in);

}  // namespace hetune::seeker
