#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "hetune/cloud/precompute.hpp"
#include "hetune/hecore/evaluator.hpp"

namespace hetune::cloud {

enum class Run { plus, minus };

/// A named public number held by the cloud.
struct PublicScalar {
  std::string name;
  double value = 0.0;
};

/// Everything the cloud keeps between messages, for auditing.
using RetainedValue = std::variant<const Ciphertext*, PublicScalar>;

/// Cloud side of one tuning session.
///
/// Built from an Evaluator (public evaluation key only) and the encrypted
/// constants, so it has no way to decrypt anything it handles. Per sample it
/// evaluates w_n/N (1 - y(n) * (1/r_hat))^2 and adds it to the accumulator of
/// the active run; finish_iteration turns the two accumulators into
/// Enc(dtheta_i) = (Enc(J+) - Enc(J-)) * Enc(-alpha / (2 d_i)).
class CloudSession {
 public:
  enum class Phase { idle, collecting, ready };

  CloudSession(std::shared_ptr<const he::Evaluator> evaluator,
               std::shared_ptr<const CloudPrecomp> precomp, int horizon,
               std::mt19937_64 mask_rng);

  /// Draws the mask uniformly and returns the matching Enc(d).
  CtVec4 begin_iteration();
  /// Same with a given mask index (transcript replay).
  CtVec4 begin_iteration(int mask_index);
  void ingest_sample(Run run, int n, const Ciphertext& y);
  CtVec4 finish_iteration();

  Phase phase() const { return phase_; }
  int iteration() const { return k_; }
  int horizon() const { return horizon_; }
  int mask_index() const { return mask_; }
  Run active_run() const { return run_; }
  int expected_sample() const { return next_n_; }
  const Ciphertext& accumulator(Run run) const;

  std::vector<RetainedValue> retained_values() const;

 private:
  std::shared_ptr<const he::Evaluator> eval_;
  std::shared_ptr<const CloudPrecomp> pre_;
  int horizon_;
  std::vector<double> weights_;  // w_n / N
  std::mt19937_64 mask_rng_;

  Ciphertext one_dropped_;
  Ciphertext zero_dropped_;
  Phase phase_ = Phase::idle;
  int k_ = 0;
  int mask_ = -1;
  Run run_ = Run::plus;
  int next_n_ = 0;
  Ciphertext acc_plus_;
  Ciphertext acc_minus_;
};

}  // namespace hetune::cloud
