#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "hetune/cloud/protocol.hpp"
#include "hetune/hecore/evaluator.hpp"
#include "hetune/hecore/keys.hpp"
#include "hetune/seeker.hpp"

namespace hetune::cloud {

enum class Transport { in_process, tcp };

struct EncryptedRunOptions {
  he::HeParams params = he::HeParams::paper(he::BackendKind::reference);
  Transport transport = Transport::in_process;
  std::optional<std::string> transcript_path;
  /// Reproducible key generation and encryption randomness; the OS
  /// generator is used when unset.
  std::optional<std::uint64_t> key_seed;
};

struct ClientTimings {
  double encrypt_ms = 0.0;  // total over all y(n)
  double decrypt_ms = 0.0;
  double round_trip_ms = 0.0;
  long encryptions = 0;
  long decryptions = 0;
};

/// Data-owner side: holds the secret key, simulates the loop, encrypts
/// y(n), decrypts d and dtheta, and applies the relative update.
class TuningClient {
 public:
  TuningClient(std::shared_ptr<const he::HeContext> ctx,
               std::shared_ptr<const he::SecretKeyMaterial> keys, he::ChaChaRng rng,
               const plant::TransferFunction& plant, seeker::SeekerConfig cfg);

  /// Sends public parameters, the evaluation key and the encrypted
  /// constants; waits for the cloud's "ready".
  void setup(Channel& channel);
  /// Runs cfg.k_max iterations (or until the positivity guard stops it).
  seeker::TuningTrace tune(Channel& channel, const seeker::Theta& theta0);

  const ClientTimings& timings() const { return timings_; }
  const seeker::ClosedLoopExperiment& experiment() const { return experiment_; }

 private:
  CtVec4 receive_vector(Channel& channel, const std::string& kind, int k);

  std::shared_ptr<const he::HeContext> ctx_;
  std::shared_ptr<const he::SecretKeyMaterial> keys_;
  he::Encryptor encryptor_;
  he::Decryptor decryptor_;
  seeker::ClosedLoopExperiment experiment_;
  seeker::SeekerConfig cfg_;
  std::mt19937_64 noise_rng_;
  ClientTimings timings_;
};

struct EncryptedRunResult {
  seeker::TuningTrace trace;
  ClientTimings timings;
};

/// Full client/cloud session with cloud masks drawn from the mask stream of
/// cfg.seed, so the mask sequence equals the plaintext seeker's.
EncryptedRunResult run_encrypted_tuning(const plant::TransferFunction& plant,
                                        const seeker::Theta& theta0,
                                        const seeker::SeekerConfig& cfg,
                                        const EncryptedRunOptions& options);

struct ReplayReport {
  int iterations = 0;
  int frames_compared = 0;
  bool identical = false;
  std::string detail;
};

/// Re-executes the cloud side of a recorded session from its client frames
/// and compares every cloud reply byte for byte. The mask of each iteration
/// is recovered by matching the recorded Enc(d) against the constant table.
ReplayReport replay_transcript(std::istream& transcript);

}  // namespace hetune::cloud
