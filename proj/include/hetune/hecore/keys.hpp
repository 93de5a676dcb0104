#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/prng.hpp"

namespace hetune::he {

/// Public evaluation material handed to the party that computes on
/// ciphertexts. For RLWE this is the relinearization key: one pair
/// (b, a) per gadget entry (prime i, digit t), stored in NTT form over every
/// chain prime, with b = -a s + e + 2^(t w) s^2 in residue i and
/// b = -a s + e elsewhere. The reference backend needs none.
struct EvaluationKey {
  BackendKind backend = BackendKind::reference;
  std::vector<std::array<RnsPoly, 2>> relin;

  friend bool operator==(const EvaluationKey&, const EvaluationKey&) = default;
};

/// Secret material of the data owner. Never leaves the client role: the
/// cloud side is only ever given evaluation_key().
class SecretKeyMaterial {
 public:
  SecretKeyMaterial() = default;
  SecretKeyMaterial(BackendKind backend, std::vector<std::int8_t> secret,
                    RnsPoly secret_ntt,
                    std::shared_ptr<const EvaluationKey> evaluation)
      : backend_(backend), secret_(std::move(secret)),
        secret_ntt_(std::move(secret_ntt)), evaluation_(std::move(evaluation)) {}

  BackendKind backend() const { return backend_; }
  /// Ternary secret coefficients (empty for the reference backend).
  const std::vector<std::int8_t>& secret() const { return secret_; }
  const RnsPoly& secret_ntt() const { return secret_ntt_; }
  std::shared_ptr<const EvaluationKey> evaluation_key() const {
    return evaluation_;
  }
  std::size_t ring_dimension() const { return secret_.size(); }

 private:
  BackendKind backend_ = BackendKind::reference;
  std::vector<std::int8_t> secret_;
  RnsPoly secret_ntt_;
  std::shared_ptr<const EvaluationKey> evaluation_ =
      std::make_shared<EvaluationKey>();
};

SecretKeyMaterial keygen(const HeContext& ctx, ChaChaRng& rng);

/// Rebuilds the NTT form of a ternary secret; used when loading keys.
RnsPoly secret_to_ntt(const HeContext& ctx, const std::vector<std::int8_t>& s);

}  // namespace hetune::he
