#pragma once

#include <memory>

#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/keys.hpp"
#include "hetune/hecore/prng.hpp"

namespace hetune::he {

/// Symmetric-key encryption of scalars. Holds secret material, so it belongs
/// to the client role.
class Encryptor {
 public:
  Encryptor(std::shared_ptr<const HeContext> ctx,
            std::shared_ptr<const SecretKeyMaterial> keys, ChaChaRng rng);

  /// Fresh ciphertext at the top level and scale c.
  Ciphertext encrypt(double x);
  /// Ciphertext at an explicit level and scale; used for constants that
  /// enter a circuit below the top level or must cancel a specific prime.
  Ciphertext encrypt(double x, int level, double scale);

  const HeContext& context() const { return *ctx_; }

 private:
  std::shared_ptr<const HeContext> ctx_;
  std::shared_ptr<const SecretKeyMaterial> keys_;
  ChaChaRng rng_;
};

class Decryptor {
 public:
  Decryptor(std::shared_ptr<const HeContext> ctx,
            std::shared_ptr<const SecretKeyMaterial> keys);

  double decrypt(const Ciphertext& ct) const;

 private:
  std::shared_ptr<const HeContext> ctx_;
  std::shared_ptr<const SecretKeyMaterial> keys_;
};

/// Homomorphic operations. Needs only public evaluation material; this is
/// the whole cryptographic capability of the cloud role.
///
/// Every multiplication (ciphertext or plaintext factor) is followed by a
/// rescale, so it consumes exactly one level and leaves scale_power as it
/// was on the inputs.
class Evaluator {
 public:
  Evaluator(std::shared_ptr<const HeContext> ctx,
            std::shared_ptr<const EvaluationKey> evaluation_key);

  Ciphertext add(const Ciphertext& a, const Ciphertext& b) const;
  Ciphertext sub(const Ciphertext& a, const Ciphertext& b) const;

  /// Product followed by rescale: level - 1, scale_power unchanged.
  Ciphertext multiply(const Ciphertext& a, const Ciphertext& b) const;
  /// Relinearized product without rescale: same level, scale_powers add.
  Ciphertext multiply_raw(const Ciphertext& a, const Ciphertext& b) const;

  /// a * s for a public real s, rescaled; the result keeps a's scale.
  Ciphertext multiply_plain(const Ciphertext& a, double s) const;
  /// a * s for a public real s, rescaled, landing on `result_scale`.
  Ciphertext multiply_plain(const Ciphertext& a, double s,
                            double result_scale) const;

  /// Divides the plaintext scale by the top prime: level - 1,
  /// scale_power - 1. Requires scale_power >= 2.
  Ciphertext rescale(const Ciphertext& a) const;

  /// Drops chain primes without touching the scale.
  Ciphertext drop_to_level(const Ciphertext& a, int level) const;

  const HeContext& context() const { return *ctx_; }
  std::shared_ptr<const HeContext> context_ptr() const { return ctx_; }
  const EvaluationKey& evaluation_key() const { return *evk_; }

 private:
  void check_backend(const Ciphertext& ct) const;
  void check_compatible(const Ciphertext& a, const Ciphertext& b,
                        bool require_same_scale) const;
  Ciphertext rescale_unchecked(const Ciphertext& a, int new_scale_power,
                               double new_scale) const;

  std::shared_ptr<const HeContext> ctx_;
  std::shared_ptr<const EvaluationKey> evk_;
};

}  // namespace hetune::he
