#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "hetune/encoding.hpp"
#include "hetune/hecore/params.hpp"

namespace hetune::he {

/// Polynomial in residue-number-system form: residues[j] holds the n
/// coefficients modulo chain prime q_j, for j = 0..level.
struct RnsPoly {
  std::vector<std::vector<std::uint64_t>> residues;

  std::size_t prime_count() const { return residues.size(); }
  friend bool operator==(const RnsPoly&, const RnsPoly&) = default;
};

/// (c0, c1) with c0 + c1 * s = m + e (mod Q_level), coefficient form.
struct RlwePayload {
  RnsPoly c0;
  RnsPoly c1;
  friend bool operator==(const RlwePayload&, const RlwePayload&) = default;
};

/// Reference payload: the encoded integer in [0, Q_level).
using ReferencePayload = encoding::BigInt;

using Payload = std::variant<ReferencePayload, RlwePayload>;

/// Encrypted scalar.
///
/// scale_power counts how many scaling factors the plaintext carries (1 for
/// fresh and rescaled ciphertexts, 2 straight after a product). scale() is
/// the exact real scale the message is multiplied by; rescaling by a chain
/// prime q_l divides it by q_l, which is close to but not equal to c.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(BackendKind backend, int level, int scale_power, double scale,
             Payload payload)
      : backend_(backend), level_(level), scale_power_(scale_power),
        scale_(scale), payload_(std::move(payload)) {}

  BackendKind backend() const { return backend_; }
  int level() const { return level_; }
  int scale_power() const { return scale_power_; }
  double scale() const { return scale_; }
  const Payload& payload() const { return payload_; }

  friend bool operator==(const Ciphertext&, const Ciphertext&) = default;

 private:
  BackendKind backend_ = BackendKind::reference;
  int level_ = 0;
  int scale_power_ = 1;
  double scale_ = 1.0;
  Payload payload_;
};

inline int level_of(const Ciphertext& ct) { return ct.level(); }

}  // namespace hetune::he
