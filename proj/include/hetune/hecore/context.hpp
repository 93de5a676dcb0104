#pragma once

#include <memory>
#include <vector>

#include "hetune/encoding.hpp"
#include "hetune/hecore/ntt.hpp"
#include "hetune/hecore/params.hpp"

namespace hetune::he {

/// Validated parameters plus everything derived from them once: per-level
/// moduli Q_l, NTT tables, and the constants needed for rescaling.
/// Immutable after construction and shared between all key and evaluator
/// objects of one parameter set.
class HeContext {
 public:
  static std::shared_ptr<const HeContext> create(const HeParams& params);

  const HeParams& params() const { return params_; }
  BackendKind backend() const { return params_.backend; }
  int top_level() const { return params_.levels(); }
  std::size_t ring_dimension() const { return params_.ring_dimension; }
  u64 prime(int index) const { return params_.modulus_chain[index]; }

  /// Q_level = q_0 * ... * q_level.
  const encoding::BigInt& modulus_at(int level) const {
    return moduli_[level];
  }
  /// q_top^{-1} mod q_j for j < top; RLWE rescaling.
  u64 inverse_prime(int top, int j) const { return inverse_primes_[top][j]; }

  /// NTT tables for chain prime j (RLWE backend only).
  const NttTables& ntt(int j) const { return ntt_[j]; }

  /// Number of base-2^digit_bits digits used to decompose residues modulo
  /// chain prime j during relinearization.
  int digit_count(int j) const { return digit_counts_[j]; }
  int digit_bits() const { return kDigitBits; }
  /// Offset of prime j's digits in the flattened relinearization key.
  int digit_offset(int j) const { return digit_offsets_[j]; }
  int total_digits() const { return digit_offsets_.back(); }

  static constexpr int kDigitBits = 20;

 private:
  explicit HeContext(const HeParams& params);

  HeParams params_;
  std::vector<encoding::BigInt> moduli_;
  std::vector<std::vector<u64>> inverse_primes_;
  std::vector<NttTables> ntt_;
  std::vector<int> digit_counts_;
  std::vector<int> digit_offsets_;
};

}  // namespace hetune::he
