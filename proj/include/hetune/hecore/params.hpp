#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hetune/encoding.hpp"

namespace hetune::he {

enum class BackendKind : std::uint32_t {
  reference = 1,  // exact modular arithmetic on the encoded integer, no noise
  rlwe = 2,       // ring-LWE approximate arithmetic over Z_Q[X]/(X^n + 1)
};

std::string_view to_string(BackendKind kind);
/// Accepts "reference" or "rlwe"; throws ConfigError otherwise.
BackendKind parse_backend(std::string_view name);

/// Encryption parameters shared by both backends.
///
/// modulus_chain = (q_0, q_1, ..., q_L). q_0 is the base prime that holds the
/// final result; q_1..q_L are scale primes close to scale_c that are dropped
/// one at a time by rescaling. Q_l denotes the product q_0 ... q_l.
struct HeParams {
  BackendKind backend = BackendKind::rlwe;
  std::size_t ring_dimension = 2048;
  std::vector<std::uint64_t> modulus_chain;
  double scale_c = 0x1p40;
  double error_std = 3.2;

  int levels() const { return static_cast<int>(modulus_chain.size()) - 1; }
  encoding::BigInt chain_product() const;
  /// Throws ConfigError on an inconsistent parameter set.
  void validate() const;

  /// Chain of one base prime (base_bits) and `levels` scale primes
  /// (scale_bits), all NTT-friendly for ring dimension n.
  static HeParams with_levels(BackendKind backend, std::size_t n, int levels,
                              int scale_bits = 40, int base_bits = 60);
  /// Ring dimension 2048, scale 2^40, four levels.
  static HeParams paper(BackendKind backend);
  /// Ring dimension 1024, scale 2^40, four levels; faster for tests.
  static HeParams test(BackendKind backend);

  /// Named presets: "paper", "test", "paper-reference", "test-reference".
  static HeParams preset(std::string_view name);

  friend bool operator==(const HeParams&, const HeParams&) = default;
};

}  // namespace hetune::he
