#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>

namespace hetune::he {

/// ChaCha20 keystream generator (libsodium) usable as a
/// UniformRandomBitGenerator. Seeded instances are reproducible; from_os()
/// draws the key from the operating system.
class ChaChaRng {
 public:
  using result_type = std::uint64_t;
  using Seed = std::array<unsigned char, 32>;

  explicit ChaChaRng(const Seed& seed);
  /// Expands a 64-bit seed into a key; intended for tests and reproducible
  /// experiments.
  explicit ChaChaRng(std::uint64_t seed);
  static ChaChaRng from_os();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

 private:
  void refill();

  Seed key_;
  std::uint64_t block_counter_ = 0;
  std::array<std::uint64_t, 64> buffer_{};
  std::size_t position_ = 64;
};

}  // namespace hetune::he
