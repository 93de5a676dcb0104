#pragma once

// 64-bit modular arithmetic for word-sized NTT-friendly primes (q < 2^62).

#include <cstdint>
#include <vector>

namespace hetune::he {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 add_mod(u64 a, u64 b, u64 q) {
  const u64 s = a + b;
  return s >= q ? s - q : s;
}

inline u64 sub_mod(u64 a, u64 b, u64 q) { return a >= b ? a - b : a + q - b; }

inline u64 neg_mod(u64 a, u64 q) { return a == 0 ? 0 : q - a; }

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>(static_cast<u128>(a) * b % q);
}

/// floor(w * 2^64 / q), the Shoup companion of a fixed multiplicand w < q.
inline u64 shoup_precompute(u64 w, u64 q) {
  return static_cast<u64>((static_cast<u128>(w) << 64) / q);
}

/// a * w mod q using the precomputed Shoup companion of w.
inline u64 mul_shoup(u64 a, u64 w, u64 w_shoup, u64 q) {
  const u64 hi = static_cast<u64>((static_cast<u128>(a) * w_shoup) >> 64);
  const u64 r = a * w - hi * q;
  return r >= q ? r - q : r;
}

u64 pow_mod(u64 base, u64 exp, u64 q);
/// Inverse modulo a prime q (Fermat); a must be nonzero mod q.
u64 inv_mod(u64 a, u64 q);
/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(u64 n);
/// Minimal primitive 2n-th root of unity modulo prime q (requires q = 1 mod 2n).
u64 primitive_root_2n(u64 q, std::size_t n);

/// Distinct primes q = 1 (mod 2n) just below 2^bits, in descending order,
/// skipping any value listed in `exclude`.
std::vector<u64> ntt_primes_below(int bits, std::size_t count, std::size_t n,
                                  const std::vector<u64>& exclude = {});

}  // namespace hetune::he
