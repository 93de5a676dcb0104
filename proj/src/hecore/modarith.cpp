#include "hetune/hecore/modarith.hpp"

#include <algorithm>
#include <stdexcept>

namespace hetune::he {

u64 pow_mod(u64 base, u64 exp, u64 q) {
  u64 result = 1 % q;
  base %= q;
  while (exp != 0) {
    if (exp & 1) result = mul_mod(result, base, q);
    base = mul_mod(base, base, q);
    exp >>= 1;
  }
  return result;
}

u64 inv_mod(u64 a, u64 q) {
  if (a % q == 0) throw std::invalid_argument("inv_mod: zero has no inverse");
  return pow_mod(a, q - 2, q);
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int r = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++r;
  }
  // These bases are sufficient for every n < 2^64.
  for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int i = 1; i < r; ++i) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

u64 primitive_root_2n(u64 q, std::size_t n) {
  const u64 order = 2 * static_cast<u64>(n);
  if ((q - 1) % order != 0) {
    throw std::invalid_argument("primitive_root_2n: q != 1 mod 2n");
  }
  const u64 cofactor = (q - 1) / order;
  for (u64 g = 2; g < q; ++g) {
    const u64 candidate = pow_mod(g, cofactor, q);
    // Order is exactly 2n iff candidate^n = -1.
    if (pow_mod(candidate, n, q) == q - 1) {
      // Prefer the smallest root among its powers for reproducibility.
      u64 best = candidate;
      u64 power = candidate;
      const u64 square = mul_mod(candidate, candidate, q);
      for (u64 i = 1; i < n; ++i) {
        power = mul_mod(power, square, q);
        best = std::min(best, power);
      }
      return best;
    }
  }
  throw std::runtime_error("primitive_root_2n: no root found");
}

std::vector<u64> ntt_primes_below(int bits, std::size_t count, std::size_t n,
                                  const std::vector<u64>& exclude) {
  if (bits < 20 || bits > 61) {
    throw std::invalid_argument("ntt_primes_below: bits must be in [20, 61]");
  }
  const u64 step = 2 * static_cast<u64>(n);
  std::vector<u64> primes;
  u64 candidate = (u64{1} << bits) - step + 1;
  while (primes.size() < count) {
    if (candidate <= step) {
      throw std::runtime_error("ntt_primes_below: ran out of candidates");
    }
    if (is_prime(candidate) &&
        std::find(exclude.begin(), exclude.end(), candidate) == exclude.end()) {
      primes.push_back(candidate);
    }
    candidate -= step;
  }
  return primes;
}

}  // namespace hetune::he
