#include "hetune/hecore/ntt.hpp"

#include <stdexcept>

namespace hetune::he {

namespace {

std::size_t bit_reverse(std::size_t x, int bits) {
  std::size_t r = 0;
  for (int i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

}  // namespace

NttTables::NttTables(u64 modulus, std::size_t n)
    : q_(modulus), n_(n), roots_(n), roots_shoup_(n), inv_roots_(n),
      inv_roots_shoup_(n) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("NttTables: n must be a power of two");
  }
  int log_n = 0;
  while ((std::size_t{1} << log_n) < n) ++log_n;

  const u64 psi = primitive_root_2n(q_, n_);
  const u64 psi_inv = inv_mod(psi, q_);
  u64 power = 1;
  u64 inv_power = 1;
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = bit_reverse(i, log_n);
    roots_[r] = power;
    inv_roots_[r] = inv_power;
    power = mul_mod(power, psi, q_);
    inv_power = mul_mod(inv_power, psi_inv, q_);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    roots_shoup_[i] = shoup_precompute(roots_[i], q_);
    inv_roots_shoup_[i] = shoup_precompute(inv_roots_[i], q_);
  }
  n_inv_ = inv_mod(static_cast<u64>(n_) % q_, q_);
  n_inv_shoup_ = shoup_precompute(n_inv_, q_);
}

void NttTables::forward(std::span<u64> a) const {
  if (a.size() != n_) throw std::invalid_argument("NttTables: size mismatch");
  std::size_t t = n_;
  for (std::size_t m = 1; m < n_; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const u64 w = roots_[m + i];
      const u64 ws = roots_shoup_[m + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        const u64 u = a[j];
        const u64 v = mul_shoup(a[j + t], w, ws, q_);
        a[j] = add_mod(u, v, q_);
        a[j + t] = sub_mod(u, v, q_);
      }
    }
  }
}

void NttTables::inverse(std::span<u64> a) const {
  if (a.size() != n_) throw std::invalid_argument("NttTables: size mismatch");
  std::size_t t = 1;
  for (std::size_t m = n_; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const u64 w = inv_roots_[h + i];
      const u64 ws = inv_roots_shoup_[h + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        const u64 u = a[j];
        const u64 v = a[j + t];
        a[j] = add_mod(u, v, q_);
        a[j + t] = mul_shoup(sub_mod(u, v, q_), w, ws, q_);
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
  for (auto& x : a) x = mul_shoup(x, n_inv_, n_inv_shoup_, q_);
}

std::vector<u64> negacyclic_multiply_schoolbook(std::span<const u64> a,
                                                std::span<const u64> b,
                                                u64 q) {
  const std::size_t n = a.size();
  if (b.size() != n) throw std::invalid_argument("schoolbook: size mismatch");
  std::vector<u64> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const u64 p = mul_mod(a[i], b[j], q);
      const std::size_t k = i + j;
      if (k < n) {
        out[k] = add_mod(out[k], p, q);
      } else {
        out[k - n] = sub_mod(out[k - n], p, q);
      }
    }
  }
  return out;
}

}  // namespace hetune::he
