#pragma once

// Polynomial helpers shared by key generation and the RLWE backend.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/prng.hpp"

namespace hetune::he::detail {

inline RnsPoly zero_poly(const HeContext& ctx, int level) {
  RnsPoly p;
  p.residues.assign(level + 1,
                    std::vector<u64>(ctx.ring_dimension(), 0));
  return p;
}

/// Uniform polynomial, sampled directly in the NTT domain (the transform is
/// a bijection, so this is uniform in either domain).
inline RnsPoly sample_uniform(const HeContext& ctx, int level, ChaChaRng& rng) {
  RnsPoly p = zero_poly(ctx, level);
  for (int j = 0; j <= level; ++j) {
    std::uniform_int_distribution<u64> dist(0, ctx.prime(j) - 1);
    for (auto& c : p.residues[j]) c = dist(rng);
  }
  return p;
}

/// Rounded Gaussian coefficients, truncated at six standard deviations.
inline std::vector<std::int64_t> sample_gaussian(std::size_t n, double sigma,
                                                 ChaChaRng& rng) {
  std::normal_distribution<double> dist(0.0, sigma);
  const double bound = 6.0 * sigma;
  std::vector<std::int64_t> out(n);
  for (auto& c : out) {
    double v = 0.0;
    do {
      v = dist(rng);
    } while (std::abs(v) > bound);
    c = std::llround(v);
  }
  return out;
}

inline u64 signed_to_mod(std::int64_t v, u64 q) {
  if (v >= 0) return static_cast<u64>(v) % q;
  const u64 m = static_cast<u64>(-v) % q;
  return m == 0 ? 0 : q - m;
}

/// Small signed coefficients lifted into every residue up to `level`.
template <typename Int>
RnsPoly lift_small(const HeContext& ctx, const std::vector<Int>& coeffs,
                   int level) {
  RnsPoly p = zero_poly(ctx, level);
  for (int j = 0; j <= level; ++j) {
    const u64 q = ctx.prime(j);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      p.residues[j][k] = signed_to_mod(static_cast<std::int64_t>(coeffs[k]), q);
    }
  }
  return p;
}

inline void to_ntt(const HeContext& ctx, RnsPoly& p) {
  for (std::size_t j = 0; j < p.residues.size(); ++j) {
    ctx.ntt(static_cast<int>(j)).forward(p.residues[j]);
  }
}

inline void from_ntt(const HeContext& ctx, RnsPoly& p) {
  for (std::size_t j = 0; j < p.residues.size(); ++j) {
    ctx.ntt(static_cast<int>(j)).inverse(p.residues[j]);
  }
}

inline void add_inplace(const HeContext& ctx, RnsPoly& a, const RnsPoly& b) {
  for (std::size_t j = 0; j < a.residues.size(); ++j) {
    const u64 q = ctx.prime(static_cast<int>(j));
    auto& x = a.residues[j];
    const auto& y = b.residues[j];
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = add_mod(x[k], y[k], q);
  }
}

inline void sub_inplace(const HeContext& ctx, RnsPoly& a, const RnsPoly& b) {
  for (std::size_t j = 0; j < a.residues.size(); ++j) {
    const u64 q = ctx.prime(static_cast<int>(j));
    auto& x = a.residues[j];
    const auto& y = b.residues[j];
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = sub_mod(x[k], y[k], q);
  }
}

/// Pointwise product of two NTT-domain polynomials over the first
/// a.prime_count() residues of b.
inline RnsPoly mul_ntt(const HeContext& ctx, const RnsPoly& a,
                       const RnsPoly& b) {
  RnsPoly out = a;
  for (std::size_t j = 0; j < out.residues.size(); ++j) {
    const u64 q = ctx.prime(static_cast<int>(j));
    auto& x = out.residues[j];
    const auto& y = b.residues[j];
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = mul_mod(x[k], y[k], q);
  }
  return out;
}

/// acc += a * b, all NTT domain.
inline void mul_add_ntt(const HeContext& ctx, RnsPoly& acc, const RnsPoly& a,
                        const RnsPoly& b) {
  for (std::size_t j = 0; j < acc.residues.size(); ++j) {
    const u64 q = ctx.prime(static_cast<int>(j));
    auto& x = acc.residues[j];
    const auto& y = a.residues[j];
    const auto& z = b.residues[j];
    for (std::size_t k = 0; k < x.size(); ++k) {
      x[k] = add_mod(x[k], mul_mod(y[k], z[k], q), q);
    }
  }
}

inline void truncate(RnsPoly& p, int level) { p.residues.resize(level + 1); }

}  // namespace hetune::he::detail
