#include "backend_impl.hpp"
#include "rlwe_internal.hpp"

namespace hetune::he::detail::rlwe {

namespace {

u64 reduce_to_word(const BigInt& value, u64 q) {
  return encoding::reduce(value, BigInt(q)).convert_to<u64>();
}

void scale_inplace(const HeContext& ctx, RnsPoly& p,
                   const std::vector<u64>& factors) {
  for (std::size_t j = 0; j < p.residues.size(); ++j) {
    const u64 q = ctx.prime(static_cast<int>(j));
    const u64 w = factors[j];
    const u64 ws = shoup_precompute(w, q);
    for (auto& c : p.residues[j]) c = mul_shoup(c, w, ws, q);
  }
}

void rescale_poly(const HeContext& ctx, RnsPoly& p, int level) {
  const u64 q_top = ctx.prime(level);
  const auto& top = p.residues[level];
  for (int j = 0; j < level; ++j) {
    const u64 q = ctx.prime(j);
    const u64 inv = ctx.inverse_prime(level, j);
    const u64 inv_shoup = shoup_precompute(inv, q);
    auto& r = p.residues[j];
    for (std::size_t k = 0; k < r.size(); ++k) {
      const u64 v = top[k];
      // Centered lift of the top residue, reduced mod q.
      const u64 lifted = v > q_top / 2 ? neg_mod((q_top - v) % q, q) : v % q;
      r[k] = mul_shoup(sub_mod(r[k], lifted, q), inv, inv_shoup, q);
    }
  }
  truncate(p, level - 1);
}

}  // namespace

RlwePayload encrypt(const HeContext& ctx, const SecretKeyMaterial& sk,
                    const BigInt& message, int level, ChaChaRng& rng) {
  RnsPoly a = sample_uniform(ctx, level, rng);
  RnsPoly as = mul_ntt(ctx, a, sk.secret_ntt());
  from_ntt(ctx, as);
  from_ntt(ctx, a);

  RnsPoly c0 = lift_small(
      ctx, sample_gaussian(ctx.ring_dimension(), ctx.params().error_std, rng),
      level);
  sub_inplace(ctx, c0, as);
  for (int j = 0; j <= level; ++j) {
    const u64 q = ctx.prime(j);
    c0.residues[j][0] = add_mod(c0.residues[j][0], reduce_to_word(message, q), q);
  }
  return {std::move(c0), std::move(a)};
}

BigInt decrypt(const HeContext& ctx, const SecretKeyMaterial& sk,
               const RlwePayload& p, int level) {
  const auto& s = sk.secret();
  const std::size_t n = ctx.ring_dimension();
  const BigInt& modulus = ctx.modulus_at(level);
  BigInt result = 0;
  for (int j = 0; j <= level; ++j) {
    const u64 q = ctx.prime(j);
    const auto& c0 = p.c0.residues[j];
    const auto& c1 = p.c1.residues[j];
    // Constant coefficient of c1 * s in Z_q[X]/(X^n + 1).
    u64 acc = c0[0];
    auto accumulate = [&](u64 coeff, std::int8_t sign) {
      if (sign > 0) acc = add_mod(acc, coeff, q);
      if (sign < 0) acc = sub_mod(acc, coeff, q);
    };
    accumulate(c1[0], s[0]);
    for (std::size_t k = 1; k < n; ++k) {
      accumulate(c1[k], static_cast<std::int8_t>(-s[n - k]));
    }
    // CRT: sum_j r_j * (Q/q_j) * [(Q/q_j)^-1]_q_j.
    const BigInt partial = modulus / q;
    const u64 partial_mod = (partial % q).convert_to<u64>();
    const u64 coefficient = mul_mod(acc, inv_mod(partial_mod, q), q);
    result += partial * coefficient;
  }
  return encoding::reduce(result, modulus);
}

RlwePayload add(const HeContext& ctx, const RlwePayload& a,
                const RlwePayload& b) {
  RlwePayload out = a;
  add_inplace(ctx, out.c0, b.c0);
  add_inplace(ctx, out.c1, b.c1);
  return out;
}

RlwePayload sub(const HeContext& ctx, const RlwePayload& a,
                const RlwePayload& b) {
  RlwePayload out = a;
  sub_inplace(ctx, out.c0, b.c0);
  sub_inplace(ctx, out.c1, b.c1);
  return out;
}

RlwePayload multiply(const HeContext& ctx, const EvaluationKey& evk,
                     const RlwePayload& a, const RlwePayload& b, int level) {
  RnsPoly a0 = a.c0, a1 = a.c1, b0 = b.c0, b1 = b.c1;
  to_ntt(ctx, a0);
  to_ntt(ctx, a1);
  to_ntt(ctx, b0);
  to_ntt(ctx, b1);

  RnsPoly d0 = mul_ntt(ctx, a0, b0);
  RnsPoly d1 = mul_ntt(ctx, a0, b1);
  mul_add_ntt(ctx, d1, a1, b0);
  RnsPoly d2 = mul_ntt(ctx, a1, b1);
  from_ntt(ctx, d2);

  // Relinearize d2 * s^2 with the gadget decomposition of each residue
  // into base-2^w digits: d2 = sum_{i,t} digit_{i,t} * 2^(t w) * G_i (mod Q),
  // where G_i is the CRT idempotent of prime i.
  const std::size_t n = ctx.ring_dimension();
  const int w = HeContext::kDigitBits;
  const u64 mask = (u64{1} << w) - 1;
  RnsPoly digit = zero_poly(ctx, level);
  for (int i = 0; i <= level; ++i) {
    const auto& residue = d2.residues[i];
    for (int t = 0; t < ctx.digit_count(i); ++t) {
      for (std::size_t k = 0; k < n; ++k) {
        const u64 value = (residue[k] >> (t * w)) & mask;
        for (int j = 0; j <= level; ++j) digit.residues[j][k] = value;
      }
      to_ntt(ctx, digit);
      const auto& key = evk.relin[ctx.digit_offset(i) + t];
      mul_add_ntt(ctx, d0, digit, key[0]);
      mul_add_ntt(ctx, d1, digit, key[1]);
    }
  }
  from_ntt(ctx, d0);
  from_ntt(ctx, d1);
  return {std::move(d0), std::move(d1)};
}

RlwePayload multiply_scalar(const HeContext& ctx, const RlwePayload& a,
                            const BigInt& k, int level) {
  std::vector<u64> factors;
  for (int j = 0; j <= level; ++j) factors.push_back(reduce_to_word(k, ctx.prime(j)));
  RlwePayload out = a;
  scale_inplace(ctx, out.c0, factors);
  scale_inplace(ctx, out.c1, factors);
  return out;
}

RlwePayload rescale(const HeContext& ctx, const RlwePayload& a, int level) {
  RlwePayload out = a;
  rescale_poly(ctx, out.c0, level);
  rescale_poly(ctx, out.c1, level);
  return out;
}

RlwePayload drop(const RlwePayload& a, int target_level) {
  RlwePayload out = a;
  truncate(out.c0, target_level);
  truncate(out.c1, target_level);
  return out;
}

}  // namespace hetune::he::detail::rlwe
