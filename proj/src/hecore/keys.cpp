#include "hetune/hecore/keys.hpp"

#include <random>

#include "hetune/errors.hpp"
#include "rlwe_internal.hpp"

namespace hetune::he {

RnsPoly secret_to_ntt(const HeContext& ctx, const std::vector<std::int8_t>& s) {
  if (s.size() != ctx.ring_dimension()) {
    throw BackendMismatch("secret key ring dimension does not match context");
  }
  RnsPoly p = detail::lift_small(ctx, s, ctx.top_level());
  detail::to_ntt(ctx, p);
  return p;
}

SecretKeyMaterial keygen(const HeContext& ctx, ChaChaRng& rng) {
  if (ctx.backend() == BackendKind::reference) {
    auto evaluation = std::make_shared<EvaluationKey>();
    evaluation->backend = BackendKind::reference;
    return SecretKeyMaterial(BackendKind::reference, {}, {}, evaluation);
  }

  const std::size_t n = ctx.ring_dimension();
  const int top = ctx.top_level();

  std::vector<std::int8_t> s(n);
  std::uniform_int_distribution<int> ternary(-1, 1);
  for (auto& c : s) c = static_cast<std::int8_t>(ternary(rng));
  RnsPoly s_ntt = secret_to_ntt(ctx, s);
  const RnsPoly s2_ntt = detail::mul_ntt(ctx, s_ntt, s_ntt);

  auto evaluation = std::make_shared<EvaluationKey>();
  evaluation->backend = BackendKind::rlwe;
  evaluation->relin.reserve(ctx.total_digits());
  for (int i = 0; i <= top; ++i) {
    const u64 qi = ctx.prime(i);
    for (int t = 0; t < ctx.digit_count(i); ++t) {
      RnsPoly a = detail::sample_uniform(ctx, top, rng);
      RnsPoly b = detail::lift_small(
          ctx, detail::sample_gaussian(n, ctx.params().error_std, rng), top);
      detail::to_ntt(ctx, b);
      detail::sub_inplace(ctx, b, detail::mul_ntt(ctx, a, s_ntt));
      // Gadget term lives only in residue i: 2^(t w) s^2.
      const u64 factor = (u64{1} << (t * HeContext::kDigitBits)) % qi;
      auto& bi = b.residues[i];
      const auto& s2i = s2_ntt.residues[i];
      for (std::size_t k = 0; k < n; ++k) {
        bi[k] = add_mod(bi[k], mul_mod(s2i[k], factor, qi), qi);
      }
      evaluation->relin.push_back({std::move(b), std::move(a)});
    }
  }
  return SecretKeyMaterial(BackendKind::rlwe, std::move(s), std::move(s_ntt),
                           std::move(evaluation));
}

}  // namespace hetune::he
