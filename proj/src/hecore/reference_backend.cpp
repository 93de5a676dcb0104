#include "backend_impl.hpp"

namespace hetune::he::detail::reference {

using encoding::centered;
using encoding::reduce;

ReferencePayload encrypt(const HeContext& ctx, const BigInt& message,
                         int level) {
  return reduce(message, ctx.modulus_at(level));
}

BigInt decrypt(const HeContext& ctx, const ReferencePayload& p, int level) {
  return reduce(p, ctx.modulus_at(level));
}

ReferencePayload add(const HeContext& ctx, const ReferencePayload& a,
                     const ReferencePayload& b, int level) {
  return reduce(a + b, ctx.modulus_at(level));
}

ReferencePayload sub(const HeContext& ctx, const ReferencePayload& a,
                     const ReferencePayload& b, int level) {
  return reduce(a - b, ctx.modulus_at(level));
}

ReferencePayload multiply(const HeContext& ctx, const ReferencePayload& a,
                          const ReferencePayload& b, int level) {
  return reduce(a * b, ctx.modulus_at(level));
}

ReferencePayload multiply_scalar(const HeContext& ctx, const ReferencePayload& a,
                                 const BigInt& k, int level) {
  return reduce(a * k, ctx.modulus_at(level));
}

ReferencePayload rescale(const HeContext& ctx, const ReferencePayload& a,
                         int level) {
  const BigInt value = centered(a, ctx.modulus_at(level));
  const BigInt q = ctx.prime(level);
  // Round to nearest, ties away from zero.
  const BigInt magnitude = value < 0 ? BigInt(-value) : value;
  BigInt quotient = (2 * magnitude + q) / (2 * q);
  if (value < 0) quotient = -quotient;
  return reduce(quotient, ctx.modulus_at(level - 1));
}

ReferencePayload drop(const HeContext& ctx, const ReferencePayload& a,
                      int target_level) {
  // Q_target divides Q_level, so reducing the residue is exact.
  return reduce(a, ctx.modulus_at(target_level));
}

}  // namespace hetune::he::detail::reference
