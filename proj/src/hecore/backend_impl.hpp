#pragma once

// Payload-level arithmetic of the two backends. Level, scale and operand
// compatibility checks live in the public Encryptor/Decryptor/Evaluator; the
// functions here assume validated inputs.

#include "hetune/encoding.hpp"
#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/keys.hpp"
#include "hetune/hecore/prng.hpp"

namespace hetune::he::detail {

using encoding::BigInt;

namespace reference {

ReferencePayload encrypt(const HeContext& ctx, const BigInt& message, int level);
BigInt decrypt(const HeContext& ctx, const ReferencePayload& p, int level);
ReferencePayload add(const HeContext& ctx, const ReferencePayload& a,
                     const ReferencePayload& b, int level);
ReferencePayload sub(const HeContext& ctx, const ReferencePayload& a,
                     const ReferencePayload& b, int level);
ReferencePayload multiply(const HeContext& ctx, const ReferencePayload& a,
                          const ReferencePayload& b, int level);
ReferencePayload multiply_scalar(const HeContext& ctx, const ReferencePayload& a,
                                 const BigInt& k, int level);
ReferencePayload rescale(const HeContext& ctx, const ReferencePayload& a,
                         int level);
ReferencePayload drop(const HeContext& ctx, const ReferencePayload& a,
                      int target_level);

}  // namespace reference

namespace rlwe {

RlwePayload encrypt(const HeContext& ctx, const SecretKeyMaterial& sk,
                    const BigInt& message, int level, ChaChaRng& rng);
/// Constant coefficient of c0 + c1 s as an integer in [0, Q_level).
BigInt decrypt(const HeContext& ctx, const SecretKeyMaterial& sk,
               const RlwePayload& p, int level);
RlwePayload add(const HeContext& ctx, const RlwePayload& a,
                const RlwePayload& b);
RlwePayload sub(const HeContext& ctx, const RlwePayload& a,
                const RlwePayload& b);
/// Tensor product followed by relinearization back to two components.
RlwePayload multiply(const HeContext& ctx, const EvaluationKey& evk,
                     const RlwePayload& a, const RlwePayload& b, int level);
RlwePayload multiply_scalar(const HeContext& ctx, const RlwePayload& a,
                            const BigInt& k, int level);
/// Divides by the top prime q_level with rounding, dropping that residue.
RlwePayload rescale(const HeContext& ctx, const RlwePayload& a, int level);
RlwePayload drop(const RlwePayload& a, int target_level);

}  // namespace rlwe

}  // namespace hetune::he::detail
