#pragma once

// Binary formats for ciphertexts and key material.
//
// Ciphertext: 16-byte header of little-endian u32 (backend tag, level,
// scale_power, ring dimension; 1 for the reference backend), the exact scale
// as a little-endian f64, then each polynomial as a u64 limb count followed
// by that many little-endian u64 limbs. RLWE ciphertexts carry c0 and c1
// (residue-major, level+1 residues of n coefficients each); reference
// ciphertexts carry one limb array holding the encoded integer.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/keys.hpp"
#include "hetune/hecore/params.hpp"

namespace hetune::he {

using Bytes = std::vector<std::uint8_t>;

Bytes serialize(const Ciphertext& ct);
/// Validates the header and payload shape against ctx; throws FormatError.
Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> data,
                                  const HeContext& ctx);

Bytes serialize(const EvaluationKey& key);
EvaluationKey deserialize_evaluation_key(std::span<const std::uint8_t> data,
                                         const HeContext& ctx);

/// Secret coefficients followed by the evaluation key.
Bytes serialize(const SecretKeyMaterial& keys);
SecretKeyMaterial deserialize_secret_key(std::span<const std::uint8_t> data,
                                         const HeContext& ctx);

std::string base64_encode(std::span<const std::uint8_t> data);
Bytes base64_decode(std::string_view text);

nlohmann::json params_to_json(const HeParams& p);
/// Accepts either an explicit parameter object or {"preset": name}.
HeParams params_from_json(const nlohmann::json& j);

}  // namespace hetune::he
