#pragma once

#include <array>

#include "hetune/hecore/ciphertext.hpp"
#include "hetune/hecore/evaluator.hpp"
#include "hetune/seeker.hpp"

namespace hetune::cloud {

using he::Ciphertext;
using CtVec4 = std::array<Ciphertext, 4>;

/// Encrypted constants the cloud needs for every iteration. Produced once by
/// the key holder and handed to the cloud; all entries sit at the top level.
///
/// Entries are encrypted at scales chosen so that each product in the
/// per-sample circuit lands exactly back on scale c:
///   inv_r at scale q_L (cancels the rescale of y * inv_r),
///   step[m][i] at scale q_{L-3} (cancels the rescale of the final product),
///   everything else at scale c.
struct CloudPrecomp {
  std::array<CtVec4, seeker::kMaskCount> perturbation;  // Enc(gamma h_i)
  std::array<CtVec4, seeker::kMaskCount> step;          // Enc(-alpha / (2 gamma h_i))
  Ciphertext inv_r;                                     // Enc(1 / r_hat)
  Ciphertext one;                                       // Enc(1)
  Ciphertext zero;                                      // Enc(0)
};

/// Level the accumulators and the difference J+ - J- live on.
int accumulator_level(int top_level);

CloudPrecomp precompute(he::Encryptor& encryptor, const seeker::SeekerConfig& cfg);

}  // namespace hetune::cloud
