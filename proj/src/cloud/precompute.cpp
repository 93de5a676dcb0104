#include "hetune/cloud/precompute.hpp"

#include <algorithm>

namespace hetune::cloud {

int accumulator_level(int top_level) { return std::max(top_level - 3, 0); }

CloudPrecomp precompute(he::Encryptor& encryptor, const seeker::SeekerConfig& cfg) {
  cfg.validate();
  const auto& ctx = encryptor.context();
  const int top = ctx.top_level();
  const double c = ctx.params().scale_c;
  const double step_scale = static_cast<double>(ctx.prime(accumulator_level(top)));

  CloudPrecomp pre;
  for (int m = 0; m < seeker::kMaskCount; ++m) {
    const auto mask = seeker::Mask::from_index(m);
    for (int i = 0; i < 4; ++i) {
      const double d = cfg.gamma * mask.h[i];
      pre.perturbation[m][i] = encryptor.encrypt(d, top, c);
      pre.step[m][i] = encryptor.encrypt(-cfg.alpha / (2.0 * d), top, step_scale);
    }
  }
  pre.inv_r = encryptor.encrypt(1.0 / cfg.r_hat, top, static_cast<double>(ctx.prime(top)));
  pre.one = encryptor.encrypt(1.0, top, c);
  pre.zero = encryptor.encrypt(0.0, top, c);
  return pre;
}

}  // namespace hetune::cloud
