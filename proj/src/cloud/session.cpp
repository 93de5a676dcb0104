#include "hetune/cloud/session.hpp"

#include "hetune/errors.hpp"

namespace hetune::cloud {

CloudSession::CloudSession(std::shared_ptr<const he::Evaluator> evaluator,
                           std::shared_ptr<const CloudPrecomp> precomp, int horizon,
                           std::mt19937_64 mask_rng)
    : eval_(std::move(evaluator)),
      pre_(std::move(precomp)),
      horizon_(horizon),
      mask_rng_(std::move(mask_rng)) {
  if (!eval_ || !pre_) throw ConfigError("cloud session needs an evaluator and constants");
  weights_ = seeker::trapezoid_weights(horizon_);
  for (auto& w : weights_) w /= horizon_;
  const int top = eval_->context().top_level();
  if (pre_->one.level() != top || pre_->zero.level() != top || pre_->inv_r.level() != top) {
    throw ProtocolError("precomputed constants must be at the top level");
  }
  one_dropped_ = eval_->drop_to_level(pre_->one, std::max(top - 1, 0));
  zero_dropped_ = eval_->drop_to_level(pre_->zero, accumulator_level(top));
}

CtVec4 CloudSession::begin_iteration() {
  return begin_iteration(seeker::sample_mask_index(mask_rng_));
}

CtVec4 CloudSession::begin_iteration(int mask_index) {
  if (phase_ != Phase::idle) throw ProtocolError("begin_iteration: iteration in progress");
  if (mask_index < 0 || mask_index >= seeker::kMaskCount)
    throw ProtocolError("begin_iteration: mask index out of range");
  mask_ = mask_index;
  acc_plus_ = zero_dropped_;
  acc_minus_ = zero_dropped_;
  run_ = Run::plus;
  next_n_ = 0;
  phase_ = Phase::collecting;
  return pre_->perturbation[mask_];
}

void CloudSession::ingest_sample(Run run, int n, const Ciphertext& y) {
  if (phase_ != Phase::collecting) throw ProtocolError("ingest_sample: no run in progress");
  if (run != run_ || n != next_n_) {
    throw ProtocolError("ingest_sample: expected sample " + std::to_string(next_n_) +
                        " of the " + (run_ == Run::plus ? "+" : "-") + " run");
  }
  const int top = eval_->context().top_level();
  if (y.level() != top || y.scale_power() != 1 || y.scale() != pre_->one.scale()) {
    throw ProtocolError("ingest_sample: y(n) must be a fresh top-level ciphertext");
  }
  const Ciphertext ratio = eval_->multiply(y, pre_->inv_r);
  const Ciphertext e = eval_->sub(one_dropped_, ratio);
  const Ciphertext e2 = eval_->multiply(e, e);
  const Ciphertext term = eval_->multiply_plain(e2, weights_[n], pre_->one.scale());
  Ciphertext& acc = run_ == Run::plus ? acc_plus_ : acc_minus_;
  acc = eval_->add(acc, term);

  if (++next_n_ == horizon_) {
    next_n_ = 0;
    if (run_ == Run::plus) {
      run_ = Run::minus;
    } else {
      phase_ = Phase::ready;
    }
  }
}

CtVec4 CloudSession::finish_iteration() {
  if (phase_ != Phase::ready) throw ProtocolError("finish_iteration: runs incomplete");
  const Ciphertext diff = eval_->sub(acc_plus_, acc_minus_);
  CtVec4 out;
  for (int i = 0; i < 4; ++i) {
    const Ciphertext step = eval_->drop_to_level(pre_->step[mask_][i], diff.level());
    out[i] = eval_->multiply(diff, step);
  }
  phase_ = Phase::idle;
  ++k_;
  return out;
}

const Ciphertext& CloudSession::accumulator(Run run) const {
  return run == Run::plus ? acc_plus_ : acc_minus_;
}

std::vector<RetainedValue> CloudSession::retained_values() const {
  std::vector<RetainedValue> out;
  for (const auto& row : pre_->perturbation)
    for (const auto& ct : row) out.emplace_back(&ct);
  for (const auto& row : pre_->step)
    for (const auto& ct : row) out.emplace_back(&ct);
  out.emplace_back(&pre_->inv_r);
  out.emplace_back(&pre_->one);
  out.emplace_back(&pre_->zero);
  out.emplace_back(&one_dropped_);
  out.emplace_back(&zero_dropped_);
  out.emplace_back(&acc_plus_);
  out.emplace_back(&acc_minus_);
  out.emplace_back(PublicScalar{"N", static_cast<double>(horizon_)});
  for (std::size_t n = 0; n < weights_.size(); ++n) {
    out.emplace_back(PublicScalar{"w" + std::to_string(n) + "/N", weights_[n]});
  }
  out.emplace_back(PublicScalar{"k", static_cast<double>(k_)});
  out.emplace_back(PublicScalar{"mask_index", static_cast<double>(mask_)});
  out.emplace_back(PublicScalar{"sample_counter", static_cast<double>(next_n_)});
  return out;
}

}  // namespace hetune::cloud
