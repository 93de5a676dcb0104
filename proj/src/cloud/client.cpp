#include "hetune/cloud/client.hpp"

#include <chrono>

#include <json.hpp>

#include "hetune/errors.hpp"
#include "hetune/hecore/serialize.hpp"

namespace hetune::cloud {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

he::ChaChaRng make_rng(const std::optional<std::uint64_t>& seed, std::uint64_t tweak) {
  return seed ? he::ChaChaRng(*seed ^ tweak) : he::ChaChaRng::from_os();
}

}  // namespace

TuningClient::TuningClient(std::shared_ptr<const he::HeContext> ctx,
                           std::shared_ptr<const he::SecretKeyMaterial> keys, he::ChaChaRng rng,
                           const plant::TransferFunction& plant, seeker::SeekerConfig cfg)
    : ctx_(ctx),
      keys_(keys),
      encryptor_(ctx, keys, std::move(rng)),
      decryptor_(ctx, keys),
      experiment_(plant, cfg),
      cfg_(cfg),
      noise_rng_(seeker::Streams::from_seed(cfg.seed).noise) {}

void TuningClient::setup(Channel& channel) {
  const nlohmann::json pub = {{"he", he::params_to_json(ctx_->params())},
                              {"N", experiment_.horizon()}};
  const std::string text = pub.dump();
  channel.send(make_frame("c2s", -1, "", 0, "params", he::Bytes(text.begin(), text.end())));
  channel.send(make_frame("c2s", -1, "", 0, "evk", he::serialize(*keys_->evaluation_key())));

  const CloudPrecomp pre = precompute(encryptor_, cfg_);
  for (int m = 0; m < seeker::kMaskCount; ++m) {
    for (int i = 0; i < 4; ++i) {
      channel.send(make_frame("c2s", -1, "", 4 * m + i, "pre_d", he::serialize(pre.perturbation[m][i])));
      channel.send(make_frame("c2s", -1, "", 4 * m + i, "pre_step", he::serialize(pre.step[m][i])));
    }
  }
  channel.send(make_frame("c2s", -1, "", 0, "pre_inv_r", he::serialize(pre.inv_r)));
  channel.send(make_frame("c2s", -1, "", 0, "pre_one", he::serialize(pre.one)));
  channel.send(make_frame("c2s", -1, "", 0, "pre_zero", he::serialize(pre.zero)));
  channel.send(make_frame("c2s", -1, "", 0, "setup_done"));
  const Frame ready = channel.receive();
  if (ready.kind != "ready") throw ProtocolError("cloud did not acknowledge setup");
}

CtVec4 TuningClient::receive_vector(Channel& channel, const std::string& kind, int k) {
  CtVec4 out;
  for (int i = 0; i < 4; ++i) {
    const Frame f = channel.receive();
    if (f.dir != "s2c" || f.kind != kind || f.k != k || f.n != i) {
      throw ProtocolError("unexpected reply '" + f.kind + "' from the cloud");
    }
    out[i] = he::deserialize_ciphertext(f.payload, *ctx_);
  }
  return out;
}

seeker::TuningTrace TuningClient::tune(Channel& channel, const seeker::Theta& theta0) {
  theta0.validate();
  seeker::TuningTrace trace;
  trace.initial = theta0;
  seeker::Theta theta = theta0;
  const int N = experiment_.horizon();

  auto decrypt4 = [&](const CtVec4& cts) {
    const auto start = Clock::now();
    seeker::Vec4 v{};
    for (int i = 0; i < 4; ++i) v[i] = decryptor_.decrypt(cts[i]);
    timings_.decrypt_ms += ms_since(start);
    timings_.decryptions += 4;
    return v;
  };
  auto stream_run = [&](int k, const char* j, const seeker::Theta& t) {
    const auto y = experiment_.response(t, noise_rng_);
    for (int n = 0; n < N; ++n) {
      const auto start = Clock::now();
      const he::Ciphertext ct = encryptor_.encrypt(y[n]);
      timings_.encrypt_ms += ms_since(start);
      ++timings_.encryptions;
      channel.send(make_frame("c2s", k, j, n, "y", he::serialize(ct)));
    }
    return seeker::cost(y, cfg_.r_hat, experiment_.weights());
  };

  for (int k = 0; k < cfg_.k_max; ++k) {
    const auto start = Clock::now();
    channel.send(make_frame("c2s", k, "", 0, "begin"));
    const seeker::Vec4 d = decrypt4(receive_vector(channel, "d", k));

    seeker::IterationRecord rec;
    rec.k = k;
    rec.theta = theta;
    for (int i = 0; i < 4; ++i) rec.mask.h[i] = d[i] < 0.0 ? -1 : 1;
    try {
      const auto [plus, minus] = pid::perturb(theta, d);
      rec.j_plus = stream_run(k, "+", plus);
      rec.j_minus = stream_run(k, "-", minus);
      channel.send(make_frame("c2s", k, "", 0, "finish"));
      rec.dtheta = decrypt4(receive_vector(channel, "dtheta", k));
      timings_.round_trip_ms += ms_since(start);
      theta = pid::update(theta, rec.dtheta);
    } catch (const PositivityViolation& e) {
      trace.halted = true;
      trace.halt_reason = "iteration " + std::to_string(k) + ": " + e.what();
      break;
    }
    trace.records.push_back(rec);
  }
  channel.send(make_frame("c2s", static_cast<int>(trace.records.size()), "", 0, "end"));
  trace.final_theta = theta;
  return trace;
}

EncryptedRunResult run_encrypted_tuning(const plant::TransferFunction& plant,
                                        const seeker::Theta& theta0,
                                        const seeker::SeekerConfig& cfg,
                                        const EncryptedRunOptions& options) {
  auto ctx = he::HeContext::create(options.params);
  he::ChaChaRng key_rng = make_rng(options.key_seed, 0x6b657967656eULL);
  auto keys = std::make_shared<const he::SecretKeyMaterial>(he::keygen(*ctx, key_rng));
  TuningClient client(ctx, keys, make_rng(options.key_seed, 0x656e63727970ULL), plant, cfg);
  const auto mask_rng = seeker::Streams::from_seed(cfg.seed).masks;

  auto run = [&](Channel& wire) {
    std::optional<RecordingChannel> recorder;
    if (options.transcript_path) recorder.emplace(wire, *options.transcript_path);
    Channel& channel = recorder ? static_cast<Channel&>(*recorder) : wire;
    client.setup(channel);
    return client.tune(channel, theta0);
  };

  EncryptedRunResult result;
  if (options.transport == Transport::tcp) {
    TcpCloudServer server(std::make_unique<CloudEndpoint>(mask_rng));
    {
      TcpChannel wire(server.port());
      result.trace = run(wire);
    }
    server.join();
  } else {
    CloudEndpoint endpoint(mask_rng);
    InProcessChannel wire(endpoint);
    result.trace = run(wire);
  }
  result.timings = client.timings();
  return result;
}

}  // namespace hetune::cloud
