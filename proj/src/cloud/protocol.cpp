#include "hetune/cloud/protocol.hpp"

#include <algorithm>
#include <istream>

#include <json.hpp>

#include "hetune/errors.hpp"

namespace hetune::cloud {

using nlohmann::json;

std::string Frame::to_json_line() const {
  json j_obj = {{"dir", dir},   {"k", k},       {"j", j},
                {"n", n},       {"kind", kind}, {"ciphertext", he::base64_encode(payload)}};
  return j_obj.dump();
}

Frame Frame::from_json_line(const std::string& line) {
  try {
    const json obj = json::parse(line);
    Frame f;
    f.dir = obj.at("dir").get<std::string>();
    f.k = obj.at("k").get<int>();
    f.j = obj.at("j").get<std::string>();
    f.n = obj.at("n").get<int>();
    f.kind = obj.at("kind").get<std::string>();
    f.payload = he::base64_decode(obj.at("ciphertext").get<std::string>());
    if (f.dir != "c2s" && f.dir != "s2c") throw FormatError("frame: bad direction");
    return f;
  } catch (const json::exception& e) {
    throw FormatError(std::string("frame: ") + e.what());
  }
}

Frame make_frame(std::string dir, int k, std::string j, int n, std::string kind,
                 he::Bytes payload) {
  return {std::move(dir), k, std::move(j), n, std::move(kind), std::move(payload)};
}

namespace {

std::string bytes_text(const he::Bytes& b) { return std::string(b.begin(), b.end()); }

}  // namespace

CloudEndpoint::CloudEndpoint(std::mt19937_64 mask_rng, std::function<int(int)> mask_source)
    : mask_rng_(std::move(mask_rng)), mask_source_(std::move(mask_source)) {}

std::vector<Frame> CloudEndpoint::handle(const Frame& f) {
  if (f.dir != "c2s") throw ProtocolError("cloud received a frame not addressed to it");
  if (finished_) throw ProtocolError("session already ended");

  if (f.kind == "params") {
    if (ctx_) throw ProtocolError("parameters sent twice");
    json pub;
    try {
      pub = json::parse(bytes_text(f.payload));
      ctx_ = he::HeContext::create(he::params_from_json(pub.at("he")));
      horizon_ = pub.at("N").get<int>();
    } catch (const json::exception& e) {
      throw ProtocolError(std::string("params frame: ") + e.what());
    }
    if (horizon_ < 2) throw ProtocolError("params frame: N must be at least 2");
    precomp_ = std::make_shared<CloudPrecomp>();
    have_d_.assign(4 * seeker::kMaskCount, false);
    have_step_.assign(4 * seeker::kMaskCount, false);
    return {};
  }
  if (!ctx_) throw ProtocolError("frame '" + f.kind + "' before params");

  auto ciphertext = [&] { return he::deserialize_ciphertext(f.payload, *ctx_); };
  auto table_slot = [&](std::vector<bool>& have) -> std::pair<int, int> {
    if (f.n < 0 || f.n >= 4 * seeker::kMaskCount) throw ProtocolError("table index out of range");
    have[f.n] = true;
    return {f.n / 4, f.n % 4};
  };

  if (f.kind == "evk") {
    auto evk = std::make_shared<const he::EvaluationKey>(
        he::deserialize_evaluation_key(f.payload, *ctx_));
    evaluator_ = std::make_shared<he::Evaluator>(ctx_, std::move(evk));
    return {};
  }
  if (f.kind == "pre_d") {
    auto [m, i] = table_slot(have_d_);
    precomp_->perturbation[m][i] = ciphertext();
    return {};
  }
  if (f.kind == "pre_step") {
    auto [m, i] = table_slot(have_step_);
    precomp_->step[m][i] = ciphertext();
    return {};
  }
  if (f.kind == "pre_inv_r") {
    precomp_->inv_r = ciphertext();
    have_inv_r_ = true;
    return {};
  }
  if (f.kind == "pre_one") {
    precomp_->one = ciphertext();
    have_one_ = true;
    return {};
  }
  if (f.kind == "pre_zero") {
    precomp_->zero = ciphertext();
    have_zero_ = true;
    return {};
  }
  if (f.kind == "setup_done") {
    const bool tables = std::all_of(have_d_.begin(), have_d_.end(), [](bool b) { return b; }) &&
                        std::all_of(have_step_.begin(), have_step_.end(), [](bool b) { return b; });
    if (!evaluator_ || !tables || !have_inv_r_ || !have_one_ || !have_zero_) {
      throw ProtocolError("setup incomplete");
    }
    session_ = std::make_unique<CloudSession>(evaluator_, precomp_, horizon_, mask_rng_);
    return {make_frame("s2c", -1, "", 0, "ready")};
  }
  if (!session_) throw ProtocolError("frame '" + f.kind + "' before setup_done");

  if (f.kind == "begin") {
    if (f.k != session_->iteration()) throw ProtocolError("begin: wrong iteration index");
    const CtVec4 d = mask_source_ ? session_->begin_iteration(mask_source_(f.k))
                                  : session_->begin_iteration();
    std::vector<Frame> out;
    for (int i = 0; i < 4; ++i) out.push_back(make_frame("s2c", f.k, "", i, "d", he::serialize(d[i])));
    return out;
  }
  if (f.kind == "y") {
    if (f.k != session_->iteration()) throw ProtocolError("y: wrong iteration index");
    if (f.j != "+" && f.j != "-") throw ProtocolError("y: run must be + or -");
    session_->ingest_sample(f.j == "+" ? Run::plus : Run::minus, f.n, ciphertext());
    return {};
  }
  if (f.kind == "finish") {
    if (f.k != session_->iteration()) throw ProtocolError("finish: wrong iteration index");
    const CtVec4 dtheta = session_->finish_iteration();
    std::vector<Frame> out;
    for (int i = 0; i < 4; ++i)
      out.push_back(make_frame("s2c", f.k, "", i, "dtheta", he::serialize(dtheta[i])));
    return out;
  }
  if (f.kind == "end") {
    finished_ = true;
    return {};
  }
  throw ProtocolError("unknown frame kind '" + f.kind + "'");
}

std::vector<Frame> read_transcript(std::istream& in) {
  std::vector<Frame> frames;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) frames.push_back(Frame::from_json_line(line));
  }
  return frames;
}

}  // namespace hetune::cloud
