#include <algorithm>
#include <istream>
#include <map>

#include "hetune/cloud/client.hpp"
#include "hetune/errors.hpp"

namespace hetune::cloud {

ReplayReport replay_transcript(std::istream& transcript) {
  const std::vector<Frame> frames = read_transcript(transcript);

  // Recover each iteration's mask from the Enc(d) the cloud sent back.
  std::map<int, he::Bytes> table;
  for (const auto& f : frames)
    if (f.dir == "c2s" && f.kind == "pre_d") table[f.n] = f.payload;
  std::map<int, int> masks;
  std::map<int, std::vector<int>> candidates;
  for (const auto& f : frames) {
    if (f.dir != "s2c" || f.kind != "d") continue;
    std::vector<int> match;
    for (int m = 0; m < seeker::kMaskCount; ++m) {
      auto it = table.find(4 * m + f.n);
      if (it != table.end() && it->second == f.payload) match.push_back(m);
    }
    auto [pos, fresh] = candidates.emplace(f.k, match);
    if (!fresh) {
      std::vector<int> both;
      for (int m : pos->second)
        if (std::find(match.begin(), match.end(), m) != match.end()) both.push_back(m);
      pos->second = both;
    }
  }
  for (const auto& [k, match] : candidates) {
    if (match.size() != 1) {
      return {0, 0, false, "cannot identify the mask of iteration " + std::to_string(k)};
    }
    masks[k] = match.front();
  }

  CloudEndpoint endpoint(std::mt19937_64(0), [&](int k) {
    auto it = masks.find(k);
    if (it == masks.end()) throw ProtocolError("replay: no recorded mask for iteration " + std::to_string(k));
    return it->second;
  });

  ReplayReport report;
  std::vector<Frame> produced;
  std::vector<const Frame*> recorded;
  try {
    for (const auto& f : frames) {
      if (f.dir == "s2c") {
        recorded.push_back(&f);
        continue;
      }
      for (auto& reply : endpoint.handle(f)) produced.push_back(std::move(reply));
      if (f.kind == "finish") ++report.iterations;
    }
  } catch (const Error& e) {
    report.detail = std::string("cloud rejected a recorded frame: ") + e.what();
    return report;
  }

  if (produced.size() != recorded.size()) {
    report.detail = "reply count differs: recorded " + std::to_string(recorded.size()) +
                    ", replayed " + std::to_string(produced.size());
    return report;
  }
  for (std::size_t i = 0; i < produced.size(); ++i) {
    ++report.frames_compared;
    if (produced[i].to_json_line() != recorded[i]->to_json_line()) {
      report.detail = "reply " + std::to_string(i) + " (" + recorded[i]->kind + ", k=" +
                      std::to_string(recorded[i]->k) + ") differs";
      return report;
    }
  }
  report.identical = true;
  report.detail = "all cloud replies reproduced byte for byte";
  return report;
}

}  // namespace hetune::cloud
