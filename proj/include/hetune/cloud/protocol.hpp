#pragma once

#include <cstdint>
#include <deque>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "hetune/cloud/session.hpp"
#include "hetune/hecore/serialize.hpp"

namespace hetune::cloud {

/// One protocol message. `payload` is a serialized ciphertext or key for
/// cryptographic frames and a UTF-8 JSON document for the public setup frame.
///
/// kinds, client to cloud: params, evk, pre_d, pre_step (n = 4 m + i),
/// pre_inv_r, pre_one, pre_zero, setup_done, begin, y (j = "+" or "-"),
/// finish, end. Cloud to client: ready, d, dtheta (n = component).
struct Frame {
  std::string dir;  // "c2s" or "s2c"
  int k = -1;       // iteration, -1 during setup
  std::string j;    // "+", "-" or empty
  int n = 0;
  std::string kind;
  he::Bytes payload;

  /// Single JSON line {dir, k, j, n, kind, ciphertext: base64(payload)}.
  std::string to_json_line() const;
  static Frame from_json_line(const std::string& line);

  friend bool operator==(const Frame&, const Frame&) = default;
};

Frame make_frame(std::string dir, int k, std::string j, int n, std::string kind,
                 he::Bytes payload = {});

/// Frame handler of the cloud role. Setup frames build the evaluator and
/// the constant tables; afterwards frames drive a CloudSession.
class CloudEndpoint {
 public:
  /// mask_source, if set, overrides the session's own mask draw for
  /// iteration k (used to replay recorded sessions).
  explicit CloudEndpoint(std::mt19937_64 mask_rng,
                         std::function<int(int)> mask_source = {});

  std::vector<Frame> handle(const Frame& frame);

  bool finished() const { return finished_; }
  const CloudSession* session() const { return session_.get(); }
  const CloudPrecomp* precomp() const { return precomp_.get(); }
  const he::HeContext* context() const { return ctx_.get(); }

 private:
  std::mt19937_64 mask_rng_;
  std::function<int(int)> mask_source_;
  std::shared_ptr<const he::HeContext> ctx_;
  std::shared_ptr<he::Evaluator> evaluator_;
  std::shared_ptr<CloudPrecomp> precomp_;
  std::vector<bool> have_d_, have_step_;
  bool have_inv_r_ = false, have_one_ = false, have_zero_ = false;
  int horizon_ = 0;
  std::unique_ptr<CloudSession> session_;
  bool finished_ = false;
};

class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const Frame& frame) = 0;
  virtual Frame receive() = 0;
};

/// Direct calls into an endpoint living in the same process.
class InProcessChannel : public Channel {
 public:
  explicit InProcessChannel(CloudEndpoint& endpoint) : endpoint_(endpoint) {}
  void send(const Frame& frame) override;
  Frame receive() override;

 private:
  CloudEndpoint& endpoint_;
  std::deque<Frame> inbox_;
};

/// Appends every frame passing through `inner` to a JSON-lines transcript.
class RecordingChannel : public Channel {
 public:
  RecordingChannel(Channel& inner, const std::string& path);
  void send(const Frame& frame) override;
  Frame receive() override;

 private:
  Channel& inner_;
  std::ofstream out_;
};

/// Loopback TCP carrying frames as u32 little-endian length + JSON line.
class TcpCloudServer {
 public:
  /// Binds 127.0.0.1 on an ephemeral port and serves one client on a
  /// background thread until it sends "end" or disconnects.
  explicit TcpCloudServer(std::unique_ptr<CloudEndpoint> endpoint);
  ~TcpCloudServer();

  std::uint16_t port() const { return port_; }
  /// Waits for the serving thread; rethrows its failure, if any.
  void join();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
};

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(std::uint16_t port);
  ~TcpChannel() override;
  void send(const Frame& frame) override;
  Frame receive() override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<Frame> read_transcript(std::istream& in);

}  // namespace hetune::cloud
