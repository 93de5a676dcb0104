#include <array>
#include <exception>

#include <boost/asio.hpp>

#include "hetune/cloud/protocol.hpp"
#include "hetune/errors.hpp"

namespace hetune::cloud {

namespace asio = boost::asio;
using asio::ip::tcp;

namespace {

constexpr std::uint32_t kMaxFrameBytes = 1u << 30;

void write_frame(tcp::socket& socket, const Frame& frame) {
  const std::string line = frame.to_json_line();
  const auto size = static_cast<std::uint32_t>(line.size());
  std::array<std::uint8_t, 4> prefix{};
  for (int i = 0; i < 4; ++i) prefix[i] = static_cast<std::uint8_t>(size >> (8 * i));
  std::array<asio::const_buffer, 2> buffers{asio::buffer(prefix), asio::buffer(line)};
  asio::write(socket, buffers);
}

std::optional<Frame> read_frame(tcp::socket& socket) {
  std::array<std::uint8_t, 4> prefix{};
  boost::system::error_code ec;
  asio::read(socket, asio::buffer(prefix), ec);
  if (ec == asio::error::eof) return std::nullopt;
  if (ec) throw ProtocolError("tcp read failed: " + ec.message());
  std::uint32_t size = 0;
  for (int i = 0; i < 4; ++i) size |= std::uint32_t{prefix[i]} << (8 * i);
  if (size > kMaxFrameBytes) throw ProtocolError("tcp frame too large");
  std::string line(size, '\0');
  asio::read(socket, asio::buffer(line), ec);
  if (ec) throw ProtocolError("tcp read failed: " + ec.message());
  return Frame::from_json_line(line);
}

}  // namespace

void InProcessChannel::send(const Frame& frame) {
  for (auto& f : endpoint_.handle(frame)) inbox_.push_back(std::move(f));
}

Frame InProcessChannel::receive() {
  if (inbox_.empty()) throw ProtocolError("no reply pending from the cloud");
  Frame f = std::move(inbox_.front());
  inbox_.pop_front();
  return f;
}

RecordingChannel::RecordingChannel(Channel& inner, const std::string& path)
    : inner_(inner), out_(path, std::ios::trunc) {
  if (!out_) throw ConfigError("cannot open transcript file " + path);
}

void RecordingChannel::send(const Frame& frame) {
  out_ << frame.to_json_line() << '\n';
  inner_.send(frame);
}

Frame RecordingChannel::receive() {
  Frame f = inner_.receive();
  out_ << f.to_json_line() << '\n';
  return f;
}

struct TcpCloudServer::Impl {
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::unique_ptr<CloudEndpoint> endpoint;
  std::thread worker;
  std::exception_ptr failure;

  void serve() {
    try {
      tcp::socket socket(io);
      acceptor.accept(socket);
      while (!endpoint->finished()) {
        auto frame = read_frame(socket);
        if (!frame) break;
        for (const auto& reply : endpoint->handle(*frame)) write_frame(socket, reply);
      }
    } catch (...) {
      failure = std::current_exception();
    }
  }
};

TcpCloudServer::TcpCloudServer(std::unique_ptr<CloudEndpoint> endpoint)
    : impl_(std::make_unique<Impl>()) {
  impl_->endpoint = std::move(endpoint);
  const tcp::endpoint local(asio::ip::address_v4::loopback(), 0);
  impl_->acceptor.open(local.protocol());
  impl_->acceptor.bind(local);
  impl_->acceptor.listen(1);
  port_ = impl_->acceptor.local_endpoint().port();
  impl_->worker = std::thread([impl = impl_.get()] { impl->serve(); });
}

TcpCloudServer::~TcpCloudServer() {
  if (impl_ && impl_->worker.joinable()) {
    boost::system::error_code ec;
    impl_->acceptor.close(ec);
    impl_->worker.join();
  }
}

void TcpCloudServer::join() {
  if (impl_->worker.joinable()) impl_->worker.join();
  if (impl_->failure) std::rethrow_exception(impl_->failure);
}

struct TcpChannel::Impl {
  asio::io_context io;
  tcp::socket socket{io};
};

TcpChannel::TcpChannel(std::uint16_t port) : impl_(std::make_unique<Impl>()) {
  impl_->socket.connect(tcp::endpoint(asio::ip::address_v4::loopback(), port));
  impl_->socket.set_option(tcp::no_delay(true));
}

TcpChannel::~TcpChannel() = default;

void TcpChannel::send(const Frame& frame) { write_frame(impl_->socket, frame); }

Frame TcpChannel::receive() {
  auto f = read_frame(impl_->socket);
  if (!f) throw ProtocolError("cloud closed the connection");
  return *f;
}

}  // namespace hetune::cloud
