#pragma once

// Live capture through a Linux AF_PACKET socket. Compiled only when
// NPRINT_LIVE_CAPTURE is defined; needs CAP_NET_RAW at run time.

#include <string>

#include "nprint/error.hpp"
#include "nprint/source.hpp"

#if defined(NPRINT_LIVE_CAPTURE) && defined(__linux__)
#include <arpa/inet.h>
#include <linux/if_packet.h>
#include <net/ethernet.h>
#include <net/if.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#endif

namespace nprint {

#if defined(NPRINT_LIVE_CAPTURE) && defined(__linux__)

inline constexpr bool kLiveCaptureAvailable = true;

class LiveCapture final : public PacketSource {
 public:
  explicit LiveCapture(const std::string& device) : device_(device) {
    unsigned index = if_nametoindex(device.c_str());
    if (index == 0) throw io_error("no such capture device '" + device + "'");
    fd_ = ::socket(AF_PACKET, SOCK_RAW, htons(ETH_P_ALL));
    if (fd_ < 0) {
      throw io_error("cannot open capture socket on '" + device + "': " + std::strerror(errno));
    }
    sockaddr_ll addr{};
    addr.sll_family = AF_PACKET;
    addr.sll_protocol = htons(ETH_P_ALL);
    addr.sll_ifindex = static_cast<int>(index);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
      int err = errno;
      ::close(fd_);
      throw io_error("cannot bind to '" + device + "': " + std::strerror(err));
    }
  }

  LiveCapture(const LiveCapture&) = delete;
  LiveCapture& operator=(const LiveCapture&) = delete;
  ~LiveCapture() override {
    if (fd_ >= 0) ::close(fd_);
  }

  bool next(RawPacket& out) override {
    out.bytes.resize(65536);
    for (;;) {
      ssize_t n = ::recv(fd_, out.bytes.data(), out.bytes.size(), 0);
      if (n < 0 && errno == EINTR) continue;
      if (n < 0) throw io_error("capture on '" + device_ + "' failed: " + std::strerror(errno));
      if (n == 0) continue;
      timeval tv{};
      ::gettimeofday(&tv, nullptr);
      out.bytes.resize(static_cast<std::size_t>(n));
      out.timestamp = std::chrono::microseconds(std::int64_t{tv.tv_sec} * 1'000'000 + tv.tv_usec);
      out.link_type = LinkType::ethernet;
      out.origin = device_;
      return true;
    }
  }

  SourceStats stats() const override { return {}; }

 private:
  std::string device_;
  int fd_ = -1;
};

#else

inline constexpr bool kLiveCaptureAvailable = false;

class LiveCapture final : public PacketSource {
 public:
  explicit LiveCapture(const std::string& device) {
    throw usage_error("live capture on '" + device + "' is not supported by this build");
  }
  bool next(RawPacket&) override { return false; }
  SourceStats stats() const override { return {}; }
};

#endif

}  // namespace nprint
