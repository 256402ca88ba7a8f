#pragma once

// Classic libpcap file format, read and write. No libpcap dependency.
//
//   Global header: 24 bytes (magic, version, thiszone, sigfigs, snaplen, network)
//   Per record:    16 bytes (ts_sec, ts_frac, incl_len, orig_len) + incl_len bytes

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "nprint/error.hpp"
#include "nprint/source.hpp"

namespace nprint {

namespace pcap {

inline constexpr std::uint32_t kMagicMicros = 0xa1b2c3d4;
inline constexpr std::uint32_t kMagicNanos = 0xa1b23c4d;
inline constexpr std::uint32_t kLinkEthernet = 1;
inline constexpr std::uint32_t kLinkRaw = 101;
inline constexpr std::uint32_t kLinkRawAlt = 12;
inline constexpr std::uint32_t kLinkIpv4 = 228;
inline constexpr std::uint32_t kLinkIpv6 = 229;
inline constexpr std::uint32_t kDefaultSnaplen = 262144;

inline std::uint32_t bswap32(std::uint32_t v) { return __builtin_bswap32(v); }

inline std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

inline void store_le32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
  p[2] = static_cast<std::uint8_t>(v >> 16);
  p[3] = static_cast<std::uint8_t>(v >> 24);
}

inline std::optional<LinkType> link_type_from(std::uint32_t network) {
  switch (network) {
    case kLinkEthernet: return LinkType::ethernet;
    case kLinkRaw:
    case kLinkRawAlt:
    case kLinkIpv4:
    case kLinkIpv6: return LinkType::raw_ip;
    default: return std::nullopt;
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace pcap

/// Streams records from a classic pcap file. Holds one record in memory.
class PcapReader final : public PacketSource {
 public:
  explicit PcapReader(const std::filesystem::path& path) : origin_(path.string()) {
    file_.reset(std::fopen(path.c_str(), "rb"));
    if (!file_) throw io_error("cannot open pcap '" + origin_ + "'");
    std::setvbuf(file_.get(), nullptr, _IOFBF, 1 << 16);
    std::array<std::uint8_t, 24> header{};
    if (std::fread(header.data(), 1, header.size(), file_.get()) != header.size()) {
      throw format_error("'" + origin_ + "': missing pcap global header");
    }
    std::uint32_t magic = pcap::load_le32(header.data());
    if (magic == pcap::kMagicMicros || magic == pcap::kMagicNanos) {
      swap_ = false;
    } else if (pcap::bswap32(magic) == pcap::kMagicMicros ||
               pcap::bswap32(magic) == pcap::kMagicNanos) {
      swap_ = true;
      magic = pcap::bswap32(magic);
    } else {
      throw format_error("'" + origin_ + "': not a pcap file (bad magic)");
    }
    nanos_ = magic == pcap::kMagicNanos;
    std::uint32_t network = load(header.data() + 20);
    auto link = pcap::link_type_from(network & 0x0fffffff);
    if (!link) {
      throw format_error("'" + origin_ + "': unsupported link type " + std::to_string(network));
    }
    link_type_ = *link;
    snaplen_ = load(header.data() + 16);
  }

  bool next(RawPacket& out) override {
    while (!done_) {
      std::array<std::uint8_t, 16> rec{};
      std::size_t got = std::fread(rec.data(), 1, rec.size(), file_.get());
      if (got == 0) {
        done_ = true;
        return false;
      }
      if (got != rec.size()) {
        ++stats_.truncated;
        done_ = true;
        return false;
      }
      const std::uint32_t sec = load(rec.data());
      const std::uint32_t frac = load(rec.data() + 4);
      const std::uint32_t incl = load(rec.data() + 8);
      if (incl > std::max(snaplen_, pcap::kDefaultSnaplen)) {
        throw format_error("'" + origin_ + "': record length " + std::to_string(incl) +
                           " exceeds snaplen");
      }
      out.bytes.resize(incl);
      if (incl != 0 && std::fread(out.bytes.data(), 1, incl, file_.get()) != incl) {
        ++stats_.truncated;
        done_ = true;
        return false;
      }
      if (incl == 0) {
        ++stats_.malformed;
        continue;
      }
      std::int64_t micros = nanos_ ? frac / 1000 : frac;
      out.timestamp = std::chrono::microseconds(static_cast<std::int64_t>(sec) * 1'000'000 + micros);
      out.link_type = link_type_;
      if (out.origin != origin_) out.origin = origin_;
      return true;
    }
    return false;
  }

  SourceStats stats() const override { return stats_; }
  LinkType link_type() const { return link_type_; }

 private:
  std::uint32_t load(const std::uint8_t* p) const {
    std::uint32_t v = pcap::load_le32(p);
    return swap_ ? pcap::bswap32(v) : v;
  }

  pcap::FilePtr file_;
  std::string origin_;
  bool swap_ = false;
  bool nanos_ = false;
  bool done_ = false;
  std::uint32_t snaplen_ = 0;
  LinkType link_type_ = LinkType::ethernet;
  SourceStats stats_;
};

/// Writes a microsecond-resolution, little-endian classic pcap. The link type
/// is fixed by the first packet (raw-ip when the file stays empty); a later
/// packet with a different link type is an error.
class PcapWriter {
 public:
  explicit PcapWriter(const std::filesystem::path& path) : path_(path.string()) {
    file_.reset(std::fopen(path.c_str(), "wb"));
    if (!file_) throw io_error("cannot open '" + path_ + "' for writing");
  }

  PcapWriter(const PcapWriter&) = delete;
  PcapWriter& operator=(const PcapWriter&) = delete;

  ~PcapWriter() {
    try {
      close();
    } catch (...) {
    }
  }

  void write(std::span<const std::uint8_t> bytes, LinkType link, std::chrono::microseconds ts) {
    if (!link_) {
      link_ = link;
      write_header();
    } else if (*link_ != link) {
      throw format_error("'" + path_ + "': cannot mix Ethernet and raw-IP packets in one pcap");
    }
    const auto count = ts.count();
    std::int64_t sec = count / 1'000'000;
    std::int64_t usec = count % 1'000'000;
    if (usec < 0) {
      usec += 1'000'000;
      sec -= 1;
    }
    std::array<std::uint8_t, 16> rec{};
    pcap::store_le32(rec.data(), static_cast<std::uint32_t>(sec));
    pcap::store_le32(rec.data() + 4, static_cast<std::uint32_t>(usec));
    pcap::store_le32(rec.data() + 8, static_cast<std::uint32_t>(bytes.size()));
    pcap::store_le32(rec.data() + 12, static_cast<std::uint32_t>(bytes.size()));
    put(rec.data(), rec.size());
    put(bytes.data(), bytes.size());
    ++count_;
  }

  void close() {
    if (!file_) return;
    if (!link_) {
      link_ = LinkType::raw_ip;
      write_header();
    }
    std::FILE* f = file_.release();
    if (std::fclose(f) != 0) throw io_error("error closing '" + path_ + "'");
  }

  std::size_t count() const { return count_; }

 private:
  void write_header() {
    std::array<std::uint8_t, 24> header{};
    pcap::store_le32(header.data(), pcap::kMagicMicros);
    header[4] = 2;  // version 2.4
    header[6] = 4;
    pcap::store_le32(header.data() + 16, pcap::kDefaultSnaplen);
    pcap::store_le32(header.data() + 20,
                     *link_ == LinkType::ethernet ? pcap::kLinkEthernet : pcap::kLinkRaw);
    put(header.data(), header.size());
  }

  void put(const void* data, std::size_t n) {
    if (n != 0 && std::fwrite(data, 1, n, file_.get()) != n) {
      throw io_error("write to '" + path_ + "' failed");
    }
  }

  pcap::FilePtr file_;
  std::string path_;
  std::optional<LinkType> link_;
  std::size_t count_ = 0;
};

}  // namespace nprint
