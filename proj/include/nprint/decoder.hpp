#pragma once

// Reverse path: rows back to packet bytes. Variable-length regions are
// trimmed with in-band lengths only (IPv4 IHL, TCP data offset, IP total or
// payload length), so zero padding never leaks into the reconstruction.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nprint/config.hpp"
#include "nprint/encoder.hpp"
#include "nprint/error.hpp"
#include "nprint/layout.hpp"
#include "nprint/pcap.hpp"

namespace nprint {

struct DecodedPacket {
  std::vector<std::uint8_t> bytes;
  LinkType link_type = LinkType::raw_ip;
  std::chrono::microseconds timestamp{0};
};

enum class DecodeStatus { ok, empty, corrupt };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::ok;
  DecodedPacket packet;
  std::string reason;
};

namespace detail {

enum class RegionKind { fill, bits, mixed };

inline RegionKind classify(std::span<const std::int8_t> bits, std::int8_t fill) {
  std::size_t fills = static_cast<std::size_t>(std::count(bits.begin(), bits.end(), fill));
  if (fills == bits.size()) return RegionKind::fill;
  if (fills == 0) return RegionKind::bits;
  return RegionKind::mixed;
}

inline std::uint8_t byte_at(std::span<const std::int8_t> bits, std::size_t index) {
  std::uint8_t v = 0;
  for (std::size_t b = 0; b < 8; ++b) v = static_cast<std::uint8_t>(v << 1 | (bits[8 * index + b] & 1));
  return v;
}

inline void append_bytes(std::vector<std::uint8_t>& out, std::span<const std::int8_t> bits, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out.push_back(byte_at(bits, i));
}

}  // namespace detail

/// Reconstructs one packet. `row.bits` must follow `layout` unfiltered.
/// The fill value must not be 0 or 1, otherwise absence is ambiguous.
inline DecodeResult decode(const FingerprintRow& row, const Layout& layout, std::int8_t fill = -1) {
  DecodeResult result;
  auto corrupt = [&](std::string why) {
    result.status = DecodeStatus::corrupt;
    result.reason = std::move(why);
    return result;
  };
  if (fill == 0 || fill == 1) return corrupt("fill value 0/1 makes absent sections indistinguishable");
  if (row.bits.size() != layout.width()) {
    return corrupt("row has " + std::to_string(row.bits.size()) + " bits, layout expects " +
                   std::to_string(layout.width()));
  }
  std::span<const std::int8_t> bits = row.bits;

  std::array<bool, kSectionCount> present{};
  for (const auto& slice : layout.sections()) {
    auto region = bits.subspan(slice.bits.start, slice.bits.width);
    switch (detail::classify(region, fill)) {
      case detail::RegionKind::fill: break;
      case detail::RegionKind::bits: present[index_of(slice.section)] = true; break;
      case detail::RegionKind::mixed:
        return corrupt("section '" + std::string(section_name(slice.section)) + "' mixes fill and bits");
    }
  }
  bool any = std::any_of(present.begin(), present.end(), [](bool b) { return b; });
  if (!any) {
    result.status = DecodeStatus::empty;
    return result;
  }
  auto has = [&](Section s) { return present[index_of(s)]; };
  if (has(Section::ipv4) && has(Section::ipv6)) return corrupt("both IPv4 and IPv6 present");
  int transports = has(Section::tcp) + has(Section::udp) + has(Section::icmp);
  if (transports > 1) return corrupt("more than one transport header present");

  auto region = [&](Section s) {
    auto slice = layout.section_slice(s);
    return bits.subspan(slice.start, slice.width);
  };
  auto& out = result.packet.bytes;
  std::size_t ip_start = 0;
  std::optional<std::size_t> ip_end;  // end of the IP datagram per in-band length

  if (has(Section::eth)) {
    detail::append_bytes(out, region(Section::eth), 14);
    result.packet.link_type = LinkType::ethernet;
  }
  if (has(Section::ipv4)) {
    auto r = region(Section::ipv4);
    std::size_t ihl = detail::byte_at(r, 0) & 0x0f;
    if (ihl < 5) return corrupt("IPv4 header length " + std::to_string(ihl) + " below minimum 5");
    ip_start = out.size();
    detail::append_bytes(out, r, 4 * ihl);
    std::size_t total = static_cast<std::size_t>(detail::byte_at(r, 2)) << 8 | detail::byte_at(r, 3);
    ip_end = ip_start + total;
  } else if (has(Section::ipv6)) {
    auto r = region(Section::ipv6);
    ip_start = out.size();
    detail::append_bytes(out, r, 40);
    std::size_t plen = static_cast<std::size_t>(detail::byte_at(r, 4)) << 8 | detail::byte_at(r, 5);
    ip_end = ip_start + 40 + plen;
  }
  if (has(Section::tcp)) {
    auto r = region(Section::tcp);
    std::size_t doff = detail::byte_at(r, 12) >> 4;
    if (doff < 5) return corrupt("TCP data offset " + std::to_string(doff) + " below minimum 5");
    detail::append_bytes(out, r, 4 * doff);
  } else if (has(Section::udp)) {
    detail::append_bytes(out, region(Section::udp), 8);
  } else if (has(Section::icmp)) {
    detail::append_bytes(out, region(Section::icmp), 8);
  }
  if (has(Section::payload)) {
    std::size_t available = layout.payload_bytes();
    std::size_t n = available;
    if (ip_end) n = *ip_end > out.size() ? std::min(available, *ip_end - out.size()) : 0;
    detail::append_bytes(out, region(Section::payload), n);
  }
  if (row.abs_ts) result.packet.timestamp = *row.abs_ts;
  return result;
}

struct DecodeStats {
  std::size_t decoded = 0;
  std::size_t empty = 0;
  std::size_t corrupt = 0;
};

/// Streams decoded rows into a pcap file.
class PcapDecoder {
 public:
  PcapDecoder(Layout layout, std::int8_t fill, const std::filesystem::path& out)
      : layout_(std::move(layout)), fill_(fill), writer_(out) {}

  /// Returns the failure reason for corrupt rows, empty otherwise.
  std::optional<std::string> push(const FingerprintRow& row) {
    auto result = decode(row, layout_, fill_);
    switch (result.status) {
      case DecodeStatus::ok:
        writer_.write(result.packet.bytes, result.packet.link_type, result.packet.timestamp);
        ++stats_.decoded;
        return std::nullopt;
      case DecodeStatus::empty:
        ++stats_.empty;
        return std::nullopt;
      case DecodeStatus::corrupt:
        ++stats_.corrupt;
        return result.reason;
    }
    return std::nullopt;
  }

  void close() { writer_.close(); }
  const DecodeStats& stats() const { return stats_; }

 private:
  Layout layout_;
  std::int8_t fill_;
  PcapWriter writer_;
  DecodeStats stats_;
};

inline void write_pcap(std::span<const DecodedPacket> packets, const std::filesystem::path& path) {
  PcapWriter writer(path);
  for (const auto& p : packets) writer.write(p.bytes, p.link_type, p.timestamp);
  writer.close();
}

}  // namespace nprint
