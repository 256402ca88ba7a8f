#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nprint/protocol.hpp"

namespace nprint {

enum class LinkType : std::uint8_t { ethernet, raw_ip };

/// A captured frame as read from a source, before any header resolution.
struct RawPacket {
  std::chrono::microseconds timestamp{0};
  std::vector<std::uint8_t> bytes;
  LinkType link_type = LinkType::ethernet;
  /// File path, interface name, or the per-line index of a hex dump.
  std::string origin;
};

struct ByteRange {
  std::size_t offset = 0;
  std::size_t length = 0;

  friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

namespace ether_type {
inline constexpr std::uint16_t ipv4 = 0x0800;
inline constexpr std::uint16_t ipv6 = 0x86dd;
}  // namespace ether_type

namespace ip_proto {
inline constexpr std::uint8_t icmp = 1;
inline constexpr std::uint8_t tcp = 6;
inline constexpr std::uint8_t udp = 17;
}  // namespace ip_proto

inline std::uint16_t load_be16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>((b[at] << 8) | b[at + 1]);
}

/// RawPacket plus the byte ranges of every header that was fully captured.
struct ParsedPacket {
  RawPacket raw;
  std::array<std::optional<ByteRange>, kSectionCount> sections{};
  bool well_formed = true;

  bool has(Section s) const { return sections[index_of(s)].has_value(); }
  const std::optional<ByteRange>& range(Section s) const { return sections[index_of(s)]; }

  std::span<const std::uint8_t> bytes(Section s) const {
    const auto& r = range(s);
    if (!r) return {};
    return std::span<const std::uint8_t>(raw.bytes).subspan(r->offset, r->length);
  }

  std::span<const std::uint8_t> network_header() const {
    if (has(Section::ipv4)) return bytes(Section::ipv4);
    return bytes(Section::ipv6);
  }

  std::optional<std::uint8_t> ip_protocol() const {
    if (has(Section::ipv4)) return bytes(Section::ipv4)[9];
    if (has(Section::ipv6)) return bytes(Section::ipv6)[6];
    return std::nullopt;
  }

  std::span<const std::uint8_t> src_address() const {
    if (has(Section::ipv4)) return bytes(Section::ipv4).subspan(12, 4);
    if (has(Section::ipv6)) return bytes(Section::ipv6).subspan(8, 16);
    return {};
  }

  std::span<const std::uint8_t> dst_address() const {
    if (has(Section::ipv4)) return bytes(Section::ipv4).subspan(16, 4);
    if (has(Section::ipv6)) return bytes(Section::ipv6).subspan(24, 16);
    return {};
  }

  std::optional<std::uint16_t> src_port() const {
    if (has(Section::tcp)) return load_be16(bytes(Section::tcp), 0);
    if (has(Section::udp)) return load_be16(bytes(Section::udp), 0);
    return std::nullopt;
  }

  std::optional<std::uint16_t> dst_port() const {
    if (has(Section::tcp)) return load_be16(bytes(Section::tcp), 2);
    if (has(Section::udp)) return load_be16(bytes(Section::udp), 2);
    return std::nullopt;
  }
};

namespace detail {

inline void resolve_transport(ParsedPacket& p, std::uint8_t proto, std::size_t at) {
  const auto& b = p.raw.bytes;
  const std::size_t avail = b.size() - at;
  auto claim = [&](Section s, std::size_t len) {
    p.sections[index_of(s)] = ByteRange{at, len};
    p.sections[index_of(Section::payload)] = ByteRange{at + len, avail - len};
  };
  switch (proto) {
    case ip_proto::tcp: {
      if (avail < 20) break;
      std::size_t len = 4u * (b[at + 12] >> 4);
      if (len < 20 || len > avail) break;
      claim(Section::tcp, len);
      return;
    }
    case ip_proto::udp:
      if (avail < 8) break;
      claim(Section::udp, 8);
      return;
    case ip_proto::icmp:
      if (avail < 8) break;
      claim(Section::icmp, 8);
      return;
    default:
      p.sections[index_of(Section::payload)] = ByteRange{at, avail};
      return;
  }
  p.well_formed = false;
}

inline void resolve_ipv4(ParsedPacket& p, std::size_t at) {
  const auto& b = p.raw.bytes;
  const std::size_t avail = b.size() - at;
  if (avail < 20) {
    p.well_formed = false;
    return;
  }
  std::size_t len = 4u * (b[at] & 0x0f);
  if (len < 20 || len > avail) {
    p.well_formed = false;
    return;
  }
  p.sections[index_of(Section::ipv4)] = ByteRange{at, len};
  const std::uint16_t frag_offset = load_be16(b, at + 6) & 0x1fff;
  if (frag_offset != 0) {
    p.sections[index_of(Section::payload)] = ByteRange{at + len, avail - len};
    return;
  }
  resolve_transport(p, b[at + 9], at + len);
}

inline void resolve_ipv6(ParsedPacket& p, std::size_t at) {
  const std::size_t avail = p.raw.bytes.size() - at;
  if (avail < 40) {
    p.well_formed = false;
    return;
  }
  p.sections[index_of(Section::ipv6)] = ByteRange{at, 40};
  resolve_transport(p, p.raw.bytes[at + 6], at + 40);
}

inline void resolve_ip(ParsedPacket& p, std::size_t at) {
  const auto& b = p.raw.bytes;
  if (at >= b.size()) {
    p.sections[index_of(Section::payload)] = ByteRange{at, 0};
    return;
  }
  switch (b[at] >> 4) {
    case 4: resolve_ipv4(p, at); break;
    case 6: resolve_ipv6(p, at); break;
    default: p.sections[index_of(Section::payload)] = ByteRange{at, b.size() - at}; break;
  }
}

}  // namespace detail

/// Recomputes the section map of `p` from p.raw. Reuses p's storage.
inline void resolve_sections(ParsedPacket& p) {
  p.sections = {};
  p.well_formed = true;
  const auto& b = p.raw.bytes;
  if (p.raw.link_type == LinkType::raw_ip) {
    detail::resolve_ip(p, 0);
    return;
  }
  if (b.size() < 14) {
    p.well_formed = false;
    return;
  }
  p.sections[index_of(Section::eth)] = ByteRange{0, 14};
  const std::uint16_t type = load_be16(b, 12);
  if (type == ether_type::ipv4) {
    detail::resolve_ipv4(p, 14);
  } else if (type == ether_type::ipv6) {
    detail::resolve_ipv6(p, 14);
  } else {
    p.sections[index_of(Section::payload)] = ByteRange{14, b.size() - 14};
  }
}

inline ParsedPacket parse(RawPacket raw) {
  ParsedPacket p;
  p.raw = std::move(raw);
  resolve_sections(p);
  return p;
}

}  // namespace nprint
