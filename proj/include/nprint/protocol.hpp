#pragma once

// Per-protocol field tables. Every encoded row is laid out from these tables,
// so they are the single source of truth for widths, offsets and column names.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace nprint {

enum class Section : std::uint8_t { eth, ipv4, ipv6, tcp, udp, icmp, payload };

inline constexpr std::size_t kSectionCount = 7;

/// Order in which enabled sections appear inside a row.
inline constexpr std::array<Section, kSectionCount> kCanonicalOrder{
    Section::eth, Section::ipv4, Section::ipv6, Section::tcp,
    Section::udp, Section::icmp, Section::payload};

constexpr std::size_t index_of(Section s) { return static_cast<std::size_t>(s); }

constexpr std::string_view section_name(Section s) {
  switch (s) {
    case Section::eth: return "eth";
    case Section::ipv4: return "ipv4";
    case Section::ipv6: return "ipv6";
    case Section::tcp: return "tcp";
    case Section::udp: return "udp";
    case Section::icmp: return "icmp";
    case Section::payload: return "payload";
  }
  return "?";
}

inline std::optional<Section> section_from_name(std::string_view name) {
  for (Section s : kCanonicalOrder) {
    if (section_name(s) == name) return s;
  }
  return std::nullopt;
}

/// One header field. Offsets are in bits from the start of the section,
/// MSB-first within each byte.
struct FieldSpec {
  std::string_view name;
  std::uint16_t bit_width = 0;
  std::uint16_t wire_bit_offset = 0;
};

namespace detail {

template <std::size_t N>
constexpr std::array<FieldSpec, N> with_offsets(std::array<FieldSpec, N> fields) {
  std::uint16_t offset = 0;
  for (auto& f : fields) {
    f.wire_bit_offset = offset;
    offset = static_cast<std::uint16_t>(offset + f.bit_width);
  }
  return fields;
}

template <std::size_t N>
constexpr std::size_t total_bits(const std::array<FieldSpec, N>& fields) {
  std::size_t sum = 0;
  for (const auto& f : fields) sum += f.bit_width;
  return sum;
}

template <std::size_t N>
constexpr bool contiguous(const std::array<FieldSpec, N>& fields) {
  std::size_t expect = 0;
  for (const auto& f : fields) {
    if (f.wire_bit_offset != expect || f.bit_width == 0) return false;
    expect += f.bit_width;
  }
  return true;
}

}  // namespace detail

// clang-format off
inline constexpr auto kEthFields = detail::with_offsets(std::array<FieldSpec, 3>{{
    {"dhost", 48}, {"shost", 48}, {"type", 16}}});

inline constexpr auto kIpv4Fields = detail::with_offsets(std::array<FieldSpec, 15>{{
    {"ver", 4}, {"hl", 4}, {"tos", 8}, {"tl", 16}, {"id", 16},
    {"rbit", 1}, {"df", 1}, {"mf", 1}, {"foff", 13},
    {"ttl", 8}, {"proto", 8}, {"cksum", 16}, {"src", 32}, {"dst", 32},
    {"opt", 320}}});

inline constexpr auto kIpv6Fields = detail::with_offsets(std::array<FieldSpec, 8>{{
    {"ver", 4}, {"tc", 8}, {"fl", 20}, {"len", 16}, {"nh", 8}, {"hl", 8},
    {"src", 128}, {"dst", 128}}});

inline constexpr auto kTcpFields = detail::with_offsets(std::array<FieldSpec, 19>{{
    {"sprt", 16}, {"dprt", 16}, {"seq", 32}, {"ackn", 32},
    {"doff", 4}, {"res", 3}, {"ns", 1}, {"cwr", 1}, {"ece", 1}, {"urg", 1},
    {"ackf", 1}, {"psh", 1}, {"rst", 1}, {"syn", 1}, {"fin", 1},
    {"wsize", 16}, {"cksum", 16}, {"urp", 16}, {"opt", 320}}});

inline constexpr auto kUdpFields = detail::with_offsets(std::array<FieldSpec, 4>{{
    {"sport", 16}, {"dport", 16}, {"len", 16}, {"cksum", 16}}});

inline constexpr auto kIcmpFields = detail::with_offsets(std::array<FieldSpec, 4>{{
    {"type", 8}, {"code", 8}, {"cksum", 16}, {"roh", 32}}});
// clang-format on

/// Payload width depends on the configured byte count; the offset/width here
/// are placeholders and Layout substitutes 8 * payload_bytes.
inline constexpr std::array<FieldSpec, 1> kPayloadFields{{{"payload", 0, 0}}};

/// Maximum header length in bytes; payload is unbounded here.
constexpr std::size_t max_header_bytes(Section s) {
  switch (s) {
    case Section::eth: return 14;
    case Section::ipv4: return 60;
    case Section::ipv6: return 40;
    case Section::tcp: return 60;
    case Section::udp: return 8;
    case Section::icmp: return 8;
    case Section::payload: return 0;
  }
  return 0;
}

constexpr std::size_t max_bits(Section s, std::size_t payload_bytes) {
  return s == Section::payload ? 8 * payload_bytes : 8 * max_header_bytes(s);
}

static_assert(detail::total_bits(kEthFields) == max_bits(Section::eth, 0));
static_assert(detail::total_bits(kIpv4Fields) == max_bits(Section::ipv4, 0));
static_assert(detail::total_bits(kIpv6Fields) == max_bits(Section::ipv6, 0));
static_assert(detail::total_bits(kTcpFields) == max_bits(Section::tcp, 0));
static_assert(detail::total_bits(kUdpFields) == max_bits(Section::udp, 0));
static_assert(detail::total_bits(kIcmpFields) == max_bits(Section::icmp, 0));
static_assert(detail::contiguous(kEthFields) && detail::contiguous(kIpv4Fields) &&
              detail::contiguous(kIpv6Fields) && detail::contiguous(kTcpFields) &&
              detail::contiguous(kUdpFields) && detail::contiguous(kIcmpFields));
// fixed part + 320-bit options region
static_assert(kIpv4Fields.back().wire_bit_offset == 160 && kIpv4Fields.back().bit_width == 320);
static_assert(kTcpFields.back().wire_bit_offset == 160 && kTcpFields.back().bit_width == 320);

inline std::span<const FieldSpec> fields_of(Section s) {
  switch (s) {
    case Section::eth: return kEthFields;
    case Section::ipv4: return kIpv4Fields;
    case Section::ipv6: return kIpv6Fields;
    case Section::tcp: return kTcpFields;
    case Section::udp: return kUdpFields;
    case Section::icmp: return kIcmpFields;
    case Section::payload: return kPayloadFields;
  }
  return {};
}

/// Column prefix of a field: `<section>_<field>`, except payload bits which
/// are plain `payload`.
inline std::string column_prefix(Section s, const FieldSpec& f) {
  if (s == Section::payload) return "payload";
  std::string out{section_name(s)};
  out += '_';
  out += f.name;
  return out;
}

inline std::optional<FieldSpec> find_field(Section s, std::string_view name) {
  for (const auto& f : fields_of(s)) {
    if (f.name == name) return f;
  }
  return std::nullopt;
}

}  // namespace nprint
