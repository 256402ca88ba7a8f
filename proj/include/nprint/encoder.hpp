#pragma once

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nprint/config.hpp"
#include "nprint/error.hpp"
#include "nprint/layout.hpp"
#include "nprint/packet.hpp"

namespace nprint {

/// One packet as a fixed-width ternary vector plus its key and timestamps.
struct FingerprintRow {
  std::string index_key;
  std::optional<std::chrono::microseconds> abs_ts;
  std::optional<std::chrono::microseconds> rel_ts;
  std::vector<std::int8_t> bits;

  friend bool operator==(const FingerprintRow&, const FingerprintRow&) = default;
};

namespace detail {

/// Byte value -> its 8 bits as int8 {0,1}, MSB first, packed for memcpy.
inline const std::array<std::array<std::int8_t, 8>, 256>& bit_table() {
  static const auto table = [] {
    std::array<std::array<std::int8_t, 8>, 256> t{};
    for (int v = 0; v < 256; ++v) {
      for (int b = 0; b < 8; ++b) t[v][b] = static_cast<std::int8_t>((v >> (7 - b)) & 1);
    }
    return t;
  }();
  return table;
}

inline void write_bits(std::span<const std::uint8_t> bytes, std::span<std::int8_t> out) {
  const auto& table = bit_table();
  std::size_t n = std::min(bytes.size(), out.size() / 8);
  for (std::size_t i = 0; i < n; ++i) std::memcpy(out.data() + 8 * i, table[bytes[i]].data(), 8);
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(8 * n), out.end(), std::int8_t{0});
}

}  // namespace detail

/// Writes the bit columns of `pkt` into `out` (size == layout.width()).
/// Present sections are copied MSB-first and zero-padded to their maximum
/// width; absent sections are filled with `fill`.
inline void encode_bits(const ParsedPacket& pkt, const Layout& layout, std::int8_t fill,
                        std::span<std::int8_t> out) {
  for (const auto& slice : layout.sections()) {
    auto region = out.subspan(slice.bits.start, slice.bits.width);
    if (pkt.has(slice.section)) {
      detail::write_bits(pkt.bytes(slice.section), region);
    } else {
      std::fill(region.begin(), region.end(), fill);
    }
  }
}

inline std::string format_address(std::span<const std::uint8_t> addr) {
  char buf[INET6_ADDRSTRLEN];
  if (addr.size() == 4) return inet_ntop(AF_INET, addr.data(), buf, sizeof(buf));
  if (addr.size() == 16) return inet_ntop(AF_INET6, addr.data(), buf, sizeof(buf));
  return "none";
}

inline std::string format_port(std::optional<std::uint16_t> port) {
  return port ? std::to_string(*port) : std::string("none");
}

/// Direction-independent connection key `ipA_portA_ipB_portB_proto`, with
/// endpoint A the smaller of the two (address bytes, then port).
inline std::string flow_key(const ParsedPacket& pkt) {
  auto proto = pkt.ip_protocol();
  if (!proto) return "none";
  struct Endpoint {
    std::span<const std::uint8_t> addr;
    std::optional<std::uint16_t> port;
  };
  Endpoint a{pkt.src_address(), pkt.src_port()};
  Endpoint b{pkt.dst_address(), pkt.dst_port()};
  auto less = [](const Endpoint& x, const Endpoint& y) {
    if (std::lexicographical_compare(x.addr.begin(), x.addr.end(), y.addr.begin(), y.addr.end())) return true;
    if (!std::equal(x.addr.begin(), x.addr.end(), y.addr.begin(), y.addr.end())) return false;
    return x.port < y.port;
  };
  if (less(b, a)) std::swap(a, b);
  return format_address(a.addr) + "_" + format_port(a.port) + "_" + format_address(b.addr) + "_" +
         format_port(b.port) + "_" + std::to_string(*proto);
}

inline std::string index_key(const ParsedPacket& pkt, IndexMode mode) {
  switch (mode) {
    case IndexMode::src_ip: return format_address(pkt.src_address());
    case IndexMode::dst_ip: return format_address(pkt.dst_address());
    case IndexMode::src_port: return format_port(pkt.src_port());
    case IndexMode::dst_port: return format_port(pkt.dst_port());
    case IndexMode::flow: return flow_key(pkt);
  }
  return "none";
}

/// Column-name pattern that removes matching bit columns. The pattern must
/// match the whole column name (`ipv4_src.*` drops every `ipv4_src_<i>`).
class BitFilter {
 public:
  BitFilter() = default;

  BitFilter(const Layout& layout, const std::string& pattern) : active_(true) {
    std::regex re;
    try {
      re = std::regex(pattern, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw usage_error("bad bit filter '" + pattern + "': " + e.what());
    }
    auto names = layout.bit_column_names();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!std::regex_match(names[i], re)) {
        keep_.push_back(static_cast<std::uint32_t>(i));
        kept_names_.push_back(std::move(names[i]));
      }
    }
  }

  bool active() const { return active_; }
  std::span<const std::uint32_t> kept_indices() const { return keep_; }
  const std::vector<std::string>& kept_names() const { return kept_names_; }

  /// Compacts `bits` in place; survivors keep their relative order.
  void apply(std::vector<std::int8_t>& bits) const {
    if (!active_) return;
    for (std::size_t j = 0; j < keep_.size(); ++j) bits[j] = bits[keep_[j]];
    bits.resize(keep_.size());
  }

 private:
  bool active_ = false;
  std::vector<std::uint32_t> keep_;
  std::vector<std::string> kept_names_;
};

inline FingerprintRow apply_bit_filter(FingerprintRow row, const BitFilter& filter) {
  filter.apply(row.bits);
  return row;
}

struct EncodeStats {
  std::size_t encoded = 0;
  std::size_t malformed = 0;
};

/// Stateful per-stream encoder: owns the layout, the bit filter and the
/// relative-timestamp baseline (previous encoded packet, first = 0).
class Encoder {
 public:
  explicit Encoder(EncodingConfig config) : config_(std::move(config)), layout_(config_) {
    if (config_.bit_filter) filter_ = BitFilter(layout_, *config_.bit_filter);
  }

  const EncodingConfig& config() const { return config_; }
  const Layout& layout() const { return layout_; }
  const BitFilter& bit_filter() const { return filter_; }

  /// Bit columns after filtering.
  std::vector<std::string> bit_column_names() const {
    return filter_.active() ? filter_.kept_names() : layout_.bit_column_names();
  }

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    names.emplace_back(index_column_name(config_.index_mode));
    if (config_.absolute_ts) names.emplace_back("abs_ts");
    if (config_.relative_ts) names.emplace_back("rel_ts");
    for (auto& n : bit_column_names()) names.push_back(std::move(n));
    return names;
  }

  std::size_t output_width() const { return filter_.active() ? filter_.kept_indices().size() : layout_.width(); }

  /// Returns false (and counts it) when `pkt` is not well formed.
  bool encode(const ParsedPacket& pkt, FingerprintRow& out) {
    if (!pkt.well_formed) {
      ++stats_.malformed;
      return false;
    }
    out.index_key = index_key(pkt, config_.index_mode);
    out.abs_ts.reset();
    out.rel_ts.reset();
    if (config_.absolute_ts) out.abs_ts = pkt.raw.timestamp;
    if (config_.relative_ts) {
      out.rel_ts = previous_ ? pkt.raw.timestamp - *previous_ : std::chrono::microseconds(0);
    }
    previous_ = pkt.raw.timestamp;
    out.bits.resize(layout_.width());
    encode_bits(pkt, layout_, config_.fill, out.bits);
    filter_.apply(out.bits);
    ++stats_.encoded;
    return true;
  }

  std::optional<FingerprintRow> encode(const ParsedPacket& pkt) {
    FingerprintRow row;
    if (!encode(pkt, row)) return std::nullopt;
    return row;
  }

  const EncodeStats& stats() const { return stats_; }

 private:
  EncodingConfig config_;
  Layout layout_;
  BitFilter filter_;
  std::optional<std::chrono::microseconds> previous_;
  EncodeStats stats_;
};

}  // namespace nprint
