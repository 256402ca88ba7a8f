#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "nprint/protocol.hpp"

namespace nprint {

/// Grouping key written into the first column of every row.
enum class IndexMode : int {
  src_ip = 0,
  dst_ip = 1,
  src_port = 2,
  dst_port = 3,
  flow = 4,
};

constexpr std::string_view index_column_name(IndexMode mode) {
  switch (mode) {
    case IndexMode::src_ip: return "src_ip";
    case IndexMode::dst_ip: return "dst_ip";
    case IndexMode::src_port: return "src_port";
    case IndexMode::dst_port: return "dst_port";
    case IndexMode::flow: return "flow";
  }
  return "src_ip";
}

inline std::optional<IndexMode> index_mode_from_int(long value) {
  if (value < 0 || value > 4) return std::nullopt;
  return static_cast<IndexMode>(value);
}

inline std::optional<IndexMode> index_mode_from_column(std::string_view name) {
  for (int i = 0; i <= 4; ++i) {
    auto mode = static_cast<IndexMode>(i);
    if (index_column_name(mode) == name) return mode;
  }
  return std::nullopt;
}

struct EncodingConfig {
  /// Header sections to emit, indexed by Section. The payload slot is ignored;
  /// payload is enabled by payload_bytes > 0.
  std::array<bool, kSectionCount> sections{};
  std::size_t payload_bytes = 0;
  std::int8_t fill = -1;
  bool absolute_ts = false;
  bool relative_ts = false;
  IndexMode index_mode = IndexMode::src_ip;
  std::optional<std::string> bit_filter;
  bool verbose = false;
  bool stats = false;

  bool enabled(Section s) const {
    return s == Section::payload ? payload_bytes > 0 : sections[index_of(s)];
  }

  EncodingConfig& enable(Section s, bool on = true) {
    if (s != Section::payload) sections[index_of(s)] = on;
    return *this;
  }

  bool any_section() const {
    for (Section s : kCanonicalOrder) {
      if (enabled(s)) return true;
    }
    return false;
  }

  bool degenerate() const { return !any_section() && !absolute_ts && !relative_ts; }
};

inline EncodingConfig make_config(std::initializer_list<Section> sections,
                                  std::size_t payload_bytes = 0) {
  EncodingConfig config;
  for (Section s : sections) config.enable(s);
  config.payload_bytes = payload_bytes;
  return config;
}

}  // namespace nprint
