#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nprint/config.hpp"
#include "nprint/error.hpp"
#include "nprint/protocol.hpp"

namespace nprint {

/// Position of a run of bits inside a row.
struct BitSlice {
  std::size_t start = 0;
  std::size_t width = 0;

  friend bool operator==(const BitSlice&, const BitSlice&) = default;
};

struct SectionSlice {
  Section section;
  BitSlice bits;
};

/// Resolved row layout for one EncodingConfig. Immutable after construction.
class Layout {
 public:
  Layout() : Layout(EncodingConfig{}) {}

  explicit Layout(const EncodingConfig& config)
      : index_mode_(config.index_mode),
        absolute_ts_(config.absolute_ts),
        relative_ts_(config.relative_ts),
        payload_bytes_(config.payload_bytes) {
    std::size_t offset = 0;
    for (Section s : kCanonicalOrder) {
      if (!config.enabled(s)) continue;
      std::size_t width = max_bits(s, payload_bytes_);
      section_offset_[index_of(s)] = offset;
      sections_.push_back({s, {offset, width}});
      offset += width;
    }
    width_ = offset;
  }

  /// Number of bit columns (timestamps and the index column excluded).
  std::size_t width() const { return width_; }
  std::size_t payload_bytes() const { return payload_bytes_; }
  IndexMode index_mode() const { return index_mode_; }
  bool absolute_ts() const { return absolute_ts_; }
  bool relative_ts() const { return relative_ts_; }

  std::span<const SectionSlice> sections() const { return sections_; }

  bool enabled(Section s) const { return section_offset_[index_of(s)] != kAbsent; }

  BitSlice section_slice(Section s) const {
    if (!enabled(s)) {
      throw usage_error("section '" + std::string(section_name(s)) + "' is not enabled");
    }
    return {section_offset_[index_of(s)], max_bits(s, payload_bytes_)};
  }

  /// Accepts either the bare field name (`ttl`) or the column prefix (`ipv4_ttl`).
  BitSlice field_slice(Section s, std::string_view field) const {
    BitSlice section = section_slice(s);
    std::string_view bare = field;
    std::string_view sname = section_name(s);
    if (s != Section::payload && bare.size() > sname.size() + 1 &&
        bare.substr(0, sname.size()) == sname && bare[sname.size()] == '_') {
      bare.remove_prefix(sname.size() + 1);
    }
    if (s == Section::payload && bare == "payload") return section;
    for (const auto& f : fields_of(s)) {
      if (f.name == bare) return {section.start + f.wire_bit_offset, f.bit_width};
    }
    throw usage_error("unknown field '" + std::string(field) + "' in section '" +
                      std::string(sname) + "'");
  }

  std::vector<std::string> bit_column_names() const {
    std::vector<std::string> names;
    names.reserve(width_);
    for (const auto& slice : sections_) {
      if (slice.section == Section::payload) {
        for (std::size_t i = 0; i < slice.bits.width; ++i) names.push_back("payload_" + std::to_string(i));
        continue;
      }
      for (const auto& f : fields_of(slice.section)) {
        std::string prefix = column_prefix(slice.section, f);
        for (std::size_t i = 0; i < f.bit_width; ++i) names.push_back(prefix + "_" + std::to_string(i));
      }
    }
    return names;
  }

  /// Index column, optional timestamp columns, then every bit column.
  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    names.reserve(width_ + 3);
    names.emplace_back(index_column_name(index_mode_));
    if (absolute_ts_) names.emplace_back("abs_ts");
    if (relative_ts_) names.emplace_back("rel_ts");
    for (auto& n : bit_column_names()) names.push_back(std::move(n));
    return names;
  }

 private:
  static constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

  IndexMode index_mode_;
  bool absolute_ts_;
  bool relative_ts_;
  std::size_t payload_bytes_;
  std::size_t width_ = 0;
  std::vector<SectionSlice> sections_;
  std::array<std::size_t, kSectionCount> section_offset_{kAbsent, kAbsent, kAbsent, kAbsent,
                                                         kAbsent, kAbsent, kAbsent};
};

inline std::size_t width(const EncodingConfig& config) { return Layout(config).width(); }

inline std::vector<std::string> column_names(const EncodingConfig& config) {
  return Layout(config).column_names();
}

/// Decomposition of a bit column name back into its layout coordinates.
struct ColumnRef {
  Section section;
  FieldSpec field;
  std::size_t bit = 0;
};

/// Parses `<section>_<field>_<bit>` or `payload_<bit>`. Returns nullopt for
/// names that no layout can produce.
inline std::optional<ColumnRef> parse_bit_column(std::string_view name) {
  auto last = name.rfind('_');
  if (last == std::string_view::npos || last + 1 == name.size()) return std::nullopt;
  std::size_t bit = 0;
  for (char c : name.substr(last + 1)) {
    if (c < '0' || c > '9') return std::nullopt;
    bit = bit * 10 + static_cast<std::size_t>(c - '0');
    if (bit > (1u << 24)) return std::nullopt;
  }
  std::string_view prefix = name.substr(0, last);
  if (prefix == "payload") return ColumnRef{Section::payload, kPayloadFields[0], bit};
  auto sep = prefix.find('_');
  if (sep == std::string_view::npos) return std::nullopt;
  auto section = section_from_name(prefix.substr(0, sep));
  if (!section || *section == Section::payload) return std::nullopt;
  auto field = find_field(*section, prefix.substr(sep + 1));
  if (!field || bit >= field->bit_width) return std::nullopt;
  return ColumnRef{*section, *field, bit};
}

}  // namespace nprint
