#pragma once

// Tabular text format for encoded rows:
//   - comma separator, '\n' terminator, no quoting
//   - header line of column names, index column first
//   - bit values as decimal integers, timestamps as decimal seconds with six
//     fractional digits
//   - commas and line breaks inside index keys are rewritten to '_'

#include <charconv>
#include <chrono>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nprint/config.hpp"
#include "nprint/encoder.hpp"
#include "nprint/error.hpp"
#include "nprint/layout.hpp"

namespace nprint {

inline std::string sanitize_key(std::string_view key) {
  std::string out(key);
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = '_';
  }
  return out;
}

inline void append_timestamp(std::string& out, std::chrono::microseconds ts) {
  auto v = ts.count();
  if (v < 0) {
    out += '-';
    v = -v;
  }
  out += std::to_string(v / 1'000'000);
  out += '.';
  auto frac = std::to_string(v % 1'000'000);
  out.append(6 - frac.size(), '0');
  out += frac;
}

inline std::string format_timestamp(std::chrono::microseconds ts) {
  std::string out;
  append_timestamp(out, ts);
  return out;
}

/// Exact inverse of format_timestamp; also accepts integers and fewer than
/// six fractional digits.
inline std::optional<std::chrono::microseconds> parse_timestamp(std::string_view text) {
  bool negative = !text.empty() && text.front() == '-';
  if (negative) text.remove_prefix(1);
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 6) return std::nullopt;
  std::int64_t sec = 0;
  auto [p, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), sec);
  if (ec != std::errc{} || p != whole.data() + whole.size()) return std::nullopt;
  std::int64_t micros = 0;
  for (std::size_t i = 0; i < 6; ++i) {
    int digit = 0;
    if (i < frac.size()) {
      if (frac[i] < '0' || frac[i] > '9') return std::nullopt;
      digit = frac[i] - '0';
    }
    micros = micros * 10 + digit;
  }
  std::int64_t total = sec * 1'000'000 + micros;
  return std::chrono::microseconds(negative ? -total : total);
}

namespace detail {

inline const std::array<std::string, 256>& int8_tokens() {
  static const auto tokens = [] {
    std::array<std::string, 256> t;
    for (int v = -128; v < 128; ++v) t[static_cast<std::size_t>(v + 128)] = std::to_string(v);
    return t;
  }();
  return tokens;
}

}  // namespace detail

/// Writes the header on construction, then one line per row.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::span<const std::string> columns) : out_(out) {
    std::string line;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) line += ',';
      line += columns[i];
    }
    line += '\n';
    emit(line);
  }

  void write(const FingerprintRow& row) {
    const auto& tokens = detail::int8_tokens();
    line_.clear();
    line_ += sanitize_key(row.index_key);
    if (row.abs_ts) {
      line_ += ',';
      append_timestamp(line_, *row.abs_ts);
    }
    if (row.rel_ts) {
      line_ += ',';
      append_timestamp(line_, *row.rel_ts);
    }
    for (std::int8_t v : row.bits) {
      line_ += ',';
      line_ += tokens[static_cast<std::size_t>(v + 128)];
    }
    line_ += '\n';
    emit(line_);
    ++rows_;
  }

  void flush() {
    out_.flush();
    if (!out_) throw io_error("write failed after " + std::to_string(rows_) + " rows; output is partial");
  }

  std::size_t rows() const { return rows_; }

 private:
  void emit(const std::string& s) {
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out_) throw io_error("write failed after " + std::to_string(rows_) + " rows; output is partial");
  }

  std::ostream& out_;
  std::string line_;
  std::size_t rows_ = 0;
};

inline void write_rows(std::span<const FingerprintRow> rows, const Encoder& encoder, std::ostream& sink) {
  auto columns = encoder.column_names();
  CsvWriter writer(sink, columns);
  for (const auto& row : rows) writer.write(row);
  writer.flush();
}

/// Column structure recovered from a header line.
struct RowSchema {
  IndexMode index_mode = IndexMode::src_ip;
  bool absolute_ts = false;
  bool relative_ts = false;
  std::vector<std::string> bit_columns;
  /// Set when the bit columns are exactly the unfiltered layout of some
  /// config, i.e. when rows can be decoded back into packets.
  std::optional<EncodingConfig> config;

  std::vector<std::string> column_names() const {
    std::vector<std::string> names;
    names.emplace_back(index_column_name(index_mode));
    if (absolute_ts) names.emplace_back("abs_ts");
    if (relative_ts) names.emplace_back("rel_ts");
    names.insert(names.end(), bit_columns.begin(), bit_columns.end());
    return names;
  }
};

inline RowSchema parse_header(std::string_view header) {
  RowSchema schema;
  std::vector<std::string_view> names;
  while (true) {
    auto comma = header.find(',');
    names.push_back(header.substr(0, comma));
    if (comma == std::string_view::npos) break;
    header.remove_prefix(comma + 1);
  }
  auto index = index_mode_from_column(names.front());
  if (!index) throw format_error("unknown index column '" + std::string(names.front()) + "'");
  schema.index_mode = *index;
  std::size_t i = 1;
  if (i < names.size() && names[i] == "abs_ts") {
    schema.absolute_ts = true;
    ++i;
  }
  if (i < names.size() && names[i] == "rel_ts") {
    schema.relative_ts = true;
    ++i;
  }
  EncodingConfig config;
  config.index_mode = schema.index_mode;
  config.absolute_ts = schema.absolute_ts;
  config.relative_ts = schema.relative_ts;
  std::size_t payload_bits = 0;
  for (; i < names.size(); ++i) {
    auto ref = parse_bit_column(names[i]);
    if (!ref) throw format_error("unknown column '" + std::string(names[i]) + "'");
    if (ref->section == Section::payload) {
      payload_bits = std::max(payload_bits, ref->bit + 1);
    } else {
      config.enable(ref->section);
    }
    schema.bit_columns.emplace_back(names[i]);
  }
  if (payload_bits % 8 == 0) {
    config.payload_bytes = payload_bits / 8;
    if (Layout(config).bit_column_names() == schema.bit_columns) schema.config = config;
  }
  return schema;
}

/// Streams rows back from the text format. Rows with a wrong field count or
/// a bit token outside {fill, 0, 1} are skipped and counted.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in, std::int8_t fill = -1) : in_(in), fill_(fill) {
    std::string header;
    if (!std::getline(in_, header)) throw format_error("missing header line");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    schema_ = parse_header(header);
  }

  const RowSchema& schema() const { return schema_; }

  bool next(FingerprintRow& row) {
    while (std::getline(in_, line_)) {
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.empty()) continue;
      if (parse_line(line_, row)) return true;
      ++rejected_;
    }
    if (in_.bad()) throw io_error("read error");
    return false;
  }

  std::size_t rejected() const { return rejected_; }

 private:
  bool parse_line(std::string_view line, FingerprintRow& row) {
    auto take = [&line]() {
      auto comma = line.find(',');
      std::string_view field = line.substr(0, comma);
      line = comma == std::string_view::npos ? std::string_view{} : line.substr(comma + 1);
      return field;
    };
    bool more = true;
    auto next_field = [&]() -> std::optional<std::string_view> {
      if (!more) return std::nullopt;
      more = line.find(',') != std::string_view::npos;
      return take();
    };
    auto key = next_field();
    row.index_key = std::string(*key);
    row.abs_ts.reset();
    row.rel_ts.reset();
    if (schema_.absolute_ts) {
      auto f = next_field();
      if (!f || !(row.abs_ts = parse_timestamp(*f))) return false;
    }
    if (schema_.relative_ts) {
      auto f = next_field();
      if (!f || !(row.rel_ts = parse_timestamp(*f))) return false;
    }
    row.bits.resize(schema_.bit_columns.size());
    for (auto& bit : row.bits) {
      auto f = next_field();
      if (!f) return false;
      int value = 0;
      auto [p, ec] = std::from_chars(f->data(), f->data() + f->size(), value);
      if (ec != std::errc{} || p != f->data() + f->size()) return false;
      if (value != 0 && value != 1 && value != fill_) return false;
      bit = static_cast<std::int8_t>(value);
    }
    return !more;
  }

  std::istream& in_;
  std::int8_t fill_;
  RowSchema schema_;
  std::string line_;
  std::size_t rejected_ = 0;
};

}  // namespace nprint
