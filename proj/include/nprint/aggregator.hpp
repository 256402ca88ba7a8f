#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nprint/csv.hpp"
#include "nprint/encoder.hpp"
#include "nprint/error.hpp"

namespace nprint {

/// N consecutive rows of one group. Slots past `real_packets` are padding:
/// every bit (and timestamp) is the fill value.
struct Sample {
  std::string group_key;
  std::vector<FingerprintRow> packets;
  std::size_t real_packets = 0;
  std::optional<std::string> label;

  std::vector<std::int8_t> concatenated_bits() const {
    std::vector<std::int8_t> out;
    for (const auto& p : packets) out.insert(out.end(), p.bits.begin(), p.bits.end());
    return out;
  }
};

enum class AssembleMode {
  /// Group by row index key; consecutive windows of N rows per key.
  index,
  /// Group by source file; first N rows only.
  pcap,
};

inline std::optional<AssembleMode> assemble_mode_from(std::string_view name) {
  if (name == "index") return AssembleMode::index;
  if (name == "pcap") return AssembleMode::pcap;
  return std::nullopt;
}

/// Streaming sample builder. Memory is bounded by the open groups, each
/// holding at most N rows.
class Assembler {
 public:
  Assembler(std::size_t sample_size, AssembleMode mode, std::size_t row_width, std::int8_t fill,
            bool drop_partial = false)
      : n_(sample_size), mode_(mode), width_(row_width), fill_(fill), drop_partial_(drop_partial) {
    if (n_ == 0) throw usage_error("sample size must be at least 1");
  }

  /// Adds a row to `key`'s group. Returns a sample when a window completes.
  std::optional<Sample> push(const std::string& key, FingerprintRow row) {
    if (row.bits.size() != width_) {
      throw format_error("row width " + std::to_string(row.bits.size()) + " does not match " +
                         std::to_string(width_));
    }
    auto [it, inserted] = groups_.try_emplace(key);
    Group& g = it->second;
    if (inserted) {
      g.order = next_order_++;
      g.rows.reserve(n_);
    }
    if (g.closed) return std::nullopt;
    g.rows.push_back(std::move(row));
    if (g.rows.size() < n_) return std::nullopt;
    Sample s = make_sample(key, std::move(g.rows));
    g.rows.clear();
    if (mode_ == AssembleMode::pcap) g.closed = true;
    return s;
  }

  /// Ends the stream: partial groups become padded samples (in order of
  /// first appearance) unless partial samples are dropped.
  std::vector<Sample> finish() {
    std::vector<std::pair<std::size_t, const std::string*>> open;
    for (auto& [key, g] : groups_) {
      if (!g.rows.empty()) open.emplace_back(g.order, &key);
    }
    std::sort(open.begin(), open.end());
    std::vector<Sample> out;
    for (auto& [order, key] : open) {
      Group& g = groups_.at(*key);
      if (!drop_partial_) out.push_back(make_sample(*key, std::move(g.rows)));
      else ++dropped_partial_;
      g.rows.clear();
    }
    return out;
  }

  /// Closes one group early (pcap mode: at end of that file).
  std::optional<Sample> finish_group(const std::string& key) {
    auto it = groups_.find(key);
    if (it == groups_.end() || it->second.rows.empty()) return std::nullopt;
    Group& g = it->second;
    g.closed = mode_ == AssembleMode::pcap;
    std::vector<FingerprintRow> rows = std::move(g.rows);
    g.rows.clear();
    if (drop_partial_) {
      ++dropped_partial_;
      return std::nullopt;
    }
    return make_sample(key, std::move(rows));
  }

  std::size_t dropped_partial() const { return dropped_partial_; }
  std::size_t sample_size() const { return n_; }

  FingerprintRow padding_row() const {
    FingerprintRow pad;
    pad.bits.assign(width_, fill_);
    return pad;
  }

 private:
  struct Group {
    std::vector<FingerprintRow> rows;
    std::size_t order = 0;
    bool closed = false;
  };

  Sample make_sample(const std::string& key, std::vector<FingerprintRow> rows) {
    Sample s;
    s.group_key = key;
    s.real_packets = rows.size();
    s.packets = std::move(rows);
    while (s.packets.size() < n_) s.packets.push_back(padding_row());
    return s;
  }

  std::size_t n_;
  AssembleMode mode_;
  std::size_t width_;
  std::int8_t fill_;
  bool drop_partial_;
  std::size_t next_order_ = 0;
  std::size_t dropped_partial_ = 0;
  std::unordered_map<std::string, Group> groups_;
};

/// Batch form of the assembler for rows already tagged with their group key.
inline std::vector<Sample> assemble(std::span<const std::pair<std::string, FingerprintRow>> rows,
                                    std::size_t sample_size, AssembleMode mode, std::size_t row_width,
                                    std::int8_t fill = -1, bool drop_partial = false) {
  Assembler assembler(sample_size, mode, row_width, fill, drop_partial);
  std::vector<Sample> out;
  for (const auto& [key, row] : rows) {
    if (auto s = assembler.push(key, row)) out.push_back(std::move(*s));
  }
  for (auto& s : assembler.finish()) out.push_back(std::move(s));
  return out;
}

/// `key,label` lines without a header. The label is everything after the
/// last comma, so keys may themselves contain commas.
class LabelTable {
 public:
  LabelTable() = default;

  static LabelTable parse(std::istream& in, const std::string& origin = "labels") {
    LabelTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      auto comma = line.rfind(',');
      if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
        throw format_error(origin + ":" + std::to_string(line_number) + ": expected 'key,label'");
      }
      std::string key = line.substr(0, comma);
      if (!table.labels_.emplace(key, line.substr(comma + 1)).second) {
        throw format_error(origin + ":" + std::to_string(line_number) + ": duplicate key '" + key + "'");
      }
    }
    if (in.bad()) throw io_error("cannot read " + origin);
    return table;
  }

  static LabelTable load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open label file '" + path.string() + "'");
    return parse(in, path.string());
  }

  void add(std::string key, std::string label) {
    if (!labels_.emplace(key, std::move(label)).second) throw format_error("duplicate key '" + key + "'");
  }

  /// Exact key first, then the lexically normalised path form.
  std::optional<std::string> lookup(const std::string& key) const {
    if (auto it = labels_.find(key); it != labels_.end()) return it->second;
    std::string normal = std::filesystem::path(key).lexically_normal().string();
    if (auto it = labels_.find(normal); it != labels_.end()) return it->second;
    if (normalized_.empty() && !labels_.empty()) {
      for (const auto& [k, v] : labels_) {
        normalized_.emplace(std::filesystem::path(k).lexically_normal().string(), v);
      }
    }
    if (auto it = normalized_.find(normal); it != normalized_.end()) return it->second;
    return std::nullopt;
  }

  std::size_t size() const { return labels_.size(); }

 private:
  std::map<std::string, std::string> labels_;
  mutable std::map<std::string, std::string> normalized_;
};

/// Attaches labels; returns false (sample should be dropped) when the key
/// has no label.
inline bool join_label(Sample& sample, const LabelTable& labels) {
  auto label = labels.lookup(sample.group_key);
  if (!label) return false;
  sample.label = std::move(label);
  return true;
}

struct JoinResult {
  std::vector<Sample> samples;
  std::size_t dropped = 0;
};

inline JoinResult join_labels(std::vector<Sample> samples, const LabelTable& labels) {
  JoinResult out;
  for (auto& s : samples) {
    if (join_label(s, labels)) out.samples.push_back(std::move(s));
    else ++out.dropped;
  }
  return out;
}

/// Writes labeled samples as one row each: `key,pkt0_<col>,...,label`.
class MatrixWriter {
 public:
  MatrixWriter(std::ostream& out, std::size_t sample_size, std::span<const std::string> bit_columns,
               bool absolute_ts, bool relative_ts, std::int8_t fill)
      : out_(out),
        n_(sample_size),
        width_(bit_columns.size()),
        absolute_ts_(absolute_ts),
        relative_ts_(relative_ts),
        fill_(fill) {
    std::string header = "key";
    for (std::size_t k = 0; k < n_; ++k) {
      std::string slot = "pkt" + std::to_string(k) + "_";
      if (absolute_ts_) header += "," + slot + "abs_ts";
      if (relative_ts_) header += "," + slot + "rel_ts";
      for (const auto& c : bit_columns) {
        header += ',';
        header += slot;
        header += c;
      }
    }
    header += ",label\n";
    emit(header);
  }

  std::size_t feature_columns() const {
    return n_ * (width_ + (absolute_ts_ ? 1 : 0) + (relative_ts_ ? 1 : 0));
  }

  void write(const Sample& sample) {
    if (sample.packets.size() != n_) {
      throw format_error("sample '" + sample.group_key + "' has " + std::to_string(sample.packets.size()) +
                         " packet slots, expected " + std::to_string(n_));
    }
    const auto& tokens = detail::int8_tokens();
    const std::string& fill_token = tokens[static_cast<std::size_t>(fill_ + 128)];
    line_ = sanitize_key(sample.group_key);
    for (std::size_t k = 0; k < n_; ++k) {
      const auto& p = sample.packets[k];
      if (p.bits.size() != width_) {
        throw format_error("sample '" + sample.group_key + "' row width " + std::to_string(p.bits.size()) +
                           " differs from " + std::to_string(width_));
      }
      const bool pad = k >= sample.real_packets;
      auto put_ts = [&](const std::optional<std::chrono::microseconds>& ts) {
        line_ += ',';
        if (pad || !ts) line_ += fill_token;
        else append_timestamp(line_, *ts);
      };
      if (absolute_ts_) put_ts(p.abs_ts);
      if (relative_ts_) put_ts(p.rel_ts);
      for (std::int8_t v : p.bits) {
        line_ += ',';
        line_ += tokens[static_cast<std::size_t>(v + 128)];
      }
    }
    line_ += ',';
    line_ += sanitize_key(sample.label.value_or(""));
    line_ += '\n';
    emit(line_);
    ++rows_;
  }

  std::size_t rows() const { return rows_; }

  void flush() {
    out_.flush();
    if (!out_) throw io_error("matrix write failed; output is partial");
  }

 private:
  void emit(const std::string& s) {
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out_) throw io_error("matrix write failed; output is partial");
  }

  std::ostream& out_;
  std::size_t n_;
  std::size_t width_;
  bool absolute_ts_;
  bool relative_ts_;
  std::int8_t fill_;
  std::string line_;
  std::size_t rows_ = 0;
};

inline void emit_matrix(std::span<const Sample> samples, std::ostream& sink, std::size_t sample_size,
                        std::span<const std::string> bit_columns, bool absolute_ts = false,
                        bool relative_ts = false, std::int8_t fill = -1) {
  MatrixWriter writer(sink, sample_size, bit_columns, absolute_ts, relative_ts, fill);
  for (const auto& s : samples) writer.write(s);
  writer.flush();
}

}  // namespace nprint
