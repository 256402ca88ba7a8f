#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>

#include "nprint/error.hpp"
#include "nprint/source.hpp"

namespace nprint {

/// Decodes an even-length string of hex digits. Returns false (leaving `out`
/// unspecified) on odd length, empty input or a non-hex character.
inline bool decode_hex(std::string_view hex, std::vector<std::uint8_t>& out) {
  if (hex.empty() || hex.size() % 2 != 0) return false;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  out.resize(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = nibble(hex[2 * i]);
    int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) return false;
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return true;
}

/// Text file of hex-encoded IP packets, one per line: `index,hex` or bare
/// `hex`. Bare lines are indexed by their 1-based line number. Packets are
/// raw IP with a zero timestamp.
class HexDumpReader final : public PacketSource {
 public:
  explicit HexDumpReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) throw io_error("cannot open hex dump '" + path.string() + "'");
  }

  bool next(RawPacket& out) override {
    while (std::getline(in_, line_)) {
      ++line_number_;
      std::string_view text = trim(line_);
      if (text.empty()) continue;
      std::string_view hex = text;
      std::optional<std::string_view> index;
      if (auto comma = text.rfind(','); comma != std::string_view::npos) {
        index = trim(text.substr(0, comma));
        hex = trim(text.substr(comma + 1));
      }
      if (!decode_hex(hex, out.bytes)) {
        ++stats_.malformed;
        continue;
      }
      out.timestamp = std::chrono::microseconds(0);
      out.link_type = LinkType::raw_ip;
      out.origin = index ? std::string(*index) : std::to_string(line_number_);
      return true;
    }
    if (in_.bad()) throw io_error("read error in hex dump");
    return false;
  }

  SourceStats stats() const override { return stats_; }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  }

  std::ifstream in_;
  std::string line_;
  std::size_t line_number_ = 0;
  SourceStats stats_;
};

}  // namespace nprint
