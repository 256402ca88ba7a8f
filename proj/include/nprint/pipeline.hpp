#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nprint/error.hpp"
#include "nprint/filter.hpp"
#include "nprint/hex_dump.hpp"
#include "nprint/packet.hpp"
#include "nprint/pcap.hpp"
#include "nprint/source.hpp"

namespace nprint {

inline std::unique_ptr<PacketSource> open_pcap(const std::filesystem::path& path) {
  return std::make_unique<PcapReader>(path);
}

inline std::unique_ptr<PacketSource> open_hex_dump(const std::filesystem::path& path) {
  return std::make_unique<HexDumpReader>(path);
}

/// Capture files under `dir` (recursively), sorted by path. Files with a
/// .pcap/.cap extension are taken; anything else is ignored.
inline std::vector<std::filesystem::path> list_capture_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw io_error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    auto ext = it->path().extension().string();
    if (ext == ".pcap" || ext == ".cap") files.push_back(it->path());
  }
  if (ec) throw io_error("cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  return files;
}

struct StreamStats {
  std::size_t read = 0;
  std::size_t filtered_out = 0;
  std::size_t passed = 0;
};

/// Source -> parse -> filter -> count limit. Yields parsed packets, reusing
/// the caller's ParsedPacket storage. The limit counts packets that passed
/// the filter.
class PacketStream {
 public:
  PacketStream(PacketSource& source, const CaptureFilter* filter = nullptr,
               std::optional<std::size_t> limit = std::nullopt)
      : source_(source), filter_(filter), limit_(limit) {}

  bool next(ParsedPacket& out) {
    while (!limit_ || stats_.passed < *limit_) {
      if (!source_.next(out.raw)) return false;
      ++stats_.read;
      resolve_sections(out);
      if (filter_ && !filter_->matches(out)) {
        ++stats_.filtered_out;
        continue;
      }
      ++stats_.passed;
      return true;
    }
    return false;
  }

  const StreamStats& stats() const { return stats_; }

 private:
  PacketSource& source_;
  const CaptureFilter* filter_;
  std::optional<std::size_t> limit_;
  StreamStats stats_;
};

}  // namespace nprint
