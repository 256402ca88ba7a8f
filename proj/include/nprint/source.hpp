#pragma once

#include <cstddef>

#include "nprint/packet.hpp"

namespace nprint {

struct SourceStats {
  /// Records cut short by end of file; the stream stops at the first one.
  std::size_t truncated = 0;
  /// Lines or records that could not be decoded and were skipped.
  std::size_t malformed = 0;
};

/// A single-consumer stream of raw packets. `next` overwrites `out`, reusing
/// its buffers, and returns false at end of stream.
class PacketSource {
 public:
  virtual ~PacketSource() = default;
  virtual bool next(RawPacket& out) = 0;
  virtual SourceStats stats() const = 0;
};

}  // namespace nprint
