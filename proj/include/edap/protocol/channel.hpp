#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <vector>

#include "edap/common/bytes.hpp"

namespace edap::protocol {

enum class Actor { owner, platform, processor };

const char* to_string(Actor a) noexcept;

struct Message {
  Actor from = Actor::owner;
  Actor to = Actor::platform;
  std::string label;
  Bytes payload;
};

/// Ordered, reliable, in-memory link. Every message passes through the
/// platform, so the transcript is exactly what the platform observes.
class DuplexChannel {
 public:
  void post(Actor from, Actor to, std::string label, Bytes payload);
  /// Oldest pending message addressed to `to`; ProtocolError if none.
  Message take(Actor to);
  bool pending(Actor to) const;

  /// Re-queues a copy of an earlier transcript entry (replay injection).
  void replay(std::size_t transcript_index);

  const std::vector<Message>& transcript() const noexcept { return transcript_; }
  /// All payloads concatenated, for substring scans.
  Bytes observed_bytes() const;

 private:
  std::deque<Message> queue_;
  std::vector<Message> transcript_;
};

}  // namespace edap::protocol
