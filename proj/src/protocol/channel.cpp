#include "edap/protocol/channel.hpp"

#include <algorithm>

#include "edap/common/errors.hpp"

namespace edap::protocol {

const char* to_string(Actor a) noexcept {
  switch (a) {
    case Actor::owner: return "owner";
    case Actor::platform: return "platform";
    case Actor::processor: return "processor";
  }
  return "?";
}

void DuplexChannel::post(Actor from, Actor to, std::string label, Bytes payload) {
  Message m{from, to, std::move(label), std::move(payload)};
  transcript_.push_back(m);
  queue_.push_back(std::move(m));
}

Message DuplexChannel::take(Actor to) {
  auto it = std::find_if(queue_.begin(), queue_.end(), [&](const Message& m) { return m.to == to; });
  if (it == queue_.end()) throw ProtocolError(std::string("no message pending for ") + to_string(to));
  Message m = std::move(*it);
  queue_.erase(it);
  return m;
}

bool DuplexChannel::pending(Actor to) const {
  return std::any_of(queue_.begin(), queue_.end(), [&](const Message& m) { return m.to == to; });
}

void DuplexChannel::replay(std::size_t transcript_index) {
  if (transcript_index >= transcript_.size()) throw ProtocolError("replay index out of range");
  Message m = transcript_[transcript_index];
  transcript_.push_back(m);
  queue_.push_back(std::move(m));
}

Bytes DuplexChannel::observed_bytes() const {
  Bytes all;
  for (const auto& m : transcript_) all.insert(all.end(), m.payload.begin(), m.payload.end());
  return all;
}

}  // namespace edap::protocol
