#include "edap/protocol/platform.hpp"

namespace edap::protocol {

std::uint64_t PlatformState::fresh_seid() {
  for (;;) {
    std::uint64_t s = rng_.next_u64();
    if (issued_.insert(s).second) return s;
  }
}

ResourceGrant grant_resources(PlatformState& pp, const ProcessorIdentity& processor) {
  ResourceGrant g;
  g.seid = pp.fresh_seid();
  g.pub = pp.forged_key().value_or(processor.pub());
  return g;
}

}  // namespace edap::protocol
