#pragma once

#include <cstdint>
#include <string_view>

namespace edap {

using ThreadId = std::uint32_t;

enum class Privilege : std::uint8_t { problem, supervisor, hypervisor };

std::string_view to_string(Privilege p) noexcept;
/// Accepts "problem"/"supervisor"/"hypervisor" and the short forms p/s/h.
bool parse_privilege(std::string_view s, Privilege& out) noexcept;

/// Who is asking: a hardware thread at a privilege level.
struct Requester {
  ThreadId thread = 0;
  Privilege privilege = Privilege::problem;
};

}  // namespace edap
