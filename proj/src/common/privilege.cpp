#include "edap/common/privilege.hpp"

namespace edap {

std::string_view to_string(Privilege p) noexcept {
  switch (p) {
    case Privilege::problem: return "problem";
    case Privilege::supervisor: return "supervisor";
    case Privilege::hypervisor: return "hypervisor";
  }
  return "?";
}

bool parse_privilege(std::string_view s, Privilege& out) noexcept {
  if (s == "problem" || s == "p") {
    out = Privilege::problem;
  } else if (s == "supervisor" || s == "s") {
    out = Privilege::supervisor;
  } else if (s == "hypervisor" || s == "h") {
    out = Privilege::hypervisor;
  } else {
    return false;
  }
  return true;
}

}  // namespace edap
