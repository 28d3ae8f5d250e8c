#include "edap/machine/audit.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace edap::machine {

namespace {

constexpr const char* kTaint = "owner-plaintext";
constexpr const char* kContent = "owner-plaintext-content";

void scan_lines(const CacheIndex& idx, const std::vector<L1Line>& lines, const char* where,
                bool inside, Placement p, const SecretScanner* scanner,
                std::vector<Violation>& out) {
  for (std::size_t s = 0; s < idx.slots(); ++s) {
    const auto& e = idx.entry(s);
    if (!e.valid) continue;
    const std::uint64_t ea = e.line * idx.geometry().line_bytes;
    const L1Line& l = lines[s];
    if (!inside && l.taint.any()) out.push_back({where, ea, p, kTaint, l.taint.count()});
    if (!inside && scanner && !l.clear) {
      auto hits = scanner->scan(l.bytes);
      if (!hits.empty()) out.push_back({where, ea, p, kContent, hits.size()});
    }
  }
}

}  // namespace

std::vector<Violation> confidentiality_audit(const Machine& m, const SecretScanner* scanner) {
  std::vector<Violation> out;
  const auto& fp = m.options().footprint;
  const Placement p = fp.placement;
  const bool owner_running = m.privilege() == Privilege::problem &&
                             m.current_thread() == m.protected_thread() && m.engine_engaged();

  for (const auto& [real, taint] : m.memory_taint()) {
    if (taint.any()) out.push_back({"memory", real, p, kTaint, taint.count()});
  }
  if (scanner) {
    for (const auto& [real, line] : m.memory().lines()) {
      auto hits = scanner->scan(line.cipher.bytes);
      if (!hits.empty()) out.push_back({"memory", real, p, kContent, hits.size()});
    }
  }

  const bool l1_inside = fp.l1_clear() && owner_running;
  scan_lines(m.l1d_index(), m.l1d_lines(), "l1d", l1_inside, p, scanner, out);
  scan_lines(m.l1i_index(), m.l1i_lines(), "l1i", l1_inside, p, scanner, out);

  const auto& regs = m.register_file();
  for (std::size_t r = 0; r < regs.size(); ++r) {
    const Register& reg = regs[r];
    if (!reg.taint.any()) continue;
    const bool inside = fp.registers_clear() && (owner_running || reg.hidden);
    if (!inside) out.push_back({"register", r, p, kTaint, reg.taint.count()});
  }

  const auto& bufs = m.buffers();
  for (std::size_t fu = 0; fu < bufs.size(); ++fu) {
    if (owner_running) break;
    std::size_t n = 0;
    for (const auto& e : bufs[fu]) n += e.taint.count();
    if (n) out.push_back({"buffer", fu, p, kTaint, n});
  }

  const auto& scratch = m.platform_registers();
  for (std::size_t r = 0; r < scratch.size(); ++r) {
    if (scratch[r].taint.any()) {
      out.push_back({"platform", r, p, kTaint, scratch[r].taint.count()});
    }
  }
  return out;
}

std::string format_audit(const std::vector<Violation>& v) {
  std::ostringstream os;
  for (const auto& x : v) {
    char addr[24];
    std::snprintf(addr, sizeof addr, "0x%llx", static_cast<unsigned long long>(x.address));
    os << x.location << ' ' << addr << ' ' << to_string(x.placement) << ' ' << x.provenance << ' '
       << x.bytes << '\n';
  }
  return os.str();
}

std::string audit_json(const std::vector<Violation>& v) {
  nlohmann::json j;
  j["count"] = v.size();
  j["violations"] = nlohmann::json::array();
  for (const auto& x : v) {
    j["violations"].push_back({{"location", x.location},
                               {"address", x.address},
                               {"placement", std::string(to_string(x.placement))},
                               {"provenance", x.provenance},
                               {"bytes", x.bytes}});
  }
  return j.dump(2);
}

}  // namespace edap::machine
