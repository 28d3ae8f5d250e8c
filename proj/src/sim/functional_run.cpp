#include "edap/sim/functional_run.hpp"

#include <set>

namespace edap::sim {

namespace {

void audit(machine::Machine& m, const machine::SecretScanner* scanner, FunctionalResult& out) {
  ++out.audits;
  auto v = machine::confidentiality_audit(m, scanner);
  out.violations.insert(out.violations.end(), v.begin(), v.end());
}

}  // namespace

FunctionalResult run_functional(machine::Machine& m, const Trace& trace,
                                const machine::SecretScanner* scanner) {
  FunctionalResult out;
  const ThreadId owner = m.protected_thread();

  std::set<std::uint64_t> lines;
  for (const auto& e : trace) {
    if (e.is_memory() && e.priv == Privilege::problem && e.thread == owner) {
      const std::uint64_t line = *e.ea & ~std::uint64_t{crypto::kLineBytes - 1};
      if (!m.memory().mapped(m.memory().translate(line))) lines.insert(line);
    }
  }
  if (!lines.empty()) {
    m.transfer_control(Privilege::supervisor);
    for (auto l : lines) m.init_empty_block(l, {owner, Privilege::supervisor});
    audit(m, scanner, out);
    m.transfer_control(Privilege::problem, owner);
    audit(m, scanner, out);
  }

  const std::size_t units = m.options().functional_units;
  std::vector<std::size_t> srcs;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const TraceEvent& e = trace[i];
    ++out.events;
    if (e.is_transition()) {
      m.transfer_control(e.priv, e.thread);
      ++out.transitions;
      audit(m, scanner, out);
      continue;
    }
    srcs.assign(e.srcs.begin(), e.srcs.end());
    const bool prot = m.privilege() == Privilege::problem && m.current_thread() == owner;
    if (!prot) {
      switch (e.kind) {
        case EventKind::load:
          m.execute_platform_load(*e.dst, *e.ea);
          break;
        case EventKind::store:
          m.execute_platform_store(srcs.at(1), *e.ea);
          break;
        case EventKind::non_mem:
          if (e.dst) m.execute_platform_alu(*e.dst, srcs);
          break;
        default:
          break;
      }
      continue;
    }
    ++out.protected_events;
    switch (e.kind) {
      case EventKind::non_mem:
        if (e.dst) m.execute_alu(m.steer(i % units, srcs), *e.dst, srcs, e.seq);
        break;
      case EventKind::load:
        m.execute_load(*e.dst, *e.ea);
        break;
      case EventKind::store:
        m.execute_store(srcs.at(1), *e.ea);
        break;
      case EventKind::branch:
        for (auto s : srcs) m.read_operand(s, {owner, Privilege::problem});
        break;
      default:
        break;
    }
  }
  audit(m, scanner, out);
  return out;
}

}  // namespace edap::sim
