#include "edap/sim/report.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "edap/common/errors.hpp"

namespace edap::sim {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

template <typename T>
bool to_uint(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size() && !s.empty();
}

bool to_double(std::string_view s, double& out) {
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return !tmp.empty() && end == tmp.c_str() + tmp.size();
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

/// Every numeric field, in output order, with a way to read and write it.
struct Field {
  const char* key;
  std::function<std::uint64_t(const SimReport&)> get;
  std::function<void(SimReport&, std::uint64_t)> set;
};

#define EDAP_FIELD(name, expr)                                           \
  Field {                                                                \
    name, [](const SimReport& r) { return std::uint64_t(r.expr); },      \
        [](SimReport& r, std::uint64_t v) { r.expr = decltype(r.expr)(v); } \
  }

const std::vector<Field>& counters() {
  static const std::vector<Field> f = {
      EDAP_FIELD("cycles", cycles),
      EDAP_FIELD("instructions", instructions),
      EDAP_FIELD("stalls.dec", stalls.dec),
      EDAP_FIELD("stalls.enc", stalls.enc),
      EDAP_FIELD("stalls.cache_miss", stalls.cache_miss),
      EDAP_FIELD("stalls.dependency", stalls.dependency),
      EDAP_FIELD("stalls.clearing", stalls.clearing),
      EDAP_FIELD("counters.l1d_accesses", counters.l1d_accesses),
      EDAP_FIELD("counters.l1d_hits", counters.l1d_hits),
      EDAP_FIELD("counters.l2_misses", counters.l2_misses),
      EDAP_FIELD("counters.buffer_lookups", counters.buffer_lookups),
      EDAP_FIELD("counters.buffer_hits", counters.buffer_hits),
      EDAP_FIELD("counters.dec_ops", counters.dec_ops),
      EDAP_FIELD("counters.enc_ops", counters.enc_ops),
      EDAP_FIELD("counters.transitions", counters.transitions),
  };
  return f;
}

const std::vector<Field>& config() {
  static const std::vector<Field> f = {
      EDAP_FIELD("config.buffer_entries", buffer_entries),
      EDAP_FIELD("config.dec_cycles", lat.dec_cycles),
      EDAP_FIELD("config.enc_cycles", lat.enc_cycles),
      EDAP_FIELD("config.engine_pipelined", lat.engine_pipelined),
      EDAP_FIELD("config.issue_width", core.issue_width),
      EDAP_FIELD("config.if_cycles", core.if_cycles),
      EDAP_FIELD("config.id_cycles", core.id_cycles),
      EDAP_FIELD("config.ex_cycles", core.ex_cycles),
      EDAP_FIELD("config.wb_cycles", core.wb_cycles),
      EDAP_FIELD("config.l1_hit_cycles", core.l1_hit_cycles),
      EDAP_FIELD("config.l2_hit_cycles", core.l2_hit_cycles),
      EDAP_FIELD("config.memory_cycles", core.memory_cycles),
      EDAP_FIELD("config.l1i_size", core.l1i.size_bytes),
      EDAP_FIELD("config.l1i_ways", core.l1i.ways),
      EDAP_FIELD("config.l1d_size", core.l1d.size_bytes),
      EDAP_FIELD("config.l1d_ways", core.l1d.ways),
      EDAP_FIELD("config.l2_size", core.l2.size_bytes),
      EDAP_FIELD("config.l2_ways", core.l2.ways),
      EDAP_FIELD("config.line_bytes", core.l1d.line_bytes),
      EDAP_FIELD("config.clearing_fixed_cycles", core.clearing_fixed_cycles),
      EDAP_FIELD("config.branch_redirect_cycles", core.branch_redirect_cycles),
  };
  return f;
}

#undef EDAP_FIELD

}  // namespace

std::string format_report(const SimReport& r, const ReportMeta& meta) {
  std::ostringstream os;
  auto line = [&](std::string_view k, const std::string& v) { os << k << " = " << v << '\n'; };
  line("placement", std::string(machine::to_string(r.placement)));
  const auto& f = counters();
  line(f[0].key, std::to_string(f[0].get(r)));
  line(f[1].key, std::to_string(f[1].get(r)));
  line("ipc", fmt_double(r.ipc));
  line("normalized_ipc", r.normalized_ipc ? fmt_double(*r.normalized_ipc) : "-");
  for (std::size_t i = 2; i < f.size(); ++i) line(f[i].key, std::to_string(f[i].get(r)));
  for (const auto& c : config()) line(c.key, std::to_string(c.get(r)));
  char scale[64];
  std::snprintf(scale, sizeof scale, "%.17g", r.lat.scale);
  line("config.scale", scale);
  for (const auto& [k, v] : meta) line("run." + k, v);
  return os.str();
}

ParsedReport parse_report(std::string_view text) {
  ParsedReport out;
  SimReport& r = out.report;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view ln = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (ln.empty() || ln[0] == '#') continue;
    const std::size_t eq = ln.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(ln.substr(0, eq)));
    const std::string_view val = trim(ln.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError("duplicate key " + key, line_no);

    if (key.rfind("run.", 0) == 0) {
      out.meta[key.substr(4)] = std::string(val);
      continue;
    }
    if (key == "placement") {
      auto p = machine::parse_placement(val);
      if (!p) throw ParseError("unknown placement", line_no);
      r.placement = *p;
      continue;
    }
    if (key == "ipc" || key == "normalized_ipc" || key == "config.scale") {
      double v = 0;
      if (key == "normalized_ipc" && val == "-") continue;
      if (!to_double(val, v)) throw ParseError("bad number for " + key, line_no);
      if (key == "ipc") r.ipc = v;
      else if (key == "normalized_ipc") r.normalized_ipc = v;
      else r.lat.scale = v;
      continue;
    }
    bool known = false;
    for (const auto* table : {&counters(), &config()}) {
      for (const auto& f : *table) {
        if (key != f.key) continue;
        std::uint64_t v = 0;
        if (!to_uint(val, v)) throw ParseError("bad integer for " + key, line_no);
        f.set(r, v);
        known = true;
      }
    }
    if (!known) throw ParseError("unknown key " + key, line_no);
  }
  for (const char* required : {"placement", "cycles", "instructions"}) {
    if (!seen.count(required)) throw ParseError(std::string("missing key ") + required, line_no);
  }
  r.core.l1i.line_bytes = r.core.l1d.line_bytes;
  r.core.l2.line_bytes = r.core.l1d.line_bytes;
  return out;
}

std::string format_comparison(const std::vector<SimReport>& reports) {
  std::ostringstream os;
  if (reports.empty()) return "";
  const SimReport* base = &reports.front();
  for (const auto& r : reports) {
    if (r.placement == Placement::baseline) {
      base = &r;
      break;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-22s %12s %12s %9s %14s %10s\n", "placement", "cycles",
                "instructions", "ipc", "normalized_ipc", "slowdown");
  os << buf;
  for (const auto& r : reports) {
    const double ipc = r.cycles ? double(r.instructions) / double(r.cycles) : 0.0;
    const double bipc = base->cycles ? double(base->instructions) / double(base->cycles) : 0.0;
    const double norm = bipc > 0 ? ipc / bipc : 0.0;
    const double slow = base->cycles ? double(r.cycles) / double(base->cycles) : 0.0;
    std::snprintf(buf, sizeof buf, "%-22s %12llu %12llu %9.4f %13.2f%% %9.2f%%\n",
                  std::string(machine::to_string(r.placement)).c_str(),
                  static_cast<unsigned long long>(r.cycles),
                  static_cast<unsigned long long>(r.instructions), ipc, 100.0 * norm,
                  100.0 * (slow - 1.0));
    os << buf;
  }
  return os.str();
}

}  // namespace edap::sim
