#include "edap/sim/trace.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "edap/common/bytes.hpp"
#include "edap/common/errors.hpp"

namespace edap::sim {

namespace {

constexpr std::string_view kKindNames[] = {"non_mem", "load", "store",
                                           "branch", "priv_enter", "priv_exit"};

template <typename T>
bool parse_uint(std::string_view s, T& out, int base = 10) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc() && p == s.data() + s.size();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::uint8_t parse_reg(std::string_view s, std::size_t line) {
  unsigned v = 0;
  std::string_view body = (!s.empty() && s[0] == 'r') ? s.substr(1) : s;
  if (!parse_uint(body, v)) throw ParseError("bad register '" + std::string(s) + "'", line);
  if (v >= kLogicalRegisters) throw ParseError("register out of range", line);
  return static_cast<std::uint8_t>(v);
}

}  // namespace

std::string_view to_string(EventKind k) noexcept { return kKindNames[static_cast<int>(k)]; }

std::optional<EventKind> parse_event_kind(std::string_view s) noexcept {
  for (int i = 0; i < 6; ++i) {
    if (s == kKindNames[i]) return static_cast<EventKind>(i);
  }
  return std::nullopt;
}

void validate_event(const TraceEvent& e) {
  if (e.srcs.size() > kMaxSources) throw std::invalid_argument("more than three sources");
  for (auto s : e.srcs) {
    if (s >= kLogicalRegisters) throw std::invalid_argument("source register out of range");
  }
  if (e.dst && *e.dst >= kLogicalRegisters) {
    throw std::invalid_argument("destination register out of range");
  }
  if (e.is_memory() != e.ea.has_value()) {
    throw std::invalid_argument(e.is_memory() ? "memory event without ea" : "ea on non-memory event");
  }
  if (e.kind == EventKind::load && !e.dst) throw std::invalid_argument("load without destination");
  if (e.kind == EventKind::store && e.srcs.size() < 2) {
    throw std::invalid_argument("store needs base and data sources");
  }
  if (e.kind == EventKind::priv_enter && e.priv == Privilege::problem) {
    throw std::invalid_argument("priv_enter must target supervisor or hypervisor");
  }
  if (e.kind == EventKind::priv_exit && e.priv != Privilege::problem) {
    throw std::invalid_argument("priv_exit returns to problem state");
  }
  if ((e.is_transition() || e.kind == EventKind::store || e.kind == EventKind::branch) && e.dst) {
    throw std::invalid_argument("event kind has no destination");
  }
}

std::string format_event(const TraceEvent& e) {
  std::ostringstream os;
  os << e.seq << ' ' << to_string(e.kind) << ' ';
  if (e.dst) {
    os << 'r' << unsigned(*e.dst);
  } else {
    os << '-';
  }
  os << ' ';
  if (e.srcs.empty()) os << '-';
  for (std::size_t i = 0; i < e.srcs.size(); ++i) os << (i ? ",r" : "r") << unsigned(e.srcs[i]);
  os << ' ';
  if (e.ea) {
    os << "0x" << std::hex << *e.ea << std::dec;
  } else {
    os << '-';
  }
  os << ' ' << e.thread << ' ' << to_string(e.priv);
  return os.str();
}

std::string format_trace(const Trace& t) {
  std::string out;
  out.reserve(t.size() * 32);
  for (const auto& e : t) {
    out += format_event(e);
    out += '\n';
  }
  return out;
}

Trace parse_trace(std::string_view text) {
  Trace t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    auto f = split_ws(line);
    if (f.empty() || f[0][0] == '#') {
      if (nl == text.size()) break;
      continue;
    }
    if (f.size() != 7) throw ParseError("expected 7 fields, got " + std::to_string(f.size()), line_no);
    TraceEvent e;
    if (!parse_uint(f[0], e.seq)) throw ParseError("bad sequence number", line_no);
    auto kind = parse_event_kind(f[1]);
    if (!kind) throw ParseError("unknown event kind '" + std::string(f[1]) + "'", line_no);
    e.kind = *kind;
    if (f[2] != "-") e.dst = parse_reg(f[2], line_no);
    if (f[3] != "-") {
      std::string_view rest = f[3];
      while (!rest.empty()) {
        std::size_t c = rest.find(',');
        e.srcs.push_back(parse_reg(rest.substr(0, c), line_no));
        if (c == std::string_view::npos) break;
        rest = rest.substr(c + 1);
        if (rest.empty()) throw ParseError("trailing comma in sources", line_no);
      }
    }
    if (f[4] != "-") {
      std::uint64_t ea = 0;
      std::string_view s = f[4];
      bool ok = s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')
                    ? parse_uint(s.substr(2), ea, 16)
                    : parse_uint(s, ea);
      if (!ok) throw ParseError("bad effective address", line_no);
      e.ea = ea;
    }
    if (!parse_uint(f[5], e.thread)) throw ParseError("bad thread id", line_no);
    if (!parse_privilege(f[6], e.priv)) throw ParseError("bad privilege", line_no);
    try {
      validate_event(e);
    } catch (const std::invalid_argument& ex) {
      throw ParseError(ex.what(), line_no);
    }
    t.push_back(std::move(e));
    if (nl == text.size()) break;
  }
  return t;
}

Trace read_trace_file(const std::string& path) {
  Bytes raw = read_file(path);
  return parse_trace(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
}

void write_trace_file(const std::string& path, const Trace& t) {
  std::string s = format_trace(t);
  write_file(path, ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

}  // namespace edap::sim
