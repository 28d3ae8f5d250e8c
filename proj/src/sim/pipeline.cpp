#include "edap/sim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace edap::sim {

namespace {

using machine::CacheIndex;

/// In-order stage with `width` slots; occupancy is how long a slot stays
/// busy after an instruction enters it.
class Stage {
 public:
  explicit Stage(unsigned width) : free_(width, 0) {}

  std::uint64_t enter(std::uint64_t earliest, std::uint64_t occupancy) {
    std::uint64_t& slot = free_[count_++ % free_.size()];
    const std::uint64_t t = std::max({earliest, last_, slot});
    slot = t + occupancy;
    last_ = t;
    return t;
  }

  /// Earliest start the next entrant could get, operands aside.
  std::uint64_t ready() const noexcept {
    return std::max(last_, free_[count_ % free_.size()]);
  }

 private:
  std::vector<std::uint64_t> free_;
  std::uint64_t last_ = 0;
  std::size_t count_ = 0;
};

/// Engine ports serving out-of-order requests (load fills, reopen).
class Pool {
 public:
  explicit Pool(unsigned width) : free_(width, 0) {}

  std::uint64_t enter(std::uint64_t earliest, std::uint64_t occupancy) {
    auto it = std::min_element(free_.begin(), free_.end());
    const std::uint64_t t = std::max(earliest, *it);
    *it = t + occupancy;
    return t;
  }

 private:
  std::vector<std::uint64_t> free_;
};

/// When a value becomes usable, and how much of the wait before that
/// point is owed to the engine or to a cache miss.
struct Avail {
  std::uint64_t t = 0;
  std::uint64_t crypto = 0;
  bool crypto_is_enc = false;
  std::uint64_t miss = 0;
};

struct RegTime {
  Avail clear;
  Avail cipher;
  /// Sealed at the last transition; a cleartext placement reopens it on read.
  bool sealed = false;
};

class Sim {
 public:
  Sim(const machine::FootprintConfig& fp, const LatencyConfig& lat, const CoreConfig& core)
      : fp_(fp),
        core_(core),
        d_(lat.dec()),
        e_(lat.enc()),
        occ_d_(lat.engine_pipelined ? 1 : std::max(1u, d_)),
        occ_e_(lat.engine_pipelined ? 1 : std::max(1u, e_)),
        if_(core.issue_width),
        id_(core.issue_width),
        dec_(core.issue_width),
        ex_(core.issue_width),
        enc_(core.issue_width),
        mem_(core.issue_width),
        wb_(core.issue_width),
        fill_(core.issue_width),
        l1d_(core.l1d),
        l2_(core.l2),
        regs_(kLogicalRegisters),
        buffers_(core.issue_width) {
    report_.placement = fp.placement;
    report_.buffer_entries = fp.buffer_entries;
    report_.lat = lat;
    report_.core = core;
  }

  void run(const Trace& trace) {
    std::size_t index = 0;
    for (const auto& ev : trace) {
      validate_event(ev);
      if (ev.is_transition()) {
        transition();
      } else {
        instruction(ev, index);
      }
      ++report_.instructions;
      ++index;
    }
    const std::uint64_t drain = pipeline_depth(fp_.placement, report_.lat, core_) - 1;
    report_.cycles = std::max(done_, trace.empty() ? drain : std::uint64_t{0});
    report_.ipc = report_.cycles && report_.instructions
                      ? static_cast<double>(report_.instructions) /
                            static_cast<double>(report_.cycles)
                      : 0.0;
    if (fp_.placement == Placement::baseline) report_.normalized_ipc = 1.0;
  }

  SimReport take() { return std::move(report_); }

 private:
  bool edap() const { return fp_.placement != Placement::baseline; }
  bool fu_engine() const {
    return fp_.placement == Placement::fu_enclave ||
           fp_.placement == Placement::fu_enclave_buffered;
  }
  bool clear_regs() const {
    return fp_.placement == Placement::cleartext_regfile ||
           fp_.placement == Placement::cleartext_l1;
  }

  /// Splits a wait of `s` cycles on `a` into the stall buckets.
  void charge(std::uint64_t s, const Avail& a) {
    const std::uint64_t c = std::min(s, a.crypto);
    (a.crypto_is_enc ? report_.stalls.enc : report_.stalls.dec) += c;
    s -= c;
    const std::uint64_t m = std::min(s, a.miss);
    report_.stalls.cache_miss += m;
    report_.stalls.dependency += s - m;
  }

  /// Waits for every value in `need` after `pipe`; returns the start bound.
  std::uint64_t wait_for(std::uint64_t pipe, const std::vector<const Avail*>& need) {
    const Avail* binding = nullptr;
    for (const Avail* a : need) {
      if (a->t > pipe && (!binding || a->t > binding->t)) binding = a;
    }
    if (!binding) return pipe;
    charge(binding->t - pipe, *binding);
    return binding->t;
  }

  /// Clear value of `r` for a protected reader under a cleartext placement.
  const Avail& clear_source(std::uint8_t r) {
    RegTime& rt = regs_[r];
    if (rt.sealed && clear_regs()) {
      rt.sealed = false;
      if (d_ > 0) {
        const std::uint64_t start = fill_.enter(std::max(rt.clear.t, resume_), occ_d_);
        ++report_.counters.dec_ops;
        rt.clear = {start + d_, start + d_ - rt.clear.t, false, 0};
      }
    }
    return rt.clear;
  }

  bool buffer_hit(std::size_t fu, std::uint8_t r) {
    ++report_.counters.buffer_lookups;
    auto& b = buffers_[fu];
    auto it = std::find(b.begin(), b.end(), r);
    if (it == b.end()) return false;
    b.erase(it);
    b.push_front(r);
    ++report_.counters.buffer_hits;
    return true;
  }

  void snoop(std::uint8_t r) {
    for (auto& b : buffers_) {
      auto it = std::find(b.begin(), b.end(), r);
      if (it != b.end()) b.erase(it);
    }
  }

  std::size_t steer(std::size_t first, const std::vector<std::uint8_t>& srcs) const {
    if (fp_.placement != Placement::fu_enclave_buffered) return first;
    std::size_t best = first, best_hits = 0;
    for (std::size_t j = 0; j < buffers_.size(); ++j) {
      const std::size_t u = (first + j) % buffers_.size();
      std::size_t hits = 0;
      for (auto r : srcs) hits += std::find(buffers_[u].begin(), buffers_[u].end(), r) != buffers_[u].end();
      if (hits > best_hits) best = u, best_hits = hits;
    }
    return best;
  }

  /// A decrypted operand stays in the unit's buffer; other copies are valid.
  void keep(std::size_t fu, std::uint8_t r) {
    auto& b = buffers_[fu];
    b.push_front(r);
    if (b.size() > fp_.buffer_entries) b.pop_back();
  }

  void insert(std::size_t fu, std::uint8_t r) {
    snoop(r);
    auto& b = buffers_[fu];
    b.push_front(r);
    if (b.size() > fp_.buffer_entries) b.pop_back();
  }

  /// L1D (and L2 behind it) lookup at MEM; returns the extra fill latency.
  std::uint64_t data_access(const TraceEvent& ev, bool& hit) {
    const std::uint64_t line = *ev.ea & ~std::uint64_t{core_.l1d.line_bytes - 1};
    ++report_.counters.l1d_accesses;
    hit = l1d_.access(line, ev.thread).hit;
    if (hit) {
      ++report_.counters.l1d_hits;
      return 0;
    }
    if (l2_.access(line, ev.thread).hit) return core_.l2_hit_cycles;
    ++report_.counters.l2_misses;
    return std::uint64_t{core_.l2_hit_cycles} + core_.memory_cycles;
  }

  void transition() {
    const std::uint64_t t0 = std::max(done_, fetch_floor_);
    std::uint64_t cost = 0;
    if (edap()) {
      cost = core_.clearing_fixed_cycles + l1d_.valid_lines();
      l1d_.invalidate_all();
      for (auto& b : buffers_) b.clear();
      for (auto& r : regs_) r.sealed = true;
    }
    report_.stalls.clearing += cost;
    ++report_.counters.transitions;
    done_ = t0 + cost;
    fetch_floor_ = done_;
    resume_ = done_;
  }

  void instruction(const TraceEvent& ev, std::size_t index) {
    // Platform code and other threads run with the engine disengaged.
    const bool prot = edap() && ev.priv == Privilege::problem;
    const bool fu = prot && fu_engine();
    const bool alu = ev.kind == EventKind::non_mem || ev.kind == EventKind::branch;
    const std::size_t unit = fu && alu ? steer(index % core_.issue_width, ev.srcs)
                                       : index % core_.issue_width;

    const std::uint64_t t_if = if_.enter(fetch_floor_, 1);
    if (ev.kind == EventKind::branch) {
      fetch_floor_ = std::max(fetch_floor_, t_if + 1 + core_.branch_redirect_cycles);
    }
    const std::uint64_t t_id = id_.enter(t_if + core_.if_cycles, 1);
    std::uint64_t cursor = t_id + core_.id_cycles;

    // Operands: those read through DEC, and those needed at EX.
    std::vector<const Avail*> at_dec;
    std::vector<const Avail*> at_ex;
    bool dec_stage = false;
    if (alu) {
      if (fu) {
        bool all_hit = fp_.placement == Placement::fu_enclave_buffered;
        std::vector<bool> hit(ev.srcs.size(), false);
        if (all_hit) {
          for (std::size_t k = 0; k < ev.srcs.size(); ++k) {
            hit[k] = buffer_hit(unit, ev.srcs[k]);
            if (!hit[k]) keep(unit, ev.srcs[k]);
            all_hit = all_hit && hit[k];
          }
        }
        dec_stage = !all_hit && d_ > 0;
        for (std::size_t k = 0; k < ev.srcs.size(); ++k) {
          const RegTime& rt = regs_[ev.srcs[k]];
          if (hit[k]) {
            at_ex.push_back(&rt.clear);
          } else {
            (dec_stage ? at_dec : at_ex).push_back(&rt.cipher);
          }
        }
      } else {
        for (auto s : ev.srcs) at_ex.push_back(prot ? &clear_source(s) : &regs_[s].clear);
      }
    } else if (!ev.srcs.empty()) {
      // Address base at EX; store data waits until MEM.
      const std::uint8_t b = ev.srcs[0];
      at_ex.push_back(fu ? &regs_[b].cipher : prot ? &clear_source(b) : &regs_[b].clear);
    }

    if (dec_stage) {
      const std::uint64_t pipe = std::max(cursor, dec_.ready());
      const std::uint64_t want = wait_for(pipe, at_dec);
      const std::uint64_t start = dec_.enter(want, occ_d_);
      if (occ_d_ > 1) report_.stalls.dec += pipe - cursor;
      if (want > pipe) report_.stalls.dec += d_;
      ++report_.counters.dec_ops;
      cursor = start + d_;
    }

    const std::uint64_t t_ex = ex_.enter(wait_for(std::max(cursor, ex_.ready()), at_ex), 1);
    cursor = t_ex + core_.ex_cycles;
    const std::uint64_t ex_end = cursor;

    const bool enc_stage = fu && ev.kind == EventKind::non_mem && e_ > 0;
    if (enc_stage) {
      const std::uint64_t start = enc_.enter(cursor, occ_e_);
      if (occ_e_ > 1) report_.stalls.enc += start - cursor;
      ++report_.counters.enc_ops;
      cursor = start + e_;
    }

    if (ev.kind == EventKind::store && ev.srcs.size() > 1) {
      const std::uint8_t s = ev.srcs[1];
      const Avail* data = fu ? &regs_[s].cipher : prot ? &clear_source(s) : &regs_[s].clear;
      cursor = wait_for(std::max(cursor, mem_.ready()), {data});
    }
    const std::uint64_t t_mem = mem_.enter(cursor, 1);
    const std::uint64_t mem_end = t_mem + core_.l1_hit_cycles;
    const std::uint64_t t_wb = wb_.enter(mem_end, 1);
    std::uint64_t finish = t_wb + core_.wb_cycles;

    if (ev.is_memory()) {
      bool hit = false;
      const std::uint64_t fill = data_access(ev, hit);
      if (ev.kind == EventKind::store) {
        // Stores drain through an unbounded queue; any ENC happens there.
        if (prot && !fu && (fp_.placement == Placement::cleartext_regfile || !hit) && e_ > 0) {
          ++report_.counters.enc_ops;
        }
      } else {
        const std::uint64_t arrive = mem_end + fill;
        Avail v{arrive, 0, false, fill};
        const bool decrypt = prot && !fu && d_ > 0 &&
                             (fp_.placement == Placement::cleartext_regfile || !hit);
        if (decrypt) {
          const std::uint64_t start = fill_.enter(arrive, occ_d_);
          ++report_.counters.dec_ops;
          v = {start + d_, start + d_ - arrive, false, fill};
        }
        RegTime& rt = regs_[*ev.dst];
        rt.clear = v;
        rt.cipher = v;
        rt.sealed = false;
        snoop(*ev.dst);
        finish = std::max(finish, v.t);
      }
    } else if (ev.dst) {
      RegTime& rt = regs_[*ev.dst];
      rt.clear = {ex_end, 0, false, 0};
      rt.cipher = enc_stage ? Avail{cursor, e_, true, 0} : rt.clear;
      rt.sealed = false;
      if (fp_.placement == Placement::fu_enclave_buffered && prot) {
        insert(unit, *ev.dst);
      } else {
        snoop(*ev.dst);
      }
    }
    done_ = std::max(done_, finish);
  }

  machine::FootprintConfig fp_;
  CoreConfig core_;
  unsigned d_;
  unsigned e_;
  unsigned occ_d_;
  unsigned occ_e_;
  Stage if_, id_, dec_, ex_, enc_, mem_, wb_;
  Pool fill_;
  CacheIndex l1d_;
  CacheIndex l2_;
  std::vector<RegTime> regs_;
  std::vector<std::deque<std::uint8_t>> buffers_;
  std::uint64_t fetch_floor_ = 0;
  std::uint64_t resume_ = 0;
  std::uint64_t done_ = 0;
  SimReport report_;
};

}  // namespace

unsigned LatencyConfig::dec() const noexcept {
  return static_cast<unsigned>(std::llround(dec_cycles * scale));
}

unsigned LatencyConfig::enc() const noexcept {
  return static_cast<unsigned>(std::llround(enc_cycles * scale));
}

void LatencyConfig::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("latency scale must be a finite value >= 0");
  }
  if (dec_cycles > 100000 || enc_cycles > 100000) {
    throw std::invalid_argument("engine latency out of range");
  }
}

void CoreConfig::validate() const {
  if (issue_width < 1 || issue_width > 4) throw std::invalid_argument("issue_width must be 1..4");
  if (!if_cycles || !id_cycles || !ex_cycles || !wb_cycles || !l1_hit_cycles) {
    throw std::invalid_argument("base stage latencies must be >= 1");
  }
  // 48 KiB L1I has 48 sets, so only whole sets are required.
  for (const auto* g : {&l1i, &l1d, &l2}) g->validate();
  if (l1i.line_bytes != l1d.line_bytes || l2.line_bytes != l1d.line_bytes) {
    throw std::invalid_argument("all caches share one line size");
  }
}

unsigned pipeline_depth(Placement p, const LatencyConfig& lat, const CoreConfig& core) {
  unsigned depth = core.base_depth();
  if (p == Placement::fu_enclave || p == Placement::fu_enclave_buffered) {
    depth += lat.dec() + lat.enc();
  }
  return depth;
}

SimReport simulate(const Trace& trace, const machine::FootprintConfig& placement,
                   const LatencyConfig& lat, const CoreConfig& core) {
  lat.validate();
  core.validate();
  if (placement.placement != Placement::baseline) placement.validate();
  Sim s(placement, lat, core);
  s.run(trace);
  return s.take();
}

SimReport simulate(const Trace& trace, Placement placement, const LatencyConfig& lat,
                   const CoreConfig& core) {
  return simulate(trace, machine::FootprintConfig{placement}, lat, core);
}

std::vector<SimReport> sweep_latency(const Trace& trace, const machine::FootprintConfig& placement,
                                     const CoreConfig& core, const std::vector<double>& scales,
                                     LatencyConfig lat) {
  std::vector<SimReport> out;
  out.reserve(scales.size());
  for (double s : scales) {
    if (!(s >= 0.0)) throw std::invalid_argument("latency scales must be >= 0");
    lat.scale = s;
    out.push_back(simulate(trace, placement, lat, core));
  }
  return out;
}

const SimReport& PlacementSummary::at(Placement p) const {
  for (const auto& r : reports) {
    if (r.placement == p) return r;
  }
  throw std::out_of_range("placement not in summary");
}

PlacementSummary compare_placements(const Trace& trace, const LatencyConfig& lat,
                                    const CoreConfig& core, std::size_t buffer_entries) {
  PlacementSummary out;
  for (Placement p : machine::kAllPlacements) {
    out.reports.push_back(simulate(trace, machine::FootprintConfig{p, buffer_entries}, lat, core));
  }
  const double base = out.reports.front().ipc;
  out.ordered = true;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    auto& r = out.reports[i];
    r.normalized_ipc = base > 0 ? r.ipc / base : 0.0;
    if (i && r.cycles < out.reports[i - 1].cycles) out.ordered = false;
  }
  return out;
}

}  // namespace edap::sim
