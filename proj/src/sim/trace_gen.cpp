#include "edap/sim/trace_gen.hpp"

#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>

namespace edap::sim {

namespace {

constexpr std::string_view kKinds[] = {"dep_chain", "independent", "mem_bound", "mixed"};

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}

  double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return n ? gen_() % n : 0; }
  std::size_t geometric(double p) {
    if (p >= 1.0) return 0;
    double u = unit();
    return static_cast<std::size_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
  }

 private:
  std::mt19937_64 gen_;
};

class Builder {
 public:
  Builder(const TraceParams& p, std::uint64_t seed)
      : p_(p), rng_(seed), l1_(p.l1d) {}

  Trace take() { return std::move(out_); }
  std::size_t size() const { return out_.size(); }

  std::uint8_t next_result() {
    std::uint8_t r = static_cast<std::uint8_t>(kFirstResult + rotate_);
    rotate_ = (rotate_ + 1) % (kLogicalRegisters - kFirstResult);
    return r;
  }

  std::uint8_t input() { return static_cast<std::uint8_t>(kFirstInput + rng_.below(kBaseRegs)); }
  std::uint8_t base() { return static_cast<std::uint8_t>(rng_.below(kBaseRegs)); }

  /// A recent result usable by the event about to be emitted, or an input.
  std::uint8_t source(bool non_mem_only) {
    if (rng_.unit() < p_.reuse) {
      std::size_t want = rng_.geometric(p_.dep_spread);
      std::size_t seen = 0;
      const std::uint64_t now = out_.size();
      for (auto it = results_.rbegin(); it != results_.rend(); ++it) {
        if (it->load && (non_mem_only || now - it->seq < p_.load_use_distance)) continue;
        if (seen++ == want) return it->reg;
      }
    }
    return input();
  }

  void record(std::uint8_t reg, bool load) {
    results_.push_back({out_.size(), reg, load});
    if (results_.size() > 40) results_.pop_front();
  }

  /// Hot line on a hit draw; a line outside L1 on a miss draw.
  std::uint64_t data_ea() {
    std::uint64_t line;
    if (rng_.unit() < p_.l1_hit_rate) {
      line = p_.data_base / 128 + rng_.below(p_.hot_lines);
      for (int tries = 0; tries < 16 && !l1_.find(line * 128, p_.thread); ++tries) {
        line = p_.data_base / 128 + rng_.below(p_.hot_lines);
      }
      if (!l1_.find(line * 128, p_.thread)) {
        // Hot set displaced by misses: reuse whatever data line is resident.
        const std::uint64_t lo = p_.data_base / 128;
        const std::uint64_t hi = lo + p_.hot_lines + p_.cold_lines;
        const std::size_t n = l1_.slots();
        const std::size_t start = rng_.below(n);
        for (std::size_t k = 0; k < n; ++k) {
          const auto& en = l1_.entry((start + k) % n);
          if (en.valid && en.thread == p_.thread && en.line >= lo && en.line < hi) {
            line = en.line;
            break;
          }
        }
      }
    } else {
      const std::uint64_t cold0 = p_.data_base / 128 + p_.hot_lines;
      line = cold0 + rng_.below(p_.cold_lines);
      for (int tries = 0; tries < 16 && l1_.find(line * 128, p_.thread); ++tries) {
        line = cold0 + rng_.below(p_.cold_lines);
      }
    }
    l1_.access(line * 128, p_.thread);
    return line * 128 + 8 * rng_.below(16);
  }

  void emit(TraceEvent e) {
    e.seq = out_.size();
    e.thread = p_.thread;
    out_.push_back(std::move(e));
  }

  void non_mem(Privilege priv = Privilege::problem) {
    TraceEvent e;
    e.kind = EventKind::non_mem;
    e.srcs = {source(false), source(false)};
    e.dst = next_result();
    e.priv = priv;
    std::uint8_t d = *e.dst;
    emit(std::move(e));
    record(d, false);
  }

  void load() {
    TraceEvent e;
    e.kind = EventKind::load;
    e.srcs = {base()};
    e.dst = next_result();
    e.ea = data_ea();
    std::uint8_t d = *e.dst;
    emit(std::move(e));
    record(d, true);
  }

  void store() {
    TraceEvent e;
    e.kind = EventKind::store;
    e.srcs = {base(), source(true)};
    e.ea = data_ea();
    emit(std::move(e));
  }

  void branch() {
    TraceEvent e;
    e.kind = EventKind::branch;
    e.srcs = {source(false)};
    emit(std::move(e));
  }

  /// priv_enter, a burst of platform work, priv_exit.
  void round_trip(std::size_t budget) {
    const Privilege level = (trips_++ % 2) ? Privilege::hypervisor : Privilege::supervisor;
    TraceEvent enter;
    enter.kind = EventKind::priv_enter;
    enter.priv = level;
    emit(std::move(enter));
    std::size_t burst = std::min(p_.priv_burst, budget > 2 ? budget - 2 : 0);
    for (std::size_t i = 0; i < burst; ++i) {
      TraceEvent e;
      e.priv = level;
      const std::uint64_t pea = p_.platform_base + 128 * rng_.below(16) + 8 * rng_.below(16);
      switch (rng_.below(3)) {
        case 0:
          e.kind = EventKind::load;
          e.srcs = {base()};
          e.dst = next_result();
          e.ea = pea;
          break;
        case 1:
          e.kind = EventKind::store;
          e.srcs = {base(), input()};
          e.ea = pea;
          break;
        default:
          e.kind = EventKind::non_mem;
          e.srcs = {input()};
          e.dst = next_result();
          break;
      }
      l1_.access(pea & ~std::uint64_t{127}, p_.thread);
      emit(std::move(e));
    }
    // Results of platform code are not forwarded into the protected stream.
    results_.clear();
    TraceEvent exit;
    exit.kind = EventKind::priv_exit;
    exit.priv = Privilege::problem;
    emit(std::move(exit));
  }

  Draw& rng() { return rng_; }

 private:
  struct Result {
    std::uint64_t seq;
    std::uint8_t reg;
    bool load;
  };

  const TraceParams& p_;
  Draw rng_;
  machine::CacheIndex l1_;
  Trace out_;
  std::deque<Result> results_;
  std::size_t rotate_ = 0;
  std::size_t trips_ = 0;
};

Trace gen_dep_chain(const TraceParams& p) {
  Trace t;
  t.reserve(p.length);
  std::uint8_t prev = kFirstInput;
  for (std::size_t i = 0; i < p.length; ++i) {
    TraceEvent e;
    e.seq = i;
    e.kind = EventKind::non_mem;
    e.srcs = {prev};
    e.dst = static_cast<std::uint8_t>(kFirstResult + i % (kLogicalRegisters - kFirstResult));
    e.thread = p.thread;
    prev = *e.dst;
    t.push_back(std::move(e));
  }
  return t;
}

Trace gen_independent(const TraceParams& p) {
  Trace t;
  t.reserve(p.length);
  for (std::size_t i = 0; i < p.length; ++i) {
    TraceEvent e;
    e.seq = i;
    e.kind = EventKind::non_mem;
    e.srcs = {static_cast<std::uint8_t>(i % 16)};
    e.dst = static_cast<std::uint8_t>(kFirstResult + i % (kLogicalRegisters - kFirstResult));
    e.thread = p.thread;
    t.push_back(std::move(e));
  }
  return t;
}

Trace gen_random(const TraceParams& p, std::uint64_t seed, bool with_branches) {
  Builder b(p, seed);
  const double f_load = p.load_fraction;
  const double f_store = f_load + p.store_fraction;
  const double f_branch = f_store + (with_branches ? p.branch_fraction : 0.0);
  std::size_t since = 0;
  while (b.size() < p.length) {
    if (p.priv_switch_period && since == p.priv_switch_period) {
      since = 0;
      b.round_trip(p.length - b.size());
      continue;
    }
    const double u = b.rng().unit();
    if (u < f_load) {
      b.load();
    } else if (u < f_store) {
      b.store();
    } else if (u < f_branch) {
      b.branch();
    } else {
      b.non_mem();
    }
    ++since;
  }
  return b.take();
}

}  // namespace

std::string_view to_string(TraceKind k) noexcept { return kKinds[static_cast<int>(k)]; }

std::optional<TraceKind> parse_trace_kind(std::string_view s) noexcept {
  for (int i = 0; i < 4; ++i) {
    if (s == kKinds[i]) return static_cast<TraceKind>(i);
  }
  return std::nullopt;
}

void TraceParams::validate() const {
  auto frac = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!frac(l1_hit_rate) || !frac(load_fraction) || !frac(store_fraction) ||
      !frac(branch_fraction) || !frac(reuse)) {
    throw std::invalid_argument("fractions must lie in [0, 1]");
  }
  if (load_fraction + store_fraction + branch_fraction > 1.0 + 1e-12) {
    throw std::invalid_argument("load, store and branch fractions sum above 1");
  }
  if (!(dep_spread > 0.0 && dep_spread <= 1.0)) {
    throw std::invalid_argument("dep_spread must lie in (0, 1]");
  }
  if (hot_lines == 0 || cold_lines == 0) throw std::invalid_argument("empty address pool");
  if (data_base % 128 || platform_base % 128) {
    throw std::invalid_argument("address pools must be line aligned");
  }
  l1d.validate();
}

Trace generate_trace(TraceKind kind, const TraceParams& params, std::uint64_t seed) {
  params.validate();
  switch (kind) {
    case TraceKind::dep_chain:
      return gen_dep_chain(params);
    case TraceKind::independent:
      return gen_independent(params);
    case TraceKind::mem_bound:
      return gen_random(params, seed, false);
    case TraceKind::mixed:
      return gen_random(params, seed, true);
  }
  throw std::invalid_argument("unknown trace kind");
}

double measured_hit_rate(const Trace& t, const machine::CacheGeometry& l1d) {
  machine::CacheIndex c(l1d);
  std::size_t hits = 0;
  std::size_t total = 0;
  for (const auto& e : t) {
    if (!e.is_memory()) continue;
    const bool hit = c.access(*e.ea & ~std::uint64_t{127}, e.thread).hit;
    if (e.priv != Privilege::problem) continue;
    ++total;
    hits += hit;
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 1.0;
}

}  // namespace edap::sim
