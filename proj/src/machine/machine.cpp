#include "edap/machine/machine.hpp"

#include <sodium.h>

#include <algorithm>
#include <string>

#include "edap/common/errors.hpp"

namespace edap::machine {

namespace {

constexpr std::uint64_t kRegisterTweakBase = 0xffff'0000'0000'0000ull;
constexpr std::size_t kNoUnit = static_cast<std::size_t>(-1);

std::uint64_t line_of(std::uint64_t ea) { return ea & ~std::uint64_t{crypto::kLineBytes - 1}; }
std::size_t word_offset(std::uint64_t ea) { return (ea % crypto::kLineBytes) & ~std::size_t{7}; }

std::uint64_t low_word(const crypto::Block16& b) { return load_le64(b.data()); }

crypto::Block16 from_word(std::uint64_t v) {
  crypto::Block16 b{};
  store_le64(b.data(), v);
  return b;
}

RegisterTaint word_taint(bool tainted) { return tainted ? RegisterTaint(0xff) : RegisterTaint(); }

}  // namespace

Machine::Machine(MachineOptions opts, const protocol::ProcessorIdentity& proc,
                 exec::MemoryImage& mem, ThreadId protected_thread,
                 const exec::CodeBinding* binding)
    : opts_(opts),
      proc_(proc),
      mem_(mem),
      owner_(protected_thread),
      binding_(binding),
      thread_(protected_thread),
      regs_(opts.registers),
      scratch_(opts.registers),
      l1d_(opts.l1d),
      l1i_(opts.l1i),
      l1d_data_(l1d_.slots()),
      l1i_data_(l1i_.slots()),
      buffers_(opts.functional_units) {
  opts_.footprint.validate();
  if (opts_.functional_units == 0) throw std::invalid_argument("need at least one functional unit");
  if (!proc_.has_xts_key()) throw ProtocolError("processor has no memory key loaded");
}

std::uint64_t Machine::seid() const { return proc_.seid().value_or(0); }

crypto::Block16 Machine::register_tweak(std::size_t r) const {
  crypto::Block16 t;
  store_be64(t.data(), seid());
  store_be64(t.data() + 8, kRegisterTweakBase + crypto::kLineBytes * r);
  return t;
}

void Machine::require_owner_running(const char* what) const {
  if (privilege_ != Privilege::problem || thread_ != owner_ || !engaged_) {
    throw AccessDenied(std::string(what) + " outside the owner's problem state");
  }
}

void Machine::require_privileged(const char* what) const {
  if (privilege_ == Privilege::problem) {
    throw AccessDenied(std::string(what) + " is a privileged operation");
  }
}

void Machine::begin_execution(std::uint64_t ea) {
  require_owner_running("program start");
  if (binding_ && ea != binding_->entry_point) {
    throw BindingError("execution must start at the signed entry point");
  }
}

void Machine::seal_register(Register& reg, std::size_t r) {
  if (reg.tag != RegTag::clear) return;
  reg.payload = proc_.seal_unit(register_tweak(r), reg.payload);
  reg.tag = RegTag::cipher;
  reg.hidden = false;
  reg.taint.reset();
}

void Machine::open_register(Register& reg, std::size_t r) {
  if (reg.tag != RegTag::cipher) return;
  reg.payload = proc_.open_unit(register_tweak(r), reg.payload);
  reg.tag = RegTag::clear;
  reg.owner = owner_;
  reg.taint.set();
}

Operand Machine::read_operand(std::size_t r, const Requester& who) {
  Register& reg = regs_.at(r);
  const bool owner_running = who.privilege == Privilege::problem &&
                             privilege_ == Privilege::problem && who.thread == thread_ &&
                             who.thread == owner_ && engaged_;
  switch (reg.tag) {
    case RegTag::empty:
      return {};
    case RegTag::clear:
      if (!owner_running || reg.owner != who.thread) {
        throw AccessDenied("register " + std::to_string(r) + " holds another thread's cleartext");
      }
      return {RegTag::clear, reg.payload};
    case RegTag::cipher:
      if (owner_running && opts_.footprint.registers_clear()) {
        open_register(reg, r);
        return {RegTag::clear, reg.payload};
      }
      return {RegTag::cipher, reg.payload};
  }
  return {};
}

std::optional<crypto::Block16> Machine::buffer_lookup(std::size_t fu, std::size_t r,
                                                      ThreadId thread) {
  auto& buf = buffers_.at(fu);
  auto it = std::find_if(buf.begin(), buf.end(),
                         [&](const BufferEntry& e) { return e.reg == r && e.thread == thread; });
  if (it == buf.end()) return std::nullopt;
  buf.splice(buf.begin(), buf, it);
  return buf.front().value;
}

std::size_t Machine::steer(std::size_t first, std::span<const std::size_t> srcs) const {
  const std::size_t n = buffers_.size();
  first %= n;
  if (!opts_.footprint.buffered()) return first;
  std::size_t best = first, best_hits = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t u = (first + j) % n;
    std::size_t hits = 0;
    for (std::size_t r : srcs) {
      hits += std::any_of(buffers_[u].begin(), buffers_[u].end(),
                          [&](const BufferEntry& e) { return e.reg == r && e.thread == owner_; });
    }
    if (hits > best_hits) best = u, best_hits = hits;
  }
  return best;
}

void Machine::snoop_clear(std::size_t r) {
  for (auto& buf : buffers_) buf.remove_if([&](const BufferEntry& e) { return e.reg == r; });
}

crypto::Block16 Machine::source_value(std::size_t fu, std::size_t r, RegisterTaint& taint) {
  Register& reg = regs_.at(r);
  if (reg.tag == RegTag::empty) return {};
  if (opts_.footprint.buffered() && fu != kNoUnit) {
    if (auto hit = buffer_lookup(fu, r, owner_)) {
      taint |= buffers_[fu].front().taint;
      return *hit;
    }
  }
  if (opts_.footprint.registers_clear()) {
    open_register(reg, r);
    taint |= reg.taint;
    return reg.payload;
  }
  // Decrypted inside the functional unit only.
  taint.set();
  const crypto::Block16 v = proc_.open_unit(register_tweak(r), reg.payload);
  if (opts_.footprint.buffered() && fu != kNoUnit) {
    auto& buf = buffers_.at(fu);
    buf.push_front({r, owner_, v, RegisterTaint{}.set()});
    while (buf.size() > opts_.footprint.buffer_entries) buf.pop_back();
  }
  return v;
}

void Machine::write_result(std::size_t fu, std::size_t dst, const crypto::Block16& v,
                           RegisterTaint taint) {
  Register& reg = regs_.at(dst);
  if (opts_.footprint.buffered()) snoop_clear(dst);
  reg.owner = owner_;
  reg.hidden = false;
  if (opts_.footprint.registers_clear()) {
    reg.tag = RegTag::clear;
    reg.payload = v;
    reg.taint = taint;
    return;
  }
  reg.tag = RegTag::cipher;
  reg.payload = proc_.seal_unit(register_tweak(dst), v);
  reg.taint.reset();
  if (opts_.footprint.buffered() && fu != kNoUnit) {
    auto& buf = buffers_.at(fu);
    buf.push_front({dst, owner_, v, taint});
    while (buf.size() > opts_.footprint.buffer_entries) buf.pop_back();
  }
}

void Machine::execute_alu(std::size_t fu, std::size_t dst, std::span<const std::size_t> srcs,
                          std::uint64_t imm) {
  require_owner_running("instruction");
  fu %= buffers_.size();
  RegisterTaint taint;
  std::uint64_t acc = imm;
  for (std::size_t s : srcs) acc = acc * 0x100000001b3ull ^ low_word(source_value(fu, s, taint));
  write_result(fu, dst, from_word(acc), taint);
}

crypto::PlainBlock Machine::line_plain(std::uint64_t line_ea, LineTaint& taint) {
  if (auto slot = l1d_.find(line_ea, owner_)) {
    l1d_.access(line_ea, owner_);
    const L1Line& l = l1d_data_[*slot];
    crypto::PlainBlock p;
    if (l.clear) {
      p.bytes = l.bytes;
      taint = l.taint;
    } else {
      crypto::CipherBlock c;
      c.bytes = l.bytes;
      p = proc_.open_line(line_ea, c, l.digest);
      taint.set();
    }
    return p;
  }
  const exec::MemoryLine& raw = mem_.at(mem_.translate(line_ea));
  crypto::PlainBlock p = proc_.open_line(line_ea, raw.cipher, raw.digest);
  taint.set();
  auto a = l1d_.access(line_ea, owner_);
  L1Line& l = l1d_data_[a.slot];
  l.clear = opts_.footprint.l1_clear();
  l.bytes = l.clear ? p.bytes : raw.cipher.bytes;
  l.digest = raw.digest;
  l.taint = l.clear ? taint : LineTaint();
  return p;
}

void Machine::write_line(std::uint64_t line_ea, const crypto::PlainBlock& plain,
                         const LineTaint& taint) {
  crypto::SealedLine sealed = proc_.seal_line(line_ea, plain);
  mem_.update(mem_.translate(line_ea), {sealed.cipher, sealed.digest});
  if (auto slot = l1d_.find(line_ea, owner_)) {
    L1Line& l = l1d_data_[*slot];
    l.bytes = l.clear ? plain.bytes : sealed.cipher.bytes;
    l.digest = sealed.digest;
    l.taint = l.clear ? taint : LineTaint();
  }
}

Word Machine::read_memory(std::uint64_t ea, const Requester& who) {
  if (who.privilege != Privilege::problem || who.thread != owner_) {
    throw AccessDenied("memory of the protected thread is readable only by its owner");
  }
  require_owner_running("memory read");
  LineTaint taint;
  crypto::PlainBlock p = line_plain(line_of(ea), taint);
  const std::size_t off = word_offset(ea);
  return {load_le64(p.bytes.data() + off), taint.test(off)};
}

void Machine::execute_load(std::size_t dst, std::uint64_t ea) {
  Word w = read_memory(ea, {owner_, Privilege::problem});
  write_result(kNoUnit, dst, from_word(w.value), word_taint(w.tainted));
}

void Machine::execute_store(std::size_t src, std::uint64_t ea) {
  require_owner_running("store");
  RegisterTaint vt;
  const std::uint64_t v = low_word(source_value(kNoUnit, src, vt));
  const std::uint64_t line_ea = line_of(ea);
  LineTaint taint;
  crypto::PlainBlock p = line_plain(line_ea, taint);
  const std::size_t off = word_offset(ea);
  store_le64(p.bytes.data() + off, v);
  for (std::size_t i = 0; i < 8; ++i) taint.set(off + i, vt.test(i));
  write_line(line_ea, p, taint);
}

crypto::PlainBlock Machine::fetch_code(std::uint64_t ea, const Requester& who) {
  if (who.privilege != Privilege::problem || who.thread != owner_) {
    throw AccessDenied("instruction fetch of protected code by another requester");
  }
  require_owner_running("instruction fetch");
  const std::uint64_t line_ea = line_of(ea);
  if (auto slot = l1i_.find(line_ea, owner_)) {
    l1i_.access(line_ea, owner_);
    const L1Line& l = l1i_data_[*slot];
    if (l.clear) {
      crypto::PlainBlock p;
      p.bytes = l.bytes;
      return p;
    }
    crypto::CipherBlock c;
    c.bytes = l.bytes;
    return proc_.open_line(line_ea, c, l.digest);
  }
  const exec::MemoryLine& raw = mem_.at(mem_.translate(line_ea));
  crypto::PlainBlock p = proc_.open_line(line_ea, raw.cipher, raw.digest);
  if (binding_) verify_code_binding(*binding_, who.thread, line_ea, {line_ea, raw.cipher, raw.digest});
  auto a = l1i_.access(line_ea, owner_);
  L1Line& l = l1i_data_[a.slot];
  l.clear = opts_.footprint.l1_clear();
  l.bytes = l.clear ? p.bytes : raw.cipher.bytes;
  l.digest = raw.digest;
  l.taint = l.clear ? LineTaint().set() : LineTaint();
  return p;
}

void Machine::execute_platform_alu(std::size_t dst, std::span<const std::size_t> srcs) {
  std::uint64_t acc = 1;
  for (std::size_t s : srcs) acc += low_word(scratch_.at(s).payload);
  Register& r = scratch_.at(dst);
  r.tag = RegTag::clear;
  r.owner = thread_;
  r.payload = from_word(acc);
}

void Machine::execute_platform_load(std::size_t dst, std::uint64_t ea) {
  auto it = platform_mem_.find(ea & ~std::uint64_t{7});
  Register& r = scratch_.at(dst);
  r.tag = RegTag::clear;
  r.owner = thread_;
  r.payload = from_word(it == platform_mem_.end() ? 0 : it->second);
}

void Machine::execute_platform_store(std::size_t src, std::uint64_t ea) {
  platform_mem_[ea & ~std::uint64_t{7}] = low_word(scratch_.at(src).payload);
}

void Machine::clear_footprint() {
  for (auto& buf : buffers_) buf.clear();
  l1d_.invalidate_all();
  l1i_.invalidate_all();
  for (auto& l : l1d_data_) l = L1Line{};
  for (auto& l : l1i_data_) l = L1Line{};
}

Machine::RegHash Machine::register_hash(std::size_t r) const {
  const Register& reg = regs_[r];
  RegHash h{};
  std::uint8_t head[6] = {static_cast<std::uint8_t>(reg.tag), static_cast<std::uint8_t>(reg.hidden)};
  head[2] = static_cast<std::uint8_t>(reg.owner >> 24);
  head[3] = static_cast<std::uint8_t>(reg.owner >> 16);
  head[4] = static_cast<std::uint8_t>(reg.owner >> 8);
  head[5] = static_cast<std::uint8_t>(reg.owner);
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, h.size());
  crypto_generichash_update(&st, head, sizeof head);
  crypto_generichash_update(&st, reg.payload.data(), reg.payload.size());
  crypto_generichash_final(&st, h.data(), h.size());
  return h;
}

void Machine::transfer_control(Privilege to, std::optional<ThreadId> next_thread) {
  if (privilege_ == Privilege::problem && to == Privilege::problem) {
    if (next_thread && *next_thread != thread_) {
      throw ProtocolError("thread switch must pass through privileged state");
    }
    return;
  }
  if (privilege_ == Privilege::problem) {
    const bool leaving_owner = thread_ == owner_;
    if (!opts_.skip_clearing) {
      if (leaving_owner) {
        for (std::size_t r = 0; r < regs_.size(); ++r) seal_register(regs_[r], r);
      }
      clear_footprint();
    }
    if (leaving_owner) {
      std::vector<RegHash> hashes(regs_.size());
      for (std::size_t r = 0; r < regs_.size(); ++r) hashes[r] = register_hash(r);
      saved_hash_ = std::move(hashes);
    }
    engaged_ = false;
    privilege_ = to;
    ++transfers_;
    return;
  }
  if (to != Privilege::problem) {
    privilege_ = to;
    return;
  }
  const ThreadId next = next_thread.value_or(thread_);
  if (next == owner_ && saved_hash_) {
    for (std::size_t r = 0; r < regs_.size(); ++r) {
      if (register_hash(r) != (*saved_hash_)[r]) {
        throw StateHashMismatch("register " + std::to_string(r) + " changed while switched out");
      }
    }
    saved_hash_.reset();
    for (auto& reg : regs_) reg.hidden = false;
  }
  if (!opts_.skip_clearing) clear_footprint();
  thread_ = next;
  privilege_ = Privilege::problem;
  engaged_ = true;
}

void Machine::load_and_hide(std::size_t r, std::uint64_t ea) {
  require_privileged("load-and-hide");
  const exec::MemoryLine& raw = mem_.at(mem_.translate(line_of(ea)));
  crypto::PlainBlock p = proc_.open_line(line_of(ea), raw.cipher, raw.digest);
  Register& reg = regs_.at(r);
  reg.owner = owner_;
  reg.payload = p.section(0);
  if (opts_.footprint.registers_clear()) {
    reg.tag = RegTag::clear;
    reg.hidden = true;
    reg.taint.set();
  } else {
    reg.tag = RegTag::clear;
    seal_register(reg, r);
  }
  if (saved_hash_) (*saved_hash_)[r] = register_hash(r);
}

void Machine::store_and_clear(std::size_t r, std::uint64_t ea) {
  require_privileged("store-and-clear");
  Register& reg = regs_.at(r);
  crypto::PlainBlock p;
  if (reg.tag == RegTag::clear) p.set_section(0, reg.payload);
  if (reg.tag == RegTag::cipher) p.set_section(0, proc_.open_unit(register_tweak(r), reg.payload));
  crypto::SealedLine sealed = proc_.seal_line(line_of(ea), p);
  const std::uint64_t real = mem_.translate(line_of(ea));
  if (mem_.mapped(real)) {
    mem_.update(real, {sealed.cipher, sealed.digest});
  } else {
    mem_.install(real, {sealed.cipher, sealed.digest});
  }
  secure_wipe(p.bytes.data(), p.bytes.size());
  reg = Register{};
  if (saved_hash_) (*saved_hash_)[r] = register_hash(r);
}

void Machine::init_empty_block(std::uint64_t ea, const Requester& caller) {
  if (caller.privilege == Privilege::problem) {
    throw AccessDenied("empty blocks are initialized by supervisor or hypervisor only");
  }
  if (ea % crypto::kLineBytes != 0) throw AlignmentError("empty block must be line aligned");
  const std::uint64_t real = mem_.translate(ea);
  if (mem_.mapped(real)) throw IntegrityError("block already initialized");
  crypto::SealedLine sealed = proc_.seal_line(ea, crypto::PlainBlock{});
  mem_.install(real, {sealed.cipher, sealed.digest});
  owned_blocks_[ea] = false;
}

void Machine::acquire_block(std::uint64_t ea, const Requester& who) {
  if (who.privilege != Privilege::problem || who.thread != owner_) {
    throw AccessDenied("only the owning thread may acquire a block");
  }
  auto it = owned_blocks_.find(ea);
  if (it == owned_blocks_.end()) {
    if (!mem_.mapped(mem_.translate(ea))) throw UnmappedBlock("block not initialized");
    throw AccessDenied("block is not an owned empty block");
  }
  it->second = true;
}

void Machine::release_block(std::uint64_t ea, const Requester& who) {
  if (who.privilege != Privilege::problem || who.thread != owner_) {
    throw AccessDenied("only the owning thread may release a block");
  }
  auto it = owned_blocks_.find(ea);
  if (it == owned_blocks_.end()) throw AccessDenied("block is not owned by this thread");
  if (auto slot = l1d_.find(ea, owner_)) {
    l1d_.invalidate(*slot);
    l1d_data_[*slot] = L1Line{};
  }
  mem_.erase(mem_.translate(ea));
  owned_blocks_.erase(it);
}

bool Machine::acquired(std::uint64_t ea) const {
  auto it = owned_blocks_.find(ea);
  return it != owned_blocks_.end() && it->second;
}

void Machine::poke_register(std::size_t r, std::size_t bit) {
  require_privileged("raw register access");
  Register& reg = regs_.at(r);
  reg.payload[(bit / 8) % reg.payload.size()] ^= static_cast<std::uint8_t>(1u << (bit % 8));
  if (reg.tag == RegTag::empty) reg.tag = RegTag::cipher;
}

}  // namespace edap::machine
