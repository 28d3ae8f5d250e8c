#include "edap/exec/loader.hpp"

#include <string>

#include "edap/common/errors.hpp"

namespace edap::exec {

namespace {

constexpr std::uint64_t kBitsPerLine = (crypto::kLineBytes + crypto::kDigestBytes) * 8;

Bytes grant_message(const protocol::ResourceGrant& g) {
  ByteWriter w;
  w.u64(g.seid);
  w.raw(g.pub.bytes);
  return std::move(w).take();
}

Bytes seid_message(std::uint64_t seid) {
  ByteWriter w;
  w.u64(seid);
  return std::move(w).take();
}

void apply_memory_faults(MemoryImage& mem, const FaultPlan& faults) {
  if (faults.tamper_bit) {
    const std::uint64_t line = *faults.tamper_bit / kBitsPerLine;
    const std::uint64_t bit = *faults.tamper_bit % kBitsPerLine;
    if (line >= mem.lines().size()) throw std::out_of_range("tamper bit beyond loaded image");
    auto it = std::next(mem.lines().begin(), static_cast<std::ptrdiff_t>(line));
    MemoryLine& l = mem.raw(it->first);
    const auto mask = static_cast<std::uint8_t>(1u << (bit % 8));
    if (bit < crypto::kLineBytes * 8) {
      l.cipher.bytes[bit / 8] ^= mask;
    } else {
      l.digest.bytes[(bit - crypto::kLineBytes * 8) / 8] ^= mask;
    }
  }
  if (faults.remap_ea) {
    auto it = mem.lines().upper_bound(*faults.remap_ea);
    if (!mem.mapped(*faults.remap_ea) || it == mem.lines().end()) {
      it = mem.lines().begin();
    }
    if (it == mem.lines().end() || it->first == *faults.remap_ea) {
      throw std::out_of_range("remap needs two loaded blocks");
    }
    mem.swap(*faults.remap_ea, it->first);
  }
}

Deployment run_deployment(const SecureExecutable& exe, protocol::SessionContext owner,
                          ThreadId thread, protocol::ProcessorIdentity& proc,
                          DeterministicRng& owner_rng, const FaultPlan& faults,
                          protocol::DuplexChannel channel);

}  // namespace

void load_block(MemoryImage& mem, const protocol::StreamTuple& tuple) {
  mem.install(mem.translate(tuple.block.ea), {tuple.block.cipher, tuple.block.digest});
}

crypto::PlainBlock fetch_block(const MemoryImage& mem, const protocol::ProcessorIdentity& proc,
                               std::uint64_t ea, const Requester& requester,
                               ThreadId authorized) {
  if (requester.privilege != Privilege::problem) {
    throw AccessDenied(std::string("cleartext fetch refused at ") +
                       std::string(to_string(requester.privilege)) + " privilege");
  }
  if (requester.thread != authorized) {
    throw AccessDenied("thread " + std::to_string(requester.thread) + " does not own this block");
  }
  const MemoryLine& line = mem.at(mem.translate(ea));
  return proc.open_line(ea, line.cipher, line.digest);
}

Deployment deploy(const ProgramImage& image, protocol::ProcessorIdentity& proc,
                  protocol::PlatformState& pp, DeterministicRng& owner_rng,
                  const FaultPlan& faults, std::shared_ptr<protocol::PairLedger> ledger) {
  if (faults.forge_public_key) {
    protocol::PublicKey junk;
    owner_rng.fork().fill(junk.bytes);
    pp.forge_public_key(junk);
  }
  protocol::ResourceGrant grant = grant_resources(pp, proc);
  protocol::SessionContext owner = protocol::make_session(grant, owner_rng, std::move(ledger));
  SecureExecutable exe = package(image, owner);
  protocol::DuplexChannel ch;
  ch.post(protocol::Actor::platform, protocol::Actor::owner, "grant", grant_message(grant));
  ch.take(protocol::Actor::owner);
  return run_deployment(exe, std::move(owner), image.thread_id, proc, owner_rng, faults,
                        std::move(ch));
}

Deployment deploy_packaged(const SecureExecutable& exe, protocol::SessionContext owner,
                           ThreadId thread, protocol::ProcessorIdentity& proc,
                           DeterministicRng& owner_rng, const FaultPlan& faults) {
  return run_deployment(exe, std::move(owner), thread, proc, owner_rng, faults, {});
}

namespace {

Deployment run_deployment(const SecureExecutable& exe, protocol::SessionContext owner,
                          ThreadId thread, protocol::ProcessorIdentity& proc,
                          DeterministicRng& owner_rng, const FaultPlan& faults,
                          protocol::DuplexChannel channel) {
  using protocol::Actor;
  Deployment d;
  d.channel = std::move(channel);
  d.exe = exe;
  d.binding = CodeBinding::from(exe, thread);
  auto& ch = d.channel;

  ch.post(Actor::platform, Actor::processor, "seid", seid_message(owner.seid));
  ch.post(Actor::owner, Actor::processor, "session-key", begin_session(owner, owner_rng).blob);
  ch.post(Actor::owner, Actor::processor, "memory-key", wrap_xts_key(owner, owner_rng).blob);
  const std::size_t first_frame = ch.transcript().size();
  for (const auto& f : protocol::stream_send(owner, exe.blocks)) {
    ch.post(Actor::owner, Actor::processor, "frame", Bytes(f.begin(), f.end()));
  }
  if (faults.replay_frame) {
    if (*faults.replay_frame >= exe.blocks.size()) throw std::out_of_range("replay frame index");
    ch.replay(first_frame + *faults.replay_frame);
  }

  const protocol::Message seid_msg = ch.take(Actor::processor);
  const std::uint64_t seid = ByteReader(seid_msg.payload).u64();
  proc.accept_session({ch.take(Actor::processor).payload}, seid);
  proc.load_xts_key({ch.take(Actor::processor).payload});
  while (ch.pending(Actor::processor)) {
    protocol::Message m = ch.take(Actor::processor);
    protocol::StreamTuple t = proc.receive(m.payload);
    load_block(d.memory, t);
    ++d.frames_accepted;
  }
  apply_memory_faults(d.memory, faults);
  d.owner = std::move(owner);
  return d;
}

}  // namespace

std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> fetch_program(
    const Deployment& d, const protocol::ProcessorIdentity& proc) {
  std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> out;
  const Requester me{d.binding.thread, Privilege::problem};
  for (const auto& blk : d.exe.blocks) {
    auto plain = fetch_block(d.memory, proc, blk.ea, me, d.binding.thread);
    const MemoryLine& raw = d.memory.at(d.memory.translate(blk.ea));
    verify_code_binding(d.binding, me.thread, blk.ea, {blk.ea, raw.cipher, raw.digest});
    out.emplace_back(blk.ea, plain);
  }
  return out;
}

}  // namespace edap::exec
