#include "edap/exec/secure_executable.hpp"

#include <set>
#include <string>

#include "edap/common/errors.hpp"

namespace edap::exec {

namespace {

constexpr std::uint8_t kMagic[4] = {'E', 'D', 'A', 'P'};

}  // namespace

Bytes SecureExecutable::serialize() const {
  ByteWriter w;
  w.raw(kMagic);
  w.u16(kExecutableVersion);
  w.u64(seid);
  w.u64(entry_point);
  w.u32(static_cast<std::uint32_t>(blocks.size()));
  for (const auto& b : blocks) w.raw(b.serialize());
  return std::move(w).take();
}

SecureExecutable SecureExecutable::parse(ByteView in) {
  ByteReader r(in);
  ByteView m = r.raw(4);
  if (!std::equal(m.begin(), m.end(), kMagic)) throw ParseError("not a secure executable");
  const std::uint16_t version = r.u16();
  if (version != kExecutableVersion) {
    throw ParseError("unsupported secure executable version " + std::to_string(version));
  }
  SecureExecutable exe;
  exe.seid = r.u64();
  exe.entry_point = r.u64();
  const std::uint32_t n = r.u32();
  if (r.remaining() / crypto::kEncryptedBlockBytes < n) throw ParseError("truncated input");
  std::set<std::uint64_t> eas;
  exe.blocks.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    exe.blocks.push_back(crypto::EncryptedBlock::parse(r.raw(crypto::kEncryptedBlockBytes)));
    if (!eas.insert(exe.blocks.back().ea).second) throw ParseError("duplicate block address");
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes after last block");
  return exe;
}

SecureExecutable package(const ProgramImage& image, protocol::SessionContext& ctx) {
  auto lines = image.lines();
  protocol::check_pair_freshness(ctx);
  crypto::LineCodec codec(ctx.xts_key);
  SecureExecutable exe;
  exe.seid = ctx.seid;
  exe.entry_point = image.entry_point;
  exe.blocks.reserve(lines.size());
  for (const auto& [ea, plain] : lines) {
    auto sealed = codec.encrypt({ctx.seid, ea}, plain);
    exe.blocks.push_back({ea, sealed.cipher, sealed.digest});
  }
  return exe;
}

CodeBinding CodeBinding::from(const SecureExecutable& exe, ThreadId thread) {
  CodeBinding b;
  b.seid = exe.seid;
  b.thread = thread;
  b.entry_point = exe.entry_point;
  for (const auto& blk : exe.blocks) b.digests.emplace(blk.ea, blk.digest);
  return b;
}

void verify_code_binding(const CodeBinding& binding, ThreadId thread, std::uint64_t ea,
                         const crypto::EncryptedBlock& presented) {
  if (thread != binding.thread) {
    throw BindingError("thread " + std::to_string(thread) + " is not bound to this program");
  }
  if (presented.ea != ea) throw BindingError("block presented at a different address");
  auto it = binding.digests.find(ea);
  if (it == binding.digests.end()) throw BindingError("no signed block at this address");
  if (!(it->second == presented.digest)) throw BindingError("block was not signed for this address");
}

}  // namespace edap::exec
