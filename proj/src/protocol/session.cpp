#include "edap/protocol/session.hpp"

#include <sodium.h>

#include <filesystem>

#include "edap/common/errors.hpp"

namespace edap::protocol {

namespace {

constexpr std::uint8_t kLedgerMagic[4] = {'E', 'D', 'P', 'L'};
constexpr std::uint16_t kLedgerVersion = 1;
constexpr std::uint8_t kOwnerMagic[4] = {'E', 'D', 'O', 'S'};
constexpr std::uint16_t kOwnerVersion = 1;

}  // namespace

PairFingerprint pair_fingerprint(const crypto::XtsKeyPair& key, std::uint64_t seid) {
  ensure_sodium();
  std::uint8_t s[8];
  store_be64(s, seid);
  PairFingerprint fp{};
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, fp.size());
  crypto_generichash_update(&st, key.k1.data(), key.k1.size());
  crypto_generichash_update(&st, key.k2.data(), key.k2.size());
  crypto_generichash_update(&st, s, sizeof s);
  crypto_generichash_final(&st, fp.data(), fp.size());
  return fp;
}

Bytes PairLedger::serialize() const {
  ByteWriter w;
  w.raw(kLedgerMagic);
  w.u16(kLedgerVersion);
  w.u32(static_cast<std::uint32_t>(used_.size()));
  for (const auto& fp : used_) w.raw(fp);
  return std::move(w).take();
}

PairLedger PairLedger::parse(ByteView in) {
  ByteReader r(in);
  ByteView m = r.raw(4);
  if (!std::equal(m.begin(), m.end(), kLedgerMagic)) throw ParseError("bad pair ledger magic");
  if (r.u16() != kLedgerVersion) throw ParseError("unsupported pair ledger version");
  PairLedger l;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    ByteView b = r.raw(32);
    PairFingerprint fp{};
    std::copy(b.begin(), b.end(), fp.begin());
    l.used_.insert(fp);
  }
  if (r.remaining() != 0) throw ParseError("trailing bytes in pair ledger");
  return l;
}

PairLedger PairLedger::load(const std::string& path) {
  if (!std::filesystem::exists(path)) return {};
  return parse(read_file(path));
}

void PairLedger::save(const std::string& path) const { write_file(path, serialize()); }

Bytes save_owner_context(const SessionContext& ctx) {
  ByteWriter w;
  w.raw(kOwnerMagic);
  w.u16(kOwnerVersion);
  w.u64(ctx.seid);
  w.raw(ctx.xts_key.k1);
  w.raw(ctx.xts_key.k2);
  w.raw(ctx.session_key.view());
  w.raw(ctx.processor_pub.bytes);
  return std::move(w).take();
}

SessionContext load_owner_context(ByteView in) {
  ByteReader r(in);
  ByteView m = r.raw(4);
  if (!std::equal(m.begin(), m.end(), kOwnerMagic)) throw ParseError("bad owner context magic");
  if (r.u16() != kOwnerVersion) throw ParseError("unsupported owner context version");
  SessionContext ctx;
  ctx.seid = r.u64();
  crypto::Key128 k1{};
  crypto::Key128 k2{};
  ByteView b = r.raw(16);
  std::copy(b.begin(), b.end(), k1.begin());
  b = r.raw(16);
  std::copy(b.begin(), b.end(), k2.begin());
  try {
    ctx.xts_key = crypto::XtsKeyPair(k1, k2);
  } catch (const std::invalid_argument&) {
    throw ParseError("owner context holds equal key halves");
  }
  secure_wipe(k1.data(), k1.size());
  secure_wipe(k2.data(), k2.size());
  b = r.raw(kSessionKeyBytes);
  std::copy(b.begin(), b.end(), ctx.session_key.mut().begin());
  b = r.raw(ctx.processor_pub.bytes.size());
  std::copy(b.begin(), b.end(), ctx.processor_pub.bytes.begin());
  if (r.remaining() != 0) throw ParseError("trailing bytes in owner context");
  return ctx;
}

SessionContext make_session(const ResourceGrant& grant, DeterministicRng& rng,
                            std::shared_ptr<PairLedger> ledger) {
  SessionContext ctx;
  ctx.seid = grant.seid;
  ctx.processor_pub = grant.pub;
  rng.fill(ctx.session_key.mut());
  crypto::Key128 k1 = rng.bytes<16>();
  crypto::Key128 k2 = rng.bytes<16>();
  while (k2 == k1) k2 = rng.bytes<16>();
  ctx.xts_key = crypto::XtsKeyPair(k1, k2);
  secure_wipe(k1.data(), k1.size());
  secure_wipe(k2.data(), k2.size());
  if (ledger) ctx.used_pairs = std::move(ledger);
  return ctx;
}

WrappedKey begin_session(const SessionContext& ctx, DeterministicRng& rng) {
  return wrap_key(ctx.processor_pub, ctx.session_key.view(), rng);
}

WrappedKey wrap_xts_key(const SessionContext& ctx, DeterministicRng& rng) {
  std::array<std::uint8_t, 32> raw{};
  std::copy(ctx.xts_key.k1.begin(), ctx.xts_key.k1.end(), raw.begin());
  std::copy(ctx.xts_key.k2.begin(), ctx.xts_key.k2.end(), raw.begin() + 16);
  WrappedKey w = wrap_key(ctx.processor_pub, raw, rng);
  secure_wipe(raw.data(), raw.size());
  return w;
}

void check_pair_freshness(SessionContext& ctx) {
  if (!ctx.used_pairs->insert(pair_fingerprint(ctx.xts_key, ctx.seid))) {
    throw FreshnessError("<K, SEID> pair already used for packaging");
  }
}

std::vector<Frame> stream_send(const SessionContext& ctx,
                               const std::vector<crypto::EncryptedBlock>& blocks,
                               std::uint64_t first_seq) {
  StreamSender tx(ctx.session_key, first_seq);
  std::vector<Frame> out;
  out.reserve(blocks.size());
  for (const auto& b : blocks) out.push_back(tx.send(b));
  return out;
}

}  // namespace edap::protocol
