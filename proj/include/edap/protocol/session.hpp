#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <set>
#include <string>

#include "edap/common/rng.hpp"
#include "edap/crypto/codec.hpp"
#include "edap/protocol/kem.hpp"
#include "edap/protocol/platform.hpp"
#include "edap/protocol/stream.hpp"

namespace edap::protocol {

using PairFingerprint = std::array<std::uint8_t, 32>;

/// BLAKE2b-256 over k1 || k2 || seid (BE). One-way, so the ledger can be
/// stored without exposing K.
PairFingerprint pair_fingerprint(const crypto::XtsKeyPair& key, std::uint64_t seid);

/// Persistent set of <K, SEID> pairs already used for packaging.
/// File form: "EDPL" || version u16 || count u32 || count x 32-byte fingerprint.
class PairLedger {
 public:
  bool contains(const PairFingerprint& fp) const { return used_.contains(fp); }
  /// False if already present.
  bool insert(const PairFingerprint& fp) { return used_.insert(fp).second; }
  std::size_t size() const noexcept { return used_.size(); }

  Bytes serialize() const;
  static PairLedger parse(ByteView in);
  /// Missing file yields an empty ledger.
  static PairLedger load(const std::string& path);
  void save(const std::string& path) const;

 private:
  std::set<PairFingerprint> used_;
};

/// The data owner's view of one secure session.
struct SessionContext {
  std::uint64_t seid = 0;
  SessionKey session_key;
  crypto::XtsKeyPair xts_key;
  PublicKey processor_pub;
  std::shared_ptr<PairLedger> used_pairs = std::make_shared<PairLedger>();
};

/// The owner's secrets for a packaged executable, so packaging and
/// deployment can run as separate steps. File form: "EDOS" || version u16 ||
/// seid u64 || k1 || k2 || session key || processor public key. The
/// ledger is not part of it.
Bytes save_owner_context(const SessionContext& ctx);
SessionContext load_owner_context(ByteView in);

/// Fresh session key and memory key for a grant. Reuses `ledger` when given.
SessionContext make_session(const ResourceGrant& grant, DeterministicRng& rng,
                            std::shared_ptr<PairLedger> ledger = nullptr);

/// E_P(session key).
WrappedKey begin_session(const SessionContext& ctx, DeterministicRng& rng);
/// E_P(k1 || k2).
WrappedKey wrap_xts_key(const SessionContext& ctx, DeterministicRng& rng);

/// Records the <K, SEID> fingerprint; FreshnessError if it was seen before.
void check_pair_freshness(SessionContext& ctx);

/// One frame per block, in order, with consecutive sequence numbers.
std::vector<Frame> stream_send(const SessionContext& ctx,
                               const std::vector<crypto::EncryptedBlock>& blocks,
                               std::uint64_t first_seq = 0);

}  // namespace edap::protocol
