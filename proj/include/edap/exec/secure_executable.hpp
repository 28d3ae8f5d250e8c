#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "edap/common/bytes.hpp"
#include "edap/common/privilege.hpp"
#include "edap/crypto/codec.hpp"
#include "edap/exec/program_image.hpp"
#include "edap/protocol/session.hpp"

namespace edap::exec {

inline constexpr std::uint16_t kExecutableVersion = 1;

/// File form: "EDAP" || version u16 || seid u64 || entry u64 || count u32 ||
/// count x (ea u64 || cipher 128 || digest 8), all big-endian.
struct SecureExecutable {
  std::uint64_t seid = 0;
  std::uint64_t entry_point = 0;
  std::vector<crypto::EncryptedBlock> blocks;

  Bytes serialize() const;
  /// ParseError on bad magic, version, truncation, trailing bytes, or a
  /// duplicate ea.
  static SecureExecutable parse(ByteView in);

  bool operator==(const SecureExecutable&) const = default;
};

/// Encrypts and digests every line under <seid, ea>. Checks pair freshness
/// first, so a reused <K, SEID> aborts before anything is produced.
SecureExecutable package(const ProgramImage& image, protocol::SessionContext& ctx);

/// What the processor retains about the signed program: the thread it is
/// bound to, its entry point, and the digest expected at each address.
struct CodeBinding {
  std::uint64_t seid = 0;
  ThreadId thread = 0;
  std::uint64_t entry_point = 0;
  std::map<std::uint64_t, crypto::Digest> digests;

  static CodeBinding from(const SecureExecutable& exe, ThreadId thread);
};

/// BindingError unless `presented` is the block signed for `ea` and the
/// requesting thread is the bound one.
void verify_code_binding(const CodeBinding& binding, ThreadId thread, std::uint64_t ea,
                         const crypto::EncryptedBlock& presented);

}  // namespace edap::exec
