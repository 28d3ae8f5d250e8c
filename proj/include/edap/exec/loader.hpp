#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include "edap/common/privilege.hpp"
#include "edap/common/rng.hpp"
#include "edap/exec/memory_image.hpp"
#include "edap/exec/program_image.hpp"
#include "edap/exec/secure_executable.hpp"
#include "edap/protocol/channel.hpp"
#include "edap/protocol/platform.hpp"
#include "edap/protocol/processor.hpp"
#include "edap/protocol/session.hpp"

namespace edap::exec {

/// Privileged initialization of one line from a delivered tuple. The loader
/// holds no key, so the line is stored raw; its digest is checked at first
/// fetch. IntegrityError if the target is already initialized.
void load_block(MemoryImage& mem, const protocol::StreamTuple& tuple);

/// Verified read of one line. AccessDenied, checked first, unless the
/// requester is `authorized` in problem state; UnmappedBlock for an absent
/// line; IntegrityError for a bad digest. Nothing is returned on failure.
crypto::PlainBlock fetch_block(const MemoryImage& mem, const protocol::ProcessorIdentity& proc,
                               std::uint64_t ea, const Requester& requester,
                               ThreadId authorized);

/// Faults a dishonest platform can inject during deployment.
struct FaultPlan {
  /// Bit index over the loaded lines in ea order, 1088 bits per line
  /// (1024 ciphertext then 64 digest).
  std::optional<std::uint64_t> tamper_bit;
  /// Exchange this block's translation with the next loaded block's.
  std::optional<std::uint64_t> remap_ea;
  /// Resend stream frame i once the stream has been delivered.
  std::optional<std::size_t> replay_frame;
  /// Advertise a garbage public key in the grant.
  bool forge_public_key = false;
};

/// Everything a full grant -> package -> session -> stream -> load run
/// leaves behind. `owner` is the data owner's private view; the rest is
/// platform-observable or processor-internal.
struct Deployment {
  protocol::SessionContext owner;
  SecureExecutable exe;
  CodeBinding binding;
  MemoryImage memory;
  protocol::DuplexChannel channel;
  std::size_t frames_accepted = 0;
};

/// Runs the protocol end to end. Errors from any stage propagate unchanged
/// (FreshnessError, DecryptFailure, ReplayError, AuthError, ...).
Deployment deploy(const ProgramImage& image, protocol::ProcessorIdentity& proc,
                  protocol::PlatformState& pp, DeterministicRng& owner_rng,
                  const FaultPlan& faults = {},
                  std::shared_ptr<protocol::PairLedger> ledger = nullptr);

/// Same, starting from an already packaged executable and its owner context.
Deployment deploy_packaged(const SecureExecutable& exe, protocol::SessionContext owner,
                           ThreadId thread, protocol::ProcessorIdentity& proc,
                           DeterministicRng& owner_rng, const FaultPlan& faults = {});

/// Fetches every block as the bound thread after checking its binding.
std::vector<std::pair<std::uint64_t, crypto::PlainBlock>> fetch_program(
    const Deployment& d, const protocol::ProcessorIdentity& proc);

}  // namespace edap::exec
