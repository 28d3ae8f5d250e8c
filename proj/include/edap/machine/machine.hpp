#pragma once

#include <array>
#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "edap/common/privilege.hpp"
#include "edap/crypto/codec.hpp"
#include "edap/exec/memory_image.hpp"
#include "edap/exec/secure_executable.hpp"
#include "edap/machine/cache.hpp"
#include "edap/machine/footprint.hpp"
#include "edap/machine/taint.hpp"
#include "edap/protocol/processor.hpp"

namespace edap::machine {

enum class RegTag : std::uint8_t { empty, clear, cipher };

struct Register {
  RegTag tag = RegTag::empty;
  ThreadId owner = 0;
  /// Set by load_and_hide: clear, but unreadable until the owner resumes.
  bool hidden = false;
  crypto::Block16 payload{};
  RegisterTaint taint;
};

/// What a read hands back: a clear value, or ciphertext for the FU engine.
struct Operand {
  RegTag tag = RegTag::empty;
  crypto::Block16 bytes{};
};

/// An 8-byte memory word with its provenance.
struct Word {
  std::uint64_t value = 0;
  bool tainted = false;
};

struct L1Line {
  bool clear = false;
  std::array<std::uint8_t, crypto::kLineBytes> bytes{};
  crypto::Digest digest;
  LineTaint taint;
};

struct BufferEntry {
  std::size_t reg = 0;
  ThreadId thread = 0;
  crypto::Block16 value{};
  RegisterTaint taint;
};

struct MachineOptions {
  FootprintConfig footprint;
  CacheGeometry l1d{32 * 1024, 8, crypto::kLineBytes};
  CacheGeometry l1i{48 * 1024, 8, crypto::kLineBytes};
  std::size_t registers = 64;
  std::size_t functional_units = 4;
  /// Negative control: transfer_control leaves cleartext in place.
  bool skip_clearing = false;
};

/// Functional model of the trusted footprint around one protected thread.
/// Encrypted state lives in the shared MemoryImage; cleartext exists only
/// where the placement allows it, and only while the owner runs in problem
/// state. Code and data of other threads or of privileged software use a
/// separate, unprotected register bank and platform memory.
class Machine {
 public:
  Machine(MachineOptions opts, const protocol::ProcessorIdentity& proc, exec::MemoryImage& mem,
          ThreadId protected_thread, const exec::CodeBinding* binding = nullptr);

  Privilege privilege() const noexcept { return privilege_; }
  ThreadId current_thread() const noexcept { return thread_; }
  ThreadId protected_thread() const noexcept { return owner_; }
  bool engine_engaged() const noexcept { return engaged_; }
  const MachineOptions& options() const noexcept { return opts_; }
  const Register& reg(std::size_t r) const { return regs_.at(r); }
  std::size_t registers() const noexcept { return regs_.size(); }

  /// Control enters the program; BindingError unless `ea` is the signed
  /// entry point.
  void begin_execution(std::uint64_t ea);

  /// AccessDenied when a clear value is asked for by anyone but its owner in
  /// problem state. Cipher values go to privileged readers as ciphertext;
  /// for the owner under a cleartext placement they are decrypted in place.
  Operand read_operand(std::size_t r, const Requester& who);
  /// Data read through the engine (and, for CLEARTEXT_L1, the clear L1).
  /// AccessDenied for any requester but the owner in problem state;
  /// IntegrityError or UnmappedBlock on the miss path.
  Word read_memory(std::uint64_t ea, const Requester& who);

  /// Owner-thread instructions, problem state only.
  void execute_alu(std::size_t fu, std::size_t dst, std::span<const std::size_t> srcs,
                   std::uint64_t imm);
  void execute_load(std::size_t dst, std::uint64_t ea);
  void execute_store(std::size_t src, std::uint64_t ea);
  /// Instruction fetch through the shared engine's I-side port.
  crypto::PlainBlock fetch_code(std::uint64_t ea, const Requester& who);

  /// Unprotected instructions of privileged software or other threads.
  void execute_platform_alu(std::size_t dst, std::span<const std::size_t> srcs);
  void execute_platform_load(std::size_t dst, std::uint64_t ea);
  void execute_platform_store(std::size_t src, std::uint64_t ea);

  /// Entering a privileged level seals the owner's clear registers, erases
  /// the buffers and L1s, records the register-state hash, and disengages
  /// the engine. Returning to problem state clears again, checks the hash
  /// (StateHashMismatch, staying privileged), and re-engages.
  void transfer_control(Privilege to, std::optional<ThreadId> next_thread = std::nullopt);

  /// Privileged save/restore of an owner register through a memory line.
  /// Both keep the recorded register-state hash in step.
  void load_and_hide(std::size_t r, std::uint64_t ea);
  void store_and_clear(std::size_t r, std::uint64_t ea);

  std::optional<crypto::Block16> buffer_lookup(std::size_t fu, std::size_t r, ThreadId thread);
  void snoop_clear(std::size_t r);
  std::size_t buffer_size(std::size_t fu) const { return buffers_.at(fu).size(); }
  /// Unit whose buffer holds the most of `srcs`, scanning from `first`.
  std::size_t steer(std::size_t first, std::span<const std::size_t> srcs) const;

  /// Privileged: creates a zero line owned by the protected thread.
  void init_empty_block(std::uint64_t ea, const Requester& caller);
  /// Owner in problem state only.
  void acquire_block(std::uint64_t ea, const Requester& who);
  void release_block(std::uint64_t ea, const Requester& who);
  bool acquired(std::uint64_t ea) const;

  /// The adversary editing a saved register while the owner is switched out.
  void poke_register(std::size_t r, std::size_t bit);

  /// State the audit inspects.
  const CacheIndex& l1d_index() const noexcept { return l1d_; }
  const CacheIndex& l1i_index() const noexcept { return l1i_; }
  const std::vector<L1Line>& l1d_lines() const noexcept { return l1d_data_; }
  const std::vector<L1Line>& l1i_lines() const noexcept { return l1i_data_; }
  const std::vector<std::list<BufferEntry>>& buffers() const noexcept { return buffers_; }
  const std::vector<Register>& register_file() const noexcept { return regs_; }
  const std::vector<Register>& platform_registers() const noexcept { return scratch_; }
  const std::map<std::uint64_t, std::uint64_t>& platform_memory() const noexcept {
    return platform_mem_;
  }
  const exec::MemoryImage& memory() const noexcept { return mem_; }
  /// Taint of bytes written to memory by a clear path (none in a correct build).
  const std::map<std::uint64_t, LineTaint>& memory_taint() const noexcept { return mem_taint_; }

  /// Completed entries into privileged state (each one a clearing point).
  std::size_t transfers() const noexcept { return transfers_; }

 private:
  void require_owner_running(const char* what) const;
  void require_privileged(const char* what) const;
  crypto::Block16 register_tweak(std::size_t r) const;
  std::uint64_t seid() const;

  crypto::Block16 source_value(std::size_t fu, std::size_t r, RegisterTaint& taint);
  void write_result(std::size_t fu, std::size_t dst, const crypto::Block16& v,
                    RegisterTaint taint);
  void seal_register(Register& reg, std::size_t r);
  void open_register(Register& reg, std::size_t r);

  /// Plaintext of the line holding `ea` plus its taint; fills the L1D.
  crypto::PlainBlock line_plain(std::uint64_t line_ea, LineTaint& taint);
  void write_line(std::uint64_t line_ea, const crypto::PlainBlock& plain, const LineTaint& taint);

  void clear_footprint();
  using RegHash = std::array<std::uint8_t, 32>;
  RegHash register_hash(std::size_t r) const;

  MachineOptions opts_;
  const protocol::ProcessorIdentity& proc_;
  exec::MemoryImage& mem_;
  ThreadId owner_;
  const exec::CodeBinding* binding_;

  Privilege privilege_ = Privilege::problem;
  ThreadId thread_;
  bool engaged_ = true;
  /// One digest per owner register, recorded when the owner is switched out.
  std::optional<std::vector<RegHash>> saved_hash_;

  std::vector<Register> regs_;
  std::vector<Register> scratch_;
  CacheIndex l1d_;
  CacheIndex l1i_;
  std::vector<L1Line> l1d_data_;
  std::vector<L1Line> l1i_data_;
  std::vector<std::list<BufferEntry>> buffers_;
  std::map<std::uint64_t, std::uint64_t> platform_mem_;
  std::map<std::uint64_t, LineTaint> mem_taint_;
  std::map<std::uint64_t, bool> owned_blocks_;
  std::size_t transfers_ = 0;
};

}  // namespace edap::machine
