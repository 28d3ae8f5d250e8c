#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edap {

/// Root of every failure the model signals. Each subclass corresponds to one
/// rejection path of the protocol, loader, or footprint.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tweak or image address not aligned to a 128-byte line.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Digest mismatch, double-load, or any other evidence of tampering.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// Key unwrap failed: wrong processor or corrupted blob.
class DecryptFailure : public Error {
 public:
  using Error::Error;
};

/// Stream frame repeated or below the receive watermark.
class ReplayError : public Error {
 public:
  using Error::Error;
};

/// Transport tag did not verify under the session key.
class AuthError : public Error {
 public:
  using Error::Error;
};

/// A <K, SEID> pair was offered for packaging a second time.
class FreshnessError : public Error {
 public:
  using Error::Error;
};

/// Requester is not the owning thread in problem state.
class AccessDenied : public Error {
 public:
  using Error::Error;
};

/// Instruction block presented at the wrong address or under the wrong thread.
class BindingError : public Error {
 public:
  using Error::Error;
};

/// Register state altered while the protected thread was switched out.
class StateHashMismatch : public Error {
 public:
  using Error::Error;
};

/// Access to a line that was never initialized or has been released.
class UnmappedBlock : public Error {
 public:
  using Error::Error;
};

/// Malformed program image (overlap, bad entry point, bad length).
class ImageError : public Error {
 public:
  using Error::Error;
};

/// Operation issued in the wrong protocol state (no session, no key).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number for text formats
/// (0 for binary formats).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace edap
