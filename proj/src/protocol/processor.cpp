#include "edap/protocol/processor.hpp"

#include "edap/common/errors.hpp"

namespace edap::protocol {

namespace {

constexpr char kStateMagic[] = "EDPS";
constexpr char kPrivateMagic[] = "EDPK";
constexpr char kPublicMagic[] = "EDPP";
constexpr std::uint16_t kFixtureVersion = 1;

void write_magic(ByteWriter& w, const char* m) {
  w.raw(ByteView(reinterpret_cast<const std::uint8_t*>(m), 4));
}

void expect_magic(ByteReader& r, const char* m, const char* what) {
  ByteView got = r.raw(4);
  if (!std::equal(got.begin(), got.end(), reinterpret_cast<const std::uint8_t*>(m))) {
    throw ParseError(std::string("bad magic in ") + what);
  }
  if (r.u16() != kFixtureVersion) throw ParseError(std::string("unsupported ") + what + " version");
}

}  // namespace

ProcessorIdentity::ProcessorIdentity(KeyPair keys) : keys_(std::move(keys)) {}

void ProcessorIdentity::accept_session(const WrappedKey& wrapped_session_key,
                                       std::uint64_t seid) {
  clear_session();
  Bytes raw = unwrap_key(keys_, wrapped_session_key);
  if (raw.size() != kSessionKeyBytes) {
    secure_wipe(raw.data(), raw.size());
    throw DecryptFailure("session key has wrong length");
  }
  SessionKey key;
  std::copy(raw.begin(), raw.end(), key.mut().begin());
  secure_wipe(raw.data(), raw.size());
  seid_ = seid;
  session_key_ = key;
  receiver_.emplace(key);
}

void ProcessorIdentity::load_xts_key(const WrappedKey& wrapped_xts_key) {
  if (!has_session()) throw ProtocolError("no session established");
  Bytes raw = unwrap_key(keys_, wrapped_xts_key);
  if (raw.size() != 2 * crypto::kKeyBytes) {
    secure_wipe(raw.data(), raw.size());
    throw DecryptFailure("memory key has wrong length");
  }
  crypto::Key128 k1{}, k2{};
  std::copy(raw.begin(), raw.begin() + 16, k1.begin());
  std::copy(raw.begin() + 16, raw.end(), k2.begin());
  secure_wipe(raw.data(), raw.size());
  try {
    codec_ = std::make_shared<const crypto::LineCodec>(crypto::XtsKeyPair(k1, k2));
  } catch (const std::invalid_argument&) {
    throw DecryptFailure("memory key halves are equal");
  }
  secure_wipe(k1.data(), k1.size());
  secure_wipe(k2.data(), k2.size());
}

StreamTuple ProcessorIdentity::receive(ByteView frame) {
  if (!receiver_) throw ProtocolError("no session established");
  return receiver_->receive(frame);
}

void ProcessorIdentity::clear_session() noexcept {
  seid_.reset();
  session_key_.reset();
  codec_.reset();
  receiver_.reset();
}

const crypto::LineCodec& ProcessorIdentity::engine() const {
  if (!codec_ || !seid_) throw ProtocolError("memory key not loaded");
  return *codec_;
}

crypto::PlainBlock ProcessorIdentity::open_line(std::uint64_t ea,
                                                const crypto::CipherBlock& cipher,
                                                const crypto::Digest& digest) const {
  const auto& e = engine();
  return e.verify_and_decrypt({*seid_, ea}, cipher, digest);
}

crypto::SealedLine ProcessorIdentity::seal_line(std::uint64_t ea,
                                                const crypto::PlainBlock& plain) const {
  const auto& e = engine();
  return e.encrypt({*seid_, ea}, plain);
}

crypto::Block16 ProcessorIdentity::seal_unit(const crypto::Block16& tweak,
                                             const crypto::Block16& plain) const {
  return engine().encrypt_unit(tweak, plain);
}

crypto::Block16 ProcessorIdentity::open_unit(const crypto::Block16& tweak,
                                             const crypto::Block16& cipher) const {
  return engine().decrypt_unit(tweak, cipher);
}

Bytes ProcessorIdentity::export_state() const {
  ByteWriter w;
  write_magic(w, kStateMagic);
  w.u16(kFixtureVersion);
  w.raw(keys_.pub.bytes);
  std::uint8_t flags = 0;
  if (seid_) flags |= 1;
  if (session_key_) flags |= 2;
  if (codec_) flags |= 4;
  w.u8(flags);
  w.u64(seid_.value_or(0));
  w.u64(receiver_ ? receiver_->accepted() : 0);
  return std::move(w).take();
}

Bytes ProcessorIdentity::save_private() const {
  ByteWriter w;
  write_magic(w, kPrivateMagic);
  w.u16(kFixtureVersion);
  w.raw(keys_.pub.bytes);
  w.raw(keys_.priv.view());
  return std::move(w).take();
}

ProcessorIdentity ProcessorIdentity::load_private(ByteView file) {
  ByteReader r(file);
  expect_magic(r, kPrivateMagic, "private key file");
  KeyPair kp;
  ByteView pub = r.raw(kPublicKeyBytes);
  std::copy(pub.begin(), pub.end(), kp.pub.bytes.begin());
  ByteView priv = r.raw(kPrivateKeyBytes);
  std::copy(priv.begin(), priv.end(), kp.priv.mut().begin());
  if (r.remaining() != 0) throw ParseError("trailing bytes in private key file");
  return ProcessorIdentity(std::move(kp));
}

Bytes ProcessorIdentity::save_public() const {
  ByteWriter w;
  write_magic(w, kPublicMagic);
  w.u16(kFixtureVersion);
  w.raw(keys_.pub.bytes);
  return std::move(w).take();
}

PublicKey ProcessorIdentity::load_public(ByteView file) {
  ByteReader r(file);
  expect_magic(r, kPublicMagic, "public key file");
  PublicKey pk;
  ByteView pub = r.raw(kPublicKeyBytes);
  std::copy(pub.begin(), pub.end(), pk.bytes.begin());
  if (r.remaining() != 0) throw ParseError("trailing bytes in public key file");
  return pk;
}

ProcessorIdentity provision_processor(const DeterministicRng::Seed& seed) {
  DeterministicRng rng(seed);
  return provision_processor(rng);
}

ProcessorIdentity provision_processor(DeterministicRng& rng) {
  return ProcessorIdentity(generate_keypair(rng));
}

}  // namespace edap::protocol
