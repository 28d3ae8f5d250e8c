#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "edap/common/errors.hpp"
#include "edap/protocol/channel.hpp"
#include "edap/protocol/kem.hpp"
#include "edap/protocol/platform.hpp"
#include "edap/protocol/processor.hpp"
#include "edap/protocol/session.hpp"
#include "edap/protocol/stream.hpp"
#include "test_support.hpp"

using namespace edap;
using namespace edap::protocol;

namespace {

struct Actors {
  DeterministicRng rng{std::uint64_t{42}};
  ProcessorIdentity proc = provision_processor(rng);
  PlatformState pp{rng.fork()};
  DeterministicRng owner_rng = rng.fork();
  SessionContext ctx = make_session(grant_resources(pp, proc), owner_rng);

  void establish() {
    proc.accept_session(begin_session(ctx, owner_rng), ctx.seid);
    proc.load_xts_key(wrap_xts_key(ctx, owner_rng));
  }
};

crypto::EncryptedBlock sample_block(const SessionContext& ctx, std::uint64_t ea,
                                    std::mt19937_64& g) {
  auto sealed = crypto::encrypt_block(ctx.xts_key, {ctx.seid, ea}, testing_support::random_plain(g));
  return {ea, sealed.cipher, sealed.digest};
}

bool leaks(ByteView hay, ByteView secret) { return contains_subsequence(hay, secret); }

}  // namespace

TEST_CASE("provisioning yields distinct keys and an export without the private key") {
  DeterministicRng::Seed s1{}, s2{};
  s2[0] = 1;
  auto a = provision_processor(s1);
  auto b = provision_processor(s2);
  CHECK_FALSE(a.pub() == b.pub());
  CHECK(provision_processor(s1).pub() == a.pub());

  Bytes priv_file = a.save_private();
  ByteView priv(priv_file.data() + 6 + kPublicKeyBytes, kPrivateKeyBytes);
  CHECK_FALSE(leaks(a.export_state(), priv));
  CHECK_FALSE(leaks(a.save_public(), priv));
  CHECK(ProcessorIdentity::load_public(a.save_public()) == a.pub());
  CHECK(ProcessorIdentity::load_private(priv_file).pub() == a.pub());
}

TEST_CASE("key wrap round trip over 100 random keys") {
  DeterministicRng rng(std::uint64_t{7});
  KeyPair kp = generate_keypair(rng);
  for (int i = 0; i < 100; ++i) {
    auto key = rng.bytes<32>();
    WrappedKey w = wrap_key(kp.pub, key, rng);
    CHECK(w.blob.size() == kWrapOverheadBytes + key.size());
    Bytes back = unwrap_key(kp, w);
    CHECK(std::equal(back.begin(), back.end(), key.begin(), key.end()));
  }
}

TEST_CASE("wrapping is randomized") {
  Actors a;
  CHECK_FALSE(begin_session(a.ctx, a.owner_rng) == begin_session(a.ctx, a.owner_rng));
}

TEST_CASE("grant_resources") {
  Actors a;
  std::set<std::uint64_t> seids;
  for (int i = 0; i < 1000; ++i) {
    auto g = grant_resources(a.pp, a.proc);
    CHECK(g.pub == a.proc.pub());
    seids.insert(g.seid);
  }
  CHECK(seids.size() == 1000);
}

TEST_CASE("accept_session") {
  Actors a;
  SUBCASE("matching processor") {
    a.establish();
    CHECK(a.proc.has_session());
    CHECK(a.proc.has_xts_key());
    CHECK(a.proc.seid() == a.ctx.seid);
  }
  SUBCASE("different processor") {
    DeterministicRng other_rng(std::uint64_t{99});
    auto other = provision_processor(other_rng);
    CHECK_THROWS_AS(other.accept_session(begin_session(a.ctx, a.owner_rng), a.ctx.seid),
                    DecryptFailure);
    CHECK_FALSE(other.has_session());
    CHECK_FALSE(other.seid().has_value());
  }
  SUBCASE("100 single-bit corruptions") {
    WrappedKey w = begin_session(a.ctx, a.owner_rng);
    std::mt19937_64 g(3);
    for (int i = 0; i < 100; ++i) {
      WrappedKey bad = w;
      std::size_t bit = g() % (bad.blob.size() * 8);
      bad.blob[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      CHECK_THROWS_AS(a.proc.accept_session(bad, a.ctx.seid), DecryptFailure);
      CHECK_FALSE(a.proc.has_session());
    }
  }
  SUBCASE("load_xts_key needs a session") {
    CHECK_THROWS_AS(a.proc.load_xts_key(wrap_xts_key(a.ctx, a.owner_rng)), ProtocolError);
  }
}

TEST_CASE("wrong memory key leaves program blocks unreadable") {
  Actors a;
  std::mt19937_64 g(5);
  auto block = sample_block(a.ctx, 0x1000, g);
  a.proc.accept_session(begin_session(a.ctx, a.owner_rng), a.ctx.seid);
  SessionContext other = make_session({a.ctx.seid, a.proc.pub()}, a.owner_rng);
  a.proc.load_xts_key(wrap_xts_key(other, a.owner_rng));
  CHECK_THROWS_AS(a.proc.open_line(block.ea, block.cipher, block.digest), IntegrityError);
}

TEST_CASE("exported state never holds session secrets") {
  Actors a;
  a.establish();
  Bytes st = a.proc.export_state();
  CHECK_FALSE(leaks(st, a.ctx.session_key.view()));
  CHECK_FALSE(leaks(st, a.ctx.xts_key.k1));
  CHECK_FALSE(leaks(st, a.ctx.xts_key.k2));
  CHECK_FALSE(leaks(st, ByteView(a.proc.save_private()).subspan(6 + kPublicKeyBytes)));
}

TEST_CASE("stream delivery") {
  Actors a;
  a.establish();
  std::mt19937_64 g(11);
  std::vector<crypto::EncryptedBlock> blocks;
  for (int i = 0; i < 10; ++i) blocks.push_back(sample_block(a.ctx, 0x2000 + 128u * i, g));
  auto frames = stream_send(a.ctx, blocks);
  REQUIRE(frames.size() == 10);

  SUBCASE("in-order frames are all accepted") {
    for (std::size_t i = 0; i < frames.size(); ++i) {
      auto t = a.proc.receive(frames[i]);
      CHECK(t.seq == i);
      CHECK(t.block == blocks[i]);
      CHECK_NOTHROW(a.proc.open_line(t.block.ea, t.block.cipher, t.block.digest));
    }
  }
  SUBCASE("replaying frame 5 is rejected") {
    for (int i = 0; i <= 5; ++i) a.proc.receive(frames[i]);
    CHECK_THROWS_AS(a.proc.receive(frames[5]), ReplayError);
    CHECK_NOTHROW(a.proc.receive(frames[6]));
  }
  SUBCASE("every flipped bit fails authentication") {
    for (std::size_t bit = 0; bit < kFrameBytes * 8; bit += 7) {
      Frame f = frames[0];
      f[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      CHECK_THROWS_AS(a.proc.receive(f), AuthError);
    }
    CHECK_NOTHROW(a.proc.receive(frames[0]));
  }
  SUBCASE("truncated frame") {
    CHECK_THROWS_AS(a.proc.receive(ByteView(frames[0]).first(100)), AuthError);
  }
  SUBCASE("same ea under a fresh sequence number") {
    a.proc.receive(frames[0]);
    StreamSender tx(a.ctx.session_key, 50);
    CHECK_THROWS_AS(a.proc.receive(tx.send(blocks[0])), ReplayError);
  }
  SUBCASE("any permutation with a duplicate accepts each frame at most once") {
    std::vector<Frame> seq(frames.begin(), frames.end());
    seq.push_back(frames[3]);
    seq.push_back(frames[7]);
    for (int round = 0; round < 50; ++round) {
      ProcessorIdentity p = ProcessorIdentity::load_private(a.proc.save_private());
      p.accept_session(begin_session(a.ctx, a.owner_rng), a.ctx.seid);
      std::shuffle(seq.begin(), seq.end(), g);
      std::multiset<std::uint64_t> accepted;
      for (const auto& f : seq) {
        try {
          accepted.insert(p.receive(f).seq);
        } catch (const ReplayError&) {
        }
      }
      for (auto s : accepted) CHECK(accepted.count(s) == 1);
    }
  }
  SUBCASE("a new session resets replay state") {
    for (const auto& f : frames) a.proc.receive(f);
    a.proc.accept_session(begin_session(a.ctx, a.owner_rng), a.ctx.seid);
    CHECK_NOTHROW(a.proc.receive(frames[0]));
  }
  SUBCASE("frames from another session fail authentication") {
    SessionContext b = make_session({a.ctx.seid, a.proc.pub()}, a.owner_rng);
    a.proc.accept_session(begin_session(b, a.owner_rng), b.seid);
    CHECK_THROWS_AS(a.proc.receive(frames[0]), AuthError);
  }
}

TEST_CASE("pair freshness") {
  Actors a;
  CHECK_NOTHROW(check_pair_freshness(a.ctx));
  CHECK_THROWS_AS(check_pair_freshness(a.ctx), FreshnessError);

  SessionContext same_key = a.ctx;
  same_key.seid ^= 1;
  CHECK_NOTHROW(check_pair_freshness(same_key));

  PairLedger reloaded = PairLedger::parse(a.ctx.used_pairs->serialize());
  CHECK(reloaded.size() == 2);
  CHECK(reloaded.contains(pair_fingerprint(a.ctx.xts_key, a.ctx.seid)));
  CHECK_FALSE(leaks(a.ctx.used_pairs->serialize(), a.ctx.xts_key.k1));
  Bytes bad = a.ctx.used_pairs->serialize();
  bad[0] = 'X';
  CHECK_THROWS_AS(PairLedger::parse(bad), ParseError);
}

TEST_CASE("a dishonest platform advertising a garbage key gains nothing") {
  Actors a;
  std::mt19937_64 g(17);
  auto block = sample_block(a.ctx, 0x4000, g);

  SUBCASE("random key") {
    PublicKey junk;
    junk.bytes = testing_support::random_array<32>(g);
    a.pp.forge_public_key(junk);
    auto grant = grant_resources(a.pp, a.proc);
    SessionContext ctx = make_session(grant, a.owner_rng);
    WrappedKey w = begin_session(ctx, a.owner_rng);
    CHECK_THROWS_AS(a.proc.accept_session(w, grant.seid), DecryptFailure);
    CHECK_FALSE(a.proc.has_session());
    CHECK_FALSE(leaks(w.blob, ctx.session_key.view()));
    CHECK_THROWS_AS(a.proc.open_line(block.ea, block.cipher, block.digest), ProtocolError);
  }
  SUBCASE("low-order point") {
    a.pp.forge_public_key(PublicKey{});
    SessionContext ctx = make_session(grant_resources(a.pp, a.proc), a.owner_rng);
    CHECK_THROWS_AS(begin_session(ctx, a.owner_rng), ProtocolError);
  }
}

TEST_CASE("channel transcript") {
  DuplexChannel ch;
  ch.post(Actor::owner, Actor::processor, "k", Bytes{1, 2, 3});
  ch.post(Actor::processor, Actor::owner, "ack", Bytes{4});
  CHECK(ch.pending(Actor::processor));
  CHECK(ch.take(Actor::processor).payload == Bytes{1, 2, 3});
  CHECK_FALSE(ch.pending(Actor::processor));
  CHECK_THROWS_AS(ch.take(Actor::processor), ProtocolError);
  ch.replay(0);
  CHECK(ch.take(Actor::processor).label == "k");
  CHECK(ch.observed_bytes() == Bytes{1, 2, 3, 4, 1, 2, 3});
}
