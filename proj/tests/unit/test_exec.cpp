#include <doctest.h>

#include <random>
#include <set>

#include "edap/common/errors.hpp"
#include "edap/exec/loader.hpp"
#include "edap/exec/memory_image.hpp"
#include "edap/exec/program_image.hpp"
#include "edap/exec/secure_executable.hpp"
#include "test_support.hpp"

using namespace edap;
using namespace edap::exec;
using namespace edap::protocol;

namespace {

struct World {
  DeterministicRng rng{std::uint64_t{2024}};
  ProcessorIdentity proc = provision_processor(rng);
  PlatformState pp{rng.fork()};
  DeterministicRng owner_rng = rng.fork();
};

bool any_plain_section_in(ByteView hay, const ProgramImage& img) {
  for (const auto& [ea, p] : img.lines()) {
    for (std::size_t j = 0; j < crypto::kSections; ++j) {
      auto s = p.section(j);
      if (contains_subsequence(hay, s)) return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("program image validation") {
  std::mt19937_64 g(1);
  auto img = testing_support::random_image(g, 2, 1);
  CHECK_NOTHROW(img.validate());

  SUBCASE("misaligned section") {
    img.sections[0].ea += 8;
    img.entry_point += 8;
    CHECK_THROWS_AS(img.validate(), AlignmentError);
  }
  SUBCASE("partial line") {
    img.sections[1].bytes.pop_back();
    CHECK_THROWS_AS(img.validate(), AlignmentError);
  }
  SUBCASE("overlap") {
    img.sections[1].ea = img.sections[0].ea + 128;
    CHECK_THROWS_AS(img.validate(), ImageError);
  }
  SUBCASE("entry outside") {
    img.entry_point = 0x5000;
    CHECK_THROWS_AS(img.validate(), ImageError);
  }
  SUBCASE("flat images are padded") {
    auto flat = ProgramImage::from_flat(Bytes(300, 1), 0x2000, 0x2000, 3);
    REQUIRE(flat.sections.size() == 1);
    CHECK(flat.sections[0].bytes.size() == 384);
    CHECK(flat.lines().size() == 3);
  }
}

TEST_CASE("package, deploy, and fetch reproduce the image") {
  World w;
  std::mt19937_64 g(2);
  auto img = testing_support::random_image(g, 4, 4);
  Deployment d = deploy(img, w.proc, w.pp, w.owner_rng);
  CHECK(d.frames_accepted == 8);
  CHECK(fetch_program(d, w.proc) == img.lines());

  SUBCASE("the platform sees ciphertext only") {
    CHECK_FALSE(any_plain_section_in(d.channel.observed_bytes(), img));
    Bytes mem;
    for (const auto& [real, line] : d.memory.lines()) {
      mem.insert(mem.end(), line.cipher.bytes.begin(), line.cipher.bytes.end());
      mem.insert(mem.end(), line.digest.bytes.begin(), line.digest.bytes.end());
    }
    CHECK_FALSE(any_plain_section_in(mem, img));
    CHECK_FALSE(contains_subsequence(d.channel.observed_bytes(), d.owner.session_key.view()));
    CHECK_FALSE(contains_subsequence(d.channel.observed_bytes(), d.owner.xts_key.k1));
    CHECK_FALSE(contains_subsequence(d.channel.observed_bytes(), d.owner.xts_key.k2));
  }
  SUBCASE("remapped block fails integrity") {
    d.memory.swap(0x10000, 0x10080);
    CHECK_THROWS_AS(fetch_block(d.memory, w.proc, 0x10000, {1, Privilege::problem}, 1),
                    IntegrityError);
  }
  SUBCASE("privileged or foreign requesters are refused before any check") {
    d.memory.raw(0x10000).cipher.bytes[0] ^= 1;
    CHECK_THROWS_AS(fetch_block(d.memory, w.proc, 0x10000, {1, Privilege::hypervisor}, 1),
                    AccessDenied);
    CHECK_THROWS_AS(fetch_block(d.memory, w.proc, 0x10000, {1, Privilege::supervisor}, 1),
                    AccessDenied);
    CHECK_THROWS_AS(fetch_block(d.memory, w.proc, 0x10080, {2, Privilege::problem}, 1),
                    AccessDenied);
  }
  SUBCASE("unmapped") {
    CHECK_THROWS_AS(fetch_block(d.memory, w.proc, 0x40000, {1, Privilege::problem}, 1),
                    UnmappedBlock);
  }
  SUBCASE("double load") {
    StreamTuple t{99, d.exe.blocks[0]};
    CHECK_THROWS_AS(load_block(d.memory, t), IntegrityError);
  }
}

TEST_CASE("every corrupted variant is rejected without plaintext") {
  World w;
  std::mt19937_64 g(3);
  auto img = testing_support::random_image(g, 2, 2);
  Deployment d = deploy(img, w.proc, w.pp, w.owner_rng);
  const Requester me{1, Privilege::problem};
  const auto& eas = d.memory.lines();
  for (const auto& [ea, line] : eas) {
    for (std::size_t bit = 0; bit < 1088; ++bit) {
      MemoryImage m = d.memory;
      auto& l = m.raw(ea);
      if (bit < 1024) {
        l.cipher.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      } else {
        l.digest.bytes[(bit - 1024) / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      }
      std::optional<crypto::PlainBlock> out;
      CHECK_THROWS_AS(out = fetch_block(m, w.proc, ea, me, 1), IntegrityError);
      CHECK_FALSE(out.has_value());
    }
  }
  for (const auto& [a, la] : eas) {
    for (const auto& [b, lb] : eas) {
      if (a >= b) continue;
      MemoryImage m = d.memory;
      m.swap(a, b);
      CHECK_THROWS_AS(fetch_block(m, w.proc, a, me, 1), IntegrityError);
      CHECK_THROWS_AS(fetch_block(m, w.proc, b, me, 1), IntegrityError);
    }
  }
}

TEST_CASE("packaging") {
  World w;
  std::mt19937_64 g(4);
  auto img = testing_support::random_image(g, 3, 1);

  SUBCASE("different SEIDs give disjoint ciphertext") {
    auto a = make_session(grant_resources(w.pp, w.proc), w.owner_rng);
    auto b = a;
    b.seid ^= 0x5555;
    auto ea = package(img, a);
    auto eb = package(img, b);
    std::set<std::array<std::uint8_t, 16>> sa;
    for (const auto& blk : ea.blocks) {
      for (std::size_t j = 0; j < 8; ++j) sa.insert(blk.cipher.section(j));
    }
    for (const auto& blk : eb.blocks) {
      for (std::size_t j = 0; j < 8; ++j) CHECK_FALSE(sa.contains(blk.cipher.section(j)));
    }
  }
  SUBCASE("reusing <K, SEID> is refused") {
    auto ctx = make_session(grant_resources(w.pp, w.proc), w.owner_rng);
    CHECK_NOTHROW(package(img, ctx));
    CHECK_THROWS_AS(package(img, ctx), FreshnessError);
  }
  SUBCASE("misaligned image emits nothing and leaves the ledger untouched") {
    auto ctx = make_session(grant_resources(w.pp, w.proc), w.owner_rng);
    img.sections[0].ea += 4;
    img.entry_point += 4;
    CHECK_THROWS_AS(package(img, ctx), AlignmentError);
    CHECK(ctx.used_pairs->size() == 0);
  }
}

TEST_CASE("secure executable file format") {
  World w;
  std::mt19937_64 g(5);
  auto ctx = make_session(grant_resources(w.pp, w.proc), w.owner_rng);
  auto exe = package(testing_support::random_image(g, 2, 1), ctx);
  Bytes file = exe.serialize();
  CHECK(file.size() == 4 + 2 + 8 + 8 + 4 + 3 * 144);
  CHECK(std::string(file.begin(), file.begin() + 4) == "EDAP");
  CHECK(SecureExecutable::parse(file) == exe);
  CHECK(SecureExecutable::parse(file).serialize() == file);

  Bytes bad = file;
  bad[1] = 'X';
  CHECK_THROWS_AS(SecureExecutable::parse(bad), ParseError);
  bad = file;
  bad[5] = 9;
  CHECK_THROWS_AS(SecureExecutable::parse(bad), ParseError);
  bad = file;
  bad.pop_back();
  CHECK_THROWS_AS(SecureExecutable::parse(bad), ParseError);
  bad = file;
  bad.push_back(0);
  CHECK_THROWS_AS(SecureExecutable::parse(bad), ParseError);
  SecureExecutable dup = exe;
  dup.blocks[1].ea = dup.blocks[0].ea;
  CHECK_THROWS_AS(SecureExecutable::parse(dup.serialize()), ParseError);
}

TEST_CASE("code binding") {
  World w;
  std::mt19937_64 g(6);
  auto ctx = make_session(grant_resources(w.pp, w.proc), w.owner_rng);
  auto exe = package(testing_support::random_image(g, 3, 0), ctx);
  auto binding = CodeBinding::from(exe, 7);
  const auto& blk = exe.blocks[1];
  CHECK_NOTHROW(verify_code_binding(binding, 7, blk.ea, blk));
  CHECK_THROWS_AS(verify_code_binding(binding, 7, exe.blocks[2].ea, blk), BindingError);
  auto moved = blk;
  moved.ea = exe.blocks[2].ea;
  CHECK_THROWS_AS(verify_code_binding(binding, 7, moved.ea, moved), BindingError);
  CHECK_THROWS_AS(verify_code_binding(binding, 8, blk.ea, blk), BindingError);
  CHECK(binding.entry_point == 0x10000);
}

TEST_CASE("deployment faults") {
  World w;
  std::mt19937_64 g(7);
  auto img = testing_support::random_image(g, 4, 2);

  SUBCASE("replayed frame") {
    FaultPlan f;
    f.replay_frame = 5;
    CHECK_THROWS_AS(deploy(img, w.proc, w.pp, w.owner_rng, f), ReplayError);
  }
  SUBCASE("garbage public key") {
    FaultPlan f;
    f.forge_public_key = true;
    CHECK_THROWS_AS(deploy(img, w.proc, w.pp, w.owner_rng, f), DecryptFailure);
    CHECK_FALSE(w.proc.has_session());
  }
  SUBCASE("tampered bit") {
    for (std::uint64_t bit : {0ull, 1023ull, 1024ull, 1087ull, 1088ull * 5 + 17}) {
      FaultPlan f;
      f.tamper_bit = bit;
      Deployment d = deploy(img, w.proc, w.pp, w.owner_rng, f);
      CHECK_THROWS_AS(fetch_program(d, w.proc), IntegrityError);
    }
  }
  SUBCASE("remapped ea") {
    FaultPlan f;
    f.remap_ea = 0x10080;
    Deployment d = deploy(img, w.proc, w.pp, w.owner_rng, f);
    CHECK_THROWS_AS(fetch_program(d, w.proc), IntegrityError);
  }
  SUBCASE("shared ledger blocks a second packaging of the same pair") {
    auto ledger = std::make_shared<PairLedger>();
    Deployment d = deploy(img, w.proc, w.pp, w.owner_rng, {}, ledger);
    CHECK(ledger->size() == 1);
    CHECK_THROWS_AS(package(img, d.owner), FreshnessError);
  }
}
