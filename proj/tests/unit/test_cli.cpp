#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "edap/common/bytes.hpp"
#include "edap/common/rng.hpp"
#include "edap/exec/loader.hpp"
#include "edap/protocol/kem.hpp"
#include "edap/protocol/processor.hpp"
#include "edap/protocol/session.hpp"
#include "edap/sim/report.hpp"
#include "edap/sim/trace.hpp"
#include "edap/sim/trace_gen.hpp"

using namespace edap;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  int code = edap::cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("edap_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
  Bytes b = read_file(p);
  return std::string(b.begin(), b.end());
}

const std::string kGolden = EDAP_GOLDEN_DIR;

}  // namespace

TEST_CASE("keygen is deterministic and export never reveals the private half") {
  TempDir a, b;
  REQUIRE(invoke({"keygen", "--seed", "3", "--out", a.path.string()}).code == 0);
  REQUIRE(invoke({"keygen", "--seed", "3", "--out", b.path.string()}).code == 0);
  CHECK(read_file(a / "processor.key") == read_file(b / "processor.key"));
  CHECK(read_file(a / "processor.pub") == read_file(b / "processor.pub"));

  TempDir c;
  REQUIRE(invoke({"keygen", "--seed", "4", "--out", c.path.string()}).code == 0);
  CHECK(read_file(a / "processor.pub") != read_file(c / "processor.pub"));

  auto r = invoke({"export", "--key", a / "processor.key", "--out", a / "exported.pub"});
  REQUIRE(r.code == 0);
  CHECK(read_file(a / "exported.pub") == read_file(a / "processor.pub"));
  const Bytes priv = read_file(a / "processor.key");
  const ByteView secret(priv.data() + priv.size() - 32, 32);
  CHECK_FALSE(contains_subsequence(read_file(a / "exported.pub"), secret));
  CHECK(r.out.find(to_hex(secret)) == std::string::npos);

  // The published key wraps to the identity that holds the private file.
  auto proc = protocol::ProcessorIdentity::load_private(priv);
  auto pub = protocol::ProcessorIdentity::load_public(read_file(a / "processor.pub"));
  DeterministicRng rng(std::uint64_t{1});
  const std::array<std::uint8_t, 32> msg = rng.bytes<32>();
  CHECK(proc.pub() == pub);
  proc.accept_session(protocol::wrap_key(pub, msg, rng), 0x1234);
  CHECK(proc.has_session());
  CHECK(proc.seid() == 0x1234);
}

TEST_CASE("package, deploy and run") {
  TempDir d;
  REQUIRE(invoke({"keygen", "--seed", "9", "--out", d.path.string()}).code == 0);
  Bytes image(5 * 128);
  for (std::size_t i = 0; i < image.size(); ++i) image[i] = static_cast<std::uint8_t>(i * 7 + 1);
  write_file(d / "prog.bin", image);

  auto pk = invoke({"package", "--seed", "9", "--key", d / "processor.pub", "--image", d / "prog.bin",
                 "--ledger", d / "pairs.ledger", "--out", d / "prog.edap"});
  REQUIRE(pk.code == 0);
  CHECK(fs::exists(d / "prog.edap.owner"));

  SUBCASE("reused pair is refused") {
    auto again = invoke({"package", "--seed", "9", "--key", d / "processor.pub", "--image",
                      d / "prog.bin", "--ledger", d / "pairs.ledger", "--out", d / "again.edap"});
    CHECK(again.code == 3);
    CHECK(again.err.find("FreshnessError") != std::string::npos);
    CHECK_FALSE(fs::exists(d / "again.edap"));
  }

  SUBCASE("deployed bytes match the image inside the footprint") {
    auto proc = protocol::ProcessorIdentity::load_private(read_file(d / "processor.key"));
    auto exe = exec::SecureExecutable::parse(read_file(d / "prog.edap"));
    auto owner = protocol::load_owner_context(read_file(d / "prog.edap.owner"));
    DeterministicRng rng(std::uint64_t{2});
    auto dep = exec::deploy_packaged(exe, owner, 1, proc, rng);
    Bytes seen;
    for (const auto& [ea, plain] : exec::fetch_program(dep, proc)) {
      seen.insert(seen.end(), plain.bytes.begin(), plain.bytes.end());
    }
    CHECK(seen == image);
  }

  SUBCASE("run over every placement") {
    auto r = invoke({"run", "--seed", "9", "--key", d / "processor.key", "--exe", d / "prog.edap",
                  "--length", "6000", "--priv-period", "500", "--out", d / "out"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("placement ordering holds") != std::string::npos);
    std::vector<std::string> files;
    for (auto p : machine::kAllPlacements) {
      const std::string name(machine::to_string(p));
      files.push_back(d / ("out/report_" + name + ".txt"));
      REQUIRE(fs::exists(files.back()));
      if (p != machine::Placement::baseline) {
        CHECK(slurp(d / ("out/audit_" + name + ".txt")).empty());
        CHECK(nlohmann::json::parse(slurp(d / ("out/audit_" + name + ".json")))["count"] == 0);
      }
    }
    std::vector<std::string> args = {"report"};
    args.insert(args.end(), files.begin(), files.end());
    auto table = invoke(args);
    REQUIRE(table.code == 0);
    std::vector<sim::SimReport> reps;
    for (const auto& f : files) reps.push_back(sim::parse_report(slurp(f)).report);
    CHECK(table.out == sim::format_comparison(reps));
    CHECK(table.out.find("100.00%") != std::string::npos);
    // The rows are the reports' own numbers.
    for (const auto& rep : reps) {
      CHECK(table.out.find(std::to_string(rep.cycles)) != std::string::npos);
    }
  }

  SUBCASE("corrupted executable magic") {
    Bytes exe = read_file(d / "prog.edap");
    exe[0] ^= 0x20;
    write_file(d / "bad.edap", exe);
    auto r = invoke({"run", "--key", d / "processor.key", "--exe", d / "bad.edap", "--owner",
                  d / "prog.edap.owner", "--length", "100", "--out", d / "o"});
    CHECK(r.code == 3);
    CHECK(r.err.find("ParseError") != std::string::npos);
  }
}

TEST_CASE("fault injection exits with the matching error") {
  TempDir d;
  const std::vector<std::string> base = {"run", "--seed", "4", "--length", "500",
                                         "--out", d.path.string()};
  auto with = [&](std::vector<std::string> extra) {
    auto a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return invoke(a);
  };
  for (const char* bit : {"0", "1023", "1024", "1087", "5000", "17407"}) {
    auto r = with({"--tamper-bit", bit});
    CAPTURE(bit);
    CHECK(r.code == 3);
    CHECK(r.err.find("IntegrityError") != std::string::npos);
  }
  auto remap = with({"--remap-ea", "0x10080"});
  CHECK(remap.code == 3);
  CHECK(remap.err.find("IntegrityError") != std::string::npos);
  auto replay = with({"--replay-frame", "3"});
  CHECK(replay.code == 3);
  CHECK(replay.err.find("ReplayError") != std::string::npos);
  auto forged = with({"--forge-key"});
  CHECK(forged.code == 3);
  CHECK(forged.err.find("DecryptFailure") != std::string::npos);
  CHECK(with({}).code == 0);
}

TEST_CASE("negative control build is caught by the audit") {
  TempDir d;
  auto r = invoke({"audit", "--seed", "2", "--length", "3000", "--priv-period", "400",
                "--negative-control", "--placement", "CLEARTEXT_REGFILE", "--out",
                d.path.string()});
  CHECK(r.code == 4);
  CHECK(r.out.find("register") != std::string::npos);
  auto ok = invoke({"audit", "--seed", "2", "--length", "3000", "--priv-period", "400", "--json",
                 "--placement", "all", "--out", d.path.string()});
  CHECK(ok.code == 0);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"report", "/nonexistent/report.txt"}).code == 2);
  CHECK(invoke({"run", "--placement", "L2_ENGINE", "--length", "5"}).code == 2);
  CHECK(invoke({"run", "--width", "9"}).code == 2);
  CHECK(invoke({"package"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("manifest file") {
  TempDir d;
  std::ofstream(d / "manifest.ini") << "seed = 6\nout = " << d / "m" << "\n[run]\nlength = 1500\n"
                                    << "placement = BASELINE,CLEARTEXT_L1\ndec = 8\n";
  auto r = invoke({"--config", d / "manifest.ini", "run"});
  REQUIRE(r.code == 0);
  auto rep = sim::parse_report(slurp(d / "m/report_CLEARTEXT_L1.txt"));
  CHECK(rep.report.lat.dec_cycles == 8);
  CHECK(rep.meta.at("seed") == "6");
  CHECK(rep.report.instructions == 1500);
  CHECK_FALSE(fs::exists(d / "m/report_FU_ENCLAVE.txt"));
}

TEST_CASE("golden fixtures are reproduced bit for bit") {
  const Bytes golden_exe = read_file(kGolden + "/sample.edap");
  const std::string golden_trace = slurp(kGolden + "/sample.trace");
  for (int run = 0; run < 2; ++run) {
    TempDir d;
    REQUIRE(invoke({"keygen", "--seed", "7", "--out", d.path.string()}).code == 0);
    CHECK(read_file(d / "processor.pub") == read_file(kGolden + "/sample_processor.pub"));
    REQUIRE(invoke({"package", "--seed", "7", "--key", d / "processor.pub", "--code-lines", "4",
                 "--data-lines", "2", "--out", d / "sample.edap"})
                .code == 0);
    CHECK(read_file(d / "sample.edap") == golden_exe);
    CHECK(read_file(d / "sample.edap.owner") == read_file(kGolden + "/sample.edap.owner"));

    sim::TraceParams p;
    p.length = 400;
    p.priv_switch_period = 120;
    p.priv_burst = 6;
    CHECK(sim::format_trace(sim::generate_trace(sim::TraceKind::mixed, p, 7)) == golden_trace);
  }
  CHECK(exec::SecureExecutable::parse(golden_exe).serialize() == golden_exe);
  CHECK(sim::format_trace(sim::parse_trace(golden_trace)) == golden_trace);
}
