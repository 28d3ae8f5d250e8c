#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>

#include "edap/common/bytes.hpp"
#include "edap/common/errors.hpp"
#include "edap/common/rng.hpp"
#include "edap/exec/loader.hpp"
#include "edap/machine/audit.hpp"
#include "edap/machine/machine.hpp"
#include "edap/protocol/platform.hpp"
#include "edap/protocol/processor.hpp"
#include "edap/protocol/session.hpp"
#include "edap/sim/functional_run.hpp"
#include "edap/sim/pipeline.hpp"
#include "edap/sim/report.hpp"
#include "edap/sim/trace.hpp"
#include "edap/sim/trace_gen.hpp"

namespace edap::cli {

namespace fs = std::filesystem;
using machine::Placement;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
};

/// Per-actor streams derived from --seed, always forked in this order.
struct Streams {
  DeterministicRng processor;
  DeterministicRng platform;
  DeterministicRng owner;
  DeterministicRng image;

  explicit Streams(std::uint64_t seed)
      : Streams(DeterministicRng(seed)) {}

 private:
  explicit Streams(DeterministicRng root)
      : processor(root.fork()), platform(root.fork()), owner(root.fork()), image(root.fork()) {}
};

struct ImageOpts {
  std::string image;
  std::uint64_t base = 0x10000;
  std::optional<std::uint64_t> entry;
  ThreadId thread = 1;
  std::size_t code_lines = 8;
  std::size_t data_lines = 8;
};

struct RunOpts {
  std::string key;
  std::string exe;
  std::string owner;
  std::string ledger;
  ImageOpts img;
  std::optional<std::uint64_t> tamper_bit;
  std::optional<std::uint64_t> remap_ea;
  std::optional<std::size_t> replay_frame;
  bool forge_key = false;

  std::string trace;
  std::string trace_kind = "mixed";
  std::size_t length = 100000;
  std::size_t priv_period = 9000;
  double hit_rate = 0.9;

  std::vector<std::string> placements{"all"};
  unsigned dec = 20;
  unsigned enc = 20;
  double scale = 1.0;
  bool non_pipelined = false;
  unsigned width = 4;
  std::size_t buffer_entries = 8;
  bool negative_control = false;
  bool json = false;
};

struct PackageOpts {
  std::string key;
  std::string ledger;
  ImageOpts img;
};

std::string error_kind(const std::exception& e) {
#define EDAP_KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T;
  EDAP_KIND(AlignmentError)
  EDAP_KIND(IntegrityError)
  EDAP_KIND(DecryptFailure)
  EDAP_KIND(ReplayError)
  EDAP_KIND(AuthError)
  EDAP_KIND(FreshnessError)
  EDAP_KIND(AccessDenied)
  EDAP_KIND(BindingError)
  EDAP_KIND(StateHashMismatch)
  EDAP_KIND(UnmappedBlock)
  EDAP_KIND(ImageError)
  EDAP_KIND(ProtocolError)
  EDAP_KIND(ParseError)
#undef EDAP_KIND
  return "Error";
}

void write_text(const fs::path& p, const std::string& s) {
  write_file(p.string(), ByteView(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
}

fs::path out_dir(const Globals& g, const char* fallback) {
  fs::path d = g.out.empty() ? fs::path(fallback) : fs::path(g.out);
  fs::create_directories(d);
  return d;
}

exec::ProgramImage load_image(const ImageOpts& o, DeterministicRng& rng) {
  if (!o.image.empty()) {
    return exec::ProgramImage::from_flat(read_file(o.image), o.base, o.entry.value_or(o.base),
                                         o.thread);
  }
  exec::ProgramImage img;
  img.thread_id = o.thread;
  img.entry_point = o.entry.value_or(o.base);
  Bytes code(o.code_lines * crypto::kLineBytes);
  rng.fill(code);
  img.sections.push_back({o.base, std::move(code)});
  if (o.data_lines) {
    Bytes data(o.data_lines * crypto::kLineBytes);
    rng.fill(data);
    img.sections.push_back({o.base + 0x70000, std::move(data)});
  }
  return img;
}

protocol::PublicKey load_any_public(const std::string& path) {
  Bytes raw = read_file(path);
  if (raw.size() >= 4 && raw[3] == 'K') return protocol::ProcessorIdentity::load_private(raw).pub();
  return protocol::ProcessorIdentity::load_public(raw);
}

protocol::ProcessorIdentity load_processor(const std::string& key, Streams& s) {
  if (key.empty()) return protocol::provision_processor(s.processor);
  return protocol::ProcessorIdentity::load_private(read_file(key));
}

std::vector<Placement> resolve_placements(const std::vector<std::string>& names) {
  std::vector<Placement> out;
  for (const auto& n : names) {
    if (n == "all") {
      out.assign(machine::kAllPlacements.begin(), machine::kAllPlacements.end());
      return out;
    }
    auto p = machine::parse_placement(n);
    if (!p) throw CLI::ValidationError("--placement", "unknown placement " + n);
    if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
  }
  return out;
}

int cmd_keygen(const Globals& g, std::ostream& out) {
  Streams s(g.seed);
  auto proc = protocol::provision_processor(s.processor);
  const fs::path dir = out_dir(g, ".");
  write_file((dir / "processor.key").string(), proc.save_private());
  write_file((dir / "processor.pub").string(), proc.save_public());
  out << "public " << to_hex(proc.pub().bytes) << '\n';
  return kOk;
}

int cmd_export(const Globals& g, const std::string& key, std::ostream& out) {
  Bytes raw = read_file(key);
  Bytes pub_file;
  if (raw.size() >= 4 && raw[3] == 'K') {
    pub_file = protocol::ProcessorIdentity::load_private(raw).save_public();
  } else {
    protocol::ProcessorIdentity::load_public(raw);
    pub_file = raw;
  }
  const auto pub = protocol::ProcessorIdentity::load_public(pub_file);
  if (!g.out.empty()) write_file(g.out, pub_file);
  out << "public " << to_hex(pub.bytes) << '\n';
  return kOk;
}

int cmd_package(const Globals& g, const PackageOpts& o, std::ostream& out) {
  Streams s(g.seed);
  const protocol::PublicKey pub = load_any_public(o.key);
  exec::ProgramImage image = load_image(o.img, s.image);
  protocol::PlatformState pp(std::move(s.platform));
  protocol::ResourceGrant grant{pp.fresh_seid(), pub};
  auto ledger = std::make_shared<protocol::PairLedger>(
      o.ledger.empty() ? protocol::PairLedger{} : protocol::PairLedger::load(o.ledger));
  protocol::SessionContext ctx = protocol::make_session(grant, s.owner, ledger);
  exec::SecureExecutable exe = exec::package(image, ctx);
  const std::string path = g.out.empty() ? "program.edap" : g.out;
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  write_file(path, exe.serialize());
  write_file(path + ".owner", protocol::save_owner_context(ctx));
  if (!o.ledger.empty()) ledger->save(o.ledger);
  char seid[32];
  std::snprintf(seid, sizeof seid, "0x%016llx", static_cast<unsigned long long>(exe.seid));
  out << "packaged " << exe.blocks.size() << " blocks seid " << seid << " -> " << path << '\n';
  return kOk;
}

/// Shared by run and audit: deploy, verify, drive each placement.
int cmd_run(const Globals& g, const RunOpts& o, bool timing, std::ostream& out) {
  Streams s(g.seed);
  protocol::ProcessorIdentity proc = load_processor(o.key, s);

  exec::FaultPlan faults;
  faults.tamper_bit = o.tamper_bit;
  faults.remap_ea = o.remap_ea;
  faults.replay_frame = o.replay_frame;
  faults.forge_public_key = o.forge_key;

  exec::Deployment d;
  if (!o.exe.empty()) {
    auto exe = exec::SecureExecutable::parse(read_file(o.exe));
    auto owner = protocol::load_owner_context(read_file(o.owner.empty() ? o.exe + ".owner" : o.owner));
    d = exec::deploy_packaged(exe, std::move(owner), o.img.thread, proc, s.owner, faults);
  } else {
    exec::ProgramImage image = load_image(o.img, s.image);
    protocol::PlatformState pp(std::move(s.platform));
    std::shared_ptr<protocol::PairLedger> ledger;
    if (!o.ledger.empty()) {
      ledger = std::make_shared<protocol::PairLedger>(protocol::PairLedger::load(o.ledger));
    }
    d = exec::deploy(image, proc, pp, s.owner, faults, ledger);
    if (ledger) ledger->save(o.ledger);
  }
  const auto program = exec::fetch_program(d, proc);
  machine::SecretScanner scanner;
  for (const auto& [ea, plain] : program) scanner.add(plain.bytes);
  out << "deployed " << program.size() << " blocks, " << d.frames_accepted
      << " frames accepted\n";

  const fs::path dir = out_dir(g, "run_out");
  sim::Trace trace;
  if (!o.trace.empty()) {
    trace = sim::read_trace_file(o.trace);
  } else {
    auto kind = sim::parse_trace_kind(o.trace_kind);
    if (!kind) throw CLI::ValidationError("--trace-kind", "unknown trace kind " + o.trace_kind);
    sim::TraceParams p;
    p.length = o.length;
    p.priv_switch_period = o.priv_period;
    p.l1_hit_rate = o.hit_rate;
    p.thread = d.binding.thread;
    trace = sim::generate_trace(*kind, p, g.seed);
    sim::write_trace_file((dir / "trace.txt").string(), trace);
  }

  sim::LatencyConfig lat;
  lat.dec_cycles = o.dec;
  lat.enc_cycles = o.enc;
  lat.scale = o.scale;
  lat.engine_pipelined = !o.non_pipelined;
  sim::CoreConfig core;
  core.issue_width = o.width;

  std::size_t violations = 0;
  std::vector<sim::SimReport> reports;
  std::vector<std::size_t> per_placement;
  const auto placements = resolve_placements(o.placements);
  for (Placement p : placements) {
    const std::string name(machine::to_string(p));
    std::size_t found = 0;
    if (p != Placement::baseline) {
      exec::MemoryImage mem = d.memory;
      machine::MachineOptions mo;
      mo.footprint = {p, o.buffer_entries};
      mo.functional_units = o.width;
      mo.skip_clearing = o.negative_control;
      machine::Machine m(mo, proc, mem, d.binding.thread, &d.binding);
      m.begin_execution(d.binding.entry_point);
      const sim::FunctionalResult fr = sim::run_functional(m, trace, &scanner);
      found = fr.violations.size();
      write_text(dir / ("audit_" + name + ".txt"), machine::format_audit(fr.violations));
      write_text(dir / ("audit_" + name + ".json"), machine::audit_json(fr.violations));
      if (!timing) {
        if (o.json) {
          out << machine::audit_json(fr.violations) << '\n';
        } else {
          out << machine::format_audit(fr.violations);
        }
      }
      out << "audit " << name << ": " << found << " violations over " << fr.audits
          << " checkpoints\n";
    }
    violations += found;
    per_placement.push_back(found);
    if (timing) reports.push_back(sim::simulate(trace, machine::FootprintConfig{p, o.buffer_entries}, lat, core));
  }

  if (timing) {
    const sim::SimReport* base = nullptr;
    for (const auto& r : reports) {
      if (r.placement == Placement::baseline) base = &r;
    }
    for (std::size_t i = 0; i < reports.size(); ++i) {
      auto& r = reports[i];
      if (base) r.normalized_ipc = base->ipc > 0 ? r.ipc / base->ipc : 0.0;
      sim::ReportMeta meta{{"seed", std::to_string(g.seed)},
                           {"trace", o.trace.empty() ? o.trace_kind : o.trace},
                           {"events", std::to_string(trace.size())},
                           {"audit_violations", std::to_string(per_placement[i])}};
      write_text(dir / ("report_" + std::string(machine::to_string(r.placement)) + ".txt"),
                 sim::format_report(r, meta));
    }
    const std::string table = sim::format_comparison(reports);
    write_text(dir / "summary.txt", table);
    out << table;
    if (reports.size() == machine::kAllPlacements.size()) {
      bool ordered = true;
      for (std::size_t i = 1; i < reports.size(); ++i) {
        ordered = ordered && reports[i].cycles >= reports[i - 1].cycles;
      }
      out << "placement ordering " << (ordered ? "holds" : "VIOLATED") << '\n';
    }
  }
  return violations ? kAuditViolation : kOk;
}

int cmd_report(const Globals& g, const std::vector<std::string>& files, std::ostream& out) {
  std::vector<sim::SimReport> reports;
  for (const auto& f : files) {
    Bytes raw = read_file(f);
    reports.push_back(
        sim::parse_report(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()))
            .report);
  }
  const std::string table = sim::format_comparison(reports);
  if (!g.out.empty()) write_text(g.out, table);
  out << table;
  return kOk;
}

void add_image_options(CLI::App* c, ImageOpts& o) {
  c->add_option("--image", o.image, "flat program image")->check(CLI::ExistingFile);
  c->add_option("--base", o.base, "load address of the image");
  c->add_option("--entry", o.entry, "entry point (default: base)");
  c->add_option("--thread", o.thread, "hardware thread bound to the program");
  c->add_option("--code-lines", o.code_lines, "random image: code lines")
      ->check(CLI::PositiveNumber);
  c->add_option("--data-lines", o.data_lines, "random image: data lines");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Encrypted execution model: keys, packaging, deployment, simulation, audit"};
  app.set_config("--config", "", "key = value manifest");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "seed for every random choice")->configurable();
  app.add_option("--out", g.out, "output file or directory")->configurable();

  auto* keygen = app.add_subcommand("keygen", "provision a processor identity fixture");

  std::string export_key;
  auto* exp = app.add_subcommand("export", "write the public half of a key file");
  exp->add_option("--key", export_key, "processor key file")->required()->check(CLI::ExistingFile);

  PackageOpts pk;
  auto* package = app.add_subcommand("package", "build a secure executable");
  package->add_option("--key", pk.key, "processor public (or key) file")
      ->required()
      ->check(CLI::ExistingFile);
  package->add_option("--ledger", pk.ledger, "file of <K, SEID> pairs already used");
  add_image_options(package, pk.img);

  RunOpts ro;
  auto add_run_options = [&](CLI::App* c) {
    c->add_option("--key", ro.key, "processor key file (default: provision from seed)")
        ->check(CLI::ExistingFile);
    c->add_option("--exe", ro.exe, "packaged executable")->check(CLI::ExistingFile);
    c->add_option("--owner", ro.owner, "owner context (default: <exe>.owner)")
        ->check(CLI::ExistingFile);
    c->add_option("--ledger", ro.ledger, "file of <K, SEID> pairs already used");
    add_image_options(c, ro.img);
    c->add_option("--tamper-bit", ro.tamper_bit, "flip one bit of the loaded lines");
    c->add_option("--remap-ea", ro.remap_ea, "swap this block's translation with the next");
    c->add_option("--replay-frame", ro.replay_frame, "resend stream frame i");
    c->add_flag("--forge-key", ro.forge_key, "platform advertises a bogus public key");
    c->add_option("--trace", ro.trace, "trace file")->check(CLI::ExistingFile);
    c->add_option("--trace-kind", ro.trace_kind, "dep_chain, independent, mem_bound, mixed");
    c->add_option("--length", ro.length, "generated trace length");
    c->add_option("--priv-period", ro.priv_period, "events between privilege round trips");
    c->add_option("--hit-rate", ro.hit_rate, "requested L1 hit rate")->check(CLI::Range(0.0, 1.0));
    c->add_option("--placement", ro.placements, "placement(s), or all")->delimiter(',');
    c->add_flag("--negative-control", ro.negative_control, "skip clearing at transitions");
    c->add_option("--buffer-entries", ro.buffer_entries, "entries per FU buffer")
        ->check(CLI::PositiveNumber);
    c->add_option("--width", ro.width, "issue width")->check(CLI::Range(1, 4));
  };
  auto* run = app.add_subcommand("run", "deploy, verify, execute, simulate and audit");
  add_run_options(run);
  run->add_option("--dec", ro.dec, "decrypt latency");
  run->add_option("--enc", ro.enc, "encrypt latency");
  run->add_option("--scale", ro.scale, "latency multiplier")->check(CLI::NonNegativeNumber);
  run->add_flag("--non-pipelined", ro.non_pipelined, "engine busy for its full latency");
  auto* audit = app.add_subcommand("audit", "deploy and execute, then report the audit only");
  add_run_options(audit);
  audit->add_flag("--json", ro.json, "structured dump instead of records");

  std::vector<std::string> report_files;
  auto* report = app.add_subcommand("report", "normalized-IPC table from report files");
  report->add_option("reports", report_files, "report files")
      ->required()
      ->check(CLI::ExistingFile);

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*keygen) return cmd_keygen(g, out);
    if (*exp) return cmd_export(g, export_key, out);
    if (*package) return cmd_package(g, pk, out);
    if (*run) return cmd_run(g, ro, true, out);
    if (*audit) return cmd_run(g, ro, false, out);
    if (*report) return cmd_report(g, report_files, out);
  } catch (const CLI::Error& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << error_kind(e) << ": " << e.what() << '\n';
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace edap::cli
