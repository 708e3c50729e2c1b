// Batch front-end: load algebras, loops, and partial functions; run the
// analyses; emit JSON reports and lattice DOT files.
//
// Exit codes: 0 ok, 2 input error, 3 clone budget exhausted.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "malcev/report.hpp"

namespace {

using malcev::AnalyzeOptions;
using malcev::AnalyzeOutcome;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) malcev::fail(malcev::errc::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json parse_json(const std::string& text, const std::string& path) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded())
    malcev::fail(malcev::errc::malformed_document, "'" + path + "' is not valid JSON");
  return doc;
}

void emit(const malcev::json& report, const std::string& json_path) {
  std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!json_path.empty()) {
    std::ofstream out(json_path, std::ios::binary);
    if (!out) malcev::fail(malcev::errc::io_error, "cannot write '" + json_path + "'");
    out << text;
  }
}

int exit_code_for(const malcev::error& e) {
  switch (e.code()) {
    case malcev::errc::malformed_document:
    case malcev::errc::entry_out_of_range:
    case malcev::errc::table_length_mismatch:
    case malcev::errc::unknown_operation:
    case malcev::errc::arity_mismatch:
    case malcev::errc::not_a_loop:
    case malcev::errc::io_error:
      return kExitInput;
    case malcev::errc::clone_incomplete:
      return kExitBudget;
    default:
      return 1;
  }
}

struct CommonFlags {
  long long max_clone_size = malcev::kDefaultCloneBudgetEntries;
  std::string json_path;
  int threads = 1;
  bool no_timing = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-clone-size", max_clone_size,
                    "clone budget in table entries (default 2000000)");
    cmd->add_option("--json", json_path, "also write the JSON report to this file");
    cmd->add_option("--threads", threads, "worker cap for parallel stages")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-timing", no_timing, "omit the timing fields");
  }

  AnalyzeOptions options() const {
    AnalyzeOptions opt;
    opt.budget_entries = max_clone_size;
    opt.timing = !no_timing;
    opt.threads = threads;
    return opt;
  }
};

malcev::S1acMode parse_mode(const std::string& mode) {
  if (mode == "bruteforce") return malcev::S1acMode::BruteForce;
  if (mode == "characterization") return malcev::S1acMode::Characterization;
  if (mode == "both") return malcev::S1acMode::Both;
  malcev::fail(malcev::errc::malformed_document, "unknown mode '" + mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact analysis of finite Mal'cev algebras: congruence lattices, commutators, "
               "strict 1-affine completeness"};
  app.require_subcommand(1);

  std::string algebra_path, fn_path, loop_path, dot_path, mode = "both";
  bool skip_s1ac = false, verify = false;

  CommonFlags analyze_flags, interp_flags, lattice_flags, loop_flags, s1ac_flags;

  CLI::App* analyze = app.add_subcommand("analyze", "full pipeline for an algebra file");
  analyze->add_option("algebra", algebra_path, "algebra JSON file")->required();
  analyze->add_option("--mode", mode, "s1ac mode: bruteforce|characterization|both");
  analyze->add_flag("--skip-s1ac", skip_s1ac, "skip the s1ac decision");
  analyze_flags.attach(analyze);

  CLI::App* interpolate =
      app.add_subcommand("interpolate", "interpolate a unary partial function");
  interpolate->add_option("algebra", algebra_path, "algebra JSON file")->required();
  interpolate->add_option("partialfn", fn_path, "partial function JSON file")->required();
  interp_flags.attach(interpolate);

  CLI::App* lattice = app.add_subcommand("lattice", "export the congruence lattice");
  lattice->add_option("algebra", algebra_path, "algebra JSON file")->required();
  lattice->add_option("--dot", dot_path, "write the Hasse diagram to this DOT file");
  lattice_flags.attach(lattice);

  CLI::App* loop = app.add_subcommand("loop", "loop criterion for strict 1-affine completeness");
  loop->add_option("loop", loop_path, "loop JSON file")->required();
  loop->add_flag("--verify", verify, "cross-check against the brute-force decision");
  loop_flags.attach(loop);

  CLI::App* s1ac = app.add_subcommand("s1ac", "decide strict 1-affine completeness only");
  s1ac->add_option("algebra", algebra_path, "algebra JSON file")->required();
  s1ac->add_option("--mode", mode, "s1ac mode: bruteforce|characterization|both");
  s1ac_flags.attach(s1ac);

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      std::string raw = slurp(algebra_path);
      malcev::FiniteAlgebra a = malcev::load_algebra(parse_json(raw, algebra_path));
      AnalyzeOptions opt = analyze_flags.options();
      opt.mode = parse_mode(mode);
      opt.run_s1ac = !skip_s1ac;
      AnalyzeOutcome out = malcev::run_analyze(a, opt, malcev::fnv1a_hex(raw));
      emit(out.report, analyze_flags.json_path);
      return out.budget_exhausted ? kExitBudget : kExitOk;
    }
    if (interpolate->parsed()) {
      std::string raw = slurp(algebra_path);
      std::string raw_fn = slurp(fn_path);
      malcev::FiniteAlgebra a = malcev::load_algebra(parse_json(raw, algebra_path));
      malcev::PartialFn f = malcev::load_partial_fn(parse_json(raw_fn, fn_path));
      AnalyzeOutcome out =
          malcev::run_interpolate(a, f, interp_flags.options(), malcev::fnv1a_hex(raw + raw_fn));
      emit(out.report, interp_flags.json_path);
      return out.budget_exhausted ? kExitBudget : kExitOk;
    }
    if (lattice->parsed()) {
      std::string raw = slurp(algebra_path);
      malcev::FiniteAlgebra a = malcev::load_algebra(parse_json(raw, algebra_path));
      std::string dot = malcev::run_lattice_dot(a, lattice_flags.options());
      if (dot_path.empty()) {
        std::cout << dot;
      } else {
        std::ofstream out(dot_path, std::ios::binary);
        if (!out) malcev::fail(malcev::errc::io_error, "cannot write '" + dot_path + "'");
        out << dot;
        std::cout << "wrote " << dot_path << "\n";
      }
      return kExitOk;
    }
    if (loop->parsed()) {
      std::string raw = slurp(loop_path);
      malcev::Loop q = malcev::load_loop(parse_json(raw, loop_path));
      AnalyzeOptions opt = loop_flags.options();
      opt.verify = verify;
      AnalyzeOutcome out = malcev::run_loop(q, opt, malcev::fnv1a_hex(raw));
      emit(out.report, loop_flags.json_path);
      return out.budget_exhausted ? kExitBudget : kExitOk;
    }
    if (s1ac->parsed()) {
      std::string raw = slurp(algebra_path);
      malcev::FiniteAlgebra a = malcev::load_algebra(parse_json(raw, algebra_path));
      AnalyzeOptions opt = s1ac_flags.options();
      opt.mode = parse_mode(mode);
      long long budget3 = malcev::clone_member_budget(a.size, 3, opt.budget_entries);
      malcev::MalcevSearchResult md = malcev::malcev_witness(a, budget3);
      malcev::json report;
      report["input"] = {{"name", a.name}, {"size", a.size}, {"digest", malcev::fnv1a_hex(raw)}};
      if (!md.found()) {
        report["note"] = "no Mal'cev polynomial; s1ac decision unavailable";
        emit(report, s1ac_flags.json_path);
        return md.status == malcev::MalcevSearchResult::Status::Unknown ? kExitBudget : kExitOk;
      }
      long long budget1 = malcev::clone_member_budget(a.size, 1, opt.budget_entries);
      malcev::PolyClone clone1 = malcev::generate_poly_clone(a, 1, budget1);
      if (!clone1.complete && opt.mode != malcev::S1acMode::Characterization) {
        report["error"] = "clone budget exhausted";
        emit(report, s1ac_flags.json_path);
        return kExitBudget;
      }
      malcev::S1acDecision dec = malcev::decide_s1ac(a, *md.witness, clone1, opt.mode);
      report["mode"] = malcev::mode_name(opt.mode);
      report["verdict"] = dec.s1ac ? malcev::json(*dec.s1ac) : malcev::json();
      if (dec.characterization) {
        report["characterization"] = *dec.characterization;
        report["sc1"] = dec.sc1;
        report["ab2"] = dec.ab2;
      }
      report["regular"] = dec.regular;
      report["witness"] = dec.witness ? malcev::partial_fn_to_json(*dec.witness) : malcev::json();
      emit(report, s1ac_flags.json_path);
      return kExitOk;
    }
  } catch (const malcev::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
