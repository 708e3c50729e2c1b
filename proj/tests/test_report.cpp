#include <catch2/catch_amalgamated.hpp>

#include "malcev/report.hpp"
#include "support/corpus.hpp"

using namespace malcev;

namespace {

AnalyzeOptions quiet() {
  AnalyzeOptions opt;
  opt.timing = false;
  return opt;
}

}  // namespace

TEST_CASE("analyze report for Z4: s1ac false, SC1 false, AB2 true, witness present",
          "[report]") {
  AnalyzeOutcome out = run_analyze(corpus::cyclic_group(4), quiet(), "fnv1a:test");
  const json& r = out.report;
  CHECK(!out.budget_exhausted);
  CHECK(r["malcev"]["status"] == "provided");
  CHECK(r["lattice"]["size"] == 3);
  CHECK(r["lattice"]["height"] == 2);
  CHECK(r["lattice"]["modular"] == true);
  CHECK(r["sc1"]["holds"] == false);
  CHECK(r["ab2"]["holds"] == true);
  CHECK(r["apmi"]["holds"] == true);
  CHECK(r["regular"] == true);
  CHECK(r["s1ac"]["verdict"] == false);
  CHECK(r["s1ac"]["characterization"] == false);
  REQUIRE(!r["s1ac"]["witness"].is_null());
  CHECK(r["s1ac"]["witness"]["domain"] == json::array({0, 1, 2}));
  CHECK(r["s1ac"]["witness"]["values"] == json::array({0, 0, 2}));
  // congruences render as sorted class lists
  CHECK(r["sc1"]["failures"][0]["mu"] == "[[0],[1],[2],[3]]");
  CHECK(r["sc1"]["failures"][0]["mu_plus"] == "[[0,2],[1,3]]");
}

TEST_CASE("analyze report for Z2xZ2: s1ac true", "[report]") {
  AnalyzeOutcome out = run_analyze(
      corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2), "Z2xZ2"), quiet(),
      "fnv1a:test");
  CHECK(out.report["s1ac"]["verdict"] == true);
  CHECK(out.report["sc1"]["holds"] == true);
  CHECK(out.report["homogeneous"].size() == 1);
}

TEST_CASE("analyze report for the semilattice skips Mal'cev-dependent analyses", "[report]") {
  AnalyzeOutcome out = run_analyze(corpus::semilattice2(), quiet(), "fnv1a:test");
  const json& r = out.report;
  CHECK(r["malcev"]["status"] == "absent");
  CHECK(r["note"] == "no Mal'cev polynomial; analyses requiring one skipped");
  CHECK(!r.contains("sc1"));
  CHECK(!r.contains("s1ac"));
  CHECK(r["lattice"]["size"] == 2);
}

TEST_CASE("analyze reports are byte-identical across runs without timing", "[report]") {
  FiniteAlgebra a = corpus::symmetric_s3();
  AnalyzeOutcome first = run_analyze(a, quiet(), "fnv1a:test");
  AnalyzeOutcome second = run_analyze(a, quiet(), "fnv1a:test");
  CHECK(first.report.dump() == second.report.dump());
  CHECK(first.report.dump().find("timing") == std::string::npos);
}

TEST_CASE("interpolate report for Z4 squaring: preserving but not interpolable", "[report]") {
  PartialFn squaring{{0, 1, 2, 3}, {0, 1, 0, 1}};
  AnalyzeOutcome out =
      run_interpolate(corpus::cyclic_group(4), squaring, quiet(), "fnv1a:test");
  const json& r = out.report;
  CHECK(r["congruence_preserving"] == true);
  CHECK(r["hypotheses"] == "SC1");
  CHECK(r["method"] == "bruteforce");
  CHECK(r["interpolable"] == false);
  CHECK(r["interpolant"].is_null());
}

TEST_CASE("interpolate report prints a verified interpolant on Z2xZ2", "[report]") {
  FiniteAlgebra a =
      corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2), "Z2xZ2");
  PartialFn f{{0, 2}, {1, 3}};  // translation by (0,1)
  AnalyzeOutcome out = run_interpolate(a, f, quiet(), "fnv1a:test");
  const json& r = out.report;
  CHECK(r["congruence_preserving"] == true);
  CHECK(r["interpolable"] == true);
  CHECK(r["method"] == "recursion");
  REQUIRE(r["interpolant"].is_string());
  CHECK(r["interpolant_verified"] == true);
  CHECK(r["trace"].size() >= 1);
}

TEST_CASE("interpolate report handles the empty partial function", "[report]") {
  AnalyzeOutcome out =
      run_interpolate(corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2),
                                            "Z2xZ2"),
                      PartialFn{}, quiet(), "fnv1a:test");
  CHECK(out.report["interpolable"] == true);
  CHECK(out.report["interpolant_verified"] == true);
}

TEST_CASE("loop report with verification", "[report]") {
  AnalyzeOptions opt = quiet();
  opt.verify = true;
  AnalyzeOutcome out = run_loop(corpus::cyclic_loop(4), opt, "fnv1a:test");
  const json& r = out.report;
  CHECK(r["criterion"]["holds"] == false);
  CHECK(r["criterion"]["h"] == json::array({0, 2}));
  CHECK(r["verify"]["bruteforce"] == false);
  CHECK(r["verify"]["agrees"] == true);
}

TEST_CASE("lattice DOT export includes flags", "[report]") {
  std::string dot = run_lattice_dot(
      corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2), "Z2xZ2"), quiet());
  CHECK(dot.find("abelian-atom") != std::string::npos);
  CHECK(dot.find("SMI") != std::string::npos);
  CHECK(dot.find("JI") != std::string::npos);
}

TEST_CASE("budget exhaustion surfaces in the analyze outcome", "[report]") {
  AnalyzeOptions opt = quiet();
  opt.budget_entries = 8;  // three unary members for S3: hopeless
  FiniteAlgebra a = corpus::symmetric_s3();
  AnalyzeOutcome out = run_analyze(a, opt, "fnv1a:test");
  CHECK(out.budget_exhausted);
  CHECK(out.report["s1ac"].contains("error"));
}

TEST_CASE("interpolate pipeline degrades gracefully when the budget dies", "[report]") {
  AnalyzeOptions opt = quiet();
  opt.budget_entries = 8;
  FiniteAlgebra a = corpus::symmetric_s3();
  AnalyzeOutcome out = run_interpolate(a, PartialFn{{0}, {3}}, opt, "fnv1a:test");
  CHECK(out.budget_exhausted);
  CHECK(out.report["method"] == "none");
  CHECK(out.report["interpolable"].is_null());
}

TEST_CASE("digest is stable", "[report]") {
  CHECK(fnv1a_hex("abc") == fnv1a_hex("abc"));
  CHECK(fnv1a_hex("abc") != fnv1a_hex("abd"));
  CHECK(fnv1a_hex("").rfind("fnv1a:", 0) == 0);
}
