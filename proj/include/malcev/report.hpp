#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <json.hpp>

#include "malcev/interpolation.hpp"
#include "malcev/loops.hpp"
#include "malcev/structure.hpp"

namespace malcev {

using json = nlohmann::ordered_json;

struct AnalyzeOptions {
  long long budget_entries = kDefaultCloneBudgetEntries;
  bool run_s1ac = true;
  S1acMode mode = S1acMode::Both;
  bool timing = true;
  int threads = 1;
  bool verify = false;  // loop pipeline: brute-force cross-check
};

inline std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a:") + buf;
}

// compact class-list rendering, e.g. "[[0,2],[1,3]]"
inline json congruence_json(const Congruence& c) { return json(render_classes(c)); }

inline const char* mode_name(S1acMode m) {
  switch (m) {
    case S1acMode::BruteForce: return "bruteforce";
    case S1acMode::Characterization: return "characterization";
    case S1acMode::Both: return "both";
  }
  return "?";
}

class StageTimer {
 public:
  explicit StageTimer(bool enabled) : enabled_(enabled) { last_ = clock::now(); }

  void stage(json& timing, const std::string& name) {
    auto now = clock::now();
    if (enabled_)
      timing[name] = std::chrono::duration_cast<std::chrono::milliseconds>(now - last_).count();
    last_ = now;
  }

 private:
  using clock = std::chrono::steady_clock;
  bool enabled_;
  clock::time_point last_;
};

struct AnalyzeOutcome {
  json report;
  bool budget_exhausted = false;
};

// The full pipeline: Mal'cev witness, lattice, commutator-based verdicts,
// homogeneous congruences, and optionally the s1ac decision.
inline AnalyzeOutcome run_analyze(const FiniteAlgebra& a, const AnalyzeOptions& opt,
                                  const std::string& digest) {
  AnalyzeOutcome out;
  json& r = out.report;
  json timing;
  StageTimer timer(opt.timing);

  r["input"] = {{"name", a.name}, {"size", a.size}, {"digest", digest}};

  long long member_budget3 = clone_member_budget(a.size, 3, opt.budget_entries);
  MalcevSearchResult md = a.malcev_term ? malcev_witness(a, member_budget3)
                                        : find_malcev_polynomial(a, member_budget3);
  const char* status = a.malcev_term                                            ? "provided"
                       : md.status == MalcevSearchResult::Status::Found         ? "found"
                       : md.status == MalcevSearchResult::Status::Absent        ? "absent"
                                                                                : "unknown";
  r["malcev"] = {{"status", status},
                 {"term", md.found() ? json(render_term(a, md.witness->d.witness)) : json()}};
  if (md.status == MalcevSearchResult::Status::Unknown) out.budget_exhausted = true;
  timer.stage(timing, "malcev");

  CongruenceLattice lat = congruence_lattice(a, opt.threads);
  r["lattice"] = {{"size", lat.size()},
                  {"height", lat.height()},
                  {"modular", lattice_modular(lat)}};
  r["regular"] = is_congruence_regular(lat).regular;
  timer.stage(timing, "lattice");

  if (!md.found()) {
    r["note"] = "no Mal'cev polynomial; analyses requiring one skipped";
    if (opt.timing) r["timing_ms"] = timing;
    return out;
  }

  CommutatorContext ctx(a, lat);
  Sc1Result sc1 = check_SC1(ctx);
  json sc1_failures = json::array();
  for (const auto& f : sc1.failures)
    sc1_failures.push_back({{"mu", congruence_json(lat.elems[f.mu])},
                            {"mu_plus", congruence_json(lat.elems[f.mu_plus])},
                            {"centralizer", congruence_json(lat.elems[f.centralizer])}});
  r["sc1"] = {{"holds", sc1.holds}, {"failures", sc1_failures}};

  AbpResult ab2 = check_AB2(ctx);
  json violation;
  if (ab2.violation)
    violation = {{"alpha", congruence_json(lat.elems[ab2.violation->alpha])},
                 {"beta", congruence_json(lat.elems[ab2.violation->beta])},
                 {"point", ab2.violation->point},
                 {"classes", ab2.violation->count}};
  r["ab2"] = {{"holds", ab2.holds}, {"violation", violation}};
  r["apmi"] = {{"holds", check_APMI(ctx).holds}};
  timer.stage(timing, "commutators");

  json homo = json::array();
  for (const auto& h : find_homogeneous(ctx))
    homo.push_back({{"mu", congruence_json(lat.elems[h.mu])},
                    {"phi", congruence_json(lat.elems[h.phi])},
                    {"mu_star", congruence_json(lat.elems[h.mu_star])},
                    {"abelian", h.abelian},
                    {"interval_height", h.interval_height},
                    {"interval_simple_complemented_modular",
                     h.interval_simple_complemented_modular}});
  r["homogeneous"] = homo;
  timer.stage(timing, "homogeneous");

  if (opt.run_s1ac) {
    long long member_budget1 = clone_member_budget(a.size, 1, opt.budget_entries);
    PolyClone clone1 = generate_poly_clone(a, 1, member_budget1);
    if (!clone1.complete && opt.mode != S1acMode::Characterization) {
      r["s1ac"] = {{"mode", mode_name(opt.mode)}, {"error", "clone budget exhausted"}};
      out.budget_exhausted = true;
    } else {
      S1acDecision dec = decide_s1ac(a, *md.witness, clone1, opt.mode);
      json s;
      s["mode"] = mode_name(opt.mode);
      s["verdict"] = dec.s1ac ? json(*dec.s1ac) : json();
      if (dec.characterization) {
        s["characterization"] = *dec.characterization;
        s["sc1"] = dec.sc1;
        s["ab2"] = dec.ab2;
      }
      s["regular"] = dec.regular;
      s["witness"] = dec.witness ? partial_fn_to_json(*dec.witness) : json();
      if (opt.mode != S1acMode::Characterization) s["functions_checked"] = dec.functions_checked;
      r["s1ac"] = s;
    }
    timer.stage(timing, "s1ac");
  }

  if (opt.timing) r["timing_ms"] = timing;
  return out;
}

// Interpolation pipeline: preservation, the recursion verdict, and a
// brute-force fallback when the hypotheses are unmet.
inline AnalyzeOutcome run_interpolate(const FiniteAlgebra& a, const PartialFn& f,
                                      const AnalyzeOptions& opt, const std::string& digest) {
  AnalyzeOutcome out;
  json& r = out.report;
  json timing;
  StageTimer timer(opt.timing);
  validate_partial_fn(a, f);

  r["input"] = {{"name", a.name},
                {"size", a.size},
                {"digest", digest},
                {"partial_fn", partial_fn_to_json(f)}};

  long long member_budget3 = clone_member_budget(a.size, 3, opt.budget_entries);
  MalcevSearchResult md = malcev_witness(a, member_budget3);
  if (!md.found()) {
    r["note"] = "no Mal'cev polynomial; interpolation pipeline unavailable";
    out.budget_exhausted = md.status == MalcevSearchResult::Status::Unknown;
    if (opt.timing) r["timing_ms"] = timing;
    return out;
  }

  PrincipalCache pc(a);
  auto pres = is_congruence_preserving(pc, f);
  r["congruence_preserving"] = pres.preserving;
  r["violating_pair"] =
      pres.violation ? json({pres.violation->first, pres.violation->second}) : json();
  timer.stage(timing, "preservation");

  InterpolationResult ir = interpolate_unary(a, *md.witness, f, opt.budget_entries);
  json trace = json::array();
  for (const auto& t : ir.trace)
    trace.push_back({{"algebra_size", t.algebra_size},
                     {"mu", t.mu},
                     {"quotient_size", t.quotient_size},
                     {"clone_size", t.clone_size},
                     {"in_class_solves", t.stages}});

  std::optional<bool> interpolable;
  std::string method = "recursion";
  std::optional<PolyFn> poly = ir.poly;
  if (ir.verdict == InterpolationResult::Verdict::Interpolated) {
    interpolable = true;
  } else if (ir.verdict == InterpolationResult::Verdict::NotInterpolable) {
    interpolable = false;
  } else {
    // hypotheses unmet: fall back to the exhaustive clone search
    method = "bruteforce";
    long long member_budget1 = clone_member_budget(a.size, 1, opt.budget_entries);
    PolyClone clone1 = generate_poly_clone(a, 1, member_budget1);
    if (!clone1.complete) {
      out.budget_exhausted = true;
      method = "none";
    } else {
      auto p = interpolable_bruteforce(a, clone1, f);
      interpolable = p.has_value();
      if (p) poly = std::move(p);
    }
  }
  timer.stage(timing, "interpolation");

  r["hypotheses"] = ir.verdict == InterpolationResult::Verdict::HypothesisUnmet
                        ? json(ir.reason)
                        : json("ok");
  r["interpolable"] = interpolable ? json(*interpolable) : json();
  r["method"] = method;
  if (poly && interpolable.value_or(false)) {
    r["interpolant"] = render_term(a, poly->witness);
    // no bound is promised on witness size; report it
    r["interpolant_nodes"] = poly->witness.nodes.size();
    // the printed term must re-evaluate to the interpolant and match f
    bool verified = term_table(a, parse_term(a, r["interpolant"].get<std::string>()), 1) ==
                    poly->table;
    for (std::size_t i = 0; i < f.domain.size(); ++i)
      if (poly->table[f.domain[i]] != f.values[i]) verified = false;
    r["interpolant_verified"] = verified;
  } else {
    r["interpolant"] = json();
  }
  r["trace"] = trace;
  if (opt.timing) r["timing_ms"] = timing;
  return out;
}

// Loop pipeline: the normal-subloop criterion with optional brute-force check.
inline AnalyzeOutcome run_loop(const Loop& q, const AnalyzeOptions& opt,
                               const std::string& digest) {
  AnalyzeOutcome out;
  json& r = out.report;
  json timing;
  StageTimer timer(opt.timing);

  r["input"] = {{"name", q.name}, {"size", q.size}, {"digest", digest}};
  LoopCriterion crit = loop_s1ac_criterion(q);
  r["criterion"] = {{"holds", crit.holds},
                    {"h", crit.h_elements},
                    {"rank", crit.exponent2_rank},
                    {"quotient_is_z2n", crit.quotient_is_z2n},
                    {"failing_subloop", crit.failing ? json(*crit.failing) : json()}};
  timer.stage(timing, "criterion");

  if (opt.verify) {
    LoopAlgebra la = loop_to_algebra(q);
    long long member_budget1 = clone_member_budget(q.size, 1, opt.budget_entries);
    PolyClone clone1 = generate_poly_clone(la.algebra, 1, member_budget1);
    if (!clone1.complete) {
      r["verify"] = {{"error", "clone budget exhausted"}};
      out.budget_exhausted = true;
    } else {
      S1acDecision dec = decide_s1ac(la.algebra, la.d, clone1, S1acMode::BruteForce);
      r["verify"] = {{"bruteforce", *dec.s1ac}, {"agrees", *dec.s1ac == crit.holds}};
      check(*dec.s1ac == crit.holds, errc::inconsistency_detected,
            "loop criterion disagrees with brute force");
    }
    timer.stage(timing, "verify");
  }
  if (opt.timing) r["timing_ms"] = timing;
  return out;
}

// Hasse diagram with JI/SMI flags and abelian-atom marks when a Mal'cev
// witness is available.
inline std::string run_lattice_dot(const FiniteAlgebra& a, const AnalyzeOptions& opt) {
  CongruenceLattice lat = congruence_lattice(a, opt.threads);
  DotFlags flags;
  long long member_budget3 = clone_member_budget(a.size, 3, opt.budget_entries);
  MalcevSearchResult md = malcev_witness(a, member_budget3);
  if (md.found()) {
    CommutatorContext ctx(a, lat);
    flags.abelian_atom.assign(lat.size(), false);
    for (int atom : lat.atoms())
      flags.abelian_atom[atom] = ctx.commutator(atom, atom) == lat.bottom;
  }
  return lattice_dot(lat, flags);
}

}  // namespace malcev
