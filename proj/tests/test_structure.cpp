#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <set>

#include "malcev/interpolation.hpp"
#include "malcev/loops.hpp"
#include "malcev/structure.hpp"
#include "support/corpus.hpp"

using namespace malcev;

namespace {

struct Analysis {
  FiniteAlgebra a;
  CongruenceLattice lat;
  std::unique_ptr<CommutatorContext> ctx;
  MalcevWitness d;
  PolyClone clone1;

  explicit Analysis(FiniteAlgebra alg) : a(std::move(alg)) {
    lat = congruence_lattice(a);
    ctx = std::make_unique<CommutatorContext>(a, lat);
    auto md = malcev_witness(a, 1000000);
    REQUIRE(md.found());
    d = *md.witness;
    clone1 = generate_poly_clone(a, 1, 1000000);
    REQUIRE(clone1.complete);
  }
};

FiniteAlgebra klein() {
  return corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2), "Z2xZ2");
}

// Mal'cev corpus: all groups of order <= 8, the affine Z4 reduct, and the two
// nonassociative loops viewed as algebras.
std::vector<FiniteAlgebra> malcev_corpus() {
  std::vector<FiniteAlgebra> out = corpus::groups_up_to_8();
  out.push_back(corpus::affine_z4());
  out.push_back(loop_to_algebra(corpus::nonassociative_loop5()).algebra);
  out.push_back(loop_to_algebra(corpus::nonassociative_loop6()).algebra);
  return out;
}

}  // namespace

TEST_CASE("SC1 fails on Z4 at mu = 0 with centralizer 1", "[structure]") {
  Analysis z4(corpus::cyclic_group(4));
  Sc1Result r = check_SC1(*z4.ctx);
  CHECK(!r.holds);
  REQUIRE(r.failures.size() >= 1);
  bool found = false;
  for (const auto& f : r.failures)
    if (f.mu == z4.lat.bottom && f.centralizer == z4.lat.top) found = true;
  CHECK(found);
}

TEST_CASE("SC1 holds on Z2xZ2 and on simple algebras", "[structure]") {
  CHECK(check_SC1(*Analysis(klein()).ctx).holds);
  CHECK(check_SC1(*Analysis(corpus::cyclic_group(2)).ctx).holds);
  CHECK(check_SC1(*Analysis(corpus::cyclic_group(5)).ctx).holds);
}

TEST_CASE("ABp examples", "[structure]") {
  {
    Analysis z4(corpus::cyclic_group(4));
    CHECK(check_ABp(*z4.ctx, z4.lat.top, 2).holds);
  }
  {
    Analysis z3(corpus::cyclic_group(3));
    AbpResult r = check_ABp(*z3.ctx, z3.lat.top, 2);
    CHECK(!r.holds);
    REQUIRE(r.violation.has_value());
    CHECK(r.violation->count == 3);
    // vacuous below the identity congruence
    CHECK(check_ABp(*z3.ctx, z3.lat.bottom, 2).holds);
    CHECK(check_ABp(*z3.ctx, z3.lat.top, 3).holds);
  }
}

TEST_CASE("APMI examples and SC1 => APMI on the corpus", "[structure]") {
  CHECK(check_APMI(*Analysis(klein()).ctx).holds);
  CHECK(check_APMI(*Analysis(corpus::cyclic_group(4)).ctx).holds);
  for (const auto& a : malcev_corpus()) {
    Analysis an(a);
    if (check_SC1(*an.ctx).holds) CHECK(check_APMI(*an.ctx).holds);
  }
}

TEST_CASE("congruence regularity of corpus algebras", "[structure]") {
  for (const auto& a : malcev_corpus()) CHECK(is_congruence_regular(congruence_lattice(a)).regular);
  // the two-element meet-semilattice is regular as well
  CHECK(is_congruence_regular(congruence_lattice(corpus::semilattice2())).regular);
  // with no operations at all, any 3-point set has partitions sharing a class
  FiniteAlgebra bare3{"bare3", 3, {}, std::nullopt};
  CHECK(!is_congruence_regular(congruence_lattice(bare3)).regular);
}

TEST_CASE("homogeneous congruences of Z4, Z2xZ2, S3", "[structure]") {
  {
    Analysis z4(corpus::cyclic_group(4));
    auto reports = find_homogeneous(*z4.ctx);
    REQUIRE(reports.size() == 1);
    CHECK(z4.lat.elems[reports[0].mu].rep == std::vector<int>{0, 1, 0, 1});
    CHECK(reports[0].phi == z4.lat.bottom);
    CHECK(reports[0].mu_star == z4.lat.bottom);
    CHECK(reports[0].abelian);
    CHECK(reports[0].interval_height == 1);
  }
  {
    Analysis v4(klein());
    auto reports = find_homogeneous(*v4.ctx);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].mu == v4.lat.top);
    CHECK(reports[0].phi == v4.lat.bottom);
    CHECK(reports[0].mu_star == v4.lat.bottom);
    CHECK(reports[0].abelian);
    CHECK(reports[0].interval_height == 2);
    CHECK(reports[0].interval_simple_complemented_modular);
  }
  {
    Analysis s3(corpus::symmetric_s3());
    auto reports = find_homogeneous(*s3.ctx);
    REQUIRE(reports.size() == 1);
    CHECK(s3.lat.elems[reports[0].mu].num_classes() == 2);  // gamma_A3
    CHECK(reports[0].abelian);
  }
}

TEST_CASE("homogeneous reports satisfy the structural propositions", "[structure]") {
  for (const auto& a : malcev_corpus()) {
    Analysis an(a);
    bool sc1 = check_SC1(*an.ctx).holds;
    bool apmi = check_APMI(*an.ctx).holds;
    auto reports = find_homogeneous(*an.ctx);
    if (apmi && a.size > 1) CHECK(!reports.empty());
    for (const auto& r : reports) {
      // mu ^ mu* = 0
      CHECK(an.lat.meet(r.mu, r.mu_star) == an.lat.bottom);
      // splitting: alpha >= mu or alpha <= (Phi(mu):mu)
      int cent_phi = an.ctx->centralizer(r.phi, r.mu);
      for (int al = 0; al < an.lat.size(); ++al)
        CHECK((an.lat.leq(r.mu, al) || an.lat.leq(al, cent_phi)));
      // a non-abelian prime quotient below mu forces: mu an atom, (0:mu) = mu*
      bool has_nonabelian_below = false;
      for (int b = 0; b < an.lat.size(); ++b) {
        if (!an.lat.leq(b, r.mu)) continue;
        for (int lo : an.lat.covers_down[b])
          if (!an.ctx->is_abelian_quotient(lo, b)) has_nonabelian_below = true;
      }
      if (has_nonabelian_below) {
        CHECK(an.lat.covers(an.lat.bottom, r.mu));
        CHECK(an.ctx->centralizer(an.lat.bottom, r.mu) == r.mu_star);
      }
      // under (SC1): Phi(mu) = 0, and non-neutral mu is abelian with
      // (0:mu) = mu v mu*
      if (sc1) {
        CHECK(r.phi == an.lat.bottom);
        if (an.ctx->commutator(r.mu, r.mu) != r.mu) {
          CHECK(r.abelian);
          CHECK(an.ctx->centralizer(an.lat.bottom, r.mu) == an.lat.join(r.mu, r.mu_star));
        }
      }
      // under (APMI) the interval [0,mu] is simple complemented modular
      if (apmi) CHECK(r.interval_simple_complemented_modular);
    }
  }
}

TEST_CASE("SC1 failure pairs on Z4, Z2xZ2, and simple algebras", "[structure]") {
  {
    Analysis z4(corpus::cyclic_group(4));
    auto pairs = sc1_failure_pairs(*z4.ctx);
    REQUIRE(pairs.size() == 1);
    // (theta, 1)
    CHECK(z4.lat.elems[pairs[0].first].rep == std::vector<int>{0, 1, 0, 1});
    CHECK(pairs[0].second == z4.lat.top);
  }
  CHECK(sc1_failure_pairs(*Analysis(klein()).ctx).empty());
  CHECK(sc1_failure_pairs(*Analysis(corpus::cyclic_group(5)).ctx).empty());
}

TEST_CASE("SC1 failure pairs exist exactly when SC1 fails", "[structure]") {
  for (const auto& a : malcev_corpus()) {
    Analysis an(a);
    CHECK(check_SC1(*an.ctx).holds == sc1_failure_pairs(*an.ctx).empty());
  }
}

TEST_CASE("minimal sets of Z2, Z4, S3", "[structure]") {
  {
    Analysis z2(corpus::cyclic_group(2));
    auto r = minimal_sets(z2.a, z2.clone1, Congruence::full(2));
    REQUIRE(r.sets.size() == 1);
    CHECK(r.sets[0] == std::vector<int>{0, 1});
  }
  {
    Analysis z4(corpus::cyclic_group(4));
    auto r = minimal_sets(z4.a, z4.clone1, Congruence(std::vector<int>{0, 1, 0, 1}));
    REQUIRE(r.sets.size() == 1);
    CHECK(r.sets[0] == std::vector<int>{0, 1, 2, 3});
  }
  {
    Analysis s3(corpus::symmetric_s3());
    Congruence ga3 = commutator(s3.a, Congruence::full(6), Congruence::full(6));
    auto r = minimal_sets(s3.a, s3.clone1, ga3);
    REQUIRE(r.sets.size() == 2);
    // the two cosets of A3 in the S3 element order
    CHECK(r.sets[0] == std::vector<int>{0, 3, 4});
    CHECK(r.sets[1] == std::vector<int>{1, 2, 5});
    for (const auto& w : r.witnesses) CHECK(term_table(s3.a, w.witness, 1) == w.table);
  }
}

TEST_CASE("class idempotents: constants, identity, and the Z4 gap", "[structure]") {
  {
    // singleton class: the constant polynomial
    Analysis z4(corpus::cyclic_group(4));
    auto e = class_idempotent(z4.a, z4.clone1, Congruence::identity(4), 2);
    REQUIRE(e.has_value());
    CHECK(e->table == std::vector<int>{2, 2, 2, 2});
  }
  {
    // v/1 = A: the identity polynomial qualifies
    Analysis v4(klein());
    auto e = class_idempotent(v4.a, v4.clone1, Congruence::full(4), 1);
    REQUIRE(e.has_value());
    CHECK(e->table == std::vector<int>{0, 1, 2, 3});
  }
  {
    // Z4 at theta: the unary polynomials are x -> kx+c, whose idempotents are
    // the constants and the identity, so no polynomial has image {0,2}. Z4
    // fails (SC1), so the idempotent-onto-class theorem does not apply.
    Analysis z4(corpus::cyclic_group(4));
    CHECK(!class_idempotent(z4.a, z4.clone1, Congruence(std::vector<int>{0, 1, 0, 1}), 0)
               .has_value());
  }
}

TEST_CASE("minimal-set and idempotent theorems under SC1 + homogeneous abelian mu + ABp",
          "[structure]") {
  for (const auto& a : malcev_corpus()) {
    Analysis an(a);
    if (!check_SC1(*an.ctx).holds) continue;
    for (const auto& r : find_homogeneous(*an.ctx)) {
      if (!r.abelian) continue;
      const Congruence& mu = an.lat.elems[r.mu];
      for (int p : {2, 3, 5, 7}) {
        if (!check_ABp(*an.ctx, r.mu, p).holds) continue;
        auto ms = minimal_sets(an.a, an.clone1, mu);
        for (int v = 0; v < an.a.size; ++v) {
          if (mu.rep[v] != v) continue;
          auto cls = mu.class_members(v);
          if (cls.size() > 1) {
            // every non-singleton mu-class appears among the minimal sets
            bool found = false;
            for (const auto& s : ms.sets)
              if (s == cls) found = true;
            CHECK(found);
          }
          // an idempotent with image exactly v/mu exists (any class size)
          CHECK(class_idempotent(an.a, an.clone1, mu, v).has_value());
        }
        // every minimal set is contained in a single mu-class
        for (const auto& s : ms.sets) {
          bool inside_one = true;
          for (int x : s)
            if (!mu.related(x, s[0])) inside_one = false;
          CHECK(inside_one);
        }
        break;  // one applicable p suffices
      }
    }
  }
}

TEST_CASE("coordinatization of Z2xZ2, S3, Z4, Z2^3", "[structure]") {
  {
    Analysis v4(klein());
    Coordinatization c = coordinatize_class(*v4.ctx, v4.d, v4.clone1, v4.lat.top, 0, 2);
    CHECK(c.height == 2);
    CHECK(c.carrier == std::vector<int>{0, 1, 2, 3});
    CHECK(c.encode(0) == std::vector<int>{0, 0});
  }
  {
    Analysis s3(corpus::symmetric_s3());
    Congruence ga3 = commutator(s3.a, Congruence::full(6), Congruence::full(6));
    int mu = s3.lat.index_of(ga3);
    Coordinatization c = coordinatize_class(*s3.ctx, s3.d, s3.clone1, mu, 0, 3);
    CHECK(c.height == 1);
    CHECK(c.carrier.size() == 3);
  }
  {
    Analysis z4(corpus::cyclic_group(4));
    int theta = z4.lat.index_of(Congruence(std::vector<int>{0, 1, 0, 1}));
    Coordinatization c = coordinatize_class(*z4.ctx, z4.d, z4.clone1, theta, 0, 2);
    CHECK(c.height == 1);
    CHECK(c.carrier == std::vector<int>{0, 2});
  }
  {
    Analysis z222(corpus::group_product(
        corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2), "Z2xZ2"),
        corpus::cyclic_group(2), "Z2xZ2xZ2"));
    Coordinatization c = coordinatize_class(*z222.ctx, z222.d, z222.clone1, z222.lat.top, 0, 2);
    CHECK(c.height == 3);
    CHECK(c.height == z222.lat.interval_height(z222.lat.bottom, z222.lat.top));
  }
}

TEST_CASE("coordinatization encode is additive and decodes back", "[structure]") {
  Analysis v4(klein());
  Coordinatization c = coordinatize_class(*v4.ctx, v4.d, v4.clone1, v4.lat.top, 0, 2);
  ClassGroup g = class_group(v4.a, v4.d, v4.lat.elems[v4.lat.top], 0);
  for (int i = 0; i < 4; ++i) {
    CHECK(c.decode(c.encode(i)) == i);
    for (int j = 0; j < 4; ++j) {
      auto ei = c.encode(i), ej = c.encode(j);
      std::vector<int> sum = {(ei[0] + ej[0]) % 2, (ei[1] + ej[1]) % 2};
      CHECK(c.encode(g.carrier[g.plus(g.index_of(i), g.index_of(j))]) == sum);
    }
  }
}

TEST_CASE("coordinatization rejects wrong primes and non-applicable classes", "[structure]") {
  Analysis s3(corpus::symmetric_s3());
  Congruence ga3 = commutator(s3.a, Congruence::full(6), Congruence::full(6));
  int mu = s3.lat.index_of(ga3);
  try {
    coordinatize_class(*s3.ctx, s3.d, s3.clone1, mu, 0, 2);  // (A,mu) satisfies (AB3), not (AB2)
    FAIL("expected PreconditionFailed");
  } catch (const error& e) {
    CHECK(e.code() == errc::precondition_failed);
  }
  try {
    coordinatize_class(*s3.ctx, s3.d, s3.clone1, mu, 0, 4);  // not a prime
    FAIL("expected PreconditionFailed");
  } catch (const error& e) {
    CHECK(e.code() == errc::precondition_failed);
  }
  try {
    coordinatize_class(*s3.ctx, s3.d, s3.clone1, s3.lat.top, 0, 3);  // [1,1] != 0
    FAIL("expected PreconditionFailed");
  } catch (const error& e) {
    CHECK(e.code() == errc::precondition_failed);
  }
}

TEST_CASE("quotient carryover: SC1 and AB2 survive quotients by homogeneous congruences",
          "[structure]") {
  for (const auto& a : malcev_corpus()) {
    Analysis an(a);
    if (!check_SC1(*an.ctx).holds || !check_AB2(*an.ctx).holds) continue;
    for (const auto& r : find_homogeneous(*an.ctx)) {
      QuotientResult q = quotient_algebra(an.a, an.lat.elems[r.mu]);
      CongruenceLattice qlat = congruence_lattice(q.algebra);
      CommutatorContext qctx(q.algebra, qlat);
      CHECK(check_SC1(qctx).holds);
      CHECK(check_AB2(qctx).holds);
    }
  }
}
