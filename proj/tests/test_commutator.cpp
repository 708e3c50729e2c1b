#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "malcev/commutator.hpp"
#include "support/corpus.hpp"
#include "support/oracles.hpp"

using namespace malcev;

namespace {

Congruence a3_partition() {
  // cosets of the alternating subgroup in corpus::symmetric_s3 element order:
  // even permutations are id=0, (123)=3, (132)=4
  UnionFind uf(6);
  uf.unite(0, 3);
  uf.unite(0, 4);
  uf.unite(1, 2);
  uf.unite(1, 5);
  return Congruence::from_union_find(uf);
}

}  // namespace

TEST_CASE("commutator [1,1] on Z4 is the identity congruence", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(4);
  CHECK(commutator(a, Congruence::full(4), Congruence::full(4)) == Congruence::identity(4));
}

TEST_CASE("commutator [1,1] on S3 is the A3 coset congruence", "[commutator]") {
  FiniteAlgebra a = corpus::symmetric_s3();
  CHECK(commutator(a, Congruence::full(6), Congruence::full(6)) == a3_partition());
}

TEST_CASE("commutator with the identity congruence vanishes", "[commutator]") {
  for (const auto& a : {corpus::cyclic_group(4), corpus::symmetric_s3()}) {
    CongruenceLattice lat = congruence_lattice(a);
    for (const auto& alpha : lat.elems) {
      CHECK(commutator(a, alpha, Congruence::identity(a.size)) == Congruence::identity(a.size));
      CHECK(commutator(a, Congruence::identity(a.size), alpha) == Congruence::identity(a.size));
    }
  }
}

TEST_CASE("Delta-construction equals the brute-force term condition on size <= 4",
          "[commutator][oracle]") {
  std::vector<FiniteAlgebra> small = {corpus::cyclic_group(2), corpus::cyclic_group(3),
                                      corpus::cyclic_group(4),
                                      corpus::group_product(corpus::cyclic_group(2),
                                                            corpus::cyclic_group(2), "Z2xZ2"),
                                      corpus::affine_z4()};
  for (const auto& a : small) {
    CongruenceLattice lat = congruence_lattice(a);
    PolyClone clone3 = generate_poly_clone(a, 3, 1000000);
    REQUIRE(clone3.complete);
    for (const auto& alpha : lat.elems)
      for (const auto& beta : lat.elems) {
        Congruence via_delta = commutator(a, alpha, beta);
        Congruence via_tc = oracles::commutator_bruteforce(a, lat, clone3, alpha, beta);
        CHECK(via_delta == via_tc);
      }
  }
}

TEST_CASE("group correspondence: [gamma_M, gamma_N] = gamma_[M,N] for groups of order <= 8",
          "[commutator][oracle]") {
  for (const auto& g : corpus::groups_up_to_8()) {
    oracles::GroupOracle oracle(g);
    CongruenceLattice lat = congruence_lattice(g);
    CommutatorContext ctx(g, lat);
    auto normals = oracle.normal_subgroups();
    for (const auto& m : normals)
      for (const auto& n : normals) {
        int gm = lat.index_of(oracle.coset_congruence(m));
        int gn = lat.index_of(oracle.coset_congruence(n));
        Congruence expect = oracle.coset_congruence(oracle.commutator_subgroup(m, n));
        CHECK(lat.elems[ctx.commutator(gm, gn)] == expect);
      }
  }
}

TEST_CASE("commutator is symmetric, monotone, and below the meet", "[commutator]") {
  for (const auto& a : {corpus::cyclic_group(8), corpus::symmetric_s3(), corpus::dihedral_d4(),
                        corpus::quaternion_q8(), corpus::affine_z4()}) {
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    for (int i = 0; i < lat.size(); ++i)
      for (int j = 0; j < lat.size(); ++j) {
        int c = ctx.commutator(i, j);
        CHECK(c == ctx.commutator(j, i));
        CHECK(lat.leq(c, lat.meet(i, j)));
        for (int k = 0; k < lat.size(); ++k)
          if (lat.leq(j, k)) CHECK(lat.leq(c, ctx.commutator(i, k)));
      }
  }
}

TEST_CASE("centralizer examples", "[commutator]") {
  {
    FiniteAlgebra a = corpus::cyclic_group(4);
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    // (0 : theta) = 1 in the abelian group Z4
    int theta = lat.index_of(Congruence(std::vector<int>{0, 1, 0, 1}));
    CHECK(ctx.centralizer(lat.bottom, theta) == lat.top);
    // (alpha : 0) = 1 always
    for (int i = 0; i < lat.size(); ++i) CHECK(ctx.centralizer(i, lat.bottom) == lat.top);
  }
  {
    FiniteAlgebra a = corpus::symmetric_s3();
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    int ga3 = lat.index_of(a3_partition());
    CHECK(ctx.centralizer(lat.bottom, ga3) == ga3);
  }
}

TEST_CASE("abelian quotient examples", "[commutator]") {
  {
    FiniteAlgebra a = corpus::cyclic_group(4);
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    int theta = lat.index_of(Congruence(std::vector<int>{0, 1, 0, 1}));
    CHECK(ctx.is_abelian_quotient(lat.bottom, theta));
    for (int i = 0; i < lat.size(); ++i) CHECK(ctx.is_abelian_quotient(i, i));
  }
  {
    FiniteAlgebra a = corpus::symmetric_s3();
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    CHECK(!ctx.is_abelian_quotient(lat.bottom, lat.top));
    try {
      ctx.is_abelian_quotient(lat.top, lat.bottom);
      FAIL("expected IntervalInvalid");
    } catch (const error& e) {
      CHECK(e.code() == errc::interval_invalid);
    }
  }
}

TEST_CASE("Mal'cev polynomial congruence identity (Lemma on d(p(u),p(v),p(w)))",
          "[commutator]") {
  // For unary p and all alpha-beta chains u = v (alpha), v = w (beta):
  // d(p(u),p(v),p(w)) is [alpha,beta]-related to p(d(u,v,w)).
  for (const auto& a : {corpus::cyclic_group(4),
                        corpus::group_product(corpus::cyclic_group(2), corpus::cyclic_group(2),
                                              "Z2xZ2"),
                        corpus::symmetric_s3()}) {
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    MalcevSearchResult md = malcev_witness(a, 1000000);
    REQUIRE(md.found());
    const auto& d = *md.witness;
    PolyClone clone1 = generate_poly_clone(a, 1, 1000000);
    REQUIRE(clone1.complete);
    for (int ai = 0; ai < lat.size(); ++ai)
      for (int bi = 0; bi < lat.size(); ++bi) {
        const Congruence& alpha = lat.elems[ai];
        const Congruence& beta = lat.elems[bi];
        const Congruence& comm = lat.elems[ctx.commutator(ai, bi)];
        for (int m = 0; m < clone1.size(); ++m) {
          const auto& p = clone1.table(m);
          for (int u = 0; u < a.size; ++u)
            for (int v = 0; v < a.size; ++v) {
              if (!alpha.related(u, v)) continue;
              for (int w = 0; w < a.size; ++w) {
                if (!beta.related(v, w)) continue;
                int lhs = d(p[u], p[v], p[w], a.size);
                int rhs = p[d(u, v, w, a.size)];
                CHECK(comm.related(lhs, rhs));
              }
            }
        }
      }
  }
}

TEST_CASE("class group on Z4 at theta is Z2 on {0,2}", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(4);
  MalcevSearchResult md = malcev_witness(a, 100000);
  Congruence theta(std::vector<int>{0, 1, 0, 1});
  ClassGroup g = class_group(a, *md.witness, theta, 0);
  CHECK(g.carrier == std::vector<int>{0, 2});
  // 2 +_0 2 = d(2,0,2) = 2-0+2 = 0
  CHECK(g.carrier[g.plus(g.index_of(2), g.index_of(2))] == 0);
  CHECK(g.carrier[g.plus(g.index_of(0), g.index_of(2))] == 2);
}

TEST_CASE("class group on a singleton class is trivial", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(4);
  MalcevSearchResult md = malcev_witness(a, 100000);
  ClassGroup g = class_group(a, *md.witness, Congruence::identity(4), 3);
  CHECK(g.carrier == std::vector<int>{3});
}

TEST_CASE("class group on S3 at gamma_A3 is Z3 on the alternating subgroup", "[commutator]") {
  FiniteAlgebra a = corpus::symmetric_s3();
  MalcevSearchResult md = malcev_witness(a, 1000000);
  ClassGroup g = class_group(a, *md.witness, a3_partition(), 0);
  CHECK(g.carrier.size() == 3);
  // cyclic of order 3: some element does not square to the identity
  int oi = g.index_of(0);
  bool has_order3 = false;
  for (int i = 0; i < 3; ++i)
    if (i != oi && g.plus(i, i) != oi) has_order3 = true;
  CHECK(has_order3);
}

TEST_CASE("class_group rejects non-abelian congruences", "[commutator]") {
  FiniteAlgebra a = corpus::symmetric_s3();
  CongruenceLattice lat = congruence_lattice(a);
  CommutatorContext ctx(a, lat);
  MalcevSearchResult md = malcev_witness(a, 1000000);
  try {
    class_group(ctx, *md.witness, lat.top, 0);
    FAIL("expected NotAbelian");
  } catch (const error& e) {
    CHECK(e.code() == errc::not_abelian);
  }
}

TEST_CASE("scalar ring of Z4 at theta has two elements", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(4);
  MalcevSearchResult md = malcev_witness(a, 100000);
  PolyClone clone1 = generate_poly_clone(a, 1, 100000);
  Congruence theta(std::vector<int>{0, 1, 0, 1});
  ScalarRing r = scalar_ring(a, clone1, *md.witness, theta, 0);
  CHECK(r.size() == 2);
  CHECK(r.zero != r.one);
}

TEST_CASE("scalar ring of Z3 at the full congruence is GF(3)", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(3);
  MalcevSearchResult md = malcev_witness(a, 100000);
  PolyClone clone1 = generate_poly_clone(a, 1, 100000);
  ScalarRing r = scalar_ring(a, clone1, *md.witness, Congruence::full(3), 0);
  REQUIRE(r.size() == 3);
  // identify each member with its scalar k = member(1); tables must be mod-3 arithmetic
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int ki = r.members[i][1], kj = r.members[j][1];
      CHECK(r.members[r.add(i, j)][1] == (ki + kj) % 3);
      CHECK(r.members[r.mul(i, j)][1] == (ki * kj) % 3);
    }
}

TEST_CASE("scalar ring on a singleton class is trivial", "[commutator]") {
  FiniteAlgebra a = corpus::cyclic_group(4);
  MalcevSearchResult md = malcev_witness(a, 100000);
  PolyClone clone1 = generate_poly_clone(a, 1, 100000);
  ScalarRing r = scalar_ring(a, clone1, *md.witness, Congruence::identity(4), 1);
  CHECK(r.size() == 1);
}

TEST_CASE("module law: scalars distribute over the class group sum", "[commutator]") {
  // r(x +_o y) = r(x) +_o r(y) for every scalar-ring member
  for (const auto& a : {corpus::cyclic_group(4), corpus::symmetric_s3()}) {
    CongruenceLattice lat = congruence_lattice(a);
    CommutatorContext ctx(a, lat);
    MalcevSearchResult md = malcev_witness(a, 1000000);
    PolyClone clone1 = generate_poly_clone(a, 1, 1000000);
    for (int mu = 0; mu < lat.size(); ++mu) {
      if (ctx.commutator(mu, mu) != lat.bottom) continue;
      for (int o = 0; o < a.size; ++o) {
        ClassGroup g = class_group(a, *md.witness, lat.elems[mu], o);
        ScalarRing r = scalar_ring(a, clone1, *md.witness, lat.elems[mu], o);
        const int c = static_cast<int>(g.carrier.size());
        for (int m = 0; m < r.size(); ++m)
          for (int i = 0; i < c; ++i)
            for (int j = 0; j < c; ++j) {
              int sum_then_r = r.members[m][g.plus(i, j)];
              int r_then_sum =
                  g.carrier[g.plus(g.index_of(r.members[m][i]), g.index_of(r.members[m][j]))];
              CHECK(sum_then_r == r_then_sum);
            }
      }
    }
  }
}
