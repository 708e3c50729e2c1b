#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "malcev/clone.hpp"
#include "malcev/congruence.hpp"
#include "malcev/errors.hpp"
#include "malcev/lattice.hpp"

namespace malcev {

// The subalgebra A(alpha) of A^2 whose universe is the set of alpha-pairs.
struct PairAlgebra {
  FiniteAlgebra alg;
  std::vector<std::pair<int, int>> pairs;       // universe, lexicographic
  std::map<std::pair<int, int>, int> index;
};

inline PairAlgebra pair_algebra(const FiniteAlgebra& a, const Congruence& alpha) {
  PairAlgebra pa;
  for (int x = 0; x < a.size; ++x)
    for (int y = 0; y < a.size; ++y)
      if (alpha.related(x, y)) {
        pa.index[{x, y}] = static_cast<int>(pa.pairs.size());
        pa.pairs.emplace_back(x, y);
      }
  const int m = static_cast<int>(pa.pairs.size());
  pa.alg.name = a.name + "(pairs)";
  pa.alg.size = m;
  std::vector<int> tuple;
  for (const auto& op : a.ops) {
    Operation induced;
    induced.name = op.name;
    induced.arity = op.arity;
    std::size_t total = 1;
    for (int i = 0; i < op.arity; ++i) total *= m;
    induced.table.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t r = idx;
      tuple.assign(op.arity, 0);
      for (int j = op.arity - 1; j >= 0; --j) {
        tuple[j] = static_cast<int>(r % m);
        r /= m;
      }
      std::size_t flat_first = 0, flat_second = 0;
      for (int t : tuple) {
        flat_first = flat_first * a.size + pa.pairs[t].first;
        flat_second = flat_second * a.size + pa.pairs[t].second;
      }
      int rf = op.arity ? op.table[flat_first] : op.table[0];
      int rs = op.arity ? op.table[flat_second] : op.table[0];
      induced.table[idx] = pa.index.at({rf, rs});
    }
    pa.alg.ops.push_back(std::move(induced));
  }
  return pa;
}

// Term-condition commutator [alpha,beta] via the diagonal construction: on the
// pair algebra A(alpha), generate the congruence Delta from all diagonal pairs
// ((x,x),(y,y)) with (x,y) in beta, and read off (a,b) in [alpha,beta] iff
// ((a,b),(b,b)) lies in Delta.
inline Congruence commutator(const FiniteAlgebra& a, const Congruence& alpha,
                             const Congruence& beta) {
  PairAlgebra pa = pair_algebra(a, alpha);
  std::vector<std::pair<int, int>> seeds;
  for (int x = 0; x < a.size; ++x)
    for (int y = 0; y < a.size; ++y)
      if (beta.related(x, y)) seeds.emplace_back(pa.index.at({x, x}), pa.index.at({y, y}));
  Congruence delta = congruence_closure(pa.alg, seeds);

  UnionFind uf(a.size);
  for (int x = 0; x < a.size; ++x)
    for (int y = 0; y < a.size; ++y) {
      if (!alpha.related(x, y)) continue;
      if (delta.related(pa.index.at({x, y}), pa.index.at({y, y}))) uf.unite(x, y);
    }
  return Congruence::from_union_find(uf);
}

// Cached commutator and centralizer tables over a computed lattice.
class CommutatorContext {
 public:
  CommutatorContext(const FiniteAlgebra& a, const CongruenceLattice& lat) : a_(&a), lat_(&lat) {
    comm_.assign(lat.size(), std::vector<int>(lat.size(), -1));
    cent_.assign(lat.size(), std::vector<int>(lat.size(), -1));
  }

  const FiniteAlgebra& algebra() const { return *a_; }
  const CongruenceLattice& lattice() const { return *lat_; }

  // [alpha,beta] as a lattice index.
  int commutator(int i, int j) const {
    auto& slot = comm_[i][j];
    if (slot < 0) {
      Congruence c = malcev::commutator(*a_, lat_->elems[i], lat_->elems[j]);
      slot = lat_->index_of(c);
    }
    return slot;
  }

  // (alpha : beta): the largest eta with [eta,beta] <= alpha, computed as the
  // join of all lattice elements with that property and post-verified.
  int centralizer(int i, int j) const {
    auto& slot = cent_[i][j];
    if (slot >= 0) return slot;
    int result = lat_->bottom;
    for (int k = 0; k < lat_->size(); ++k)
      if (lat_->leq(commutator(k, j), i)) result = lat_->join(result, k);
    if (!lat_->leq(commutator(result, j), i))
      fail(errc::centralizer_inconsistent,
           "join of centralizing congruences does not centralize");
    for (int k = 0; k < lat_->size(); ++k)
      if (lat_->leq(commutator(k, j), i) && !lat_->leq(k, result))
        fail(errc::centralizer_inconsistent, "centralizer is not the largest such congruence");
    slot = result;
    return slot;
  }

  bool is_abelian_quotient(int lo, int hi) const {
    check(lat_->leq(lo, hi), errc::interval_invalid, "abelian quotient needs lo <= hi");
    return lat_->leq(commutator(hi, hi), lo);
  }

 private:
  const FiniteAlgebra* a_;
  const CongruenceLattice* lat_;
  mutable std::vector<std::vector<int>> comm_;
  mutable std::vector<std::vector<int>> cent_;
};

// --- the class group (o/alpha; +_o, -_o, o) ---------------------------------

// Tables are over carrier indices; carrier lists the alpha-class of o in
// ascending element order. x + y = d(x,o,y), -x = d(o,x,o).
struct ClassGroup {
  int base = 0;
  std::vector<int> carrier;
  std::vector<int> add;  // carrier index table, size c*c
  std::vector<int> neg;  // carrier index per carrier element

  int index_of(int element) const {
    auto it = std::lower_bound(carrier.begin(), carrier.end(), element);
    check(it != carrier.end() && *it == element, errc::entry_out_of_range,
          "element not in the class");
    return static_cast<int>(it - carrier.begin());
  }

  int plus(int i, int j) const { return add[i * carrier.size() + j]; }
};

// Verifies the abelian group axioms exhaustively on the carrier.
inline void verify_class_group(const ClassGroup& g) {
  const int c = static_cast<int>(g.carrier.size());
  int o = g.index_of(g.base);
  for (int i = 0; i < c; ++i) {
    check(g.plus(i, o) == i && g.plus(o, i) == i, errc::axiom_failure, "o is not an identity");
    check(g.plus(i, g.neg[i]) == o, errc::axiom_failure, "inverse law fails");
    for (int j = 0; j < c; ++j) {
      check(g.plus(i, j) == g.plus(j, i), errc::axiom_failure, "commutativity fails");
      for (int k = 0; k < c; ++k)
        check(g.plus(g.plus(i, j), k) == g.plus(i, g.plus(j, k)), errc::axiom_failure,
              "associativity fails");
    }
  }
}

// Builds (o/alpha; +_o, -_o, o) from the Mal'cev witness and verifies the
// axioms. The caller vouches for [alpha,alpha] = 0; use the checked overload
// when a commutator context is at hand.
inline ClassGroup class_group(const FiniteAlgebra& a, const MalcevWitness& d,
                              const Congruence& alpha, int o) {
  ClassGroup g;
  g.base = o;
  g.carrier = alpha.class_members(o);
  const int c = static_cast<int>(g.carrier.size());
  g.add.resize(c * c);
  g.neg.resize(c);
  for (int i = 0; i < c; ++i) {
    int neg_val = d(o, g.carrier[i], o, a.size);
    check(alpha.related(neg_val, o), errc::axiom_failure, "-x escapes the class");
    g.neg[i] = g.index_of(neg_val);
    for (int j = 0; j < c; ++j) {
      int sum = d(g.carrier[i], o, g.carrier[j], a.size);
      check(alpha.related(sum, o), errc::axiom_failure, "x+y escapes the class");
      g.add[i * c + j] = g.index_of(sum);
    }
  }
  verify_class_group(g);
  return g;
}

inline ClassGroup class_group(const CommutatorContext& ctx, const MalcevWitness& d, int alpha_idx,
                              int o) {
  const auto& lat = ctx.lattice();
  check(ctx.commutator(alpha_idx, alpha_idx) == lat.bottom, errc::not_abelian,
        "[alpha,alpha] != 0");
  return class_group(ctx.algebra(), d, lat.elems[alpha_idx], o);
}

// --- the scalar ring R_o -----------------------------------------------------

// Restrictions to o/alpha of unary polynomials fixing o, deduplicated by their
// restriction table, with (p+q)(x) = d(p(x),o,q(x)) and composition.
struct ScalarRing {
  int base = 0;
  std::vector<int> carrier;
  std::vector<std::vector<int>> members;  // restriction tables (universe values per carrier index)
  std::vector<int> witness_member;        // first clone member realizing each restriction
  std::vector<int> add_tab, mul_tab;      // member index tables, size r*r
  int zero = -1, one = -1;

  int size() const { return static_cast<int>(members.size()); }
  int add(int i, int j) const { return add_tab[i * members.size() + j]; }
  int mul(int i, int j) const { return mul_tab[i * members.size() + j]; }
};

inline ScalarRing scalar_ring(const FiniteAlgebra& a, const PolyClone& clone1,
                              const MalcevWitness& d, const Congruence& alpha, int o) {
  require_complete(clone1, "scalar_ring");
  check(clone1.arity == 1, errc::precondition_failed, "scalar_ring needs the unary clone");

  ScalarRing r;
  r.base = o;
  r.carrier = alpha.class_members(o);
  const int c = static_cast<int>(r.carrier.size());

  std::map<std::vector<int>, int> seen;
  for (int m = 0; m < clone1.size(); ++m) {
    const auto& table = clone1.table(m);
    if (table[o] != o) continue;
    std::vector<int> restriction(c);
    for (int i = 0; i < c; ++i) restriction[i] = table[r.carrier[i]];
    auto [it, inserted] = seen.emplace(std::move(restriction), r.size());
    if (inserted) {
      r.members.push_back(it->first);
      r.witness_member.push_back(m);
    }
  }

  std::vector<int> identity(c), zero(c, o);
  for (int i = 0; i < c; ++i) identity[i] = r.carrier[i];
  auto member_index = [&](const std::vector<int>& table) {
    auto it = seen.find(table);
    check(it != seen.end(), errc::clone_incomplete,
          "scalar ring is not closed; the unary clone is unsound or truncated");
    return it->second;
  };
  r.one = member_index(identity);
  r.zero = member_index(zero);

  const int rs = r.size();
  r.add_tab.resize(rs * rs);
  r.mul_tab.resize(rs * rs);
  std::vector<int> scratch(c);
  ClassGroup g = class_group(a, d, alpha, o);
  for (int i = 0; i < rs; ++i)
    for (int j = 0; j < rs; ++j) {
      for (int x = 0; x < c; ++x)
        scratch[x] = g.carrier[g.plus(g.index_of(r.members[i][x]), g.index_of(r.members[j][x]))];
      r.add_tab[i * rs + j] = member_index(scratch);
      for (int x = 0; x < c; ++x)
        scratch[x] = r.members[i][g.index_of(r.members[j][x])];
      r.mul_tab[i * rs + j] = member_index(scratch);
    }
  return r;
}

}  // namespace malcev
