#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "malcev/algebra.hpp"
#include "malcev/clone.hpp"
#include "malcev/commutator.hpp"
#include "malcev/congruence.hpp"
#include "malcev/errors.hpp"
#include "malcev/lattice.hpp"

namespace malcev {

// A finite loop with identity relabeled to element 0 and derived division
// tables: x\(x*y) = y and (x*y)/y = x.
struct Loop {
  std::string name;
  int size = 0;
  std::vector<int> mult;  // n*n, row i = left multiplication by i
  std::vector<int> ldiv;  // ldiv[x][z] = y iff x*y = z
  std::vector<int> rdiv;  // rdiv[z][y] = x iff x*y = z

  int mul(int x, int y) const { return mult[x * size + y]; }
  int under(int x, int z) const { return ldiv[x * size + z]; }
  int over(int z, int y) const { return rdiv[z * size + y]; }
};

// Validates the quasigroup axioms and the identity, relabels so the identity
// becomes element 0, and fills in the division tables.
inline Loop make_loop(int n, const std::vector<int>& mult, const std::string& name = "loop") {
  check(n > 0, errc::not_a_loop, "loop size must be positive");
  check(static_cast<int>(mult.size()) == n * n, errc::not_a_loop,
        "multiplication table must have n*n entries");
  for (int v : mult) check(v >= 0 && v < n, errc::not_a_loop, "table entry out of range");

  for (int i = 0; i < n; ++i) {
    std::vector<bool> row(n, false), col(n, false);
    for (int j = 0; j < n; ++j) {
      if (row[mult[i * n + j]]) fail(errc::not_a_loop, "row " + std::to_string(i) + " repeats");
      row[mult[i * n + j]] = true;
      if (col[mult[j * n + i]]) fail(errc::not_a_loop, "column " + std::to_string(i) + " repeats");
      col[mult[j * n + i]] = true;
    }
  }

  int identity = -1;
  for (int e = 0; e < n && identity < 0; ++e) {
    bool ok = true;
    for (int x = 0; x < n && ok; ++x)
      if (mult[e * n + x] != x || mult[x * n + e] != x) ok = false;
    if (ok) identity = e;
  }
  check(identity >= 0, errc::not_a_loop, "no two-sided identity");

  Loop q;
  q.name = name;
  q.size = n;
  q.mult.resize(n * n);
  auto relabel = [&](int x) { return x == identity ? 0 : x == 0 ? identity : x; };
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      q.mult[relabel(x) * n + relabel(y)] = relabel(mult[x * n + y]);

  q.ldiv.assign(n * n, 0);
  q.rdiv.assign(n * n, 0);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      int z = q.mult[x * n + y];
      q.ldiv[x * n + z] = y;
      q.rdiv[z * n + y] = x;
    }
  return q;
}

inline Loop load_loop(const nlohmann::json& doc, const std::string& name = "loop") {
  check(doc.is_object() && doc.contains("size") && doc["size"].is_number_integer() &&
            doc.contains("mult") && doc["mult"].is_array(),
        errc::not_a_loop, "loop document needs 'size' and 'mult'");
  int n = doc["size"].get<int>();
  check(n > 0, errc::not_a_loop, "'size' must be positive");
  std::vector<int> mult;
  for (const auto& row : doc["mult"]) {
    check(row.is_array() && static_cast<int>(row.size()) == n, errc::not_a_loop,
          "'mult' must be a square matrix");
    for (const auto& v : row) {
      check(v.is_number_integer(), errc::not_a_loop, "'mult' entries must be integers");
      mult.push_back(v.get<int>());
    }
  }
  check(static_cast<int>(mult.size()) == n * n, errc::not_a_loop, "'mult' must be n rows");
  std::string loop_name = doc.contains("name") && doc["name"].is_string()
                              ? doc["name"].get<std::string>()
                              : name;
  return make_loop(n, mult, loop_name);
}

// The loop as an algebra with operations (mul, ldiv, rdiv) and the verified
// Mal'cev witness d(x,y,z) = (x/y)*z.
struct LoopAlgebra {
  FiniteAlgebra algebra;
  MalcevWitness d;
};

inline LoopAlgebra loop_to_algebra(const Loop& q) {
  LoopAlgebra out;
  out.algebra.name = q.name;
  out.algebra.size = q.size;
  out.algebra.ops = {{"mul", 2, q.mult}, {"ldiv", 2, q.ldiv}, {"rdiv", 2, q.rdiv}};
  out.algebra.malcev_term = parse_term(out.algebra, "(mul (rdiv x y) z)");
  out.d.d.arity = 3;
  out.d.d.witness = *out.algebra.malcev_term;
  out.d.d.table = term_table(out.algebra, out.d.d.witness, 3);
  check(satisfies_malcev_identities(out.d.d.table, q.size), errc::internal_error,
        "(x/y)*z fails the Mal'cev identities");
  return out;
}

// Normal subloops are exactly the identity classes of congruences of the loop
// algebra; the correspondence N <-> gamma_N is order preserving.
struct NormalSubloop {
  std::vector<int> elements;  // ascending, contains 0
  Congruence congruence;
};

inline std::vector<NormalSubloop> normal_subloops(const Loop& q, const CongruenceLattice& lat) {
  std::vector<NormalSubloop> out;
  for (const auto& c : lat.elems) out.push_back({c.class_members(0), c});
  return out;
}

inline std::vector<NormalSubloop> normal_subloops(const Loop& q) {
  LoopAlgebra la = loop_to_algebra(q);
  CongruenceLattice lat = congruence_lattice(la.algebra);
  return normal_subloops(q, lat);
}

// Z(Q): all a that commute and associate in every position.
inline std::vector<int> center(const Loop& q) {
  std::vector<int> out;
  for (int a = 0; a < q.size; ++a) {
    bool central = true;
    for (int x = 0; x < q.size && central; ++x) {
      if (q.mul(a, x) != q.mul(x, a)) central = false;
      for (int y = 0; y < q.size && central; ++y) {
        if (q.mul(a, q.mul(x, y)) != q.mul(q.mul(a, x), y)) central = false;
        if (q.mul(x, q.mul(y, a)) != q.mul(q.mul(x, y), a)) central = false;
        if (q.mul(x, q.mul(a, y)) != q.mul(q.mul(x, a), y)) central = false;
      }
    }
    if (central) out.push_back(a);
  }
  return out;
}

// The loop criterion for strict 1-affine completeness: with H the
// intersection of all index-2 normal subloops, Q/H must be an elementary
// abelian 2-group and every normal subloop N inside H must satisfy
// [N,N]_Q = N.
struct LoopCriterion {
  bool holds = false;
  std::vector<int> h_elements;              // H
  int exponent2_rank = 0;                   // n with Q/H = Z_2^n
  bool quotient_is_z2n = false;
  std::optional<std::vector<int>> failing;  // N <= H with [N,N]_Q < N
};

inline LoopCriterion loop_s1ac_criterion(const Loop& q) {
  LoopAlgebra la = loop_to_algebra(q);
  CongruenceLattice lat = congruence_lattice(la.algebra);
  CommutatorContext ctx(la.algebra, lat);

  LoopCriterion out;

  // H := intersection of all index-2 normal subloops (Q when there are none)
  int h_idx = lat.top;
  for (int i = 0; i < lat.size(); ++i)
    if (lat.elems[i].num_classes() == 2) h_idx = lat.meet(h_idx, i);
  const Congruence& gamma_h = lat.elems[h_idx];
  out.h_elements = gamma_h.class_members(0);

  // Q/H = Z_2^n, checked structurally: abelian group of exponent <= 2
  QuotientResult quo = quotient_algebra(la.algebra, gamma_h);
  const FiniteAlgebra& qa = quo.algebra;
  int mul = qa.op_index("mul");
  bool z2n = true;
  for (int x = 0; x < qa.size && z2n; ++x) {
    int args_xx[2] = {x, x};
    if (qa.apply(mul, args_xx) != 0) z2n = false;  // exponent 2 (0 is the identity class)
    for (int y = 0; y < qa.size && z2n; ++y) {
      int args_xy[2] = {x, y};
      int args_yx[2] = {y, x};
      if (qa.apply(mul, args_xy) != qa.apply(mul, args_yx)) z2n = false;
      for (int z = 0; z < qa.size && z2n; ++z) {
        int xy = qa.apply(mul, args_xy);
        int args_yz[2] = {y, z};
        int yz = qa.apply(mul, args_yz);
        int args_xy_z[2] = {xy, z};
        int args_x_yz[2] = {x, yz};
        if (qa.apply(mul, args_xy_z) != qa.apply(mul, args_x_yz)) z2n = false;
      }
    }
  }
  out.quotient_is_z2n = z2n;
  int rank = 0;
  for (int m = qa.size; m > 1; m /= 2) {
    if (m % 2 != 0) {
      out.quotient_is_z2n = false;
      break;
    }
    ++rank;
  }
  out.exponent2_rank = rank;

  // every normal subloop N <= H satisfies [N,N]_Q = N
  bool perfect_below_h = true;
  for (int i = 0; i < lat.size(); ++i) {
    if (!lat.leq(i, h_idx)) continue;
    int comm = ctx.commutator(i, i);
    if (comm != i) {
      perfect_below_h = false;
      out.failing = lat.elems[i].class_members(0);
      break;
    }
  }

  out.holds = out.quotient_is_z2n && perfect_below_h;
  return out;
}

}  // namespace malcev
