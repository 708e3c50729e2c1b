#pragma once

#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/errors.hpp"

namespace malcev {

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  // Returns true when two classes were actually merged.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// A partition of {0..n-1} in least-representative form: rep[i] is the smallest
// element of i's class. Congruences compare, hash and sort by this array.
struct Congruence {
  std::vector<int> rep;

  Congruence() = default;
  explicit Congruence(std::vector<int> r) : rep(std::move(r)) {}

  static Congruence identity(int n) {
    std::vector<int> r(n);
    std::iota(r.begin(), r.end(), 0);
    return Congruence(std::move(r));
  }

  static Congruence full(int n) { return Congruence(std::vector<int>(n, 0)); }

  static Congruence from_union_find(UnionFind& uf) {
    int n = static_cast<int>(uf.parent.size());
    std::vector<int> least(n, -1);
    std::vector<int> r(n);
    for (int i = 0; i < n; ++i) {
      int root = uf.find(i);
      if (least[root] < 0) least[root] = i;  // ascending scan: first hit is the minimum
      r[i] = least[root];
    }
    return Congruence(std::move(r));
  }

  int size() const { return static_cast<int>(rep.size()); }
  bool related(int a, int b) const { return rep[a] == rep[b]; }

  int num_classes() const {
    int count = 0;
    for (int i = 0; i < size(); ++i)
      if (rep[i] == i) ++count;
    return count;
  }

  std::vector<int> class_members(int a) const {
    std::vector<int> out;
    for (int i = 0; i < size(); ++i)
      if (rep[i] == rep[a]) out.push_back(i);
    return out;
  }

  // Sorted class lists, e.g. [[0,2],[1,3]]; the report rendering.
  std::vector<std::vector<int>> classes() const {
    std::map<int, std::vector<int>> by_rep;
    for (int i = 0; i < size(); ++i) by_rep[rep[i]].push_back(i);
    std::vector<std::vector<int>> out;
    for (auto& [r, members] : by_rep) out.push_back(std::move(members));
    return out;
  }

  friend bool operator==(const Congruence&, const Congruence&) = default;
  friend auto operator<=>(const Congruence&, const Congruence&) = default;
};

inline bool is_valid_partition(const Congruence& c) {
  for (int i = 0; i < c.size(); ++i) {
    if (c.rep[i] < 0 || c.rep[i] > i) return false;
    if (c.rep[c.rep[i]] != c.rep[i]) return false;
  }
  return true;
}

// Partition refinement order: a <= b iff every a-class lies inside a b-class.
inline bool leq(const Congruence& a, const Congruence& b) {
  for (int i = 0; i < a.size(); ++i)
    if (b.rep[i] != b.rep[a.rep[i]]) return false;
  return true;
}

// Partition intersection; congruences are closed under it.
inline Congruence meet(const Congruence& a, const Congruence& b) {
  int n = a.size();
  std::map<std::pair<int, int>, int> first;
  std::vector<int> rep(n);
  for (int i = 0; i < n; ++i) {
    auto key = std::make_pair(a.rep[i], b.rep[i]);
    auto [it, inserted] = first.emplace(key, i);
    rep[i] = it->second;
  }
  return Congruence(std::move(rep));
}

// Compatibility with every basic operation: the class of f(x) must depend only
// on the classes of x.
inline bool is_compatible(const FiniteAlgebra& a, const Congruence& c) {
  std::vector<int> args;
  for (const auto& op : a.ops) {
    if (op.arity == 0) continue;
    std::size_t total = op.table.size();
    std::map<std::vector<int>, int> seen;
    args.assign(op.arity, 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::vector<int> key(op.arity);
      std::size_t r = idx;
      for (int j = op.arity - 1; j >= 0; --j) {
        key[j] = c.rep[r % a.size];
        r /= a.size;
      }
      int value = c.rep[op.table[idx]];
      auto [it, inserted] = seen.emplace(std::move(key), value);
      if (!inserted && it->second != value) return false;
    }
  }
  return true;
}

inline bool is_congruence(const FiniteAlgebra& a, const Congruence& c) {
  return static_cast<int>(c.rep.size()) == a.size && is_valid_partition(c) && is_compatible(a, c);
}

// Least congruence containing all seed pairs: union-find plus worklist
// closure. For each newly merged pair (u,v), every operation, every argument
// position and every assignment of the remaining positions, merge the two
// results obtained by putting u resp. v into that position.
inline Congruence congruence_closure(const FiniteAlgebra& a,
                                     std::span<const std::pair<int, int>> seeds) {
  const int n = a.size;
  UnionFind uf(n);
  std::vector<std::pair<int, int>> work;
  auto merge = [&](int x, int y) {
    int rx = uf.find(x), ry = uf.find(y);
    if (rx != ry) {
      uf.unite(rx, ry);
      work.emplace_back(x, y);
    }
  };
  for (auto [x, y] : seeds) merge(x, y);

  std::vector<int> args;
  while (!work.empty()) {
    auto [u, v] = work.back();
    work.pop_back();
    for (const auto& op : a.ops) {
      if (op.arity == 0) continue;
      const int k = op.arity;
      std::size_t others = 1;
      for (int i = 0; i < k - 1; ++i) others *= n;
      for (int pos = 0; pos < k; ++pos) {
        for (std::size_t rest = 0; rest < others; ++rest) {
          args.assign(k, 0);
          std::size_t r = rest;
          for (int j = k - 1; j >= 0; --j) {
            if (j == pos) continue;
            args[j] = static_cast<int>(r % n);
            r /= n;
          }
          args[pos] = u;
          std::size_t iu = 0;
          for (int x : args) iu = iu * n + x;
          args[pos] = v;
          std::size_t iv = 0;
          for (int x : args) iv = iv * n + x;
          merge(op.table[iu], op.table[iv]);
        }
      }
    }
  }
  return Congruence::from_union_find(uf);
}

// Cg{(a,b)}: the smallest congruence identifying a and b.
inline Congruence principal_congruence(const FiniteAlgebra& alg, int a, int b) {
  check(a >= 0 && a < alg.size && b >= 0 && b < alg.size, errc::entry_out_of_range,
        "principal congruence generators out of range");
  std::pair<int, int> seed[1] = {{a, b}};
  return congruence_closure(alg, seed);
}

// Join of two congruences: merge both partitions, then close under the
// operations again.
inline Congruence join(const FiniteAlgebra& alg, const Congruence& a, const Congruence& b) {
  std::vector<std::pair<int, int>> seeds;
  seeds.reserve(2 * alg.size);
  for (int i = 0; i < alg.size; ++i) {
    seeds.emplace_back(i, a.rep[i]);
    seeds.emplace_back(i, b.rep[i]);
  }
  return congruence_closure(alg, seeds);
}

struct QuotientResult {
  FiniteAlgebra algebra;      // universe = theta-classes indexed by least representative order
  std::vector<int> class_of;  // element -> class index
  std::vector<int> rep_of;    // class index -> least representative
};

// A/theta with operations induced classwise.
inline QuotientResult quotient_algebra(const FiniteAlgebra& a, const Congruence& theta) {
  check(static_cast<int>(theta.rep.size()) == a.size && is_valid_partition(theta),
        errc::not_a_congruence, "partition is malformed");
  check(is_compatible(a, theta), errc::not_a_congruence,
        "partition fails the compatibility check");

  QuotientResult q;
  q.class_of.resize(a.size);
  for (int i = 0; i < a.size; ++i)
    if (theta.rep[i] == i) {
      q.class_of[i] = static_cast<int>(q.rep_of.size());
      q.rep_of.push_back(i);
    }
  for (int i = 0; i < a.size; ++i) q.class_of[i] = q.class_of[theta.rep[i]];

  const int m = static_cast<int>(q.rep_of.size());
  q.algebra.name = a.name + "/" + std::to_string(m) + "cls";
  q.algebra.size = m;
  std::vector<int> args;
  for (const auto& op : a.ops) {
    Operation induced;
    induced.name = op.name;
    induced.arity = op.arity;
    std::size_t total = 1;
    for (int i = 0; i < op.arity; ++i) total *= m;
    induced.table.resize(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
      args.assign(op.arity, 0);
      std::size_t r = idx;
      for (int j = op.arity - 1; j >= 0; --j) {
        args[j] = q.rep_of[r % m];
        r /= m;
      }
      std::size_t flat = 0;
      for (int x : args) flat = flat * a.size + x;
      induced.table[idx] = q.class_of[op.table[flat]];
    }
    q.algebra.ops.push_back(std::move(induced));
  }
  if (a.malcev_term) {
    // Constants transport to their classes; operation indices are unchanged.
    TermDag t = *a.malcev_term;
    for (auto& node : t.nodes)
      if (node.kind == TermDag::Kind::Const) node.payload = q.class_of[node.payload];
    q.algebra.malcev_term = std::move(t);
  }
  return q;
}

// Lazily computed table of all principal congruences of an algebra.
class PrincipalCache {
 public:
  explicit PrincipalCache(const FiniteAlgebra& a) : alg_(&a), cache_(a.size * a.size) {}

  const Congruence& cg(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto& slot = cache_[a * alg_->size + b];
    if (!slot) slot = principal_congruence(*alg_, a, b);
    return *slot;
  }

  const FiniteAlgebra& algebra() const { return *alg_; }

 private:
  const FiniteAlgebra* alg_;
  mutable std::vector<std::optional<Congruence>> cache_;
};

}  // namespace malcev
