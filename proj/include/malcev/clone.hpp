#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "malcev/algebra.hpp"
#include "malcev/errors.hpp"

namespace malcev {

// A polynomial function: its full value table plus a term witness that
// re-evaluates to exactly that table.
struct PolyFn {
  int arity = 0;
  std::vector<int> table;
  TermDag witness;

  int operator()(std::span<const int> args, int algebra_size) const {
    std::size_t idx = 0;
    for (int a : args) idx = idx * algebra_size + a;
    return table[idx];
  }
};

struct MalcevWitness {
  PolyFn d;  // ternary, d(x,y,y) = x = d(y,y,x)

  int operator()(int x, int y, int z, int n) const { return d.table[(x * n + y) * n + z]; }
};

inline bool satisfies_malcev_identities(const std::vector<int>& table, int n) {
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      if (table[(x * n + y) * n + y] != x) return false;
      if (table[(y * n + y) * n + x] != x) return false;
    }
  return true;
}

namespace detail {

struct TableHash {
  std::size_t operator()(const std::vector<int>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (int x : v) {
      h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace detail

// The k-ary polynomial clone: all tables reachable from projections and
// constants by applying basic operations, each with a shared-witness term DAG
// and the closure step that produced it.
class PolyClone {
 public:
  struct Origin {
    int op;                     // operation applied
    std::vector<int> parents;   // member indices it was applied to
  };

  int arity = 0;
  int algebra_size = 0;
  bool complete = false;  // false when the member budget stopped the closure

  const std::vector<std::vector<int>>& tables() const { return tables_; }
  int size() const { return static_cast<int>(tables_.size()); }
  const std::vector<int>& table(int member) const { return tables_[member]; }
  const std::optional<Origin>& origin(int member) const { return origins_[member]; }

  std::optional<int> find_table(const std::vector<int>& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Materializes a member as a standalone PolyFn with a compact witness.
  PolyFn member(int i) const {
    PolyFn p;
    p.arity = arity;
    p.table = tables_[i];
    DagBuilder b;
    std::vector<int> translated(roots_[i] + 1, -1);
    for (int node = 0; node <= roots_[i]; ++node) {
      const auto& src = arena_.nodes[node];
      switch (src.kind) {
        case TermDag::Kind::Var: translated[node] = b.var(src.payload); break;
        case TermDag::Kind::Const: translated[node] = b.constant(src.payload); break;
        case TermDag::Kind::Apply: {
          std::vector<int> kids;
          for (int k : src.kids) kids.push_back(translated[k]);
          translated[node] = b.apply(src.payload, std::move(kids));
          break;
        }
      }
    }
    p.witness = std::move(b).take(translated[roots_[i]]);
    return p;
  }

  // Internal builder interface.
  bool insert(std::vector<int> table, int root, std::optional<Origin> origin) {
    auto [it, inserted] = index_.emplace(table, static_cast<int>(tables_.size()));
    if (!inserted) return false;
    tables_.push_back(std::move(table));
    roots_.push_back(root);
    origins_.push_back(std::move(origin));
    return true;
  }

  TermDag& arena() { return arena_; }
  const TermDag& arena() const { return arena_; }
  int root_of(int member) const { return roots_[member]; }

 private:
  std::vector<std::vector<int>> tables_;
  std::vector<int> roots_;  // witness roots into the shared arena
  std::vector<std::optional<Origin>> origins_;
  TermDag arena_;           // hash-consed witness nodes shared by all members
  std::unordered_map<std::vector<int>, int, detail::TableHash> index_;
};

namespace detail {

// Shared closure loop. `on_new(clone, member_index)` is invoked for every
// member as it is added; returning true stops the closure early (used by the
// Mal'cev search). Generation order is canonical: projections, then constants,
// then rounds applying each operation in declaration order to member tuples in
// lexicographic order; tuples range over the members present at round start.
template <typename OnNew>
PolyClone clone_closure(const FiniteAlgebra& a, int arity, long long max_members, OnNew on_new,
                        bool& stopped_early) {
  PolyClone clone;
  clone.arity = arity;
  clone.algebra_size = a.size;
  stopped_early = false;

  std::size_t total = 1;
  for (int i = 0; i < arity; ++i) total *= a.size;

  std::map<TermDag::Node, int> memo;
  auto intern = [&](TermDag::Node node) {
    auto it = memo.find(node);
    if (it != memo.end()) return it->second;
    int id = static_cast<int>(clone.arena().nodes.size());
    clone.arena().nodes.push_back(node);
    memo.emplace(std::move(node), id);
    return id;
  };

  bool budget_hit = false;
  auto add = [&](std::vector<int> table, TermDag::Node witness,
                 std::optional<PolyClone::Origin> origin) -> bool {
    if (clone.find_table(table)) return false;
    if (clone.size() >= max_members) {
      budget_hit = true;
      return false;
    }
    int root = intern(std::move(witness));
    clone.insert(std::move(table), root, std::move(origin));
    if (on_new(clone, clone.size() - 1)) {
      stopped_early = true;
      return true;
    }
    return false;
  };

  // Generators: projections, then constants.
  for (int v = 0; v < arity && !budget_hit; ++v) {
    std::vector<int> table(total);
    std::size_t stride = 1;
    for (int i = v + 1; i < arity; ++i) stride *= a.size;
    for (std::size_t r = 0; r < total; ++r) table[r] = static_cast<int>((r / stride) % a.size);
    if (add(std::move(table), {TermDag::Kind::Var, v, {}}, std::nullopt)) return clone;
  }
  for (int c = 0; c < a.size && !budget_hit; ++c) {
    if (add(std::vector<int>(total, c), {TermDag::Kind::Const, c, {}}, std::nullopt)) return clone;
  }

  // Fixed-point rounds.
  int prev_count = 0;
  while (!budget_hit) {
    const int count = clone.size();
    if (count == prev_count && prev_count != 0) break;
    bool grew = false;
    for (int op = 0; op < static_cast<int>(a.ops.size()) && !budget_hit; ++op) {
      const Operation& f = a.ops[op];
      if (f.arity == 0) {
        if (add(std::vector<int>(total, f.table[0]), {TermDag::Kind::Apply, op, {}},
                PolyClone::Origin{op, {}}))
          return clone;
        continue;
      }
      std::vector<int> tuple(f.arity, 0);
      std::vector<int> scratch(total);
      while (true) {
        // Tuples whose members all predate the previous round were already done.
        bool fresh = false;
        for (int m : tuple)
          if (m >= prev_count) fresh = true;
        if (fresh) {
          for (std::size_t r = 0; r < total; ++r) {
            std::size_t flat = 0;
            for (int j = 0; j < f.arity; ++j) flat = flat * a.size + clone.table(tuple[j])[r];
            scratch[r] = f.table[flat];
          }
          if (!clone.find_table(scratch)) {
            std::vector<int> kid_roots(f.arity);
            for (int j = 0; j < f.arity; ++j) kid_roots[j] = clone.root_of(tuple[j]);
            int before = clone.size();
            if (add(scratch, {TermDag::Kind::Apply, op, kid_roots},
                    PolyClone::Origin{op, std::vector<int>(tuple.begin(), tuple.end())}))
              return clone;
            if (clone.size() > before) grew = true;
            if (budget_hit) break;
          }
        }
        // next tuple in lexicographic order over [0, count)
        int j = f.arity - 1;
        while (j >= 0 && tuple[j] == count - 1) tuple[j--] = 0;
        if (j < 0) break;
        ++tuple[j];
      }
    }
    prev_count = count;
    if (!grew && clone.size() == count) break;
  }
  clone.complete = !budget_hit;
  return clone;
}

}  // namespace detail

// Fixed-point closure of the k-ary polynomial clone. When the member budget is
// hit, the returned clone has complete == false; callers that need a full
// clone must treat that as CloneBudgetExceeded.
inline PolyClone generate_poly_clone(const FiniteAlgebra& a, int arity, long long max_members) {
  check(arity >= 0, errc::precondition_failed, "clone arity must be >= 0");
  check(max_members > 0, errc::precondition_failed, "clone budget must be positive");
  bool stopped = false;
  return detail::clone_closure(
      a, arity, max_members, [](const PolyClone&, int) { return false; }, stopped);
}

inline void require_complete(const PolyClone& clone, const std::string& who) {
  check(clone.complete, errc::clone_incomplete, who + " needs a complete polynomial clone");
}

struct MalcevSearchResult {
  enum class Status { Found, Absent, Unknown };
  Status status = Status::Unknown;
  std::optional<MalcevWitness> witness;

  bool found() const { return status == Status::Found; }
};

// Runs the ternary clone closure, testing each new member for the Mal'cev
// identities; stops at the first witness in canonical generation order.
// Unknown (budget ran out) is reported distinctly from Absent.
inline MalcevSearchResult find_malcev_polynomial(const FiniteAlgebra& a, long long max_members) {
  check(max_members > 0, errc::precondition_failed, "clone budget must be positive");
  bool stopped = false;
  int hit = -1;
  PolyClone clone = detail::clone_closure(
      a, 3, max_members,
      [&](const PolyClone& c, int member) {
        if (satisfies_malcev_identities(c.table(member), a.size)) {
          hit = member;
          return true;
        }
        return false;
      },
      stopped);

  MalcevSearchResult result;
  if (hit >= 0) {
    result.status = MalcevSearchResult::Status::Found;
    result.witness = MalcevWitness{clone.member(hit)};
  } else if (clone.complete) {
    result.status = MalcevSearchResult::Status::Absent;
  } else {
    result.status = MalcevSearchResult::Status::Unknown;
  }
  return result;
}

// Resolves an algebra's Mal'cev witness: a supplied `malcev_term` is validated
// and used instead of searching; otherwise the ternary closure search runs.
inline MalcevSearchResult malcev_witness(const FiniteAlgebra& a, long long max_members) {
  if (a.malcev_term) {
    PolyFn d;
    d.arity = 3;
    d.witness = *a.malcev_term;
    d.table = term_table(a, d.witness, 3);
    check(satisfies_malcev_identities(d.table, a.size), errc::malformed_document,
          "supplied malcev_term fails the Mal'cev identities");
    MalcevSearchResult result;
    result.status = MalcevSearchResult::Status::Found;
    result.witness = MalcevWitness{std::move(d)};
    return result;
  }
  return find_malcev_polynomial(a, max_members);
}

}  // namespace malcev
