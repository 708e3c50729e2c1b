#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "malcev/clone.hpp"
#include "malcev/congruence.hpp"
#include "malcev/errors.hpp"

namespace malcev {

// Con A: every congruence, in canonical order (class count descending, then
// least-representative array ascending), with order, cover, meet/join and
// irreducibility data.
struct CongruenceLattice {
  std::vector<Congruence> elems;
  int bottom = -1;
  int top = -1;
  std::vector<std::vector<bool>> le;       // le[i][j]: elems[i] <= elems[j]
  std::vector<std::vector<int>> covers_up;    // upper covers per element
  std::vector<std::vector<int>> covers_down;  // lower covers per element
  std::vector<std::vector<int>> meet_tab;
  std::vector<std::vector<int>> join_tab;
  std::vector<std::optional<int>> ji_lower;   // beta^- when join irreducible
  std::vector<std::optional<int>> smi_upper;  // mu^+ when strictly meet irreducible

  int size() const { return static_cast<int>(elems.size()); }

  int index_of(const Congruence& c) const {
    for (int i = 0; i < size(); ++i)
      if (elems[i] == c) return i;
    fail(errc::not_in_lattice, "congruence is not in the computed lattice");
  }

  std::optional<int> try_index_of(const Congruence& c) const {
    for (int i = 0; i < size(); ++i)
      if (elems[i] == c) return i;
    return std::nullopt;
  }

  int meet(int i, int j) const { return meet_tab[i][j]; }
  int join(int i, int j) const { return join_tab[i][j]; }
  bool leq(int i, int j) const { return le[i][j]; }
  bool covers(int lo, int hi) const {
    return std::find(covers_up[lo].begin(), covers_up[lo].end(), hi) != covers_up[lo].end();
  }

  std::vector<int> atoms() const { return covers_up[bottom]; }

  // Longest cover chain from lo to hi; -1 if lo is not below hi.
  int interval_height(int lo, int hi) const {
    if (!le[lo][hi]) return -1;
    std::vector<int> depth(size(), -1);
    depth[lo] = 0;
    // canonical order is a linear extension (class count is monotone)
    for (int i = 0; i < size(); ++i) {
      if (depth[i] < 0 || !le[lo][i] || !le[i][hi]) continue;
      for (int up : covers_up[i])
        if (le[up][hi]) depth[up] = std::max(depth[up], depth[i] + 1);
    }
    return depth[hi];
  }

  int height() const { return interval_height(bottom, top); }
};

// All congruences: principal congruences closed under binary join, plus the
// identity. A worker count above 1 parallelizes the principal computations;
// the resulting lattice is identical regardless of schedule.
inline CongruenceLattice congruence_lattice(const FiniteAlgebra& a, int threads = 1) {
  const int n = a.size;
  std::vector<std::pair<int, int>> gen_pairs;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y) gen_pairs.emplace_back(x, y);

  std::vector<Congruence> principal(gen_pairs.size());
  if (threads > 1 && gen_pairs.size() > 1) {
    std::vector<std::thread> pool;
    std::size_t chunk = (gen_pairs.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::size_t lo = t * chunk, hi = std::min(gen_pairs.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i)
          principal[i] = principal_congruence(a, gen_pairs[i].first, gen_pairs[i].second);
      });
    }
    for (auto& th : pool) th.join();
  } else {
    for (std::size_t i = 0; i < gen_pairs.size(); ++i)
      principal[i] = principal_congruence(a, gen_pairs[i].first, gen_pairs[i].second);
  }

  std::set<Congruence> found;
  found.insert(Congruence::identity(n));
  for (auto& c : principal) found.insert(std::move(c));

  // close under binary join
  while (true) {
    std::vector<Congruence> snapshot(found.begin(), found.end());
    bool grew = false;
    for (std::size_t i = 0; i < snapshot.size(); ++i)
      for (std::size_t j = i + 1; j < snapshot.size(); ++j) {
        Congruence c = join(a, snapshot[i], snapshot[j]);
        if (found.insert(std::move(c)).second) grew = true;
      }
    if (!grew) break;
  }

  CongruenceLattice lat;
  lat.elems.assign(found.begin(), found.end());
  std::sort(lat.elems.begin(), lat.elems.end(), [](const Congruence& x, const Congruence& y) {
    int cx = x.num_classes(), cy = y.num_classes();
    if (cx != cy) return cx > cy;
    return x.rep < y.rep;
  });

  const int m = lat.size();
  lat.le.assign(m, std::vector<bool>(m, false));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) lat.le[i][j] = leq(lat.elems[i], lat.elems[j]);
  lat.bottom = lat.index_of(Congruence::identity(n));
  lat.top = lat.index_of(Congruence::full(n));

  lat.covers_up.assign(m, {});
  lat.covers_down.assign(m, {});
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j || !lat.le[i][j]) continue;
      bool gap = true;
      for (int k = 0; k < m && gap; ++k)
        if (k != i && k != j && lat.le[i][k] && lat.le[k][j]) gap = false;
      if (gap) {
        lat.covers_up[i].push_back(j);
        lat.covers_down[j].push_back(i);
      }
    }

  std::map<Congruence, int> index;
  for (int i = 0; i < m; ++i) index[lat.elems[i]] = i;
  lat.meet_tab.assign(m, std::vector<int>(m, -1));
  lat.join_tab.assign(m, std::vector<int>(m, -1));
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      auto mit = index.find(meet(lat.elems[i], lat.elems[j]));
      auto jit = index.find(join(a, lat.elems[i], lat.elems[j]));
      check(mit != index.end() && jit != index.end(), errc::internal_error,
            "lattice is not closed under meet/join");
      lat.meet_tab[i][j] = lat.meet_tab[j][i] = mit->second;
      lat.join_tab[i][j] = lat.join_tab[j][i] = jit->second;
    }

  lat.ji_lower.assign(m, std::nullopt);
  lat.smi_upper.assign(m, std::nullopt);
  for (int i = 0; i < m; ++i) {
    if (lat.covers_down[i].size() == 1) lat.ji_lower[i] = lat.covers_down[i][0];
    if (lat.covers_up[i].size() == 1) lat.smi_upper[i] = lat.covers_up[i][0];
  }
  return lat;
}

// --- interval arithmetic and lattice predicates -----------------------------

inline void check_interval(const CongruenceLattice& lat, int lo, int hi) {
  check(lo >= 0 && lo < lat.size() && hi >= 0 && hi < lat.size() && lat.leq(lo, hi),
        errc::interval_invalid, "not an interval of the lattice");
}

// Dedekind's modular law on the whole lattice (the forbidden-pentagon test in
// identity form): x <= z implies x v (y ^ z) = (x v y) ^ z.
inline bool lattice_modular(const CongruenceLattice& lat) {
  const int m = lat.size();
  for (int x = 0; x < m; ++x)
    for (int z = 0; z < m; ++z) {
      if (!lat.leq(x, z)) continue;
      for (int y = 0; y < m; ++y)
        if (lat.join(x, lat.meet(y, z)) != lat.meet(lat.join(x, y), z)) return false;
    }
  return true;
}

inline std::vector<int> interval_elements(const CongruenceLattice& lat, int lo, int hi) {
  std::vector<int> out;
  for (int i = 0; i < lat.size(); ++i)
    if (lat.leq(lo, i) && lat.leq(i, hi)) out.push_back(i);
  return out;
}

inline bool interval_modular(const CongruenceLattice& lat, int lo, int hi) {
  auto elems = interval_elements(lat, lo, hi);
  for (int x : elems)
    for (int z : elems) {
      if (!lat.leq(x, z)) continue;
      for (int y : elems)
        if (lat.join(x, lat.meet(y, z)) != lat.meet(lat.join(x, y), z)) return false;
    }
  return true;
}

inline bool interval_complemented(const CongruenceLattice& lat, int lo, int hi) {
  auto elems = interval_elements(lat, lo, hi);
  for (int x : elems) {
    bool has = false;
    for (int y : elems)
      if (lat.meet(x, y) == lo && lat.join(x, y) == hi) {
        has = true;
        break;
      }
    if (!has) return false;
  }
  return true;
}

// Simplicity of the interval [lo,hi] as a lattice in its own right, decided by
// counting the congruences of the interval viewed as an algebra with meet and
// join as basic operations.
inline bool interval_simple(const CongruenceLattice& lat, int lo, int hi) {
  auto elems = interval_elements(lat, lo, hi);
  const int m = static_cast<int>(elems.size());
  if (m < 2) return false;
  std::vector<int> pos(lat.size(), -1);
  for (int i = 0; i < m; ++i) pos[elems[i]] = i;
  FiniteAlgebra interval;
  interval.name = "interval";
  interval.size = m;
  Operation meet_op{"meet", 2, std::vector<int>(m * m)};
  Operation join_op{"join", 2, std::vector<int>(m * m)};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      meet_op.table[i * m + j] = pos[lat.meet(elems[i], elems[j])];
      join_op.table[i * m + j] = pos[lat.join(elems[i], elems[j])];
    }
  interval.ops = {std::move(meet_op), std::move(join_op)};
  CongruenceLattice con = congruence_lattice(interval);
  return con.size() == 2;
}

inline bool interval_simple_complemented_modular(const CongruenceLattice& lat, int lo, int hi) {
  return interval_modular(lat, lo, hi) && interval_complemented(lat, lo, hi) &&
         interval_simple(lat, lo, hi);
}

// --- transpositions and projectivity ----------------------------------------

enum class Transpose { Up, Down, No };

// [a,b] transposes up to [c,d] iff b v c = d and b ^ c = a;
// down iff b = a v d and c = a ^ d.
inline Transpose transposes(const CongruenceLattice& lat, int a, int b, int c, int d) {
  check_interval(lat, a, b);
  check_interval(lat, c, d);
  if (lat.join(b, c) == d && lat.meet(b, c) == a) return Transpose::Up;
  if (lat.join(a, d) == b && lat.meet(a, d) == c) return Transpose::Down;
  return Transpose::No;
}

struct ProjectivityChain {
  bool projective = false;
  std::vector<std::pair<int, int>> chain;  // intervals from source to target
};

// Breadth-first search over the transposition relation. When both endpoints
// are prime quotients the search stays on prime quotients; otherwise it ranges
// over all intervals.
inline ProjectivityChain projective(const CongruenceLattice& lat, int a, int b, int c, int d) {
  check_interval(lat, a, b);
  check_interval(lat, c, d);
  const int m = lat.size();

  std::vector<std::pair<int, int>> nodes;
  bool prime_mode = lat.covers(a, b) && lat.covers(c, d);
  for (int lo = 0; lo < m; ++lo)
    for (int hi = 0; hi < m; ++hi) {
      if (!lat.leq(lo, hi)) continue;
      if (prime_mode && !lat.covers(lo, hi)) continue;
      nodes.emplace_back(lo, hi);
    }
  auto node_id = [&](int lo, int hi) {
    return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), std::make_pair(lo, hi)) -
                            nodes.begin());
  };

  int src = node_id(a, b), dst = node_id(c, d);
  std::vector<int> prev(nodes.size(), -2);
  std::vector<int> queue{src};
  prev[src] = -1;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    int cur = queue[q];
    if (cur == dst) break;
    auto [lo, hi] = nodes[cur];
    for (std::size_t next = 0; next < nodes.size(); ++next) {
      if (prev[next] != -2) continue;
      auto [nlo, nhi] = nodes[next];
      if (transposes(lat, lo, hi, nlo, nhi) == Transpose::No) continue;
      prev[next] = cur;
      queue.push_back(static_cast<int>(next));
    }
  }

  ProjectivityChain out;
  if (prev[dst] == -2) return out;
  out.projective = true;
  for (int cur = dst; cur != -1; cur = prev[cur]) out.chain.push_back(nodes[cur]);
  std::reverse(out.chain.begin(), out.chain.end());
  return out;
}

// h_o of the transposed-up pair [alpha,beta] -> [gamma,delta]: maps each
// delta/gamma-class inside o/gamma to the beta/alpha-class of any b with
// x alpha d(b,o,c). Keys and values are least class representatives.
struct TransposeBijection {
  std::vector<std::pair<int, int>> pairs;  // (gamma-class rep, alpha-class rep)
};

inline TransposeBijection transpose_bijection(const FiniteAlgebra& alg, const MalcevWitness& d,
                                              const Congruence& alpha, const Congruence& beta,
                                              const Congruence& gamma, const Congruence& delta,
                                              int o) {
  check(leq(alpha, beta) && leq(gamma, delta), errc::interval_invalid,
        "transpose_bijection needs alpha <= beta and gamma <= delta");
  // transposed-up check, computed directly on the partitions
  Congruence joined = join(alg, beta, gamma);
  Congruence met = meet(beta, gamma);
  check(joined == delta && met == alpha, errc::not_transposed,
        "[alpha,beta] does not transpose up to [gamma,delta]");

  const int n = alg.size;
  std::map<int, int> image;  // gamma-class rep -> alpha-class rep
  for (int x = 0; x < n; ++x) {
    if (!delta.related(x, o)) continue;
    std::optional<int> target;
    for (int b = 0; b < n; ++b) {
      if (!beta.related(b, o)) continue;
      for (int c = 0; c < n; ++c) {
        if (!gamma.related(c, o)) continue;
        if (!alpha.related(x, d(b, o, c, n))) continue;
        if (target && *target != alpha.rep[b])
          fail(errc::witness_inconsistent, "h_o is not functional");
        target = alpha.rep[b];
      }
    }
    check(target.has_value(), errc::witness_inconsistent,
          "no d(b,o,c) decomposition found for an element of o/delta");
    auto [it, inserted] = image.emplace(gamma.rep[x], *target);
    if (!inserted && it->second != *target)
      fail(errc::witness_inconsistent, "h_o is not well defined on gamma-classes");
  }

  // bijectivity onto the alpha-classes inside o/beta
  std::set<int> values, expected;
  for (auto [k, v] : image) {
    if (!values.insert(v).second) fail(errc::witness_inconsistent, "h_o is not injective");
  }
  for (int b = 0; b < n; ++b)
    if (beta.related(b, o)) expected.insert(alpha.rep[b]);
  check(values == expected, errc::witness_inconsistent, "h_o is not surjective");

  TransposeBijection out;
  out.pairs.assign(image.begin(), image.end());
  return out;
}

// --- DOT export --------------------------------------------------------------

struct DotFlags {
  std::vector<bool> abelian_atom;  // per element; may be empty
};

inline std::string lattice_dot(const CongruenceLattice& lat, const DotFlags& flags = {}) {
  std::string out = "digraph con {\n  rankdir=BT;\n";
  for (int i = 0; i < lat.size(); ++i) {
    std::string label = "#" + std::to_string(i) + " c" + std::to_string(lat.elems[i].num_classes());
    if (lat.ji_lower[i]) label += " JI";
    if (lat.smi_upper[i]) label += " SMI";
    if (!flags.abelian_atom.empty() && flags.abelian_atom[i]) label += " abelian-atom";
    out += "  n" + std::to_string(i) + " [label=\"" + label + "\"];\n";
  }
  for (int i = 0; i < lat.size(); ++i)
    for (int j : lat.covers_up[i])
      out += "  n" + std::to_string(i) + " -> n" + std::to_string(j) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace malcev
