#pragma once

#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "malcev/commutator.hpp"
#include "malcev/congruence.hpp"
#include "malcev/errors.hpp"
#include "malcev/lattice.hpp"

namespace malcev {

// --- (SC1) -------------------------------------------------------------------

struct Sc1Failure {
  int mu;          // strictly meet irreducible congruence
  int mu_plus;     // its unique upper cover
  int centralizer; // (mu : mu+), not below mu+
};

struct Sc1Result {
  bool holds = true;
  std::vector<Sc1Failure> failures;
};

// (SC1): every strictly meet irreducible mu satisfies (mu : mu+) <= mu+.
inline Sc1Result check_SC1(const CommutatorContext& ctx) {
  const auto& lat = ctx.lattice();
  Sc1Result out;
  for (int mu = 0; mu < lat.size(); ++mu) {
    if (!lat.smi_upper[mu]) continue;
    int up = *lat.smi_upper[mu];
    int cent = ctx.centralizer(mu, up);
    if (!lat.leq(cent, up)) {
      out.holds = false;
      out.failures.push_back({mu, up, cent});
    }
  }
  return out;
}

// --- (ABp) -------------------------------------------------------------------

struct AbpViolation {
  int alpha, beta;  // abelian prime quotient below gamma
  int point;        // element whose beta-class has a bad alpha-class count
  int count;
};

struct AbpResult {
  bool holds = true;
  std::optional<AbpViolation> violation;
};

// (ABp) for (A, gamma): every abelian prime quotient alpha -< beta in [0,gamma]
// splits each beta-class into exactly 1 or p alpha-classes.
inline AbpResult check_ABp(const CommutatorContext& ctx, int gamma, int p) {
  check(p >= 2, errc::precondition_failed, "p must be at least 2");
  const auto& lat = ctx.lattice();
  AbpResult out;
  for (int beta = 0; beta < lat.size(); ++beta) {
    if (!lat.leq(beta, gamma)) continue;
    for (int alpha : lat.covers_down[beta]) {
      if (!ctx.is_abelian_quotient(alpha, beta)) continue;
      const Congruence& ca = lat.elems[alpha];
      const Congruence& cb = lat.elems[beta];
      for (int a = 0; a < ca.size(); ++a) {
        if (cb.rep[a] != a) continue;  // one point per beta-class
        std::map<int, int> reps;
        for (int x = 0; x < ca.size(); ++x)
          if (cb.rep[x] == a) reps[ca.rep[x]] = 1;
        int count = static_cast<int>(reps.size());
        if (count != 1 && count != p) {
          out.holds = false;
          out.violation = AbpViolation{alpha, beta, a, count};
          return out;
        }
      }
    }
  }
  return out;
}

inline AbpResult check_AB2(const CommutatorContext& ctx) {
  return check_ABp(ctx, ctx.lattice().top, 2);
}

// --- (APMI) ------------------------------------------------------------------

struct ApmiResult {
  bool holds = true;
  std::optional<std::pair<int, int>> offending;  // SMI pair with projective quotients, distinct covers
};

// (APMI): strictly meet irreducible alpha, beta with projective prime
// quotients [alpha,alpha+] and [beta,beta+] share their upper cover.
inline ApmiResult check_APMI(const CommutatorContext& ctx) {
  const auto& lat = ctx.lattice();
  ApmiResult out;
  for (int a = 0; a < lat.size(); ++a) {
    if (!lat.smi_upper[a]) continue;
    for (int b = a + 1; b < lat.size(); ++b) {
      if (!lat.smi_upper[b]) continue;
      if (*lat.smi_upper[a] == *lat.smi_upper[b]) continue;
      if (projective(lat, a, *lat.smi_upper[a], b, *lat.smi_upper[b]).projective) {
        out.holds = false;
        out.offending = {a, b};
        return out;
      }
    }
  }
  return out;
}

// --- congruence regularity ----------------------------------------------------

struct RegularityResult {
  bool regular = true;
  std::optional<std::tuple<int, int, int>> violation;  // (theta, eta, point)
};

// Distinct congruences never share a class at any point.
inline RegularityResult is_congruence_regular(const CongruenceLattice& lat) {
  RegularityResult out;
  for (int i = 0; i < lat.size(); ++i)
    for (int j = i + 1; j < lat.size(); ++j) {
      const Congruence& t = lat.elems[i];
      const Congruence& e = lat.elems[j];
      for (int a = 0; a < t.size(); ++a) {
        bool same = true;
        for (int x = 0; x < t.size() && same; ++x)
          if (t.related(a, x) != e.related(a, x)) same = false;
        if (same) {
          out.regular = false;
          out.violation = {i, j, a};
          return out;
        }
      }
    }
  return out;
}

// --- homogeneous congruences ---------------------------------------------------

struct HomogeneousReport {
  int mu;
  int phi;       // Phi(mu) = mu ^ meet of lower covers of mu
  int mu_star;   // join of all alpha with alpha ^ mu = 0
  bool abelian;  // [mu,mu] = 0
  int interval_height;
  bool interval_simple_complemented_modular;
};

inline int phi_of(const CongruenceLattice& lat, int mu) {
  int acc = mu;
  for (int low : lat.covers_down[mu]) acc = lat.meet(acc, low);
  return acc;
}

inline int mu_star_of(const CongruenceLattice& lat, int mu) {
  int acc = lat.bottom;
  for (int a = 0; a < lat.size(); ++a)
    if (lat.meet(a, mu) == lat.bottom) acc = lat.join(acc, a);
  return acc;
}

// Connected components of the transposition graph on prime quotients; two
// prime quotients are projective iff they share a component.
struct PrimeQuotients {
  std::vector<std::pair<int, int>> quotients;  // cover pairs, lexicographic
  std::vector<int> component;
};

inline PrimeQuotients prime_projectivity(const CongruenceLattice& lat) {
  PrimeQuotients pq;
  for (int lo = 0; lo < lat.size(); ++lo)
    for (int hi : lat.covers_up[lo]) pq.quotients.emplace_back(lo, hi);
  std::sort(pq.quotients.begin(), pq.quotients.end());
  const int m = static_cast<int>(pq.quotients.size());
  UnionFind uf(m);
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      auto [a, b] = pq.quotients[i];
      auto [c, d] = pq.quotients[j];
      if (transposes(lat, a, b, c, d) != Transpose::No ||
          transposes(lat, c, d, a, b) != Transpose::No)
        uf.unite(i, j);
    }
  pq.component.resize(m);
  for (int i = 0; i < m; ++i) pq.component[i] = uf.find(i);
  return pq;
}

// mu > 0 is homogeneous when all prime quotients below mu are mutually
// projective and none is projective to a prime quotient above mu.
inline bool is_homogeneous(const CongruenceLattice& lat, int mu, const PrimeQuotients& pq) {
  if (mu == lat.bottom) return false;
  std::set<int> below, above;
  for (std::size_t i = 0; i < pq.quotients.size(); ++i) {
    auto [a, b] = pq.quotients[i];
    if (lat.leq(b, mu)) below.insert(pq.component[i]);
    if (lat.leq(mu, a)) above.insert(pq.component[i]);
  }
  if (below.size() != 1) return false;
  return !above.count(*below.begin());
}

inline bool is_homogeneous(const CongruenceLattice& lat, int mu) {
  return is_homogeneous(lat, mu, prime_projectivity(lat));
}

inline std::vector<HomogeneousReport> find_homogeneous(const CommutatorContext& ctx) {
  const auto& lat = ctx.lattice();
  PrimeQuotients pq = prime_projectivity(lat);
  std::vector<HomogeneousReport> out;
  for (int mu = 0; mu < lat.size(); ++mu) {
    if (!is_homogeneous(lat, mu, pq)) continue;
    HomogeneousReport r;
    r.mu = mu;
    r.phi = phi_of(lat, mu);
    r.mu_star = mu_star_of(lat, mu);
    r.abelian = ctx.commutator(mu, mu) == lat.bottom;
    r.interval_height = lat.interval_height(lat.bottom, mu);
    r.interval_simple_complemented_modular =
        interval_simple_complemented_modular(lat, lat.bottom, mu);
    out.push_back(r);
  }
  return out;
}

// --- failures of (SC1) ----------------------------------------------------------

// All pairs (alpha,beta) of join irreducibles with
// [alpha,beta] <= alpha^- -< alpha <= beta^- -< beta.
inline std::vector<std::pair<int, int>> sc1_failure_pairs(const CommutatorContext& ctx) {
  const auto& lat = ctx.lattice();
  std::vector<std::pair<int, int>> out;
  for (int alpha = 0; alpha < lat.size(); ++alpha) {
    if (!lat.ji_lower[alpha]) continue;
    for (int beta = 0; beta < lat.size(); ++beta) {
      if (!lat.ji_lower[beta]) continue;
      if (!lat.leq(alpha, *lat.ji_lower[beta])) continue;
      if (!lat.leq(ctx.commutator(alpha, beta), *lat.ji_lower[alpha])) continue;
      out.emplace_back(alpha, beta);
    }
  }
  return out;
}

// --- minimal sets ----------------------------------------------------------------

struct MinimalSetReport {
  std::vector<std::vector<int>> sets;  // inclusion-minimal images, each sorted
  std::vector<PolyFn> witnesses;       // one unary polynomial per set with that image
};

// (0,mu)-minimal sets: inclusion-minimal images f(A) of unary polynomials f
// that do not collapse mu into equality.
inline MinimalSetReport minimal_sets(const FiniteAlgebra& a, const PolyClone& clone1,
                                     const Congruence& mu) {
  require_complete(clone1, "minimal_sets");
  check(clone1.arity == 1, errc::precondition_failed, "minimal_sets needs the unary clone");
  check(mu != Congruence::identity(a.size), errc::precondition_failed, "mu must be positive");

  std::map<std::vector<int>, int> image_witness;  // image -> first clone member
  for (int m = 0; m < clone1.size(); ++m) {
    const auto& table = clone1.table(m);
    bool separates = false;
    for (int x = 0; x < a.size && !separates; ++x)
      if (table[x] != table[mu.rep[x]]) separates = true;
    if (!separates) continue;
    std::set<int> img(table.begin(), table.end());
    image_witness.emplace(std::vector<int>(img.begin(), img.end()), m);
  }

  MinimalSetReport out;
  for (const auto& [image, member] : image_witness) {
    bool minimal = true;
    for (const auto& [other, om] : image_witness) {
      if (other == image) continue;
      if (std::includes(image.begin(), image.end(), other.begin(), other.end())) {
        minimal = false;
        break;
      }
    }
    if (minimal) {
      out.sets.push_back(image);
      out.witnesses.push_back(clone1.member(member));
    }
  }
  return out;
}

// An idempotent unary polynomial with image exactly v/mu, or nothing.
inline std::optional<PolyFn> class_idempotent(const FiniteAlgebra& a, const PolyClone& clone1,
                                              const Congruence& mu, int v) {
  require_complete(clone1, "class_idempotent");
  check(clone1.arity == 1, errc::precondition_failed, "class_idempotent needs the unary clone");
  std::vector<int> target = mu.class_members(v);
  for (int m = 0; m < clone1.size(); ++m) {
    const auto& e = clone1.table(m);
    bool idem = true;
    for (int x = 0; x < a.size && idem; ++x)
      if (e[e[x]] != e[x]) idem = false;
    if (!idem) continue;
    std::set<int> img(e.begin(), e.end());
    if (std::vector<int>(img.begin(), img.end()) == target) return clone1.member(m);
  }
  return std::nullopt;
}

// --- GF(p) coordinatization -------------------------------------------------------

struct Coordinatization {
  int base = 0;
  int mu = -1;       // lattice index
  int prime = 0;
  int height = 0;
  std::vector<int> carrier;                 // o/mu ascending
  std::vector<std::vector<int>> coords;     // carrier index -> GF(p)^height vector
  std::map<std::vector<int>, int> element;  // coordinates -> universe element
  std::vector<int> basis;                   // universe elements

  const std::vector<int>& encode(int x) const {
    auto it = std::lower_bound(carrier.begin(), carrier.end(), x);
    check(it != carrier.end() && *it == x, errc::entry_out_of_range, "element not in class");
    return coords[it - carrier.begin()];
  }

  int decode(const std::vector<int>& v) const {
    auto it = element.find(v);
    check(it != element.end(), errc::entry_out_of_range, "coordinate vector out of range");
    return it->second;
  }
};

inline bool is_prime_number(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q)
    if (p % q == 0) return false;
  return true;
}

// Coordinatizes o/mu as GF(p)^h: verifies the class group is elementary
// abelian of exponent p, picks a basis greedily in ascending element order,
// and checks that every scalar-ring member acts as one scalar.
inline Coordinatization coordinatize_class(const CommutatorContext& ctx, const MalcevWitness& d,
                                           const PolyClone& clone1, int mu, int o, int p) {
  const auto& lat = ctx.lattice();
  const auto& a = ctx.algebra();
  check(is_prime_number(p), errc::precondition_failed, "p must be prime");
  check(ctx.commutator(mu, mu) == lat.bottom, errc::precondition_failed, "[mu,mu] != 0");
  check(interval_simple_complemented_modular(lat, lat.bottom, mu), errc::precondition_failed,
        "[0,mu] is not a simple complemented modular lattice");
  check(check_ABp(ctx, mu, p).holds, errc::precondition_failed, "(A,mu) fails (ABp)");

  const Congruence& cmu = lat.elems[mu];
  check(static_cast<int>(cmu.class_members(o).size()) > 1, errc::precondition_failed,
        "|o/mu| must exceed 1");

  ClassGroup g = class_group(a, d, cmu, o);
  const int c = static_cast<int>(g.carrier.size());
  const int oi = g.index_of(o);

  // exponent p: p.x = o for every x
  for (int i = 0; i < c; ++i) {
    int acc = oi;
    for (int k = 0; k < p; ++k) acc = g.plus(acc, i);
    check(acc == oi, errc::not_elementary_abelian, "class group exponent is not p");
  }
  int h = 0, power = 1;
  while (power < c) {
    power *= p;
    ++h;
  }
  check(power == c, errc::not_elementary_abelian, "class size is not a power of p");

  Coordinatization coord;
  coord.base = o;
  coord.mu = mu;
  coord.prime = p;
  coord.height = h;
  coord.carrier = g.carrier;
  coord.coords.assign(c, {});

  // greedy span construction, ascending carrier order
  std::map<int, std::vector<int>> span;  // carrier index -> coords over current basis
  span[oi] = {};
  for (int i = 0; i < c; ++i) {
    if (span.count(i)) continue;
    coord.basis.push_back(g.carrier[i]);
    std::map<int, std::vector<int>> extended = span;
    for (auto& [s, vec] : span) {
      int acc = s;
      for (int k = 1; k < p; ++k) {
        acc = g.plus(acc, i);
        std::vector<int> v = vec;
        v.push_back(k);
        extended.emplace(acc, std::move(v));
      }
    }
    for (auto& [s, vec] : extended)
      if (vec.size() < coord.basis.size()) vec.push_back(0);
    span = std::move(extended);
  }
  check(static_cast<int>(span.size()) == c && static_cast<int>(coord.basis.size()) == h,
        errc::internal_error, "basis construction did not span the class");
  for (auto& [i, vec] : span) {
    coord.coords[i] = vec;
    coord.element[vec] = g.carrier[i];
  }

  // encode is a group homomorphism
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j) {
      std::vector<int> sum(h);
      for (int k = 0; k < h; ++k) sum[k] = (coord.coords[i][k] + coord.coords[j][k]) % p;
      check(coord.coords[g.plus(i, j)] == sum, errc::internal_error,
            "encode is not additive");
    }

  // every scalar-ring member is multiplication by one scalar
  ScalarRing ring = scalar_ring(a, clone1, d, cmu, o);
  for (int m = 0; m < ring.size(); ++m) {
    std::optional<int> lambda;
    for (int i = 0; i < c; ++i) {
      const auto& xi = coord.coords[i];
      const auto& ri = coord.coords[g.index_of(ring.members[m][i])];
      // determine/verify ri = lambda * xi
      for (int k = 0; k < h; ++k) {
        if (xi[k] == 0) {
          check(ri[k] == 0, errc::scalar_action_failed, "scalar action fails");
          continue;
        }
        // solve lambda from xi[k] * lambda = ri[k] mod p
        int found = -1;
        for (int l = 0; l < p; ++l)
          if ((xi[k] * l) % p == ri[k]) found = l;
        check(found >= 0, errc::scalar_action_failed, "scalar action fails");
        if (!lambda)
          lambda = found;
        else
          check(*lambda == found, errc::scalar_action_failed,
                "ring member does not act as a single scalar");
      }
    }
  }
  return coord;
}

}  // namespace malcev
