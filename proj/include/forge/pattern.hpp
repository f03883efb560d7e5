#pragma once
// Pattern realization: findig exponent windows in which the second-digit rows
// of consecutive ell-powers spell out a prescribed word.
//
// The analytic machinery lives in the multiplicative circle [1, k): mu(x) is
// x scaled into [1, k) by the nearest k-power below, nu(x) the k-power whose
// half-open mult-neighborhood [k^{m-1/2}, k^{m+1/2}) contains x (decided by
// exact squared comparison, <= left / < right). A refinement step picks
// t > 0 with
//      ell^-t [k^s, k^s + k^R)  ⊆  [k^n + k^r, k^n + k^{r+1})
// disjoint from every earlier family interval ell^-v [k^u, k^u + k^R); a chain
// of such steps nests one window per word letter. The direct scan instead
// walks the second-digit table and matches the word greedily; both roads end
// at the same verifier, which replays hits and exclusions from digits alone.
//
// Everything here assumes k < ell (the digit side does not care, this module
// does); entry points throw DomainError otherwise. All comparisons are exact
// (integer or rational); no floating point on any decision path.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"
#include "forge/grid.hpp"
#include "forge/radix.hpp"

namespace forge {

struct HalfOpenInterval {
  Rat lo, hi;  // [lo, hi), requires lo < hi
};

inline bool interval_subset(const HalfOpenInterval& a, const HalfOpenInterval& b) {
  return b.lo <= a.lo && a.hi <= b.hi;
}

inline bool interval_disjoint(const HalfOpenInterval& a, const HalfOpenInterval& b) {
  return a.hi <= b.lo || b.hi <= a.lo;
}

namespace detail {
inline void require_orientation(const BasePair& b, const char* who) {
  if (!(b.k < b.ell))
    throw DomainError(std::string(who) + ": this module assumes k < ell");
}

inline Rat rat_pow(std::uint64_t base, std::int64_t e) {
  if (e >= 0) return Rat(nat_pow(Nat(base), static_cast<std::uint64_t>(e)));
  return Rat(1, nat_pow(Nat(base), static_cast<std::uint64_t>(-e)));
}
}  // namespace detail

// x / lambda(x) in [1, k); defined for all positive rationals
inline Rat mu_of(const BasePair& b, const Rat& x) {
  if (x <= 0) throw DomainError("mu_of: argument must be positive");
  return x * detail::rat_pow(b.k, -floor_log_rat(b.k, x));
}

// the m with k^{2m-1} <= x^2 < k^{2m+1} (exponent of nu(x))
inline std::int64_t nu_of(const BasePair& b, const Rat& x) {
  if (x <= 0) throw DomainError("nu_of: argument must be positive");
  const std::int64_t j = floor_log_rat(b.k, x * x);
  // m = floor((j+1)/2) — both parities land in the window
  const std::int64_t jp = j + 1;
  return jp >= 0 ? jp / 2 : -((-jp + 1) / 2);
}

// U(v) = n - nu-exponent(ell^-v); the unique admissible top exponent for the
// v-th family interval near [k^n, k^n + k^R)
inline std::int64_t u_of(const BasePair& b, std::uint64_t v, std::uint64_t n) {
  detail::require_orientation(b, "u_of");
  return static_cast<std::int64_t>(n) - nu_of(b, Rat(1, nat_pow(Nat(b.ell), v)));
}

// I_v = ell^-v [k^{U(v)}, k^{U(v)} + k^R)
inline HalfOpenInterval refinement_interval(const BasePair& b, std::uint64_t v,
                                            std::uint64_t n, std::uint64_t R) {
  detail::require_orientation(b, "refinement_interval");
  const std::int64_t U = u_of(b, v, n);
  if (U < 0) throw DomainError("refinement_interval: window below 1");
  const Nat kU = nat_pow(Nat(b.k), static_cast<std::uint64_t>(U));
  const Nat kR = nat_pow(Nat(b.k), R);
  const Nat lv = nat_pow(Nat(b.ell), v);
  return {Rat(kU, lv), Rat(kU + kR, lv)};
}

// the least stream index (1-based) whose interval sits inside I0 and misses
// every earlier stream interval; exact comparisons only
inline std::uint64_t select_disjoint(
    const HalfOpenInterval& I0,
    const std::function<HalfOpenInterval(std::uint64_t)>& gen,
    std::uint64_t budget) {
  if (budget < 1) throw DomainError("select_disjoint: budget must be >= 1");
  std::vector<HalfOpenInterval> seen;
  for (std::uint64_t idx = 1; idx <= budget; ++idx) {
    HalfOpenInterval I = gen(idx);
    bool ok = interval_subset(I, I0);
    for (std::size_t e = 0; ok && e < seen.size(); ++e)
      ok = interval_disjoint(I, seen[e]);
    if (ok) return idx;
    seen.push_back(std::move(I));
  }
  throw BudgetExhausted("select_disjoint: no admissible interval within budget");
}

// E: k^-E <= 1/4;  M: ell^M > k^{R+E};  delta = 1 + 2^-j with delta^2 below
// the least circular multiplicative gap of the points mu(ell^-i), i <= M;
// N: smallest with N > R+E and (k^N + k^R)/k^N < delta
struct SafeConstants {
  std::uint64_t E = 0;
  std::uint64_t M = 0;
  Rat delta;
  std::uint64_t N = 0;
};

inline SafeConstants safe_constants(const BasePair& b, std::uint64_t R) {
  detail::require_orientation(b, "safe_constants");
  SafeConstants out;
  {
    Nat p = 1;  // k^E >= 4  <=>  k^-E <= 1/4
    while (p < 4) {
      p *= b.k;
      ++out.E;
    }
  }
  {
    const Nat bound = nat_pow(Nat(b.k), R + out.E);
    Nat p = 1;
    while (p <= bound) {
      p *= b.ell;
      ++out.M;
    }
  }
  // circular gap of the mu-points; all distinct by multiplicative independence
  std::vector<Rat> pts;
  for (std::uint64_t i = 0; i <= out.M; ++i)
    pts.push_back(mu_of(b, Rat(1, nat_pow(Nat(b.ell), i))));
  std::sort(pts.begin(), pts.end());
  Rat gap = Rat(b.k) * pts.front() / pts.back();  // wraparound gap
  for (std::size_t i = 1; i < pts.size(); ++i) gap = std::min(gap, Rat(pts[i] / pts[i - 1]));
  for (std::uint64_t j = 1;; ++j) {
    const Rat d = 1 + Rat(1, Nat(1) << j);
    if (d * d < gap) {
      out.delta = d;
      break;
    }
    if (j > 512) throw VerificationFailed("safe_constants: gap collapsed (dependent bases?)");
  }
  {
    const Nat kR = nat_pow(Nat(b.k), R);
    std::uint64_t N = R + out.E + 1;
    while (true) {
      const Nat kN = nat_pow(Nat(b.k), N);
      if (Rat(kN + kR, kN) < out.delta) break;
      ++N;
    }
    out.N = N;
  }
  return out;
}

// replay of the arc-disjointness the delta choice certifies: the open arcs
// mu(ell^-i (delta^-1, delta)), 0 <= i <= M, are pairwise disjoint in the
// circle [1, k). Two open mult-arcs of radius delta are disjoint iff the
// circular center ratio d = mu(c_i / c_j) keeps both d and k/d >= delta^2.
inline bool mu_arcs_disjoint(const BasePair& b, const Rat& delta, std::uint64_t M) {
  detail::require_orientation(b, "mu_arcs_disjoint");
  std::vector<Rat> centers;
  for (std::uint64_t i = 0; i <= M; ++i)
    centers.push_back(mu_of(b, Rat(1, nat_pow(Nat(b.ell), i))));
  const Rat d2 = delta * delta;
  for (std::size_t i = 0; i < centers.size(); ++i)
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const Rat d = mu_of(b, centers[i] / centers[j]);
      if (d < d2 || Rat(b.k) / d < d2) return false;
    }
  return true;
}

struct Refinement {
  std::uint64_t s = 0;
  std::uint64_t t = 0;
};

// scan t = 1.. for the first refinement interval inside the digit-r
// subinterval of [k^n, k^n + k^{r+1}) that is disjoint from every earlier
// family; all checks exact-integer (both sides scaled by ell^t resp.
// ell^{t+v}). The digit range r <= R is accepted (r < R is what the
// construction guarantees; the containment check protects the boundary case).
inline Refinement find_refinement(const BasePair& b, std::uint64_t R,
                                  std::uint64_t n, std::uint64_t r,
                                  std::uint64_t vBudget) {
  detail::require_orientation(b, "find_refinement");
  if (r > R) throw DomainError("find_refinement: digit exceeds alphabet bound");
  const Nat kR = nat_pow(Nat(b.k), R);
  const Nat kn = nat_pow(Nat(b.k), n);
  const Nat lo0 = kn + nat_pow(Nat(b.k), r);      // k^n + k^r
  const Nat hi0 = kn + nat_pow(Nat(b.k), r + 1);  // k^n + k^{r+1}

  std::vector<Nat> ellPow{Nat(1)};  // ellPow[v] = ell^v
  for (std::uint64_t t = 1; t <= vBudget; ++t) {
    ellPow.push_back(ellPow.back() * b.ell);
    const std::int64_t U = u_of(b, t, n);
    if (U < 0) continue;
    const Nat kU = nat_pow(Nat(b.k), static_cast<std::uint64_t>(U));
    // containment: k^U >= lo0 * ell^t  and  k^U + k^R <= hi0 * ell^t
    if (kU < lo0 * ellPow[t] || kU + kR > hi0 * ellPow[t]) continue;

    bool clean = true;
    for (std::uint64_t v = 1; clean && v < t; ++v) {
      // overlap with ell^-v [k^u, k^u + k^R): scale both by ell^{t+v}; the
      // candidate u are the few powers with k^u * ell^t in (X - W, Y) where
      // X = k^U ell^v, W = k^R ell^t, Y = (k^U + k^R) ell^v
      const Nat X = kU * ellPow[v];
      const Nat W = kR * ellPow[t];
      const Nat Y = (kU + kR) * ellPow[v];
      const Nat hiq = (Y - 1) / ellPow[t];  // k^u <= hiq  <=>  k^u * ell^t < Y
      if (hiq < 1) continue;                // no candidate u at all
      const std::int64_t uHi = floor_log(b.k, hiq);
      std::int64_t uLo = 0;
      if (X > W) {
        const Nat q = (X - W) / ellPow[t];
        if (q >= 1) uLo = floor_log(b.k, q);  // one below the true edge is fine
      }
      for (std::int64_t u = uLo; u <= uHi && clean; ++u) {
        const Nat ku = nat_pow(Nat(b.k), static_cast<std::uint64_t>(u));
        const bool overlap = ku * ellPow[t] < Y && X < (ku + kR) * ellPow[t];
        if (overlap) clean = false;
      }
    }
    if (clean) return {static_cast<std::uint64_t>(U), t};
  }
  throw BudgetExhausted("find_refinement: no admissible t within budget");
}

struct RefinementStep {
  std::uint64_t n = 0;  // n_j: top exponent of the j-th window
  std::uint64_t M = 0;  // M_j: the ell-shift selected for step j
};

struct RefinementChain {
  std::uint64_t R = 0;
  PatternWord word;
  std::uint64_t n0 = 0;                // base window exponent (the safe N)
  std::vector<RefinementStep> steps;   // one step per word letter, in order
};

// nested windows, one refinement per letter, starting from the safe N for R.
// Step j+1 refines into the digit-r_j subinterval of window j.
inline RefinementChain build_chain(const BasePair& b, std::uint64_t R,
                                   const PatternWord& word, std::uint64_t vBudget) {
  detail::require_orientation(b, "build_chain");
  RefinementChain chain;
  chain.R = R;
  chain.word = word;
  chain.n0 = safe_constants(b, R).N;
  std::uint64_t cur = chain.n0;
  for (const auto letter : word.letters) {
    const Refinement ref = find_refinement(b, R, cur, letter, vBudget);
    chain.steps.push_back({ref.s, ref.t});
    cur = ref.s;
  }
  return chain;
}

struct PatternWitness {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> m;  // one exponent per word letter, increasing
};

enum class SearchStrategy { chain, scan };

struct SearchBudget {
  std::uint64_t vBudget = 10000;     // refinement scan bound (chain strategy)
  std::uint64_t scanWindow = 20000;  // ell-exponent window (scan strategy and
                                     // the chain's final density scan)
};

// Checks the word's hits and exclusions from digits alone: position m_j must
// lie in S(k^{n + r_j}); every other exponent in [m_0, m_s] must avoid the
// rows n..n+R-1 entirely. R is the exclusion bound (callers may pass a wider
// alphabet bound than max letter; letters themselves may reach R).
inline bool verify_pattern_witness(const BasePair& b, const PatternWord& word,
                                   std::uint64_t R, const PatternWitness& w) {
  if (w.m.size() != word.letters.size())
    throw ShapeError("verify_pattern_witness: witness length differs from word length");
  if (w.m.empty()) return true;
  for (std::size_t j = 1; j < w.m.size(); ++j)
    if (w.m[j] <= w.m[j - 1]) return false;  // must be increasing
  std::map<std::uint64_t, std::uint32_t> hit;  // exponent -> expected letter
  for (std::size_t j = 0; j < w.m.size(); ++j) hit[w.m[j]] = word.letters[j];

  const SecondDigitTable tab(b, w.m.back());
  for (std::uint64_t m = w.m.front(); m <= w.m.back(); ++m) {
    const std::int64_t sec = tab.second(m);
    const bool inAnyRow = tab.leading_digit_one(m) && sec >= 0;
    const std::int64_t row =
        inAnyRow ? sec - static_cast<std::int64_t>(w.n) : std::int64_t{-1000};
    const auto it = hit.find(m);
    if (it != hit.end()) {
      if (!inAnyRow || row != static_cast<std::int64_t>(it->second)) return false;
    } else {
      if (inAnyRow && row >= 0 && row < static_cast<std::int64_t>(R)) return false;
    }
  }
  return true;
}

namespace detail {

// greedy matcher: fix the start (which pins n), then walk forward consuming
// letters; any unconsumed exponent whose row falls below R kills the start.
// Consuming at the earliest opportunity is complete: trading a later hit for
// an earlier one leaves every exclusion untouched (the vacated position has
// row == its letter >= 0, legal only when that letter is R — rows < R are
// forced-consume and give no choice).
inline std::optional<PatternWitness> scan_for_word(const SecondDigitTable& tab,
                                                   const PatternWord& word,
                                                   std::uint64_t R) {
  const auto& L = word.letters;
  if (L.empty()) return PatternWitness{1, {}};
  for (std::uint64_t p = 1; p <= tab.m_max(); ++p) {
    const std::int64_t sec0 = tab.second(p);
    if (!tab.leading_digit_one(p) || sec0 < 0) continue;
    const std::int64_t n = sec0 - static_cast<std::int64_t>(L[0]);
    if (n < 1) continue;
    PatternWitness w;
    w.n = static_cast<std::uint64_t>(n);
    w.m.push_back(p);
    std::size_t next = 1;
    for (std::uint64_t m = p + 1; next < L.size() && m <= tab.m_max(); ++m) {
      const std::int64_t sec = tab.second(m);
      const bool inAnyRow = tab.leading_digit_one(m) && sec >= 0;
      if (!inAnyRow) continue;
      const std::int64_t row = sec - n;
      if (row >= 0 && row == static_cast<std::int64_t>(L[next])) {
        w.m.push_back(m);
        ++next;
      } else if (row >= 0 && row < static_cast<std::int64_t>(R)) {
        break;  // stray in an excluded row
      }
    }
    if (next == L.size()) return w;
  }
  return std::nullopt;
}

}  // namespace detail

// Search for a witness. Scan strategy: direct greedy walk over the digit
// table (first match is the lexicographically least by construction: starts
// ascend, consumption is earliest-first, n is pinned by the start). Chain
// strategy: build the refinement chain, then scan ell-exponents J for a
// density hit ell^J in [k^{a+n'}, k^{a+n'} + k^{R+n'}) against the final
// window, yielding m_j = M + M_1 + ... + M_j.
inline PatternWitness find_pattern_witness(const BasePair& b, const PatternWord& word,
                                           std::uint64_t R, SearchStrategy strategy,
                                           const SearchBudget& budget = {}) {
  detail::require_orientation(b, "find_pattern_witness");
  for (auto letter : word.letters)
    if (letter > R) throw DomainError("find_pattern_witness: letter exceeds alphabet bound");
  if (word.letters.empty())
    throw DomainError("find_pattern_witness: empty word");

  if (strategy == SearchStrategy::scan) {
    const SecondDigitTable tab(b, budget.scanWindow);
    auto w = detail::scan_for_word(tab, word, R);
    if (!w) throw BudgetExhausted("find_pattern_witness: no witness within scan window");
    return *w;
  }

  // chain strategy
  const RefinementChain chain = build_chain(b, R, word, budget.vBudget);
  std::uint64_t sigma = 0;  // M_1 + ... + M_last
  for (const auto& st : chain.steps) sigma += st.M;
  const std::uint64_t a = chain.steps.back().n;
  const SecondDigitTable tab(b, sigma + budget.scanWindow);
  for (std::uint64_t J = sigma + 1; J <= sigma + budget.scanWindow; ++J) {
    const auto e = static_cast<std::uint64_t>(tab.top(J));
    if (e <= a) continue;
    const std::uint64_t nPrime = e - a;
    // ell^J in [k^{a+n'}, k^{a+n'} + k^{R+n'}): top exponent already e = a+n';
    // need leading digit 1 and the remainder below k^{R+n'}
    if (!tab.leading_digit_one(J)) continue;
    const std::int64_t sec = tab.second(J);
    if (sec >= 0 && sec >= static_cast<std::int64_t>(R + nPrime)) continue;
    PatternWitness w;
    w.n = nPrime;
    const std::uint64_t M = J - sigma;
    std::uint64_t acc = M;
    w.m.push_back(acc);
    for (std::size_t j = 0; j + 1 < chain.steps.size(); ++j) {
      acc += chain.steps[j].M;
      w.m.push_back(acc);
    }
    return w;
  }
  throw BudgetExhausted("find_pattern_witness: chain density scan exhausted");
}

}  // namespace forge
