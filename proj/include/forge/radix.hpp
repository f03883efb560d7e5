#pragma once
// Digit-side core: the relation S and everything counted over it.
//
// For y with at least two nonzero digits base k, write y = k^e + (second digit
// block) + ...; lambda_floor(y) = k^e is the largest power of k below y, and
// second_power(y) = k^f is the second-largest power appearing with a nonzero
// digit. Then (x, y) ∈ S for x = k^a, y = ell^b iff y has most significant
// digit 1 and f = a — equivalently lambda(y − lambda(y)) = x with x < lambda(y),
// or the interval form: some z ∈ k^ℕ has x < z and y ∈ [z + x, z + kx).
//
// Scans over consecutive ell-powers keep y and its top power incrementally
// (multiply by ell, bump the top while it fits) instead of recomputing logs;
// for k = 2 the second digit drops out of two bit scans.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"

namespace forge {

// k^e <= y < k^{e+1}; y >= 1 required
inline PowK lambda_floor(const BasePair& b, const Nat& y) {
  if (y <= 0) throw DomainError("lambda_floor: argument must be >= 1");
  return PowK{static_cast<std::uint64_t>(floor_log(b.k, y))};
}

// the second-largest power of k with a nonzero digit in y; y >= 1 required,
// and y must not itself be a power of k (no second digit otherwise)
inline PowK second_power(const BasePair& b, const Nat& y) {
  const PowK top = lambda_floor(b, y);
  // strip the leading digit, not just one copy of k^top
  Nat r = y % nat_pow(Nat(b.k), top.exp);
  if (r == 0) throw NoSecondDigit("second_power: argument has a single nonzero digit");
  return PowK{static_cast<std::uint64_t>(floor_log(b.k, r))};
}

// Precomputed (top, second) exponent table for ell^m, m = 0..mMax.
// second(m) == -1 encodes "no second digit" (ell^m is 1 or a power of k).
// Note the S-relation needs the most significant digit to be 1 as well;
// for ell^m that digit can exceed 1 when k is small relative to ell, so the
// table keeps the leading digit too.
class SecondDigitTable {
 public:
  SecondDigitTable(const BasePair& b, std::uint64_t mMax) : bases_(b) {
    top_.reserve(mMax + 1);
    second_.reserve(mMax + 1);
    lead1_.reserve(mMax + 1);
    Nat y = 1;
    Nat topPow = 1;       // k^top for the general-k path
    std::uint64_t e = 0;  // current top exponent
    for (std::uint64_t m = 0; m <= mMax; ++m) {
      if (m != 0) {
        y *= b.ell;
        if (b.k == 2) {
          e = boost::multiprecision::msb(y);
        } else {
          while (true) {
            Nat next = topPow * b.k;
            if (next > y) break;
            topPow = std::move(next);
            ++e;
          }
        }
      }
      if (b.k == 2) {
        top_.push_back(static_cast<std::int64_t>(e));
        Nat r = y;
        boost::multiprecision::bit_unset(r, static_cast<unsigned>(e));
        second_.push_back(r == 0 ? -1
                                 : static_cast<std::int64_t>(boost::multiprecision::msb(r)));
        lead1_.push_back(true);  // base 2: every leading digit is 1
      } else {
        top_.push_back(static_cast<std::int64_t>(e));
        const Nat r = y % topPow;
        second_.push_back(r == 0 ? -1 : floor_log(b.k, r));
        lead1_.push_back(y / topPow == 1);
      }
    }
  }

  const BasePair& bases() const { return bases_; }
  std::uint64_t m_max() const { return top_.size() - 1; }
  std::int64_t top(std::uint64_t m) const { return top_.at(m); }
  std::int64_t second(std::uint64_t m) const { return second_.at(m); }
  bool leading_digit_one(std::uint64_t m) const { return lead1_.at(m); }

  // ell^m ∈ S(k^a)?
  bool s_member(std::uint64_t m, std::uint64_t a) const {
    return leading_digit_one(m) && second(m) == static_cast<std::int64_t>(a);
  }

 private:
  BasePair bases_;
  std::vector<std::int64_t> top_;
  std::vector<std::int64_t> second_;
  std::vector<bool> lead1_;
};

// single-shot membership: (x, y) ∈ S
inline bool s_member(const BasePair& b, PowK x, PowL y) {
  if (y.exp == 0) return false;  // y = 1 has a single digit
  const Nat Y = value_of(b, y);
  const PowK top = lambda_floor(b, Y);
  const Nat topPow = nat_pow(Nat(b.k), top.exp);
  if (Y / topPow != 1) return false;  // most significant digit must be 1
  const Nat r = Y % topPow;
  if (r == 0) return false;
  return static_cast<std::uint64_t>(floor_log(b.k, r)) == x.exp;
}

// all b-exponents m in [mLo, mHi] with ell^m ∈ S(x)
inline std::vector<PowL> s_scan(const SecondDigitTable& tab, PowK x,
                                std::uint64_t mLo, std::uint64_t mHi) {
  if (mLo > mHi) throw RangeError("s_scan: empty range given backwards");
  if (mHi > tab.m_max()) throw RangeError("s_scan: range exceeds table");
  std::vector<PowL> out;
  for (std::uint64_t m = mLo; m <= mHi; ++m)
    if (tab.s_member(m, x.exp)) out.push_back(PowL{m});
  return out;
}

inline std::vector<PowL> s_scan(const BasePair& b, PowK x, std::uint64_t mLo,
                                std::uint64_t mHi) {
  if (mLo > mHi) throw RangeError("s_scan: empty range given backwards");
  SecondDigitTable tab(b, mHi);
  return s_scan(tab, x, mLo, mHi);
}

// successor in k^ℕ: trivial on exponents
inline PowK sigma1(std::uint64_t i, PowK x) { return PowK{x.exp + i}; }

// successor of L in S(K): the least ell-power above L that lies in S(K),
// scanned up to exponent mMax; absence below the bound is a value, not an error
inline std::optional<PowL> sigma2(const SecondDigitTable& tab, PowK K, PowL L,
                                  std::uint64_t mMax) {
  if (!tab.s_member(L.exp, K.exp)) throw NotInS("sigma2: anchor not in S(K)");
  for (std::uint64_t m = L.exp + 1; m <= mMax && m <= tab.m_max(); ++m)
    if (tab.s_member(m, K.exp)) return PowL{m};
  return std::nullopt;
}

inline std::optional<PowL> sigma2(const BasePair& b, PowK K, PowL L,
                                  std::uint64_t mMax) {
  SecondDigitTable tab(b, std::max(mMax, L.exp));
  return sigma2(tab, K, L, mMax);
}

// card{ L' ∈ S(K) : L < L' < sigma2(K1, L) } — the cell count behind Θ_c
inline std::uint64_t theta_count(const SecondDigitTable& tab, PowK K1, PowK K,
                                 PowL L, std::uint64_t mMax) {
  if (!tab.s_member(L.exp, K1.exp)) throw NotInS("theta_count: L not in S(K1)");
  const auto succ = sigma2(tab, K1, L, mMax);
  if (!succ)
    throw SuccessorUnbounded("theta_count: no successor in S(K1) below the bound");
  std::uint64_t c = 0;
  for (std::uint64_t m = L.exp + 1; m < succ->exp; ++m)
    if (tab.s_member(m, K.exp)) ++c;
  return c;
}

inline std::uint64_t theta_count(const BasePair& b, PowK K1, PowK K, PowL L,
                                 std::uint64_t mMax) {
  SecondDigitTable tab(b, std::max(mMax, L.exp));
  return theta_count(tab, K1, K, L, mMax);
}

// (K1, K, L) ∈ Ω_{u,v}: the Θ-count c satisfies c < 2^u with bit v−1 set
inline bool omega_member(const SecondDigitTable& tab, std::uint64_t u,
                         std::uint64_t v, PowK K1, PowK K, PowL L,
                         std::uint64_t mMax) {
  if (v < 1 || v > u) throw DomainError("omega_member: need 1 <= v <= u");
  if (u >= 64) throw DomainError("omega_member: u out of range");
  const std::uint64_t c = theta_count(tab, K1, K, L, mMax);
  if (c >= (std::uint64_t{1} << u)) return false;
  return (c >> (v - 1)) & 1;
}

inline bool omega_member(const BasePair& b, std::uint64_t u, std::uint64_t v,
                         PowK K1, PowK K, PowL L, std::uint64_t mMax) {
  SecondDigitTable tab(b, std::max(mMax, L.exp));
  return omega_member(tab, u, v, K1, K, L, mMax);
}

// a candidate element of D: K1 <= K2 in k^ℕ, L1 <= L2 in ell^ℕ with both
// L-ends in S(K1)
struct DWitness {
  PowK K1, K2;
  PowL L1, L2;
};

// ranks of a DWitness: R1 = card(k^ℕ ∩ (K1,K2]), R2 = card(S(K1) ∩ [L1,L2)).
// Total: invariant violations yield absence. The window is intrinsically
// bounded by L2, so mMax is only a consistency hint (kept for interface
// symmetry with the other scans).
inline std::optional<std::pair<std::uint64_t, std::uint64_t>> d_check(
    const BasePair& b, const DWitness& w, std::uint64_t /*mMax*/ = 0) {
  if (!(w.K1 <= w.K2) || !(w.L1 <= w.L2)) return std::nullopt;
  if (!s_member(b, w.K1, w.L1) || !s_member(b, w.K1, w.L2)) return std::nullopt;
  const std::uint64_t R1 = w.K2.exp - w.K1.exp;
  std::uint64_t R2 = 0;
  if (w.L1.exp < w.L2.exp) {
    SecondDigitTable tab(b, w.L2.exp - 1);
    for (std::uint64_t m = w.L1.exp; m < w.L2.exp; ++m)
      if (tab.s_member(m, w.K1.exp)) ++R2;
  }
  return std::make_pair(R1, R2);
}

// brute-force minimum of |k^a − ell^b| over 1 <= a <= aMax, 1 <= b <= bMax,
// with every attaining pair, ordered by (a, b)
struct BakerScan {
  Nat minGap;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> witnesses;
};

inline BakerScan baker_gap_scan(const BasePair& b, std::uint64_t aMax,
                                std::uint64_t bMax) {
  if (aMax < 1 || bMax < 1) throw DomainError("baker_gap_scan: bounds must be >= 1");
  BakerScan out;
  Nat ka = 1;
  for (std::uint64_t a = 1; a <= aMax; ++a) {
    ka *= b.k;
    Nat lb = 1;
    for (std::uint64_t bb = 1; bb <= bMax; ++bb) {
      lb *= b.ell;
      const Nat gap = ka > lb ? Nat(ka - lb) : Nat(lb - ka);
      if (out.witnesses.empty() || gap < out.minGap) {
        out.minGap = gap;
        out.witnesses.assign(1, {a, bb});
      } else if (gap == out.minGap) {
        out.witnesses.emplace_back(a, bb);
      }
    }
  }
  return out;
}

}  // namespace forge
