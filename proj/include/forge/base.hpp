#pragma once
// Core number types, exact integer/rational helpers, and base-pair validation.
//
// Everything downstream works with two multiplicatively independent bases
// k < ell. "Multiplicatively independent" means k^a = ell^b has no solution
// with a, b not both zero; for integers >= 2 this is equivalent to k and ell
// not being powers of a common integer root d >= 2, which is what
// mult_independent checks (by extracting the largest perfect-power root).

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "forge/errors.hpp"

namespace forge {

using Nat = boost::multiprecision::cpp_int;       // used as arbitrary-size naturals
using Rat = boost::multiprecision::cpp_rational;  // exact rationals

inline Nat nat_pow(const Nat& base, std::uint64_t e) {
  Nat acc = 1;
  Nat b = base;
  while (e != 0) {
    if (e & 1) acc *= b;
    e >>= 1;
    if (e != 0) b *= b;
  }
  return acc;
}

// largest e with base^e <= y; exact. Requires base >= 2 and y >= 1.
inline std::int64_t floor_log(std::uint64_t base, const Nat& y) {
  if (base < 2) throw DomainError("floor_log: base must be >= 2");
  if (y <= 0) throw DomainError("floor_log: argument must be >= 1");
  if (base == 2) return static_cast<std::int64_t>(boost::multiprecision::msb(y));
  // divide-and-conquer ladder over base^(2^i)
  std::vector<Nat> ladder;  // ladder[i] = base^(2^i)
  ladder.emplace_back(base);
  while (ladder.back() <= y) {
    Nat next = ladder.back() * ladder.back();
    if (next > y) break;
    ladder.push_back(std::move(next));
  }
  std::int64_t e = 0;
  Nat t = y;
  for (std::size_t i = ladder.size(); i-- > 0;) {
    if (t >= ladder[i]) {
      t /= ladder[i];
      e += std::int64_t{1} << i;
    }
  }
  return e;
}

// largest e (possibly negative) with base^e <= x, for rational x > 0; exact.
inline std::int64_t floor_log_rat(std::uint64_t base, const Rat& x) {
  if (x <= 0) throw DomainError("floor_log_rat: argument must be positive");
  const Nat p = boost::multiprecision::numerator(x);
  const Nat q = boost::multiprecision::denominator(x);
  if (p >= q) return floor_log(base, p / q);  // floor_log(floor(x)) == floor_log(x) for x >= 1
  // x < 1: with e' = floor_log(1/x), the answer is -e' when x is exactly base^-e',
  // else -e' - 1.
  const std::int64_t ep = floor_log(base, q / p);
  return (p * nat_pow(Nat(base), static_cast<std::uint64_t>(ep)) == q) ? -ep : -ep - 1;
}

// exact comparison of rational x against base^e with e possibly negative;
// returns -1, 0, +1
inline int cmp_pow(const Rat& x, std::uint64_t base, std::int64_t e) {
  const Nat p = boost::multiprecision::numerator(x);
  const Nat q = boost::multiprecision::denominator(x);
  Nat lhs, rhs;
  if (e >= 0) {
    lhs = p;
    rhs = q * nat_pow(Nat(base), static_cast<std::uint64_t>(e));
  } else {
    lhs = p * nat_pow(Nat(base), static_cast<std::uint64_t>(-e));
    rhs = q;
  }
  if (lhs < rhs) return -1;
  if (lhs > rhs) return 1;
  return 0;
}

namespace detail {

// exact integer j-th root test for word-sized n: returns r with r^j == n, if any
inline std::optional<std::uint64_t> exact_root(std::uint64_t n, unsigned j) {
  if (j == 0 || n < 2) return std::nullopt;
  // double-precision seed, then exact fix-up in a small neighborhood
  auto guess = static_cast<std::uint64_t>(std::pow(static_cast<double>(n), 1.0 / j) + 0.5);
  for (std::uint64_t r = (guess > 2 ? guess - 2 : 1); r <= guess + 2; ++r) {
    if (r < 2) continue;
    Nat p = nat_pow(Nat(r), j);
    if (p == n) return r;
    if (p > n) break;
  }
  return std::nullopt;
}

// smallest b such that n is a perfect power of b (n itself if n is not a
// proper power). For n >= 2.
inline std::uint64_t primitive_root(std::uint64_t n) {
  const auto maxj = static_cast<unsigned>(floor_log(2, Nat(n)));
  for (unsigned j = maxj; j >= 2; --j) {
    if (auto r = exact_root(n, j)) return *r;
  }
  return n;
}

}  // namespace detail

// true iff no d >= 2 has k = d^a and ell = d^b
inline bool mult_independent(std::uint64_t k, std::uint64_t ell) {
  if (k < 2 || ell < 2) throw DomainError("mult_independent: bases must be >= 2");
  return detail::primitive_root(k) != detail::primitive_root(ell);
}

// a validated pair of multiplicatively independent bases >= 2. Digit-side code
// (radix, grid) works for any order; the pattern-search module additionally
// assumes k < ell and says so at its entry points.
struct BasePair {
  std::uint64_t k = 0;
  std::uint64_t ell = 0;
};

inline BasePair make_base_pair(std::uint64_t k, std::uint64_t ell) {
  if (k < 2 || ell < 2) throw InvalidBase("bases must be >= 2");
  if (!mult_independent(k, ell))
    throw InvalidBase("bases are multiplicatively dependent");
  return BasePair{k, ell};
}

// powers are carried around by exponent; the value is materialized on demand
struct PowK {
  std::uint64_t exp = 0;
  friend bool operator==(PowK a, PowK b) { return a.exp == b.exp; }
  friend bool operator<(PowK a, PowK b) { return a.exp < b.exp; }
  friend bool operator<=(PowK a, PowK b) { return a.exp <= b.exp; }
};

struct PowL {
  std::uint64_t exp = 0;
  friend bool operator==(PowL a, PowL b) { return a.exp == b.exp; }
  friend bool operator<(PowL a, PowL b) { return a.exp < b.exp; }
  friend bool operator<=(PowL a, PowL b) { return a.exp <= b.exp; }
};

inline Nat value_of(const BasePair& b, PowK x) { return nat_pow(Nat(b.k), x.exp); }
inline Nat value_of(const BasePair& b, PowL y) { return nat_pow(Nat(b.ell), y.exp); }

}  // namespace forge
