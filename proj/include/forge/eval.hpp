#pragma once
// Windowed evaluation of formulas over (N, +, k-powers, l-powers).
//
// Full truth in the structure is not computable, so this is deliberately a
// bounded verifier: power-sorted quantifiers enumerate exponents 0..capK
// (0..capL), and nat-sorted quantifiers must carry a guard giving a finite
// range (an upper bound, or a solvable equation x + t1 = t2). Results carry
// a capRelative flag: a "true" universal (or "false" existential) whose
// enumeration was truncated at a cap could in principle flip with larger
// caps, and is reported as true-within-caps by callers. Existential "true"
// and universal "false" with the flag clear are certified.
//
// Narrowing: before enumerating, the evaluator harvests bounds on the
// quantified variable from its guard, from the antecedent of a universal
// implication body, and from the conjuncts of an existential conjunction
// body. Skipping a value excluded this way never changes the result (it
// would contribute a vacuous true, respectively a failed witness); it is
// what makes window-sized evaluation of successor-guarded formulas cheap.
// An S(K, x) conjunct additionally filters candidates through the digit
// table. A guard whose lower bound provably exceeds the cap is an error
// (CapTooSmall) rather than a silent vacuous truth.
//
// Macro atoms are evaluated directly against the digit-table semantics;
// expand_macros output contains none and exercises the core signature.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"
#include "forge/formula.hpp"
#include "forge/radix.hpp"

namespace forge {

struct EvalCaps {
  std::int64_t capK = 0;  // largest k-exponent enumerated
  std::int64_t capL = 0;  // largest l-exponent enumerated
};

struct EvalOptions {
  std::uint64_t natEnumLimit = 200000;  // largest nat range enumerated
};

struct EvalResult {
  bool value = false;
  bool capRelative = false;
};

using Env = std::map<std::string, Nat>;

namespace detail {

inline bool term_mentions(const Term& t, const std::string& var) {
  switch (t.kind) {
    case TermKind::variable: return t.name == var;
    case TermKind::constant: return false;
    case TermKind::sum:
      return term_mentions(t.kids[0], var) || term_mentions(t.kids[1], var);
  }
  return false;
}

class BoundedEvaluator {
 public:
  BoundedEvaluator(const BasePair& b, const EvalCaps& caps, const EvalOptions& opt)
      : b_(b), caps_(caps), opt_(opt) {}

  EvalResult eval(const Formula& f, Env& env) {
    switch (f.kind) {
      case FormulaKind::truth: return {f.truthValue, false};
      case FormulaKind::eq: return {term(f.terms[0], env) == term(f.terms[1], env), false};
      case FormulaKind::lt: return {term(f.terms[0], env) < term(f.terms[1], env), false};
      case FormulaKind::le: return {term(f.terms[0], env) <= term(f.terms[1], env), false};
      case FormulaKind::powK: return {exp_of(b_.k, term(f.terms[0], env)).has_value(), false};
      case FormulaKind::powL: return {exp_of(b_.ell, term(f.terms[0], env)).has_value(), false};
      case FormulaKind::lnot: {
        EvalResult r = eval(f.kids[0], env);
        return {!r.value, r.capRelative};
      }
      case FormulaKind::land: {
        bool flag = false;
        for (const auto& k : f.kids) {
          EvalResult r = eval(k, env);
          if (!r.value) return {false, r.capRelative};
          flag = flag || r.capRelative;
        }
        return {true, flag};
      }
      case FormulaKind::lor: {
        bool flag = false;
        for (const auto& k : f.kids) {
          EvalResult r = eval(k, env);
          if (r.value) return {true, r.capRelative};
          flag = flag || r.capRelative;
        }
        return {false, flag};
      }
      case FormulaKind::implies: {
        EvalResult a = eval(f.kids[0], env);
        if (!a.value) return {true, a.capRelative};
        EvalResult c = eval(f.kids[1], env);
        return {c.value, a.capRelative || c.capRelative};
      }
      case FormulaKind::forall:
      case FormulaKind::exists: return quantifier(f, env);
      case FormulaKind::macro: return macro(f, env);
    }
    throw DomainError("eval: unhandled formula kind");
  }

  Nat term(const Term& t, const Env& env) {
    switch (t.kind) {
      case TermKind::variable: {
        const auto it = env.find(t.name);
        if (it == env.end()) throw DomainError("eval: unbound variable " + t.name);
        return it->second;
      }
      case TermKind::constant: return t.value;
      case TermKind::sum: return term(t.kids[0], env) + term(t.kids[1], env);
    }
    throw DomainError("eval: unhandled term kind");
  }

 private:
  BasePair b_;
  EvalCaps caps_;
  EvalOptions opt_;
  std::optional<SecondDigitTable> tab_;

  const SecondDigitTable& table() {
    if (!tab_) tab_.emplace(b_, static_cast<std::uint64_t>(std::max<std::int64_t>(caps_.capL, 0)));
    return *tab_;
  }

  static std::optional<std::int64_t> exp_of(std::uint32_t base, const Nat& v) {
    if (v < 1) return std::nullopt;
    const std::int64_t e = floor_log(base, v);
    if (nat_pow(base, static_cast<std::uint64_t>(e)) != v) return std::nullopt;
    return e;
  }

  // ------------------------------------------------------------ narrowing ---

  struct Narrow {
    std::optional<Nat> lo, hi;  // inclusive value bounds
    bool empty = false;         // constraints contradictory on their own
    std::optional<Nat> sAnchor; // S(anchor, var) filter value (powL sorts)
    bool sAnchorDead = false;   // anchor is no k-power: nothing passes
    bool hiBounded() const { return hi.has_value(); }
  };

  std::optional<Nat> closed_value(const Term& t, const Env& env,
                                  const std::string& var) {
    if (term_mentions(t, var)) return std::nullopt;
    std::vector<std::string> bound, vars;
    collect_free_vars(t, bound, vars);
    for (const auto& v : vars)
      if (!env.count(v)) return std::nullopt;
    return term(t, env);
  }

  void tighten_lo(Narrow& n, const Nat& v) {
    if (!n.lo || *n.lo < v) n.lo = v;
    if (n.lo && n.hi && *n.lo > *n.hi) n.empty = true;
  }
  void tighten_hi(Narrow& n, const Nat& v) {
    if (!n.hi || *n.hi > v) n.hi = v;
    if (n.lo && n.hi && *n.lo > *n.hi) n.empty = true;
    if (v < 0) n.empty = true;
  }

  void absorb(const Formula& f, const std::string& var, const Env& env, Narrow& n) {
    if (f.kind == FormulaKind::land) {
      for (const auto& k : f.kids) absorb(k, var, env, n);
      return;
    }
    auto isVar = [&](const Term& t) {
      return t.kind == TermKind::variable && t.name == var;
    };
    if (f.kind == FormulaKind::lt || f.kind == FormulaKind::le) {
      const bool strict = f.kind == FormulaKind::lt;
      const Term& a = f.terms[0];
      const Term& c = f.terms[1];
      if (isVar(c)) {
        if (const auto v = closed_value(a, env, var)) tighten_lo(n, strict ? *v + 1 : *v);
      } else if (isVar(a)) {
        if (const auto v = closed_value(c, env, var)) {
          if (strict && *v == 0) n.empty = true;
          else tighten_hi(n, strict ? *v - 1 : *v);
        }
      }
      return;
    }
    if (f.kind == FormulaKind::eq) {
      const Term& a = f.terms[0];
      const Term& c = f.terms[1];
      auto point = [&](const Nat& v) {
        tighten_lo(n, v);
        tighten_hi(n, v);
      };
      if (isVar(a)) {
        if (const auto v = closed_value(c, env, var)) point(*v);
        return;
      }
      if (isVar(c)) {
        if (const auto v = closed_value(a, env, var)) point(*v);
        return;
      }
      // x + t = rhs (either summand the variable): x = rhs - t when possible
      auto tryEquation = [&](const Term& sum, const Term& rhs) {
        if (sum.kind != TermKind::sum) return false;
        const auto r = closed_value(rhs, env, var);
        if (!r) return false;
        for (int side = 0; side < 2; ++side) {
          const Term& x = sum.kids[side];
          const Term& t = sum.kids[1 - side];
          if (!isVar(x)) continue;
          const auto tv = closed_value(t, env, var);
          if (!tv) continue;
          if (*r < *tv) n.empty = true;
          else point(*r - *tv);
          return true;
        }
        return false;
      };
      if (tryEquation(a, c)) return;
      tryEquation(c, a);
      return;
    }
    if (f.kind == FormulaKind::macro && f.macroName == "S" && f.terms.size() == 2 &&
        isVar(f.terms[1])) {
      if (const auto v = closed_value(f.terms[0], env, var)) {
        if (exp_of(b_.k, *v)) n.sAnchor = *v;
        else n.sAnchorDead = true;
      }
    }
  }

  // ---------------------------------------------------------- quantifiers ---

  EvalResult quantifier(const Formula& f, Env& env) {
    const bool isAll = f.kind == FormulaKind::forall;
    Narrow guardN, bodyN;
    if (f.hasGuard) absorb(f.guard(), f.var, env, guardN);
    const Formula& body = f.body();
    if (isAll && body.kind == FormulaKind::implies)
      absorb(body.kids[0], f.var, env, bodyN);
    if (!isAll && body.kind == FormulaKind::land) absorb(body, f.var, env, bodyN);

    // a guard that is empty on its own numeric terms is false everywhere,
    // so the quantifier resolves exactly; same for a dead S-anchor
    if (guardN.empty || guardN.sAnchorDead) return {isAll, false};

    Narrow m = guardN;
    if (bodyN.lo) tighten_lo(m, *bodyN.lo);
    if (bodyN.hi) tighten_hi(m, *bodyN.hi);
    if (bodyN.sAnchor && !m.sAnchor) m.sAnchor = bodyN.sAnchor;
    if (bodyN.sAnchorDead) m.sAnchorDead = true;
    if (m.empty || m.sAnchorDead) return {isAll, false};

    if (f.sort == Sort::nat) return enumerate_nat(f, env, m, isAll);
    return enumerate_pow(f, env, guardN, m, isAll);
  }

  EvalResult run_candidates(const Formula& f, Env& env, const std::vector<Nat>& vals,
                            bool isAll, bool complete) {
    bool flag = false;
    const auto saved = env.find(f.var) != env.end()
                           ? std::optional<Nat>(env[f.var])
                           : std::nullopt;
    auto restore = [&] {
      if (saved) env[f.var] = *saved;
      else env.erase(f.var);
    };
    for (const Nat& v : vals) {
      env[f.var] = v;
      bool guardFlag = false;
      if (f.hasGuard) {
        EvalResult g = eval(f.guard(), env);
        if (!g.value) {
          flag = flag || g.capRelative;
          continue;
        }
        guardFlag = g.capRelative;
      }
      EvalResult r = eval(f.body(), env);
      if (isAll && !r.value) {
        restore();
        return {false, guardFlag || r.capRelative};
      }
      if (!isAll && r.value) {
        restore();
        return {true, guardFlag || r.capRelative};
      }
      flag = flag || r.capRelative || guardFlag;
    }
    restore();
    return {isAll, flag || !complete};
  }

  EvalResult enumerate_pow(const Formula& f, Env& env, const Narrow& guardN,
                           const Narrow& m, bool isAll) {
    const bool isK = f.sort == Sort::powK;
    const std::uint32_t base = isK ? b_.k : b_.ell;
    const std::int64_t cap = isK ? caps_.capK : caps_.capL;
    if (cap < 0) throw DomainError("eval: negative cap");

    auto expCeil = [&](const Nat& v) -> std::int64_t {  // least e with base^e >= v
      if (v <= 1) return 0;
      const std::int64_t e = floor_log(base, v);
      return nat_pow(base, static_cast<std::uint64_t>(e)) == v ? e : e + 1;
    };
    auto expFloor = [&](const Nat& v) -> std::optional<std::int64_t> {
      if (v < 1) return std::nullopt;  // no power at most v
      return floor_log(base, v);
    };

    if (guardN.lo && expCeil(*guardN.lo) > cap)
      throw CapTooSmall("eval: quantifier guard on " + f.var +
                        " starts beyond the enumeration cap");

    std::int64_t eLo = m.lo ? expCeil(*m.lo) : 0;
    std::optional<std::int64_t> eHiDerived;
    if (m.hi) {
      const auto h = expFloor(*m.hi);
      if (!h) return {isAll, false};  // bound below 1: no candidates at all
      eHiDerived = *h;
    }
    const std::int64_t eHi = std::min<std::int64_t>(cap, eHiDerived.value_or(cap));
    const bool complete = eHiDerived.has_value() && *eHiDerived <= cap;

    std::optional<std::int64_t> anchorExp;
    if (!isK && m.sAnchor) anchorExp = exp_of(b_.k, *m.sAnchor);

    std::vector<Nat> vals;
    for (std::int64_t e = std::max<std::int64_t>(eLo, 0); e <= eHi; ++e) {
      if (anchorExp &&
          !table().s_member(static_cast<std::uint64_t>(e), *anchorExp))
        continue;
      vals.push_back(nat_pow(base, static_cast<std::uint64_t>(e)));
    }
    return run_candidates(f, env, vals, isAll, complete);
  }

  EvalResult enumerate_nat(const Formula& f, Env& env, const Narrow& m, bool isAll) {
    const Nat lo = m.lo.value_or(Nat(0));
    if (!m.hi)
      throw UnboundedQuantifier("eval: nat quantifier " + f.var +
                                " needs a finite range or equation guard");
    if (*m.hi < lo) return {isAll, false};
    const Nat span = *m.hi - lo + 1;
    if (span > opt_.natEnumLimit)
      throw UnboundedQuantifier("eval: nat quantifier " + f.var +
                                " ranges over " + span.str() + " values");
    std::vector<Nat> vals;
    for (Nat v = lo; v <= *m.hi; ++v) vals.push_back(v);
    return run_candidates(f, env, vals, isAll, /*complete=*/true);
  }

  // --------------------------------------------------------- macro atoms ---

  EvalResult macro(const Formula& f, Env& env) {
    check_macro_shape(f);
    std::vector<Nat> a;
    for (const auto& t : f.terms) a.push_back(term(t, env));
    const auto& n = f.macroName;

    if (n == "Lambda") {
      if (a[0] < 1) return {false, false};
      const std::int64_t e = floor_log(b_.k, a[0]);
      return {a[1] == nat_pow(b_.k, static_cast<std::uint64_t>(e)), false};
    }
    if (n == "S") {
      const auto x = exp_of(b_.k, a[0]);
      const auto y = exp_of(b_.ell, a[1]);
      if (!x || !y) return {false, false};
      return {s_member(b_, PowK{static_cast<std::uint64_t>(*x)},
                       PowL{static_cast<std::uint64_t>(*y)}),
              false};
    }
    if (n == "Sigma1") {
      const auto x = exp_of(b_.k, a[0]);
      const auto z = exp_of(b_.k, a[1]);
      if (!x || !z) return {false, false};
      return {*z == *x + f.macroParams[0], false};
    }
    if (n == "Sigma2") {
      const auto succ = sigma2_value(a[0], a[1]);
      if (!succ.first) return {a[2] == 0, succ.second};
      return {a[2] == *succ.first, succ.second};
    }
    if (n == "InD") {
      const auto k1 = exp_of(b_.k, a[0]);
      const auto k2 = exp_of(b_.k, a[1]);
      const auto l1 = exp_of(b_.ell, a[2]);
      const auto l2 = exp_of(b_.ell, a[3]);
      if (!k1 || !k2 || !l1 || !l2) return {false, false};
      if (a[0] > a[1] || a[2] > a[3]) return {false, false};
      const PowK K1{static_cast<std::uint64_t>(*k1)};
      return {s_member(b_, K1, PowL{static_cast<std::uint64_t>(*l1)}) &&
                  s_member(b_, K1, PowL{static_cast<std::uint64_t>(*l2)}),
              false};
    }
    if (n == "Theta" || n == "Omega") {
      const auto k1 = exp_of(b_.k, a[0]);
      const auto k = exp_of(b_.k, a[1]);
      const auto l = exp_of(b_.ell, a[2]);
      if (!k1 || !k || !l) return {false, false};
      const PowK K1{static_cast<std::uint64_t>(*k1)};
      const PowK K{static_cast<std::uint64_t>(*k)};
      const PowL L{static_cast<std::uint64_t>(*l)};
      const std::uint64_t mMax =
          static_cast<std::uint64_t>(std::max<std::int64_t>(caps_.capL, 0));
      std::uint64_t count = 0;
      bool flag = false;
      try {
        count = theta_count(table(), K1, K, L, mMax);
      } catch (const NotInS&) {
        return {false, false};
      } catch (const SuccessorUnbounded&) {
        count = 0;  // empty window under the no-successor sentinel
        flag = true;
      }
      if (n == "Theta")
        return {count == static_cast<std::uint64_t>(f.macroParams[0]), flag};
      const std::int64_t u = f.macroParams[0], v = f.macroParams[1];
      if (u < 1 || v < 1 || v > u || u >= 63)
        throw DomainError("eval: Omega indices out of range");
      if (count >> u) return {false, flag};  // count too wide for u tracks
      return {((count >> (v - 1)) & 1u) != 0, flag};
    }
    if (n == "AbsDiffGt") {
      const Nat diff = a[0] >= a[1] ? a[0] - a[1] : a[1] - a[0];
      return {diff > a[2], false};
    }
    throw ValidationError("eval: unknown macro " + n);
  }

  // least l-power in S(K1) strictly above L within the cap; second part of
  // the pair reports cap-relative knowledge
  std::pair<std::optional<Nat>, bool> sigma2_value(const Nat& K1v, const Nat& Lv) {
    const auto k1 = exp_of(b_.k, K1v);
    if (!k1) return {std::nullopt, false};  // no element of S(non-power): definite
    std::int64_t e0 = 0;
    if (Lv >= 1) e0 = floor_log(b_.ell, Lv) + 1;
    const std::int64_t cap = std::max<std::int64_t>(caps_.capL, 0);
    for (std::int64_t e = e0; e <= cap; ++e)
      if (table().s_member(static_cast<std::uint64_t>(e), *k1))
        return {nat_pow(b_.ell, static_cast<std::uint64_t>(e)), false};
    return {std::nullopt, true};
  }
};

}  // namespace detail

inline EvalResult eval_bounded(const BasePair& b, const Formula& f, const Env& env,
                               const EvalCaps& caps, const EvalOptions& opt = {}) {
  for (const auto& v : free_vars(f))
    if (!env.count(v))
      throw DomainError("eval_bounded: free variable " + v + " not in environment");
  Env scratch = env;
  return detail::BoundedEvaluator(b, caps, opt).eval(f, scratch);
}

}  // namespace forge
