#pragma once
// Compilation of a normalized machine into the halting formula: the window
// formula theta(K1,K2,L1,L2), its existential closure phi, the base-gap
// sentence, and macro expansion into the core signature.
//
// theta is built clause for clause:
//   (a) pairwise disjointness of the state tracks and of the symbol tracks
//   (b) initialization: state 1 at the first column, no symbols on row 1
//   (c) the accept track is reached somewhere in the window
//   (d) exactly one state track per column
//   (e) transition soundness, one conjunct per (state, symbol) rule
//   (6p) blank-read transitions (blank-extended machines only)
// Successor terms sigma1(K) and sigma2(K1, L) are relational, so every
// occurrence is wrapped in an existential bound by the defining macro. The
// no-successor sentinel of Sigma2 needs no special case here: a powL-sorted
// existential simply has no witness when the successor is absent, which
// matches the convention that the sentinel belongs to no track.

#include <cstdint>
#include <string>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"
#include "forge/formula.hpp"
#include "forge/tm.hpp"

namespace forge {

struct ThetaLayout {
  std::size_t aCount = 0;      // clause (a) conjuncts
  std::size_t bIndex = 0;      // index of clause (b) in the top conjunction
  std::size_t cIndex = 0;
  std::size_t dIndex = 0;
  std::size_t eBegin = 0;      // clause (e) conjuncts: [eBegin, eBegin+eCount)
  std::size_t eCount = 0;
  std::size_t blankBegin = 0;  // blank-read conjuncts, 0 count when absent
  std::size_t blankCount = 0;
};

struct ThetaResult {
  Formula formula;
  bool blankExtended = false;
  std::uint32_t u1 = 0, u2 = 0, u = 0;
  ThetaLayout layout;
};

namespace detail {

inline Formula omega(std::uint64_t u, std::uint64_t v, Term K1, Term K, Term L) {
  return Formula::call("Omega",
                       {static_cast<std::int64_t>(u), static_cast<std::int64_t>(v)},
                       {std::move(K1), std::move(K), std::move(L)});
}

inline Formula s_guard(Term K1, Term L) {
  return Formula::call("S", {}, {std::move(K1), std::move(L)});
}

inline Formula sigma1_guard(Term x, Term z) {
  return Formula::call("Sigma1", {1}, {std::move(x), std::move(z)});
}

inline Formula sigma2_guard(Term K1, Term L, Term z) {
  return Formula::call("Sigma2", {}, {std::move(K1), std::move(L), std::move(z)});
}

// exists SK in powK with sigma1(K) = SK: body(SK)
inline Formula with_sigma1(const std::string& name, Term of, Formula body) {
  return Formula::exists(name, Sort::powK, sigma1_guard(std::move(of), Term::var(name)),
                         std::move(body));
}

}  // namespace detail

inline ThetaResult build_theta(const TuringMachine& M) {
  using detail::omega;
  const std::uint64_t u1 = M.u1, u2 = M.u2, u = u1 + u2;
  const Term K1 = Term::var("K1"), K2 = Term::var("K2");
  const Term L1 = Term::var("L1"), L2 = Term::var("L2");
  const Term K = Term::var("K"), L = Term::var("L");

  ThetaResult out;
  out.blankExtended = M.blankEnabled;
  out.u1 = M.u1;
  out.u2 = M.u2;
  out.u = static_cast<std::uint32_t>(u);

  std::vector<Formula> top;

  // (a) no cell carries two state marks or two symbol marks
  for (std::uint64_t i = 1; i <= u1; ++i)
    for (std::uint64_t j = i + 1; j <= u1; ++j)
      top.push_back(Formula::lnot(
          Formula::land({omega(u, i, K1, K, L), omega(u, j, K1, K, L)})));
  for (std::uint64_t i = u1 + 1; i <= u; ++i)
    for (std::uint64_t j = i + 1; j <= u; ++j)
      top.push_back(Formula::lnot(
          Formula::land({omega(u, i, K1, K, L), omega(u, j, K1, K, L)})));
  out.layout.aCount = top.size();

  // (b) the first column holds state 1 and no written symbols
  {
    std::vector<Formula> parts{omega(u, 1, K1, Term::var("SK1"), L1)};
    for (std::uint64_t j = 1; j <= u2; ++j)
      parts.push_back(Formula::lnot(omega(u, u1 + j, K1, Term::var("SK1"), L)));
    out.layout.bIndex = top.size();
    top.push_back(detail::with_sigma1("SK1", K1, Formula::land(std::move(parts))));
  }

  // (c) the accept track appears somewhere in the window
  out.layout.cIndex = top.size();
  top.push_back(Formula::exists(
      "K'", Sort::powK,
      Formula::exists("L'", Sort::powL, detail::s_guard(K1, Term::var("L'")),
                      Formula::land({Formula::lt(K1, Term::var("K'")),
                                     Formula::le(Term::var("K'"), K2),
                                     omega(u, 2, K1, Term::var("K'"), Term::var("L'"))}))));

  // (d) exactly one state mark in every column
  {
    auto someState = [&](const Term& at) {
      std::vector<Formula> ds;
      for (std::uint64_t i = 1; i <= u1; ++i) ds.push_back(omega(u, i, K1, K, at));
      return Formula::lor(std::move(ds));
    };
    out.layout.dIndex = top.size();
    top.push_back(Formula::exists(
        "L'", Sort::powL, detail::s_guard(K1, Term::var("L'")),
        Formula::land(
            {someState(Term::var("L'")),
             Formula::forall("L''", Sort::powL, detail::s_guard(K1, Term::var("L''")),
                             Formula::implies(someState(Term::var("L''")),
                                              Formula::eq(Term::var("L'"),
                                                          Term::var("L''"))))})));
  }

  // successor-cell targets for a transition rule applied at (K, L)
  auto ruleTargets = [&](const TmRule& r) {
    const Term SK = Term::var("SK");
    Formula symbolPart = omega(u, u1 + r.symbol, K1, SK, L);
    Formula statePart =
        r.move > 0
            ? Formula::exists("SL", Sort::powL,
                              detail::sigma2_guard(K1, L, Term::var("SL")),
                              omega(u, r.state, K1, SK, Term::var("SL")))
            : Formula::exists(
                  "PL", Sort::powL,
                  Formula::land({detail::s_guard(K1, Term::var("PL")),
                                 detail::sigma2_guard(K1, Term::var("PL"), L)}),
                  omega(u, r.state, K1, SK, Term::var("PL")));
    return detail::with_sigma1(
        "SK", K, Formula::land({std::move(symbolPart), std::move(statePart)}));
  };
  auto noState = [&] {
    std::vector<Formula> ns;
    for (std::uint64_t i = 1; i <= u1; ++i)
      ns.push_back(Formula::lnot(omega(u, i, K1, K, L)));
    return Formula::land(std::move(ns));
  };

  // (e) symbol marks persist under the absent head and transition under it
  out.layout.eBegin = top.size();
  for (std::uint64_t j = 1; j <= u2; ++j) {
    std::vector<Formula> rhs;
    rhs.push_back(Formula::implies(
        noState(),
        detail::with_sigma1("SK", K, omega(u, u1 + j, K1, Term::var("SK"), L))));
    for (std::uint64_t i = 1; i <= u1; ++i)
      rhs.push_back(Formula::implies(
          omega(u, i, K1, K, L),
          ruleTargets(M.rule(static_cast<std::uint32_t>(i),
                             static_cast<std::uint32_t>(j)))));
    top.push_back(Formula::implies(omega(u, u1 + j, K1, K, L),
                                   Formula::land(std::move(rhs))));
  }
  out.layout.eCount = top.size() - out.layout.eBegin;

  // blank-read transitions: a head over an unmarked cell steps by the
  // blank rule (blank-extended machines only)
  out.layout.blankBegin = top.size();
  if (M.blankEnabled) {
    for (std::uint64_t i = 1; i <= u1; ++i) {
      std::vector<Formula> lhs{omega(u, i, K1, K, L)};
      for (std::uint64_t j = 1; j <= u2; ++j)
        lhs.push_back(Formula::lnot(omega(u, u1 + j, K1, K, L)));
      top.push_back(Formula::implies(
          Formula::land(std::move(lhs)),
          ruleTargets(M.rule(static_cast<std::uint32_t>(i), 0))));
    }
  }
  out.layout.blankCount = top.size() - out.layout.blankBegin;

  Formula range = Formula::land({Formula::lt(K1, K), Formula::le(K, K2),
                                 Formula::le(L1, L), Formula::lt(L, L2)});
  Formula inner = Formula::implies(std::move(range), Formula::land(std::move(top)));
  Formula overL = Formula::forall("L", Sort::powL, detail::s_guard(K1, L),
                                  std::move(inner));
  out.formula = Formula::forall("K", Sort::powK, std::move(overL));
  return out;
}

inline Formula build_phi(const TuringMachine& M) {
  Formula theta = build_theta(M).formula;
  Formula inD = Formula::call("InD", {},
                              {Term::var("K1"), Term::var("K2"), Term::var("L1"),
                               Term::var("L2")});
  return Formula::exists(
      "K1", Sort::powK,
      Formula::exists(
          "K2", Sort::powK,
          Formula::exists("L1", Sort::powL,
                          Formula::exists("L2", Sort::powL, std::move(inD),
                                          std::move(theta)))));
}

// forall u exists v: every k-power/l-power pair beyond v differs by more
// than u. True exactly when the bases are multiplicatively independent.
inline Formula build_baker_sentence() {
  Formula inner = Formula::implies(
      Formula::lor({Formula::le(Term::var("v"), Term::var("x")),
                    Formula::le(Term::var("v"), Term::var("y"))}),
      Formula::call("AbsDiffGt", {}, {Term::var("x"), Term::var("y"), Term::var("u")}));
  return Formula::forall(
      "u", Sort::nat,
      Formula::exists(
          "v", Sort::nat,
          Formula::forall("x", Sort::powK,
                          Formula::forall("y", Sort::powL, std::move(inner)))));
}

// ------------------------------------------------------- macro expansion ---

enum class SExpansion { lambdaForm, intervalForm };

struct ExpandOptions {
  SExpansion sForm = SExpansion::lambdaForm;
  std::uint64_t thetaLimit = 64;  // largest Theta count accepted
  std::uint32_t k = 0;            // needed by the interval form only
};

namespace detail {

class MacroExpander {
 public:
  explicit MacroExpander(const ExpandOptions& opt) : opt_(opt) {}

  Formula expand(const Formula& f) {
    if (f.kind == FormulaKind::macro) return expand(instantiate(f));
    Formula out = f;
    out.kids.clear();
    for (const auto& k : f.kids) out.kids.push_back(expand(k));
    return out;
  }

 private:
  ExpandOptions opt_;
  std::uint64_t gensym_ = 0;

  std::string fresh() { return "G" + std::to_string(gensym_++); }

  static Formula lambda_of(const Term& y, const Term& z, const std::string& w) {
    // z is the largest power of k at most y
    return Formula::land({Formula::pow_k(z), Formula::le(z, y),
                          Formula::forall(w, Sort::powK,
                                          Formula::implies(Formula::le(Term::var(w), y),
                                                           Formula::le(Term::var(w), z)))});
  }

  Formula instantiate(const Formula& f) {
    check_macro_shape(f);
    const auto& n = f.macroName;
    const auto& a = f.terms;
    if (n == "Lambda") return lambda_of(a[0], a[1], fresh());
    if (n == "S") return expand_s(a[0], a[1]);
    if (n == "Sigma1") return expand_sigma1(f.macroParams[0], a[0], a[1]);
    if (n == "Sigma2") return expand_sigma2(a[0], a[1], a[2]);
    if (n == "InD")
      return Formula::land({Formula::pow_k(a[0]), Formula::pow_k(a[1]),
                            Formula::pow_l(a[2]), Formula::pow_l(a[3]),
                            Formula::le(a[0], a[1]), Formula::le(a[2], a[3]),
                            Formula::call("S", {}, {a[0], a[2]}),
                            Formula::call("S", {}, {a[0], a[3]})});
    if (n == "Theta") return expand_theta(f.macroParams[0], a[0], a[1], a[2]);
    if (n == "Omega") return expand_omega(f.macroParams[0], f.macroParams[1], a[0], a[1], a[2]);
    if (n == "AbsDiffGt") return expand_absdiff(a[0], a[1], a[2]);
    throw ValidationError("unknown macro: " + n);
  }

  Formula expand_s(const Term& x, const Term& y) {
    if (opt_.sForm == SExpansion::intervalForm) {
      if (opt_.k < 2)
        throw DomainError("interval-form S expansion needs the base k in options");
      const std::string z = fresh();
      Term kx = x;
      for (std::uint32_t i = 1; i < opt_.k; ++i) kx = Term::add(kx, x);
      return Formula::land(
          {Formula::pow_k(x), Formula::pow_l(y),
           Formula::exists(z, Sort::powK,
                           Formula::land({Formula::lt(x, Term::var(z)),
                                          Formula::le(Term::add(Term::var(z), x), y),
                                          Formula::lt(y, Term::add(Term::var(z), kx))}))});
    }
    // definitional form: the second digit power of y is x
    const std::string z = fresh(), w = fresh();
    return Formula::land(
        {Formula::pow_k(x), Formula::pow_l(y),
         Formula::exists(
             z, Sort::powK, Formula::call("Lambda", {}, {y, Term::var(z)}),
             Formula::land(
                 {Formula::lt(x, Term::var(z)),
                  Formula::exists(w, Sort::nat,
                                  Formula::eq(Term::add(Term::var(z), Term::var(w)), y),
                                  Formula::call("Lambda", {}, {Term::var(w), x}))}))});
  }

  Formula succ_k(const Term& a, const Term& b) {
    const std::string w = fresh();
    return Formula::land(
        {Formula::lt(a, b),
         Formula::forall(w, Sort::powK,
                         Formula::implies(Formula::lt(a, Term::var(w)),
                                          Formula::le(b, Term::var(w))))});
  }

  Formula expand_sigma1(std::int64_t i, const Term& x, const Term& z) {
    if (i < 0) throw DomainError("Sigma1 iterate must be nonnegative");
    if (i == 0)
      return Formula::land({Formula::pow_k(x), Formula::pow_k(z), Formula::eq(x, z)});
    Formula chain = succ_k(x, z);
    if (i > 1) {
      // x < g1 < ... < g_{i-1} < z, each step the immediate k-successor
      std::vector<std::string> g;
      for (std::int64_t s = 1; s < i; ++s) g.push_back(fresh());
      Formula inner = succ_k(Term::var(g.back()), z);
      for (std::int64_t s = i - 2; s >= 0; --s) {
        const Term prev = s == 0 ? x : Term::var(g[s - 1]);
        inner = Formula::exists(g[s], Sort::powK, succ_k(prev, Term::var(g[s])),
                                std::move(inner));
      }
      chain = std::move(inner);
    }
    return Formula::land({Formula::pow_k(x), Formula::pow_k(z), std::move(chain)});
  }

  Formula above_in_s(const Term& K1, const Term& L, const std::string& w) {
    return Formula::land({Formula::call("S", {}, {K1, Term::var(w)}),
                          Formula::lt(L, Term::var(w))});
  }

  Formula expand_sigma2(const Term& K1, const Term& L, const Term& z) {
    // z is the least element of S(K1) above L, or 0 when there is none
    const std::string w1 = fresh(), w2 = fresh();
    Formula succCase = Formula::land(
        {Formula::pow_l(z), Formula::call("S", {}, {K1, z}), Formula::lt(L, z),
         Formula::forall(w1, Sort::powL, above_in_s(K1, L, w1),
                         Formula::le(z, Term::var(w1)))});
    Formula noneCase = Formula::land(
        {Formula::eq(z, Term::lit(0)),
         Formula::lnot(Formula::exists(w2, Sort::powL, above_in_s(K1, L, w2),
                                       Formula::truthval(true)))});
    return Formula::lor({std::move(succCase), std::move(noneCase)});
  }

  Formula in_window(const Term& K, const Term& L, const Term& hi, const Term& v) {
    return Formula::land({Formula::call("S", {}, {K, v}), Formula::lt(L, v),
                          Formula::lt(v, hi)});
  }

  Formula expand_theta(std::int64_t c, const Term& K1, const Term& K, const Term& L) {
    if (c < 0) throw DomainError("Theta count must be nonnegative");
    if (static_cast<std::uint64_t>(c) >= opt_.thetaLimit)
      throw ExpansionTooLarge("Theta count " + std::to_string(c) +
                              " exceeds the expansion limit");
    const std::string sg = fresh();
    const Term sgT = Term::var(sg);
    // guard: sg is the immediate S(K1)-successor of L
    const std::string ws = fresh();
    Formula succGuard = Formula::land(
        {Formula::call("S", {}, {K1, sgT}), Formula::lt(L, sgT),
         Formula::forall(ws, Sort::powL, above_in_s(K1, L, ws),
                         Formula::le(sgT, Term::var(ws)))});
    Formula counted;
    if (c == 0) {
      const std::string w = fresh();
      counted = Formula::forall(w, Sort::powL, in_window(K, L, sgT, Term::var(w)),
                                Formula::truthval(false));
    } else {
      std::vector<std::string> cs;
      for (std::int64_t i = 0; i < c; ++i) cs.push_back(fresh());
      std::vector<Formula> inner;
      for (std::size_t i = 0; i < cs.size(); ++i)
        for (std::size_t j = i + 1; j < cs.size(); ++j)
          inner.push_back(
              Formula::lnot(Formula::eq(Term::var(cs[i]), Term::var(cs[j]))));
      const std::string w = fresh();
      std::vector<Formula> cover;
      for (const auto& cv : cs) cover.push_back(Formula::eq(Term::var(w), Term::var(cv)));
      inner.push_back(Formula::forall(w, Sort::powL, in_window(K, L, sgT, Term::var(w)),
                                      Formula::lor(std::move(cover))));
      counted = Formula::land(std::move(inner));
      for (std::size_t i = cs.size(); i-- > 0;)
        counted = Formula::exists(cs[i], Sort::powL,
                                  in_window(K, L, sgT, Term::var(cs[i])),
                                  std::move(counted));
    }
    Formula withSucc = Formula::exists(sg, Sort::powL, std::move(succGuard),
                                       std::move(counted));
    Formula base = Formula::call("S", {}, {K1, L});
    if (c == 0) {
      // no successor means an empty window, which also counts zero
      const std::string w = fresh();
      Formula none =
          Formula::lnot(Formula::exists(w, Sort::powL, above_in_s(K1, L, w),
                                        Formula::truthval(true)));
      return Formula::land(
          {std::move(base), Formula::lor({std::move(none), std::move(withSucc)})});
    }
    return Formula::land({std::move(base), std::move(withSucc)});
  }

  Formula expand_omega(std::int64_t u, std::int64_t v, const Term& K1, const Term& K,
                       const Term& L) {
    if (u < 1 || v < 1 || v > u) throw DomainError("Omega indices out of range");
    if (u >= 63) throw ExpansionTooLarge("Omega width too large to enumerate");
    std::vector<Formula> cases;
    for (std::int64_t c = 0; c < (std::int64_t{1} << u); ++c)
      if (c & (std::int64_t{1} << (v - 1)))
        cases.push_back(Formula::call("Theta", {c}, {K1, K, L}));
    return Formula::lor(std::move(cases));
  }

  Formula expand_absdiff(const Term& x, const Term& y, const Term& u) {
    const std::string d1 = fresh(), d2 = fresh();
    Formula geCase = Formula::land(
        {Formula::le(y, x),
         Formula::exists(d1, Sort::nat,
                         Formula::eq(Term::add(y, Term::var(d1)), x),
                         Formula::lt(u, Term::var(d1)))});
    Formula ltCase = Formula::land(
        {Formula::lt(x, y),
         Formula::exists(d2, Sort::nat,
                         Formula::eq(Term::add(x, Term::var(d2)), y),
                         Formula::lt(u, Term::var(d2)))});
    return Formula::lor({std::move(geCase), std::move(ltCase)});
  }
};

}  // namespace detail

inline Formula expand_macros(const Formula& f, const ExpandOptions& opt = {}) {
  return detail::MacroExpander(opt).expand(f);
}

}  // namespace forge
