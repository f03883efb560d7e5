#pragma once
// First-order formula AST over (N, +) with power predicates, three
// quantifier sorts, and named macro atoms for the derived relations.
//
// A quantifier may carry a guard formula. Guards are relativization sugar:
//   forall x (guard) body   means   forall x (guard -> body)
//   exists x (guard) body   means   exists x (guard & body)
// Keeping the guard structural (rather than folding it into the body) lets
// the bounded evaluator narrow enumeration from it; the rendered forms make
// the sugar explicit.
//
// Macro atoms stand for definable relations (Lambda, S, Sigma1^i, Sigma2,
// InD, Theta_c, Omega_{u,v}, AbsDiffGt). expand_macros (compile.hpp)
// rewrites them into the core signature; the evaluator can also interpret
// them directly.

#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"

namespace forge {

// ---------------------------------------------------------------- terms ---

enum class TermKind { variable, constant, sum };

struct Term {
  TermKind kind = TermKind::constant;
  std::string name;        // variable
  Nat value = 0;           // constant
  std::vector<Term> kids;  // sum: exactly 2

  static Term var(std::string n) {
    Term t;
    t.kind = TermKind::variable;
    t.name = std::move(n);
    return t;
  }
  static Term lit(Nat v) {
    Term t;
    t.kind = TermKind::constant;
    t.value = std::move(v);
    return t;
  }
  static Term add(Term a, Term b) {
    Term t;
    t.kind = TermKind::sum;
    t.kids.push_back(std::move(a));
    t.kids.push_back(std::move(b));
    return t;
  }
};

inline bool operator==(const Term& a, const Term& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::variable: return a.name == b.name;
    case TermKind::constant: return a.value == b.value;
    case TermKind::sum: return a.kids[0] == b.kids[0] && a.kids[1] == b.kids[1];
  }
  return false;
}

// ------------------------------------------------------------- formulas ---

enum class Sort { powK, powL, nat };

enum class FormulaKind {
  truth,    // constant true/false
  eq, lt, le,       // binary term atoms
  powK, powL,       // unary power-membership atoms
  lnot,             // 1 kid
  land, lor,        // n-ary (>= 1 kid)
  implies,          // 2 kids
  forall, exists,   // var, sort, optional guard kid, body kid
  macro             // macroName, macroParams, terms as args
};

struct Formula {
  FormulaKind kind = FormulaKind::truth;
  bool truthValue = true;
  std::vector<Term> terms;
  std::vector<Formula> kids;  // quantifiers: [body] or [guard, body]
  std::string var;
  Sort sort = Sort::nat;
  bool hasGuard = false;
  std::string macroName;
  std::vector<std::int64_t> macroParams;

  static Formula truthval(bool v) {
    Formula f;
    f.kind = FormulaKind::truth;
    f.truthValue = v;
    return f;
  }
  static Formula atom(FormulaKind k, Term a, Term b) {
    Formula f;
    f.kind = k;
    f.terms.push_back(std::move(a));
    f.terms.push_back(std::move(b));
    return f;
  }
  static Formula eq(Term a, Term b) { return atom(FormulaKind::eq, std::move(a), std::move(b)); }
  static Formula lt(Term a, Term b) { return atom(FormulaKind::lt, std::move(a), std::move(b)); }
  static Formula le(Term a, Term b) { return atom(FormulaKind::le, std::move(a), std::move(b)); }
  static Formula pow_k(Term t) {
    Formula f;
    f.kind = FormulaKind::powK;
    f.terms.push_back(std::move(t));
    return f;
  }
  static Formula pow_l(Term t) {
    Formula f;
    f.kind = FormulaKind::powL;
    f.terms.push_back(std::move(t));
    return f;
  }
  static Formula lnot(Formula g) {
    Formula f;
    f.kind = FormulaKind::lnot;
    f.kids.push_back(std::move(g));
    return f;
  }
  static Formula junction(FormulaKind k, std::vector<Formula> gs) {
    if (gs.empty()) throw DomainError("junction needs at least one conjunct");
    if (gs.size() == 1) return std::move(gs[0]);
    Formula f;
    f.kind = k;
    f.kids = std::move(gs);
    return f;
  }
  static Formula land(std::vector<Formula> gs) { return junction(FormulaKind::land, std::move(gs)); }
  static Formula lor(std::vector<Formula> gs) { return junction(FormulaKind::lor, std::move(gs)); }
  static Formula implies(Formula a, Formula b) {
    Formula f;
    f.kind = FormulaKind::implies;
    f.kids.push_back(std::move(a));
    f.kids.push_back(std::move(b));
    return f;
  }
  static Formula quant(FormulaKind k, std::string v, Sort s, Formula body) {
    Formula f;
    f.kind = k;
    f.var = std::move(v);
    f.sort = s;
    f.kids.push_back(std::move(body));
    return f;
  }
  static Formula quant(FormulaKind k, std::string v, Sort s, Formula guard, Formula body) {
    Formula f;
    f.kind = k;
    f.var = std::move(v);
    f.sort = s;
    f.hasGuard = true;
    f.kids.push_back(std::move(guard));
    f.kids.push_back(std::move(body));
    return f;
  }
  static Formula forall(std::string v, Sort s, Formula body) {
    return quant(FormulaKind::forall, std::move(v), s, std::move(body));
  }
  static Formula forall(std::string v, Sort s, Formula guard, Formula body) {
    return quant(FormulaKind::forall, std::move(v), s, std::move(guard), std::move(body));
  }
  static Formula exists(std::string v, Sort s, Formula body) {
    return quant(FormulaKind::exists, std::move(v), s, std::move(body));
  }
  static Formula exists(std::string v, Sort s, Formula guard, Formula body) {
    return quant(FormulaKind::exists, std::move(v), s, std::move(guard), std::move(body));
  }
  static Formula call(std::string name, std::vector<std::int64_t> params,
                      std::vector<Term> args) {
    Formula f;
    f.kind = FormulaKind::macro;
    f.macroName = std::move(name);
    f.macroParams = std::move(params);
    f.terms = std::move(args);
    return f;
  }

  const Formula& body() const { return kids[hasGuard ? 1 : 0]; }
  const Formula& guard() const {
    if (!hasGuard) throw DomainError("formula has no guard");
    return kids[0];
  }
};

// macro signature table: name -> (param count, arg count)
inline const std::map<std::string, std::pair<int, int>>& macro_signatures() {
  static const std::map<std::string, std::pair<int, int>> sigs = {
      {"Lambda", {0, 2}},  {"S", {0, 2}},        {"Sigma1", {1, 2}},
      {"Sigma2", {0, 3}},  {"InD", {0, 4}},      {"Theta", {1, 3}},
      {"Omega", {2, 3}},   {"AbsDiffGt", {0, 3}},
  };
  return sigs;
}

inline void check_macro_shape(const Formula& f) {
  const auto it = macro_signatures().find(f.macroName);
  if (it == macro_signatures().end())
    throw ValidationError("unknown macro: " + f.macroName);
  if (static_cast<int>(f.macroParams.size()) != it->second.first ||
      static_cast<int>(f.terms.size()) != it->second.second)
    throw ValidationError("macro " + f.macroName + " has wrong arity");
}

// ------------------------------------------------------ sexpr rendering ---

namespace detail {

inline void render_term_sexpr(const Term& t, std::string& out) {
  switch (t.kind) {
    case TermKind::variable: out += t.name; return;
    case TermKind::constant: out += t.value.str(); return;
    case TermKind::sum:
      out += "(+ ";
      render_term_sexpr(t.kids[0], out);
      out += ' ';
      render_term_sexpr(t.kids[1], out);
      out += ')';
      return;
  }
}

inline const char* sort_name(Sort s) {
  switch (s) {
    case Sort::powK: return "powK";
    case Sort::powL: return "powL";
    case Sort::nat: return "nat";
  }
  return "nat";
}

inline void render_sexpr_rec(const Formula& f, std::string& out) {
  auto terms = [&](std::size_t from = 0) {
    for (std::size_t i = from; i < f.terms.size(); ++i) {
      out += ' ';
      render_term_sexpr(f.terms[i], out);
    }
  };
  switch (f.kind) {
    case FormulaKind::truth: out += f.truthValue ? "true" : "false"; return;
    case FormulaKind::eq: out += "(="; terms(); out += ')'; return;
    case FormulaKind::lt: out += "(<"; terms(); out += ')'; return;
    case FormulaKind::le: out += "(<="; terms(); out += ')'; return;
    case FormulaKind::powK: out += "(powK"; terms(); out += ')'; return;
    case FormulaKind::powL: out += "(powL"; terms(); out += ')'; return;
    case FormulaKind::lnot:
      out += "(not ";
      render_sexpr_rec(f.kids[0], out);
      out += ')';
      return;
    case FormulaKind::land:
    case FormulaKind::lor:
      out += f.kind == FormulaKind::land ? "(and" : "(or";
      for (const auto& k : f.kids) {
        out += ' ';
        render_sexpr_rec(k, out);
      }
      out += ')';
      return;
    case FormulaKind::implies:
      out += "(-> ";
      render_sexpr_rec(f.kids[0], out);
      out += ' ';
      render_sexpr_rec(f.kids[1], out);
      out += ')';
      return;
    case FormulaKind::forall:
    case FormulaKind::exists:
      out += f.kind == FormulaKind::forall ? "(forall (" : "(exists (";
      out += f.var;
      out += ' ';
      out += sort_name(f.sort);
      if (f.hasGuard) {
        out += ' ';
        render_sexpr_rec(f.guard(), out);
      }
      out += ") ";
      render_sexpr_rec(f.body(), out);
      out += ')';
      return;
    case FormulaKind::macro:
      out += "(macro ";
      out += f.macroName;
      for (const auto p : f.macroParams) out += ' ' + std::to_string(p);
      terms();
      out += ')';
      return;
  }
}

}  // namespace detail

inline std::string render_sexpr(const Formula& f) {
  std::string out;
  detail::render_sexpr_rec(f, out);
  return out;
}

inline std::string render_sexpr(const Term& t) {
  std::string out;
  detail::render_term_sexpr(t, out);
  return out;
}

// ------------------------------------------------------ human rendering ---

namespace detail {

inline void render_term_human(const Term& t, std::string& out) {
  switch (t.kind) {
    case TermKind::variable: out += t.name; return;
    case TermKind::constant: out += t.value.str(); return;
    case TermKind::sum:
      render_term_human(t.kids[0], out);
      out += " + ";
      render_term_human(t.kids[1], out);
      return;
  }
}

inline void render_human_rec(const Formula& f, std::string& out) {
  auto bin = [&](const char* op) {
    render_term_human(f.terms[0], out);
    out += op;
    render_term_human(f.terms[1], out);
  };
  switch (f.kind) {
    case FormulaKind::truth: out += f.truthValue ? "true" : "false"; return;
    case FormulaKind::eq: bin(" = "); return;
    case FormulaKind::lt: bin(" < "); return;
    case FormulaKind::le: bin(" <= "); return;
    case FormulaKind::powK:
      out += "powK(";
      render_term_human(f.terms[0], out);
      out += ')';
      return;
    case FormulaKind::powL:
      out += "powL(";
      render_term_human(f.terms[0], out);
      out += ')';
      return;
    case FormulaKind::lnot:
      out += "!(";
      render_human_rec(f.kids[0], out);
      out += ')';
      return;
    case FormulaKind::land:
    case FormulaKind::lor: {
      const char* op = f.kind == FormulaKind::land ? " & " : " | ";
      out += '(';
      for (std::size_t i = 0; i < f.kids.size(); ++i) {
        if (i) out += op;
        render_human_rec(f.kids[i], out);
      }
      out += ')';
      return;
    }
    case FormulaKind::implies:
      out += '(';
      render_human_rec(f.kids[0], out);
      out += " -> ";
      render_human_rec(f.kids[1], out);
      out += ')';
      return;
    case FormulaKind::forall:
    case FormulaKind::exists:
      out += f.kind == FormulaKind::forall ? "forall " : "exists ";
      out += f.var;
      out += ':';
      out += sort_name(f.sort);
      if (f.hasGuard) {
        out += " | ";
        render_human_rec(f.guard(), out);
      }
      out += ". ";
      render_human_rec(f.body(), out);
      return;
    case FormulaKind::macro: {
      out += f.macroName;
      if (!f.macroParams.empty()) {
        out += '[';
        for (std::size_t i = 0; i < f.macroParams.size(); ++i) {
          if (i) out += ',';
          out += std::to_string(f.macroParams[i]);
        }
        out += ']';
      }
      out += '(';
      for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) out += ", ";
        render_term_human(f.terms[i], out);
      }
      out += ')';
      return;
    }
  }
}

}  // namespace detail

inline std::string render_human(const Formula& f) {
  std::string out;
  detail::render_human_rec(f, out);
  return out;
}

// -------------------------------------------------------- sexpr parsing ---

namespace detail {

struct Token {
  std::string text;
  std::size_t offset = 0;
};

inline std::vector<Token> lex_sexpr(const std::string& src) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ';') {  // comment to end of line
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      toks.push_back({std::string(1, c), i});
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < src.size()) {
      const char d = src[i];
      if (d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == '(' || d == ')' || d == ';')
        break;
      ++i;
    }
    toks.push_back({src.substr(start, i - start), start});
  }
  return toks;
}

class SexprParser {
 public:
  explicit SexprParser(const std::string& src) : toks_(lex_sexpr(src)) {}

  Formula parse_formula_all() {
    Formula f = parse_formula();
    if (pos_ != toks_.size())
      throw ParseError("trailing input after formula", toks_[pos_].offset);
    return f;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) {
    const std::size_t off = pos_ < toks_.size() ? toks_[pos_].offset
                            : toks_.empty()    ? 0
                                               : toks_.back().offset + toks_.back().text.size();
    throw ParseError(msg, off);
  }
  const Token& peek() {
    if (pos_ >= toks_.size()) fail("unexpected end of input");
    return toks_[pos_];
  }
  Token next() {
    Token t = peek();
    ++pos_;
    return t;
  }
  void expect(const char* text) {
    if (peek().text != text) fail(std::string("expected '") + text + "'");
    ++pos_;
  }
  static bool is_number(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (c < '0' || c > '9') return false;
    return true;
  }
  static bool is_name(const std::string& s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''))
        return false;
    return true;
  }

  Term parse_term() {
    const Token t = next();
    if (t.text == "(") {
      if (peek().text != "+") fail("expected '+' in compound term");
      ++pos_;
      Term a = parse_term();
      Term b = parse_term();
      expect(")");
      return Term::add(std::move(a), std::move(b));
    }
    if (is_number(t.text)) return Term::lit(Nat(t.text));
    if (is_name(t.text)) return Term::var(t.text);
    --pos_;
    fail("expected a term");
  }

  Sort parse_sort() {
    const Token t = next();
    if (t.text == "powK") return Sort::powK;
    if (t.text == "powL") return Sort::powL;
    if (t.text == "nat") return Sort::nat;
    --pos_;
    fail("expected a sort (powK, powL, nat)");
  }

  Formula parse_formula() {
    const Token t = next();
    if (t.text == "true") return Formula::truthval(true);
    if (t.text == "false") return Formula::truthval(false);
    if (t.text != "(") {
      --pos_;
      fail("expected a formula");
    }
    const Token head = next();
    const std::string& h = head.text;
    auto finishAtoms = [&](FormulaKind k, int arity) {
      Formula f;
      f.kind = k;
      for (int i = 0; i < arity; ++i) f.terms.push_back(parse_term());
      expect(")");
      return f;
    };
    if (h == "=") return finishAtoms(FormulaKind::eq, 2);
    if (h == "<") return finishAtoms(FormulaKind::lt, 2);
    if (h == "<=") return finishAtoms(FormulaKind::le, 2);
    if (h == "powK") return finishAtoms(FormulaKind::powK, 1);
    if (h == "powL") return finishAtoms(FormulaKind::powL, 1);
    if (h == "not") {
      Formula g = parse_formula();
      expect(")");
      return Formula::lnot(std::move(g));
    }
    if (h == "and" || h == "or") {
      std::vector<Formula> kids;
      while (peek().text != ")") kids.push_back(parse_formula());
      ++pos_;
      if (kids.empty()) fail("empty junction");
      return Formula::junction(h == "and" ? FormulaKind::land : FormulaKind::lor,
                               std::move(kids));
    }
    if (h == "->") {
      Formula a = parse_formula();
      Formula b = parse_formula();
      expect(")");
      return Formula::implies(std::move(a), std::move(b));
    }
    if (h == "forall" || h == "exists") {
      expect("(");
      const Token v = next();
      if (!is_name(v.text)) {
        --pos_;
        fail("expected a variable name");
      }
      const Sort s = parse_sort();
      Formula guard;
      bool hasGuard = false;
      if (peek().text != ")") {
        guard = parse_formula();
        hasGuard = true;
      }
      expect(")");
      Formula body = parse_formula();
      expect(")");
      const FormulaKind k = h == "forall" ? FormulaKind::forall : FormulaKind::exists;
      return hasGuard
                 ? Formula::quant(k, v.text, s, std::move(guard), std::move(body))
                 : Formula::quant(k, v.text, s, std::move(body));
    }
    if (h == "macro") {
      const Token name = next();
      if (!is_name(name.text)) {
        --pos_;
        fail("expected a macro name");
      }
      const auto it = macro_signatures().find(name.text);
      if (it == macro_signatures().end()) {
        --pos_;
        fail("unknown macro: " + name.text);
      }
      Formula f;
      f.kind = FormulaKind::macro;
      f.macroName = name.text;
      for (int i = 0; i < it->second.first; ++i) {
        const Token p = next();
        if (!is_number(p.text) && !(p.text.size() > 1 && p.text[0] == '-' &&
                                    is_number(p.text.substr(1)))) {
          --pos_;
          fail("expected an integer macro parameter");
        }
        f.macroParams.push_back(std::stoll(p.text));
      }
      for (int i = 0; i < it->second.second; ++i) f.terms.push_back(parse_term());
      expect(")");
      return f;
    }
    pos_ -= 1;
    fail("unknown formula head: " + h);
  }
};

}  // namespace detail

// parse a formula from its s-expression rendering; errors carry the byte
// offset of the offending token
inline Formula parse_sexpr(const std::string& src) {
  return detail::SexprParser(src).parse_formula_all();
}

// ------------------------------------------------------ small utilities ---

inline void collect_free_vars(const Term& t, const std::vector<std::string>& bound,
                              std::vector<std::string>& out) {
  switch (t.kind) {
    case TermKind::variable: {
      for (const auto& b : bound)
        if (b == t.name) return;
      for (const auto& o : out)
        if (o == t.name) return;
      out.push_back(t.name);
      return;
    }
    case TermKind::constant: return;
    case TermKind::sum:
      collect_free_vars(t.kids[0], bound, out);
      collect_free_vars(t.kids[1], bound, out);
      return;
  }
}

inline void collect_free_vars(const Formula& f, std::vector<std::string>& bound,
                              std::vector<std::string>& out) {
  for (const auto& t : f.terms) collect_free_vars(t, bound, out);
  if (f.kind == FormulaKind::forall || f.kind == FormulaKind::exists) {
    bound.push_back(f.var);
    for (const auto& k : f.kids) collect_free_vars(k, bound, out);
    bound.pop_back();
    return;
  }
  for (const auto& k : f.kids) collect_free_vars(k, bound, out);
}

inline std::vector<std::string> free_vars(const Formula& f) {
  std::vector<std::string> bound, out;
  collect_free_vars(f, bound, out);
  return out;
}

inline std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  for (const auto& k : f.kids) n += node_count(k);
  return n;
}

}  // namespace forge
