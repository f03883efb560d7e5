#pragma once
// Normalized Turing machines, simulation, the step/tape grid encoding, the
// consistency conditions over those grids, and model-witness construction.
//
// Machines are normalized: states 1..u1 with start 1 and accept 2, symbols
// 1..u2, and moves in {-1, +1}. Symbol 0 stands for the blank cell; in
// blank-extended mode delta also covers reads of 0 (writes are always real
// symbols — a grid cell mark means "some symbol is written there", so blank
// is representable only as absence). In verbatim mode the blank column is
// absent, which means a verbatim machine cannot take a single step from the
// empty tape; it exists to mirror the bare condition list exactly.
//
// Grids: A_i collects (step, head) pairs for state i, B_j collects
// (step, cell) pairs where symbol j is on the tape. The conditions checked
// here are the halting-characterization list; (6') is the blank-extended
// variant of the transition condition and only applies in that mode.

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "forge/base.hpp"
#include "forge/errors.hpp"
#include "forge/grid.hpp"
#include "forge/pattern.hpp"
#include "forge/radix.hpp"

namespace forge {

struct TmRule {
  std::uint32_t state = 0;   // target state
  std::uint32_t symbol = 0;  // written symbol, 1..u2 (never blank)
  std::int8_t move = 0;      // -1 or +1
};

struct TuringMachine {
  std::uint32_t u1 = 0;
  std::uint32_t u2 = 0;
  bool blankEnabled = true;
  // delta[q-1][a]: a = 0 is the blank read (blank mode only)
  std::vector<std::vector<std::optional<TmRule>>> delta;

  const TmRule& rule(std::uint32_t q, std::uint32_t a) const {
    if (q < 1 || q > u1 || a > u2) throw DomainError("TuringMachine::rule: out of range");
    const auto& r = delta[q - 1][a];
    if (!r) throw DomainError("TuringMachine::rule: undefined transition");
    return *r;
  }
};

// Line format (see docs/formats.md):
//   states <u1> symbols <u2> mode <blank|verbatim>
//   <q> <a> -> <q'> <a'> <m>      with a in {1..u2, _}, a' in {1..u2}, m in {L, R}
// '#' starts a comment; blank lines ignored. Accept-state rows are optional
// and default to a bounce (2 a -> 2 a L) — simulation stops at state 2, so
// the default is only material to condition checking on padded grids.
inline TuringMachine parse_tm(const std::string& text) {
  TuringMachine M;
  std::istringstream in(text);
  std::string line;
  std::size_t lineNo = 0;
  bool sawHeader = false;
  std::vector<std::tuple<std::uint32_t, std::uint32_t, TmRule, std::size_t>> rules;

  auto fail = [](const std::string& msg, std::size_t ln) -> void {
    throw ParseError(msg + " (line " + std::to_string(ln) + ")", ln);
  };

  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;

    if (!sawHeader) {
      if (tok.size() != 6 || tok[0] != "states" || tok[2] != "symbols" || tok[4] != "mode")
        fail("expected header: states <u1> symbols <u2> mode <blank|verbatim>", lineNo);
      try {
        M.u1 = static_cast<std::uint32_t>(std::stoul(tok[1]));
        M.u2 = static_cast<std::uint32_t>(std::stoul(tok[3]));
      } catch (const std::exception&) {
        fail("header counts must be naturals", lineNo);
      }
      if (tok[5] == "blank") M.blankEnabled = true;
      else if (tok[5] == "verbatim") M.blankEnabled = false;
      else fail("mode must be blank or verbatim", lineNo);
      if (M.u1 < 2) throw ValidationError("machine needs at least 2 states (start 1, accept 2)");
      if (M.u2 < 1) throw ValidationError("machine needs at least 1 symbol");
      M.delta.assign(M.u1, std::vector<std::optional<TmRule>>(M.u2 + 1));
      sawHeader = true;
      continue;
    }

    if (tok.size() != 6 || tok[2] != "->")
      fail("expected rule: <q> <a> -> <q'> <a'> <m>", lineNo);
    auto parseState = [&](const std::string& s) -> std::uint32_t {
      for (char c : s)
        if (c < '0' || c > '9') fail("state must be a natural", lineNo);
      return static_cast<std::uint32_t>(std::stoul(s));
    };
    auto parseSym = [&](const std::string& s, bool allowBlank) -> std::uint32_t {
      if (s == "_") {
        if (!allowBlank) fail("blank symbol not allowed here", lineNo);
        return 0;
      }
      for (char c : s)
        if (c < '0' || c > '9') fail("symbol must be a natural or _", lineNo);
      return static_cast<std::uint32_t>(std::stoul(s));
    };
    const std::uint32_t q = parseState(tok[0]);
    const std::uint32_t a = parseSym(tok[1], /*allowBlank=*/true);
    TmRule r;
    r.state = parseState(tok[3]);
    r.symbol = parseSym(tok[4], /*allowBlank=*/false);
    if (tok[5] == "L") r.move = -1;
    else if (tok[5] == "R") r.move = +1;
    else fail("move must be L or R", lineNo);

    if (q < 1 || q > M.u1) throw ValidationError("rule state out of range (line " + std::to_string(lineNo) + ")");
    if (a > M.u2) throw ValidationError("rule read-symbol out of range (line " + std::to_string(lineNo) + ")");
    if (a == 0 && !M.blankEnabled)
      throw ValidationError("blank read in verbatim mode (line " + std::to_string(lineNo) + ")");
    if (r.state < 1 || r.state > M.u1)
      throw ValidationError("rule target state out of range (line " + std::to_string(lineNo) + ")");
    if (r.symbol < 1 || r.symbol > M.u2)
      throw ValidationError("rule written symbol out of range (line " + std::to_string(lineNo) + ")");
    if (M.delta[q - 1][a])
      throw ValidationError("duplicate rule (line " + std::to_string(lineNo) + ")");
    M.delta[q - 1][a] = r;
  }
  if (!sawHeader) throw ParseError("empty machine description", 0);

  // totality: every non-accept state must cover its full read alphabet;
  // accept-state rows default to a bounce
  for (std::uint32_t q = 1; q <= M.u1; ++q) {
    for (std::uint32_t a = (M.blankEnabled ? 0u : 1u); a <= M.u2; ++a) {
      if (M.delta[q - 1][a]) continue;
      if (q == 2) {
        M.delta[q - 1][a] = TmRule{2, a == 0 ? 1u : a, -1};
        continue;
      }
      throw ValidationError("delta not total: missing rule for state " + std::to_string(q) +
                            ", symbol " + (a == 0 ? std::string("_") : std::to_string(a)));
    }
  }
  return M;
}

struct TmConfig {
  std::uint32_t state = 1;
  std::uint64_t head = 0;
  std::map<std::uint64_t, std::uint32_t> tape;  // absent cell = blank
};

struct Trace {
  bool halted = false;
  std::vector<TmConfig> steps;  // configurations, steps[0] is the start
};

// run from the empty tape; stops on reaching state 2 or after maxSteps
// transitions. A verbatim machine reading blank cannot step (recorded as a
// non-halted one-configuration trace). Left moves at cell 0 clamp to 0.
inline Trace simulate(const TuringMachine& M, std::uint64_t maxSteps) {
  if (maxSteps < 1) throw DomainError("simulate: maxSteps must be >= 1");
  Trace tr;
  TmConfig c;
  tr.steps.push_back(c);
  for (std::uint64_t s = 0; s < maxSteps; ++s) {
    if (c.state == 2) break;
    const auto it = c.tape.find(c.head);
    const std::uint32_t read = it == c.tape.end() ? 0u : it->second;
    if (read == 0 && !M.blankEnabled) break;  // stuck: no blank column
    const TmRule& r = M.rule(c.state, read);
    c.tape[c.head] = r.symbol;
    c.head = (r.move < 0 && c.head == 0) ? 0 : c.head + r.move;
    c.state = r.state;
    tr.steps.push_back(c);
    if (c.state == 2) break;
  }
  tr.halted = (c.state == 2);
  return tr;
}

struct GridWitnessSets {
  std::vector<CellSet> A;  // A[i-1], i = 1..u1
  std::vector<CellSet> B;  // B[j-1], j = 1..u2
  std::uint64_t R1 = 0;    // step rows
  std::uint64_t R2 = 0;    // tape columns
};

// populate grids from a trace; requires a halting trace unless allowPartial
// (the partial form exists so condition reports can exhibit failures of a
// looping machine)
inline GridWitnessSets trace_to_grids(const TuringMachine& M, const Trace& t,
                                      bool allowPartial = false) {
  if (!t.halted && !allowPartial)
    throw NotHalted("trace_to_grids: trace did not reach the accept state");
  if (t.steps.empty()) throw DomainError("trace_to_grids: empty trace");
  GridWitnessSets G;
  G.A.assign(M.u1, {});
  G.B.assign(M.u2, {});
  G.R1 = t.steps.size();
  std::uint64_t maxCell = 0;
  for (std::size_t s = 0; s < t.steps.size(); ++s) {
    const auto& c = t.steps[s];
    maxCell = std::max(maxCell, c.head);
    G.A[c.state - 1].insert({s, c.head});
    for (const auto& [cell, sym] : c.tape) {
      maxCell = std::max(maxCell, cell);
      G.B[sym - 1].insert({s, cell});
    }
  }
  G.R2 = maxCell + 1;
  return G;
}

struct ConditionItem {
  std::string id;      // "1".."6", "6p"
  bool pass = true;
  std::string detail;  // first counterexample on failure
};

struct ConditionReport {
  std::vector<ConditionItem> items;
  bool allPass = true;
};

namespace detail {
inline std::string cell_str(const Cell& c) {
  return "(" + std::to_string(c.first) + "," + std::to_string(c.second) + ")";
}
}  // namespace detail

inline ConditionReport check_conditions(const TuringMachine& M,
                                        const GridWitnessSets& G) {
  ConditionReport rep;
  auto add = [&](std::string id, bool pass, std::string detail) {
    rep.allPass = rep.allPass && pass;
    rep.items.push_back({std::move(id), pass, std::move(detail)});
  };
  auto inAnyA = [&](const Cell& c) -> std::optional<std::uint32_t> {
    for (std::uint32_t i = 1; i <= M.u1; ++i)
      if (G.A[i - 1].count(c)) return i;
    return std::nullopt;
  };
  auto inAnyB = [&](const Cell& c) -> std::optional<std::uint32_t> {
    for (std::uint32_t j = 1; j <= M.u2; ++j)
      if (G.B[j - 1].count(c)) return j;
    return std::nullopt;
  };

  {  // (1) pairwise disjointness and range
    bool pass = true;
    std::string detail;
    auto checkFamily = [&](const std::vector<CellSet>& F, const char* name) {
      for (std::size_t i = 0; pass && i < F.size(); ++i) {
        for (const auto& c : F[i]) {
          if (c.first >= G.R1 || c.second >= G.R2) {
            pass = false;
            detail = std::string(name) + std::to_string(i + 1) + " out of range at " +
                     detail::cell_str(c);
            break;
          }
          for (std::size_t j = i + 1; j < F.size(); ++j)
            if (F[j].count(c)) {
              pass = false;
              detail = std::string(name) + std::to_string(i + 1) + " and " + name +
                       std::to_string(j + 1) + " overlap at " + detail::cell_str(c);
              break;
            }
          if (!pass) break;
        }
      }
    };
    checkFamily(G.A, "A");
    checkFamily(G.B, "B");
    add("1", pass, detail);
  }
  {  // (2) start configuration
    const bool pass = !G.A.empty() && G.A[0].count({0, 0}) > 0;
    add("2", pass, pass ? "" : "(0,0) not in A1");
  }
  {  // (3) empty input tape
    bool pass = true;
    std::string detail;
    for (std::uint32_t j = 1; pass && j <= M.u2; ++j)
      for (const auto& c : G.B[j - 1])
        if (c.first == 0) {
          pass = false;
          detail = "B" + std::to_string(j) + " marks step 0 at " + detail::cell_str(c);
          break;
        }
    add("3", pass, detail);
  }
  {  // (4) acceptance
    const bool pass = M.u1 >= 2 && !G.A[1].empty();
    add("4", pass, pass ? "" : "A2 is empty");
  }
  {  // (5) exactly one head mark per step row
    bool pass = true;
    std::string detail;
    for (std::uint64_t s = 0; pass && s < G.R1; ++s) {
      std::uint64_t count = 0;
      for (std::uint32_t i = 1; i <= M.u1; ++i)
        for (const auto& c : G.A[i - 1])
          if (c.first == s) ++count;
      if (count != 1) {
        pass = false;
        detail = "step row " + std::to_string(s) + " has " + std::to_string(count) +
                 " head marks";
      }
    }
    add("5", pass, detail);
  }
  {  // (6) written-cell propagation (rows with a successor row only)
    bool pass = true;
    std::string detail;
    for (std::uint32_t j = 1; pass && j <= M.u2; ++j) {
      for (const auto& c : G.B[j - 1]) {
        const auto [s, t] = c;
        if (s + 1 >= G.R1) continue;
        const auto headState = inAnyA(c);
        if (!headState) {
          if (!G.B[j - 1].count({s + 1, t})) {
            pass = false;
            detail = "B" + std::to_string(j) + " mark at " + detail::cell_str(c) +
                     " does not persist to the next row";
            break;
          }
        } else {
          const TmRule& r = M.rule(*headState, j);
          if (!G.B[r.symbol - 1].count({s + 1, t})) {
            pass = false;
            detail = "write of symbol " + std::to_string(r.symbol) + " missing at (" +
                     std::to_string(s + 1) + "," + std::to_string(t) + ")";
            break;
          }
          if (r.move < 0 && t == 0) {
            pass = false;
            detail = "transition at " + detail::cell_str(c) + " demands a negative column";
            break;
          }
          const Cell next{s + 1, t + r.move};
          if (!G.A[r.state - 1].count(next)) {
            pass = false;
            detail = "head mark for state " + std::to_string(r.state) + " missing at " +
                     detail::cell_str(next);
            break;
          }
        }
      }
    }
    add("6", pass, detail);
  }
  if (M.blankEnabled) {  // (6') blank-read propagation
    bool pass = true;
    std::string detail;
    for (std::uint64_t s = 0; pass && s + 1 < G.R1; ++s) {
      for (std::uint32_t i = 1; i <= M.u1; ++i) {
        for (const auto& c : G.A[i - 1]) {
          if (c.first != s) continue;
          if (inAnyB(c)) continue;  // head over a written cell: handled by (6)
          const TmRule& r = M.rule(i, 0);
          if (!G.B[r.symbol - 1].count({s + 1, c.second})) {
            pass = false;
            detail = "blank-read write missing at (" + std::to_string(s + 1) + "," +
                     std::to_string(c.second) + ")";
            break;
          }
          if (r.move < 0 && c.second == 0) {
            pass = false;
            detail = "blank-read transition at " + detail::cell_str(c) +
                     " demands a negative column";
            break;
          }
          const Cell next{s + 1, c.second + r.move};
          if (!G.A[r.state - 1].count(next)) {
            pass = false;
            detail = "blank-read head mark for state " + std::to_string(r.state) +
                     " missing at " + detail::cell_str(next);
            break;
          }
        }
        if (!pass) break;
      }
    }
    add("6p", pass, detail);
  }
  return rep;
}

struct ModelWitness {
  DWitness d;
  std::uint64_t u = 0;  // u1 + u2
  std::uint64_t R = 0;  // square size = max(R1, R2)
  PatternWord word;
  PatternWitness pw;
  std::vector<std::vector<std::uint64_t>> counts;  // theta counts per (i,j), 0-based
};

struct WitnessBudget {
  SearchStrategy strategy = SearchStrategy::scan;
  SearchBudget search;
};

// realize an arbitrary subset tuple as a model witness: encode to a word,
// find a pattern witness, read off the D-tuple, then confirm the
// membership biconditional cell by cell (radix side) before returning
inline ModelWitness realize_subsets(const BasePair& b, const SubsetTuple& X,
                                    std::uint64_t R, const WitnessBudget& budget = {}) {
  detail::require_orientation(b, "realize_subsets");
  if (X.arity() < 1) throw DomainError("realize_subsets: need at least one subset");
  const GridMatrix Bm = encode_matrix(X, R);
  const PatternWord word = word_of_matrix(Bm);
  const PatternWitness pw =
      find_pattern_witness(b, word, word.R, budget.strategy, budget.search);
  if (!verify_pattern_witness(b, word, word.R, pw))
    throw VerificationFailed("realize_subsets: witness rejected by the digit verifier");

  ModelWitness w;
  w.u = X.arity();
  w.R = R;
  w.word = word;
  w.pw = pw;
  w.d.K1 = PowK{pw.n};
  w.d.K2 = PowK{pw.n + R};
  w.d.L1 = PowL{pw.m.front()};
  w.d.L2 = PowL{pw.m.back()};

  const auto ranks = d_check(b, w.d, pw.m.back());
  if (!ranks || ranks->first != R || ranks->second != R)
    throw VerificationFailed("realize_subsets: witness not in D(R,R)");

  // sigma2 enumeration from L1 must follow the zero positions of the word
  const SecondDigitTable tab(b, pw.m.back());
  std::vector<std::uint64_t> sigmaExp{pw.m.front()};
  for (std::uint64_t j = 1; j <= R; ++j) {
    const auto nxt = sigma2(tab, w.d.K1, PowL{sigmaExp.back()}, pw.m.back());
    if (!nxt) throw VerificationFailed("realize_subsets: sigma2 chain broke early");
    sigmaExp.push_back(nxt->exp);
    if (nxt->exp != pw.m[z_index(word, j + 1)])
      throw VerificationFailed("realize_subsets: sigma2 chain misses the zero anchor");
  }

  w.counts.assign(R, std::vector<std::uint64_t>(R, 0));
  for (std::uint64_t i = 0; i < R; ++i)
    for (std::uint64_t j = 0; j < R; ++j) {
      const std::uint64_t c =
          theta_count(tab, w.d.K1, sigma1(i + 1, w.d.K1), PowL{sigmaExp[j]}, pw.m.back());
      w.counts[i][j] = c;
      for (std::uint64_t v = 1; v <= w.u; ++v) {
        const bool inX = X.sets[v - 1].count({i, j}) > 0;
        const bool om =
            omega_member(tab, w.u, v, w.d.K1, sigma1(i + 1, w.d.K1), PowL{sigmaExp[j]},
                         pw.m.back());
        if (inX != om)
          throw VerificationFailed("realize_subsets: membership biconditional failed at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  return w;
}

// the grid route: X = (A_1..A_u1, B_1..B_u2), R = max(R1, R2)
inline ModelWitness build_model_witness(const BasePair& b, const TuringMachine& M,
                                        const GridWitnessSets& G,
                                        const WitnessBudget& budget = {}) {
  const ConditionReport rep = check_conditions(M, G);
  if (!rep.allPass)
    throw DomainError("build_model_witness: grids fail the condition list");
  SubsetTuple X;
  X.sets = G.A;
  X.sets.insert(X.sets.end(), G.B.begin(), G.B.end());
  return realize_subsets(b, X, std::max(G.R1, G.R2), budget);
}

// independent check of the biconditional from the digit side only
inline bool verify_model_witness(const BasePair& b, const ModelWitness& w,
                                 const SubsetTuple& X, std::uint64_t mMax) {
  try {
    if (X.arity() != w.u) return false;
    const auto ranks = d_check(b, w.d, mMax);
    if (!ranks || ranks->first != w.R || ranks->second != w.R) return false;
    const SecondDigitTable tab(b, std::max(mMax, w.d.L2.exp));
    std::uint64_t cur = w.d.L1.exp;
    for (std::uint64_t j = 0; j < w.R; ++j) {
      for (std::uint64_t i = 0; i < w.R; ++i)
        for (std::uint64_t v = 1; v <= w.u; ++v) {
          const bool inX = X.sets[v - 1].count({i, j}) > 0;
          const bool om = omega_member(tab, w.u, v, w.d.K1, sigma1(i + 1, w.d.K1),
                                       PowL{cur}, mMax);
          if (inX != om) return false;
        }
      if (j + 1 < w.R) {
        const auto nxt = sigma2(tab, w.d.K1, PowL{cur}, mMax);
        if (!nxt) return false;
        cur = nxt->exp;
      }
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace forge
