// Machine descriptions, the tape simulator, trace-to-grid extraction, the
// grid condition list with its failure diagnostics, and realization of grids
// (or arbitrary subset tuples) as verified model witnesses.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "forge/tm.hpp"

using namespace forge;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) {
  return slurp(std::string(FORGE_FIXTURE_DIR) + "/" + name);
}

const ConditionItem& item(const ConditionReport& rep, const std::string& id) {
  for (const auto& it : rep.items)
    if (it.id == id) return it;
  FAIL("missing condition id " + id);
  static ConditionItem dummy;
  return dummy;
}

// every condition except the listed ids passes
void check_only_fails(const ConditionReport& rep, std::initializer_list<std::string> ids) {
  CHECK_FALSE(rep.allPass);
  for (const auto& it : rep.items) {
    const bool expectFail =
        std::find(ids.begin(), ids.end(), it.id) != ids.end();
    INFO("condition " << it.id << ": " << it.detail);
    CHECK(it.pass == !expectFail);
  }
}

}  // namespace

TEST_CASE("parse_tm reads the immediate-halt fixture") {
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  CHECK(M.u1 == 2);
  CHECK(M.u2 == 1);
  CHECK(M.blankEnabled);
  CHECK(M.rule(1, 0).state == 2);
  CHECK(M.rule(1, 0).symbol == 1);
  CHECK(M.rule(1, 0).move == 1);
  CHECK(M.rule(1, 1).state == 2);
  // accept rows default to a left bounce rewriting what was read
  CHECK(M.rule(2, 0).state == 2);
  CHECK(M.rule(2, 0).symbol == 1);
  CHECK(M.rule(2, 0).move == -1);
  CHECK(M.rule(2, 1).symbol == 1);
  CHECK_THROWS_AS(M.rule(3, 0), DomainError);
  CHECK_THROWS_AS(M.rule(1, 2), DomainError);
}

TEST_CASE("parse_tm accepts comments, blank lines, and both modes") {
  const TuringMachine M = parse_tm(
      "# leading comment\n"
      "\n"
      "states 2 symbols 2 mode verbatim  # trailing comment\n"
      "1 1 -> 2 2 R\n"
      "1 2 -> 1 1 L\n");
  CHECK_FALSE(M.blankEnabled);
  CHECK(M.u2 == 2);
  CHECK(M.rule(1, 2).move == -1);
}

TEST_CASE("parse_tm error catalog") {
  // malformed header
  CHECK_THROWS_AS(parse_tm("statez 2 symbols 1 mode blank\n"), ParseError);
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode sometimes\n"), ParseError);
  CHECK_THROWS_AS(parse_tm(""), ParseError);
  // malformed rules
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode blank\n1 _ => 2 1 R\n"), ParseError);
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode blank\n1 _ -> 2 1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode blank\n1 _ -> 2 _ R\n"), ParseError);
  // structural problems
  CHECK_THROWS_AS(parse_tm("states 1 symbols 1 mode blank\n"), ValidationError);
  CHECK_THROWS_AS(parse_tm("states 2 symbols 0 mode blank\n"), ValidationError);
  CHECK_THROWS_AS(
      parse_tm("states 2 symbols 1 mode blank\n1 _ -> 5 1 R\n1 1 -> 2 1 R\n"),
      ValidationError);
  CHECK_THROWS_AS(
      parse_tm("states 2 symbols 1 mode verbatim\n1 _ -> 2 1 R\n1 1 -> 2 1 R\n"),
      ValidationError);
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode blank\n"
                           "1 _ -> 2 1 R\n1 _ -> 2 1 L\n1 1 -> 2 1 R\n"),
                  ValidationError);
  // totality: state 1 must also cover reading symbol 1
  CHECK_THROWS_AS(parse_tm("states 2 symbols 1 mode blank\n1 _ -> 2 1 R\n"),
                  ValidationError);
  // parse errors carry the line number
  try {
    parse_tm("states 2 symbols 1 mode blank\n1 _ -> 2 1 X\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("simulate runs the halt fixture to acceptance") {
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  const Trace t = simulate(M, 100);
  CHECK(t.halted);
  REQUIRE(t.steps.size() == 2);
  CHECK(t.steps[0].state == 1);
  CHECK(t.steps[0].head == 0);
  CHECK(t.steps[0].tape.empty());
  CHECK(t.steps[1].state == 2);
  CHECK(t.steps[1].head == 1);
  CHECK(t.steps[1].tape == std::map<std::uint64_t, std::uint32_t>{{0, 1}});

  CHECK_THROWS_AS(simulate(M, 0), DomainError);
  // one allowed transition is enough here
  CHECK(simulate(M, 1).halted);
}

TEST_CASE("simulate leaves a looping machine un-halted") {
  const TuringMachine M = parse_tm(fixture("loop.tm"));
  const Trace t = simulate(M, 100);
  CHECK_FALSE(t.halted);
  CHECK(t.steps.size() == 101);
  for (const auto& c : t.steps) CHECK(c.state != 2);
}

TEST_CASE("a verbatim machine on the empty tape is stuck immediately") {
  const TuringMachine M =
      parse_tm("states 2 symbols 1 mode verbatim\n1 1 -> 2 1 R\n");
  const Trace t = simulate(M, 50);
  CHECK_FALSE(t.halted);
  CHECK(t.steps.size() == 1);
  CHECK_THROWS_AS(trace_to_grids(M, t), NotHalted);
  CHECK_NOTHROW(trace_to_grids(M, t, /*allowPartial=*/true));
}

TEST_CASE("trace_to_grids extracts the frozen halt grids") {
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  const GridWitnessSets G = trace_to_grids(M, simulate(M, 100));
  CHECK(G.R1 == 2);
  CHECK(G.R2 == 2);
  REQUIRE(G.A.size() == 2);
  REQUIRE(G.B.size() == 1);
  CHECK(G.A[0] == CellSet{{0, 0}});
  CHECK(G.A[1] == CellSet{{1, 1}});
  CHECK(G.B[0] == CellSet{{1, 0}});

  const Trace partial = simulate(parse_tm(fixture("loop.tm")), 10);
  CHECK_THROWS_AS(trace_to_grids(M, partial), NotHalted);
}

TEST_CASE("check_conditions passes the honest halt grids") {
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  const GridWitnessSets G = trace_to_grids(M, simulate(M, 100));
  const ConditionReport rep = check_conditions(M, G);
  CHECK(rep.allPass);
  REQUIRE(rep.items.size() == 7);  // "1".."6" plus the blank-read analog
  CHECK(rep.items.back().id == "6p");
  for (const auto& it : rep.items) {
    CHECK(it.pass);
    CHECK(it.detail.empty());
  }
}

TEST_CASE("condition diagnostics isolate single grid mutations") {
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  const GridWitnessSets G0 = trace_to_grids(M, simulate(M, 100));

  SECTION("a mark on step row 0 breaks the empty-input condition") {
    GridWitnessSets G = G0;
    G.B[0].insert({0, 0});
    check_only_fails(check_conditions(M, G), {"3"});
  }
  SECTION("an out-of-range cell breaks disjointness/range") {
    GridWitnessSets G = G0;
    G.A[0].insert({5, 0});
    check_only_fails(check_conditions(M, G), {"1"});
  }
  SECTION("overlapping families break disjointness") {
    GridWitnessSets G = G0;
    G.A[0].insert({1, 1});  // already in A2
    const ConditionReport rep = check_conditions(M, G);
    CHECK_FALSE(item(rep, "1").pass);
    CHECK(item(rep, "1").detail.find("overlap") != std::string::npos);
  }
  SECTION("a second head mark in a row breaks uniqueness") {
    GridWitnessSets G = G0;
    G.A[0].insert({1, 0});
    check_only_fails(check_conditions(M, G), {"5"});
  }
  SECTION("dropping the written cell breaks blank-read propagation") {
    GridWitnessSets G = G0;
    G.B[0].clear();
    const ConditionReport rep = check_conditions(M, G);
    check_only_fails(rep, {"6p"});
    CHECK(item(rep, "6p").detail.find("write missing") != std::string::npos);
  }
  SECTION("the empty accept family is the looping signature") {
    const TuringMachine L = parse_tm(fixture("loop.tm"));
    const GridWitnessSets G = trace_to_grids(L, simulate(L, 100), true);
    check_only_fails(check_conditions(L, G), {"4"});
  }
}

TEST_CASE("condition 6 tracks persistence and movement of written cells") {
  // three-row trace whose middle written cell has no head above it
  const TuringMachine M = parse_tm(
      "states 3 symbols 1 mode blank\n"
      "1 _ -> 3 1 R\n1 1 -> 3 1 R\n"
      "3 _ -> 2 1 R\n3 1 -> 2 1 R\n");
  const GridWitnessSets G0 = trace_to_grids(M, simulate(M, 100));
  REQUIRE(G0.R1 == 3);
  CHECK(check_conditions(M, G0).allPass);

  SECTION("a written cell must persist to the next row") {
    GridWitnessSets G = G0;
    G.B[0].erase({2, 0});
    const ConditionReport rep = check_conditions(M, G);
    check_only_fails(rep, {"6"});
    CHECK(item(rep, "6").detail.find("persist") != std::string::npos);
  }

  SECTION("a left move out of column 0 is flagged") {
    const TuringMachine ML = parse_tm(
        "states 2 symbols 1 mode blank\n1 _ -> 2 1 R\n1 1 -> 2 1 L\n");
    GridWitnessSets G = trace_to_grids(ML, simulate(ML, 100));
    G.B[0].insert({0, 0});  // head now sits on a written cell with a left rule
    const ConditionReport rep = check_conditions(ML, G);
    CHECK_FALSE(item(rep, "6").pass);
    CHECK(item(rep, "6").detail.find("negative column") != std::string::npos);
    CHECK_FALSE(item(rep, "3").pass);  // the planted mark also violates step 0
  }

  SECTION("a blank-read left move out of column 0 is flagged on the analog") {
    const TuringMachine ML = parse_tm(
        "states 2 symbols 1 mode blank\n1 _ -> 2 1 L\n1 1 -> 2 1 R\n");
    const GridWitnessSets G = trace_to_grids(ML, simulate(ML, 100));
    const ConditionReport rep = check_conditions(ML, G);
    check_only_fails(rep, {"6p"});
    CHECK(item(rep, "6p").detail.find("negative column") != std::string::npos);
  }
}

TEST_CASE("random clamp-free traces satisfy exactly the expected conditions") {
  std::mt19937_64 rng(20240815);
  std::uniform_int_distribution<int> u1D(2, 3), u2D(1, 2), coin(0, 1);
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    const int u1 = u1D(rng), u2 = u2D(rng);
    std::uniform_int_distribution<int> stateD(1, u1), symD(1, u2);
    std::ostringstream desc;
    desc << "states " << u1 << " symbols " << u2 << " mode blank\n";
    for (int q = 1; q <= u1; ++q) {
      if (q == 2) continue;
      for (int a = 0; a <= u2; ++a) {
        desc << q << ' ' << (a == 0 ? std::string("_") : std::to_string(a)) << " -> "
             << stateD(rng) << ' ' << symD(rng) << ' ' << (coin(rng) ? 'R' : 'L')
             << '\n';
      }
    }
    const TuringMachine M = parse_tm(desc.str());
    const Trace t = simulate(M, 30);
    // skip traces that clamped a left move at the tape edge: their grids do
    // not describe legal movement
    bool clamped = false;
    for (std::size_t s = 0; s + 1 < t.steps.size(); ++s)
      if (t.steps[s].head == t.steps[s + 1].head) clamped = true;
    if (clamped) continue;
    ++checked;
    const GridWitnessSets G = trace_to_grids(M, t, /*allowPartial=*/true);
    const ConditionReport rep = check_conditions(M, G);
    if (t.halted) {
      INFO(desc.str());
      CHECK(rep.allPass);
    } else {
      INFO(desc.str());
      check_only_fails(rep, {"4"});
    }
  }
  CHECK(checked > 20);  // the filter must leave a meaningful sample
}

TEST_CASE("realize_subsets produces a fully verified witness for a 1x1 cell") {
  const BasePair b = make_base_pair(2, 3);
  SubsetTuple X;
  X.sets.push_back(CellSet{{0, 0}});
  WitnessBudget budget;
  budget.search.scanWindow = 200;
  const ModelWitness w = realize_subsets(b, X, 1, budget);
  CHECK(w.u == 1);
  CHECK(w.R == 1);
  CHECK(format_word(w.word) == "010");
  CHECK(w.pw.n == 52);
  CHECK(w.pw.m == std::vector<std::uint64_t>{34, 35, 36});
  CHECK(w.d.K1.exp == 52);
  CHECK(w.d.K2.exp == 53);
  CHECK(w.d.L1.exp == 34);
  CHECK(w.d.L2.exp == 36);
  REQUIRE(w.counts.size() == 1);
  CHECK(w.counts[0] == std::vector<std::uint64_t>{1});

  CHECK(verify_model_witness(b, w, X, w.pw.m.back()));

  // corruption: flip the membership, shift the box, misstate the arity
  SubsetTuple empty;
  empty.sets.push_back(CellSet{});
  CHECK_FALSE(verify_model_witness(b, w, empty, w.pw.m.back()));
  ModelWitness bad = w;
  bad.d.K1.exp = 51;
  CHECK_FALSE(verify_model_witness(b, bad, X, w.pw.m.back()));
  SubsetTuple wide = X;
  wide.sets.push_back(CellSet{});
  CHECK_FALSE(verify_model_witness(b, w, wide, w.pw.m.back()));
}

TEST_CASE("realize_subsets handles the empty subset via the all-zero word") {
  const BasePair b = make_base_pair(2, 3);
  SubsetTuple X;
  X.sets.push_back(CellSet{});
  WitnessBudget budget;
  budget.search.scanWindow = 200;
  const ModelWitness w = realize_subsets(b, X, 1, budget);
  CHECK(format_word(w.word) == "00");
  CHECK(w.d.K1.exp == 7);
  CHECK(w.d.K2.exp == 8);
  CHECK(w.d.L1.exp == 6);
  CHECK(w.d.L2.exp == 7);
  CHECK(w.counts[0] == std::vector<std::uint64_t>{0});
  CHECK(verify_model_witness(b, w, X, w.pw.m.back()));

  SubsetTuple none;
  CHECK_THROWS_AS(realize_subsets(b, none, 1, budget), DomainError);
}

TEST_CASE("the halt pipeline encodes to the known word but outruns the scan") {
  const BasePair b = make_base_pair(2, 3);
  const TuringMachine M = parse_tm(fixture("halt.tm"));
  const GridWitnessSets G = trace_to_grids(M, simulate(M, 100));

  SubsetTuple X;
  X.sets = G.A;
  X.sets.insert(X.sets.end(), G.B.begin(), G.B.end());
  const GridMatrix Bm = encode_matrix(X, 2);
  CHECK(Bm.entries == std::vector<std::vector<std::uint64_t>>{{1, 0}, {4, 2}});
  CHECK(format_word(word_of_matrix(Bm)) == "0122220220");

  WitnessBudget budget;
  budget.search.scanWindow = 2000;
  CHECK_THROWS_AS(build_model_witness(b, M, G, budget), BudgetExhausted);

  // grids that fail the condition list are rejected before any search
  const TuringMachine L = parse_tm(fixture("loop.tm"));
  const GridWitnessSets GL = trace_to_grids(L, simulate(L, 50), true);
  CHECK_THROWS_AS(build_model_witness(b, L, GL, budget), DomainError);
}
