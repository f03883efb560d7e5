// forge: command-line surface over the library.
//
// Subcommands: s-scan, pattern find|verify, codec encode|decode|roundtrip,
// tm parse|simulate|grids|check, compile theta|phi|baker, witness
// build|verify, eval, baker-scan.
//
// Exit codes: 0 success, 1 domain failure (bad input data, exhausted search
// budgets), 2 usage error. JSON output uses a versioned schema with stable
// field order; identical invocations produce byte-identical output.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/forge.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using namespace forge;

constexpr const char* kSchema = "forge/v1";

struct GlobalOpts {
  std::uint32_t k = 2;
  std::uint32_t ell = 3;
  std::uint64_t vBudget = 10000;
  std::uint64_t scanWindow = 20000;
  std::uint64_t mMax = 10000;
  std::uint64_t maxSteps = 1000;
  std::string format = "json";
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
  std::string configPath;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const GlobalOpts& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(g.out, std::ios::binary);
  if (!out) throw DomainError("cannot write file: " + g.out);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

void emit_json(const GlobalOpts& g, const ojson& doc) { emit(g, doc.dump(2)); }

ojson header(const char* command, const GlobalOpts& g, bool swapped = false) {
  ojson doc;
  doc["schema"] = kSchema;
  doc["command"] = command;
  doc["bases"] = ojson{{"k", g.k}, {"ell", g.ell}, {"swapped", swapped}};
  doc["seed"] = g.seed;
  return doc;
}

// orientation for the search lane: the window arithmetic assumes k < ell,
// so a reversed pair is swapped and the swap recorded in output metadata
BasePair search_bases(GlobalOpts& g, bool& swapped) {
  swapped = g.k > g.ell;
  if (swapped) std::swap(g.k, g.ell);
  return make_base_pair(g.k, g.ell);
}

SubsetTuple subsets_from_json(const ojson& j, std::uint64_t& R) {
  SubsetTuple X;
  R = j.at("R").get<std::uint64_t>();
  for (const auto& s : j.at("sets")) {
    CellSet cs;
    for (const auto& c : s)
      cs.insert({c.at(0).get<std::uint64_t>(), c.at(1).get<std::uint64_t>()});
    X.sets.push_back(std::move(cs));
  }
  if (j.contains("u") && j.at("u").get<std::size_t>() != X.arity())
    throw ValidationError("subsets file: declared u disagrees with sets length");
  return X;
}

ojson subsets_to_json(const SubsetTuple& X, std::uint64_t R) {
  ojson j;
  j["u"] = X.arity();
  j["R"] = R;
  ojson sets = ojson::array();
  for (const auto& s : X.sets) {
    ojson one = ojson::array();
    for (const auto& [a, b] : s) one.push_back(ojson::array({a, b}));
    sets.push_back(one);
  }
  j["sets"] = sets;
  return j;
}

ojson witness_to_json(const PatternWitness& pw) {
  ojson j;
  j["n"] = pw.n;
  j["m"] = pw.m;
  return j;
}

Env parse_env(const std::string& text) {
  Env env;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw DomainError("environment entries must look like name=value: " + item);
    const std::string name = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    if (name.empty() || val.empty())
      throw DomainError("empty name or value in environment entry: " + item);
    env[name] = Nat(val);
  }
  return env;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
  return out;
}

ojson machine_to_json(const TuringMachine& M) {
  ojson j;
  j["u1"] = M.u1;
  j["u2"] = M.u2;
  j["mode"] = M.blankEnabled ? "blank" : "verbatim";
  ojson rules = ojson::array();
  for (std::uint32_t q = 1; q <= M.u1; ++q)
    for (std::uint32_t a = M.blankEnabled ? 0u : 1u; a <= M.u2; ++a) {
      const auto& r = M.delta[q - 1][a];
      if (!r) continue;
      rules.push_back(ojson{{"state", q},
                            {"read", a == 0 ? "_" : std::to_string(a)},
                            {"to", r->state},
                            {"write", r->symbol},
                            {"move", r->move > 0 ? "R" : "L"}});
    }
  j["rules"] = rules;
  return j;
}

ojson grids_to_json(const GridWitnessSets& G, bool partial) {
  ojson j;
  j["R1"] = G.R1;
  j["R2"] = G.R2;
  j["partial"] = partial;
  auto fam = [](const std::vector<CellSet>& F) {
    ojson out = ojson::array();
    for (const auto& s : F) {
      ojson one = ojson::array();
      for (const auto& [a, b] : s) one.push_back(ojson::array({a, b}));
      out.push_back(one);
    }
    return out;
  };
  j["A"] = fam(G.A);
  j["B"] = fam(G.B);
  return j;
}

ojson report_to_json(const ConditionReport& rep) {
  ojson j;
  j["allPass"] = rep.allPass;
  ojson items = ojson::array();
  for (const auto& it : rep.items)
    items.push_back(ojson{{"id", it.id}, {"pass", it.pass}, {"detail", it.detail}});
  j["items"] = items;
  return j;
}

GridWitnessSets grids_from_machine(const TuringMachine& M, std::uint64_t maxSteps,
                                   bool allowPartial, bool& partial) {
  const Trace t = simulate(M, maxSteps);
  partial = !t.halted;
  if (partial && !allowPartial)
    throw NotHalted("machine did not halt within " + std::to_string(maxSteps) +
                    " steps (pass --allow-partial to encode the prefix)");
  return trace_to_grids(M, t, /*allowPartial=*/true);
}

// ------------------------------------------------------------- handlers ---

int run_s_scan(GlobalOpts& g, std::uint64_t x, std::uint64_t lo, std::uint64_t hi) {
  const BasePair b = make_base_pair(g.k, g.ell);
  const auto hits = s_scan(b, PowK{x}, lo, hi);
  ojson doc = header("s-scan", g);
  doc["x"] = x;
  doc["lo"] = lo;
  doc["hi"] = hi;
  ojson arr = ojson::array();
  for (const auto& h : hits) arr.push_back(h.exp);
  doc["hits"] = arr;
  emit_json(g, doc);
  return 0;
}

int run_pattern_find(GlobalOpts& g, const std::string& word, std::uint32_t R,
                     const std::string& strategy) {
  bool swapped = false;
  const BasePair b = search_bases(g, swapped);
  const PatternWord w = parse_word(word, R);
  const SearchStrategy st =
      strategy == "chain" ? SearchStrategy::chain : SearchStrategy::scan;
  const PatternWitness pw =
      find_pattern_witness(b, w, R, st, SearchBudget{g.vBudget, g.scanWindow});
  ojson doc = header("pattern-find", g, swapped);
  doc["word"] = format_word(w);
  doc["R"] = R;
  doc["strategy"] = strategy;
  doc["witness"] = witness_to_json(pw);
  doc["verified"] = verify_pattern_witness(b, w, R, pw);
  emit_json(g, doc);
  return 0;
}

int run_pattern_verify(GlobalOpts& g, const std::string& word, std::uint32_t R,
                       std::uint64_t n, const std::string& mList) {
  bool swapped = false;
  const BasePair b = search_bases(g, swapped);
  const PatternWord w = parse_word(word, R);
  PatternWitness pw;
  pw.n = n;
  pw.m = parse_u64_list(mList);
  ojson doc = header("pattern-verify", g, swapped);
  doc["word"] = format_word(w);
  doc["R"] = R;
  doc["witness"] = witness_to_json(pw);
  doc["valid"] = verify_pattern_witness(b, w, R, pw);
  emit_json(g, doc);
  return 0;
}

int run_codec_encode(GlobalOpts& g, const std::string& file) {
  const ojson in = ojson::parse(slurp(file));
  std::uint64_t R = 0;
  const SubsetTuple X = subsets_from_json(in, R);
  const GridMatrix M = encode_matrix(X, R);
  const PatternWord w = word_of_matrix(M);
  ojson doc = header("codec-encode", g);
  doc["u"] = X.arity();
  doc["R"] = R;
  ojson rows = ojson::array();
  for (std::uint64_t i = 1; i <= R; ++i) {
    ojson row = ojson::array();
    for (std::uint64_t j = 1; j <= R; ++j) row.push_back(M.at(i, j));
    rows.push_back(row);
  }
  doc["matrix"] = rows;
  doc["word"] = format_word(w);
  emit_json(g, doc);
  return 0;
}

int run_codec_decode(GlobalOpts& g, const std::string& word, std::uint32_t R,
                     std::uint64_t u) {
  const PatternWord w = parse_word(word, R);
  const SubsetTuple X = decode_subsets(w, w.R, u);
  ojson doc = header("codec-decode", g);
  doc["word"] = format_word(w);
  doc["payload"] = subsets_to_json(X, R);
  emit_json(g, doc);
  return 0;
}

int run_codec_roundtrip(GlobalOpts& g, const std::string& file) {
  const ojson in = ojson::parse(slurp(file));
  std::uint64_t R = 0;
  const SubsetTuple X = subsets_from_json(in, R);
  const GridMatrix M = encode_matrix(X, R);
  const PatternWord w = word_of_matrix(M);
  const GridMatrix M2 = matrix_of_word(w, R);
  bool ok = M2.R == M.R;
  if (ok)
    for (std::uint64_t i = 1; ok && i <= R; ++i)
      for (std::uint64_t j = 1; ok && j <= R; ++j) ok = M.at(i, j) == M2.at(i, j);
  const SubsetTuple X2 = decode_subsets(w, R, X.arity());
  // decoded sets must equal the input clipped to the R-square
  for (std::size_t v = 0; ok && v < X.arity(); ++v) {
    CellSet clipped;
    for (const auto& c : X.sets[v])
      if (c.first < R && c.second < R) clipped.insert(c);
    ok = clipped == X2.sets[v];
  }
  ojson doc = header("codec-roundtrip", g);
  doc["u"] = X.arity();
  doc["R"] = R;
  doc["word"] = format_word(w);
  doc["ok"] = ok;
  emit_json(g, doc);
  if (!ok) throw VerificationFailed("codec round-trip mismatch");
  return 0;
}

int run_tm_parse(GlobalOpts& g, const std::string& file) {
  const TuringMachine M = parse_tm(slurp(file));
  ojson doc = header("tm-parse", g);
  doc["machine"] = machine_to_json(M);
  emit_json(g, doc);
  return 0;
}

int run_tm_simulate(GlobalOpts& g, const std::string& file) {
  const TuringMachine M = parse_tm(slurp(file));
  const Trace t = simulate(M, g.maxSteps);
  ojson doc = header("tm-simulate", g);
  doc["halted"] = t.halted;
  doc["stepCount"] = t.steps.size() - 1;
  ojson steps = ojson::array();
  for (const auto& c : t.steps) {
    ojson tape = ojson::object();
    for (const auto& [cell, sym] : c.tape) tape[std::to_string(cell)] = sym;
    steps.push_back(ojson{{"state", c.state}, {"head", c.head}, {"tape", tape}});
  }
  doc["steps"] = steps;
  emit_json(g, doc);
  return 0;
}

int run_tm_grids(GlobalOpts& g, const std::string& file, bool allowPartial) {
  const TuringMachine M = parse_tm(slurp(file));
  bool partial = false;
  const GridWitnessSets G = grids_from_machine(M, g.maxSteps, allowPartial, partial);
  ojson doc = header("tm-grids", g);
  doc["grids"] = grids_to_json(G, partial);
  emit_json(g, doc);
  return 0;
}

int run_tm_check(GlobalOpts& g, const std::string& file) {
  const TuringMachine M = parse_tm(slurp(file));
  bool partial = false;
  const GridWitnessSets G = grids_from_machine(M, g.maxSteps, /*allowPartial=*/true, partial);
  const ConditionReport rep = check_conditions(M, G);
  ojson doc = header("tm-check", g);
  doc["partial"] = partial;
  doc["report"] = report_to_json(rep);
  emit_json(g, doc);
  return 0;
}

int run_compile(GlobalOpts& g, const std::string& what, const std::string& file,
                const std::string& render) {
  Formula f;
  ojson doc = header(("compile-" + what).c_str(), g);
  if (what == "baker") {
    f = build_baker_sentence();
  } else {
    const TuringMachine M = parse_tm(slurp(file));
    if (what == "phi") {
      f = build_phi(M);
    } else {
      const ThetaResult th = build_theta(M);
      f = th.formula;
      doc["blankExtended"] = th.blankExtended;
      doc["u1"] = th.u1;
      doc["u2"] = th.u2;
      doc["u"] = th.u;
      doc["layout"] = ojson{{"aCount", th.layout.aCount},
                            {"bIndex", th.layout.bIndex},
                            {"cIndex", th.layout.cIndex},
                            {"dIndex", th.layout.dIndex},
                            {"eBegin", th.layout.eBegin},
                            {"eCount", th.layout.eCount},
                            {"blankBegin", th.layout.blankBegin},
                            {"blankCount", th.layout.blankCount}};
    }
  }
  const std::string text = render == "human" ? render_human(f) : render_sexpr(f);
  if (g.format == "text") {
    emit(g, text);
    return 0;
  }
  doc["render"] = render;
  doc["formula"] = text;
  emit_json(g, doc);
  return 0;
}

int run_witness_build(GlobalOpts& g, const std::string& machineFile,
                      const std::string& subsetsFile, const std::string& strategy) {
  if (machineFile.empty() && subsetsFile.empty()) {
    std::cerr << "witness build needs --machine or --subsets\n";
    return 2;
  }
  bool swapped = false;
  const BasePair b = search_bases(g, swapped);
  WitnessBudget budget;
  budget.strategy = strategy == "chain" ? SearchStrategy::chain : SearchStrategy::scan;
  budget.search = SearchBudget{g.vBudget, g.scanWindow};

  ModelWitness w;
  SubsetTuple X;
  if (!machineFile.empty()) {
    const TuringMachine M = parse_tm(slurp(machineFile));
    bool partial = false;
    const GridWitnessSets G =
        grids_from_machine(M, g.maxSteps, /*allowPartial=*/false, partial);
    X.sets = G.A;
    X.sets.insert(X.sets.end(), G.B.begin(), G.B.end());
    w = build_model_witness(b, M, G, budget);
  } else {
    const ojson in = ojson::parse(slurp(subsetsFile));
    std::uint64_t R = 0;
    X = subsets_from_json(in, R);
    w = realize_subsets(b, X, R, budget);
  }

  ojson doc = header("witness-build", g, swapped);
  doc["u"] = w.u;
  doc["R"] = w.R;
  doc["word"] = format_word(w.word);
  doc["witness"] = witness_to_json(w.pw);
  doc["d"] = ojson{{"K1", w.d.K1.exp},
                   {"K2", w.d.K2.exp},
                   {"L1", w.d.L1.exp},
                   {"L2", w.d.L2.exp}};
  doc["counts"] = w.counts;
  doc["verified"] = verify_model_witness(b, w, X, w.pw.m.back());
  emit_json(g, doc);
  return 0;
}

int run_witness_verify(GlobalOpts& g, const std::string& witnessFile,
                       const std::string& subsetsFile, std::uint64_t mMax) {
  bool swapped = false;
  const BasePair b = search_bases(g, swapped);
  const ojson in = ojson::parse(slurp(witnessFile));
  ModelWitness w;
  w.u = in.at("u").get<std::uint64_t>();
  w.R = in.at("R").get<std::uint64_t>();
  const auto& d = in.at("d");
  w.d = DWitness{PowK{d.at("K1").get<std::uint64_t>()},
                 PowK{d.at("K2").get<std::uint64_t>()},
                 PowL{d.at("L1").get<std::uint64_t>()},
                 PowL{d.at("L2").get<std::uint64_t>()}};
  std::uint64_t R = 0;
  const SubsetTuple X = subsets_from_json(ojson::parse(slurp(subsetsFile)), R);
  ojson doc = header("witness-verify", g, swapped);
  doc["valid"] = verify_model_witness(b, w, X, mMax ? mMax : g.mMax);
  emit_json(g, doc);
  return 0;
}

int run_eval(GlobalOpts& g, const std::string& sexpr, const std::string& file,
             const std::string& envText, std::int64_t capK, std::int64_t capL,
             bool expand, const std::string& sForm, std::uint64_t thetaLimit) {
  const BasePair b = make_base_pair(g.k, g.ell);
  Formula f = parse_sexpr(!sexpr.empty() ? sexpr : slurp(file));
  if (expand) {
    ExpandOptions opt;
    opt.sForm = sForm == "interval" ? SExpansion::intervalForm : SExpansion::lambdaForm;
    opt.thetaLimit = thetaLimit;
    opt.k = g.k;
    f = expand_macros(f, opt);
  }
  const Env env = parse_env(envText);
  const EvalResult r = eval_bounded(b, f, env, EvalCaps{capK, capL});
  ojson doc = header("eval", g);
  doc["capK"] = capK;
  doc["capL"] = capL;
  doc["expanded"] = expand;
  doc["value"] = r.value;
  doc["capRelative"] = r.capRelative;
  emit_json(g, doc);
  return 0;
}

int run_baker_scan(GlobalOpts& g, std::uint64_t aMax, std::uint64_t bMax) {
  const BasePair b = make_base_pair(g.k, g.ell);
  const BakerScan scan = baker_gap_scan(b, aMax, bMax);
  if (g.format == "csv") {
    std::ostringstream csv;
    csv << "a,b,gap\n";
    for (const auto& [a, bb] : scan.witnesses)
      csv << a << ',' << bb << ',' << scan.minGap.str() << '\n';
    emit(g, csv.str());
    return 0;
  }
  ojson doc = header("baker-scan", g);
  doc["aMax"] = aMax;
  doc["bMax"] = bMax;
  doc["minGap"] = scan.minGap.str();
  ojson arr = ojson::array();
  for (const auto& [a, bb] : scan.witnesses)
    arr.push_back(ojson{{"a", a}, {"b", bb}, {"gap", scan.minGap.str()}});
  doc["witnesses"] = arr;
  emit_json(g, doc);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  GlobalOpts g;
  CLI::App app{"digit-pattern realization toolkit"};
  app.require_subcommand(1);

  auto* optK = app.add_option("--k", g.k, "first base (default 2)");
  auto* optEll = app.add_option("--ell", g.ell, "second base (default 3)");
  auto* optV = app.add_option("--v-budget", g.vBudget, "refinement budget");
  auto* optW = app.add_option("--scan-window", g.scanWindow, "scan window (l-exponents)");
  auto* optM = app.add_option("--m-max", g.mMax, "table bound for verification");
  auto* optS = app.add_option("--max-steps", g.maxSteps, "simulation step budget");
  app.add_option("--format", g.format, "output format: json|csv|text")
      ->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--seed", g.seed, "seed echoed into reports");
  app.add_option("--jobs", g.jobs, "worker cap (current modules are single-threaded)");
  app.add_option("--out", g.out, "write output to a file instead of stdout");
  app.add_option("--config", g.configPath, "JSON config file (flags take precedence)");

  // s-scan
  std::uint64_t x = 0, lo = 0, hi = 0;
  auto* sscan = app.add_subcommand("s-scan", "list l-exponents m with (k^x, l^m) in S");
  sscan->add_option("--x", x, "k-exponent of the anchor")->required();
  sscan->add_option("--lo", lo, "lowest l-exponent")->required();
  sscan->add_option("--hi", hi, "highest l-exponent")->required();

  // pattern
  std::string word, strategy = "scan", mList;
  std::uint32_t radix = 0;
  std::uint64_t wn = 0;
  auto* pattern = app.add_subcommand("pattern", "digit-pattern witnesses");
  pattern->require_subcommand(1);
  auto* pfind = pattern->add_subcommand("find", "search for a witness");
  pfind->add_option("--word", word, "pattern word (digits, or comma-separated)")->required();
  pfind->add_option("--R", radix, "letter bound R")->required();
  pfind->add_option("--strategy", strategy, "scan|chain")
      ->check(CLI::IsMember({"scan", "chain"}));
  auto* pverify = pattern->add_subcommand("verify", "check a claimed witness");
  pverify->add_option("--word", word, "pattern word")->required();
  pverify->add_option("--R", radix, "letter bound R")->required();
  pverify->add_option("--n", wn, "witness k-exponent")->required();
  pverify->add_option("--m", mList, "witness l-exponents, comma-separated")->required();

  // codec
  std::string file;
  std::uint64_t arity = 0;
  auto* codec = app.add_subcommand("codec", "subset tuple <-> matrix <-> word");
  codec->require_subcommand(1);
  auto* cenc = codec->add_subcommand("encode", "subsets JSON -> matrix and word");
  cenc->add_option("--file", file, "subsets JSON file")->required();
  auto* cdec = codec->add_subcommand("decode", "word -> subsets JSON");
  cdec->add_option("--word", word, "pattern word")->required();
  cdec->add_option("--R", radix, "letter bound R")->required();
  cdec->add_option("--u", arity, "number of subsets")->required();
  auto* crt = codec->add_subcommand("roundtrip", "encode then decode and compare");
  crt->add_option("--file", file, "subsets JSON file")->required();

  // tm
  std::string machineFile;
  bool allowPartial = false;
  auto* tm = app.add_subcommand("tm", "machine parsing, simulation, grids");
  tm->require_subcommand(1);
  auto* tparse = tm->add_subcommand("parse", "parse and validate a machine");
  tparse->add_option("--machine", machineFile, "machine description file")->required();
  auto* tsim = tm->add_subcommand("simulate", "run from the empty tape");
  tsim->add_option("--machine", machineFile, "machine description file")->required();
  auto* tgrids = tm->add_subcommand("grids", "step/tape grids of the run");
  tgrids->add_option("--machine", machineFile, "machine description file")->required();
  tgrids->add_flag("--allow-partial", allowPartial, "accept a non-halting prefix");
  auto* tcheck = tm->add_subcommand("check", "condition report for the run's grids");
  tcheck->add_option("--machine", machineFile, "machine description file")->required();

  // compile
  std::string render = "sexpr";
  auto* compile = app.add_subcommand("compile", "machine -> formulas");
  compile->require_subcommand(1);
  CLI::App* ctheta = compile->add_subcommand("theta", "window formula");
  CLI::App* cphi = compile->add_subcommand("phi", "existential closure");
  CLI::App* cbaker = compile->add_subcommand("baker", "base-gap sentence");
  for (CLI::App* c : {ctheta, cphi}) {
    c->add_option("--machine", machineFile, "machine description file")->required();
    c->add_option("--render", render, "sexpr|human")
        ->check(CLI::IsMember({"sexpr", "human"}));
  }
  cbaker->add_option("--render", render, "sexpr|human")
      ->check(CLI::IsMember({"sexpr", "human"}));

  // witness
  std::string subsetsFile, witnessFile;
  std::uint64_t mMaxOverride = 0;
  auto* witness = app.add_subcommand("witness", "model witnesses over the window");
  witness->require_subcommand(1);
  auto* wbuild = witness->add_subcommand("build", "construct and self-check a witness");
  auto* wOptMachine = wbuild->add_option("--machine", machineFile, "machine description file");
  auto* wOptSubsets = wbuild->add_option("--subsets", subsetsFile, "subsets JSON file");
  wbuild->add_option("--strategy", strategy, "scan|chain")
      ->check(CLI::IsMember({"scan", "chain"}));
  wOptMachine->excludes(wOptSubsets);
  auto* wverify = witness->add_subcommand("verify", "re-check a witness JSON");
  wverify->add_option("--witness", witnessFile, "witness JSON (build output)")->required();
  wverify->add_option("--subsets", subsetsFile, "subsets JSON file")->required();
  wverify->add_option("--m-max", mMaxOverride, "table bound override");

  // eval
  std::string sexprText, envText, sForm = "lambda";
  std::int64_t capK = 10, capL = 10;
  bool doExpand = false;
  std::uint64_t thetaLimit = 64;
  auto* eval = app.add_subcommand("eval", "bounded evaluation of a formula");
  auto* evalSexpr = eval->add_option("--sexpr", sexprText, "formula as an s-expression");
  auto* evalFile = eval->add_option("--file", file, "file holding the s-expression");
  evalSexpr->excludes(evalFile);
  eval->add_option("--env", envText, "assignment, e.g. x=8,y=27");
  eval->add_option("--cap-k", capK, "k-exponent cap");
  eval->add_option("--cap-l", capL, "l-exponent cap");
  eval->add_flag("--expand", doExpand, "expand macros before evaluating");
  eval->add_option("--s-form", sForm, "lambda|interval (with --expand)")
      ->check(CLI::IsMember({"lambda", "interval"}));
  eval->add_option("--theta-limit", thetaLimit, "largest Theta count expanded");

  // baker-scan
  std::uint64_t aMax = 30, bMax = 30;
  auto* baker = app.add_subcommand("baker-scan", "minimum |k^a - l^b| over a window");
  baker->add_option("--a-max", aMax, "largest k-exponent");
  baker->add_option("--b-max", bMax, "largest l-exponent");

  // allow global flags to appear after the subcommand name
  const std::function<void(CLI::App*)> enableFallthrough = [&](CLI::App* a) {
    a->fallthrough();
    for (CLI::App* s : a->get_subcommands({})) enableFallthrough(s);
  };
  enableFallthrough(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!g.configPath.empty()) {
      const ojson cfg = ojson::parse(slurp(g.configPath));
      auto take = [&](const char* key, CLI::Option* opt, auto& slot) {
        using T = std::decay_t<decltype(slot)>;
        if (cfg.contains(key) && opt->count() == 0) slot = cfg.at(key).get<T>();
      };
      take("k", optK, g.k);
      take("ell", optEll, g.ell);
      take("vBudget", optV, g.vBudget);
      take("scanWindow", optW, g.scanWindow);
      take("mMax", optM, g.mMax);
      take("maxSteps", optS, g.maxSteps);
    }

    if (sscan->parsed()) return run_s_scan(g, x, lo, hi);
    if (pattern->parsed()) {
      if (pfind->parsed()) return run_pattern_find(g, word, radix, strategy);
      return run_pattern_verify(g, word, radix, wn, mList);
    }
    if (codec->parsed()) {
      if (cenc->parsed()) return run_codec_encode(g, file);
      if (cdec->parsed()) return run_codec_decode(g, word, radix, arity);
      return run_codec_roundtrip(g, file);
    }
    if (tm->parsed()) {
      if (tparse->parsed()) return run_tm_parse(g, machineFile);
      if (tsim->parsed()) return run_tm_simulate(g, machineFile);
      if (tgrids->parsed()) return run_tm_grids(g, machineFile, allowPartial);
      return run_tm_check(g, machineFile);
    }
    if (compile->parsed()) {
      const std::string what = ctheta->parsed() ? "theta"
                               : cphi->parsed() ? "phi"
                                                : "baker";
      return run_compile(g, what, machineFile, render);
    }
    if (witness->parsed()) {
      if (wbuild->parsed())
        return run_witness_build(g, machineFile, subsetsFile, strategy);
      return run_witness_verify(g, witnessFile, subsetsFile, mMaxOverride);
    }
    if (eval->parsed())
      return run_eval(g, sexprText, file, envText, capK, capL, doExpand, sForm,
                      thetaLimit);
    if (baker->parsed()) return run_baker_scan(g, aMax, bMax);
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const forge::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
