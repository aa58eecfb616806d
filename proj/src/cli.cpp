#include "qiline/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <map>
#include <regex>
#include <sstream>

#include "CLI11.hpp"
#include "qiline/errors.hpp"
#include "qiline/eval.hpp"
#include "qiline/parse.hpp"
#include "qiline/report.hpp"

namespace qiline::cli {

namespace {

using report::Json;

struct RunConfig {
  std::string grid_spec = "1,2,40";
  SampleGrid grid;
  double tol = 1e-12;
  int bits = kStandardBits;
  std::string format = "json";
  long seed = 0;
  int max_len = 3;
  std::string bundle;
};

SampleGrid parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      parts.push_back(to_double(parse_number(item)));
    } catch (const ParseError&) {
      throw InvariantError("--grid expects x0,ratio,count");
    }
  }
  if (parts.size() != 3 || parts[2] != std::floor(parts[2]) || parts[2] > 1e6)
    throw InvariantError("--grid expects x0,ratio,count");
  SampleGrid g{parts[0], parts[1], static_cast<int>(parts[2])};
  g.validate();
  return g;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(parse_number(item)));
  return out;
}

// "B(1,1)^2 * B(2,-1)^-1"
WordSpec parse_word(const std::string& text) {
  static const std::regex letter(R"(\s*(B\([^)]*\))\s*(?:\^\s*([+-]?\d+))?\s*)");
  WordSpec w;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t star = pos;
    int depth = 0;
    while (star < text.size() && !(text[star] == '*' && depth == 0)) {
      depth += text[star] == '(' ? 1 : (text[star] == ')' ? -1 : 0);
      ++star;
    }
    std::string part = text.substr(pos, star - pos);
    std::smatch m;
    if (!std::regex_match(part, m, letter)) throw ParseError(pos, "expected B(i,s) or B(i,s)^n");
    MapExpr b = parse_map(m[1].str());
    const auto* p = b.as<expr::PowerShift>();
    int e = m[2].matched ? std::stoi(m[2].str()) : 1;
    if (e == 0) throw ParseError(pos, "exponent must be nonzero");
    w.push_back({GeneratorSpec::B(p->i, p->s), e});
    pos = star + 1;
  }
  if (w.empty()) throw ParseError(0, "empty word");
  return w;
}

std::map<std::string, double> parse_params(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw InvariantError("--params expects name=value pairs");
    out[item.substr(0, eq)] = to_double(parse_number(item.substr(eq + 1)));
  }
  return out;
}

class Session {
 public:
  Session(RunConfig cfg, std::string name, std::string key, std::ostream& out)
      : rc_(std::move(cfg)), name_(std::move(name)), key_(std::move(key)), out_(out) {
    eval_.abs_tol = rc_.tol;
    eval_.precision_bits = rc_.bits;
    validate(eval_);
  }

  const EvalConfig& eval() const { return eval_; }
  const RunConfig& rc() const { return rc_; }

  Json header(bool with_grid = true) const {
    Json j{{"subcommand", name_}, {"seed", rc_.seed}};
    if (with_grid) j["grid"] = report::to_json(rc_.grid);
    return j;
  }

  void emit_json(const Json& j) {
    std::string text = report::dump(j) + "\n";
    out_ << text;
    bundle("json", name_, text);
  }

  void emit_text(const std::string& text, const std::string& ext, const std::string& stem) {
    out_ << text;
    bundle(ext, stem, text);
  }

 private:
  void bundle(const std::string& ext, const std::string& stem, const std::string& text) {
    if (rc_.bundle.empty()) return;
    report::write_artifact(rc_.bundle, stem, report::fnv1a64_hex(key_), ext, text);
  }

  RunConfig rc_;
  std::string name_, key_;
  std::ostream& out_;
  EvalConfig eval_;
};

int cmd_eval(Session& s, const std::string& map_text, const std::vector<double>& at) {
  MapExpr f = parse_map(map_text);
  std::vector<std::pair<double, double>> rows;
  for (double x : at) {
    double v = s.eval().precision_bits > kStandardBits ? static_cast<double>(eval_wide(f, x, s.eval()))
                                                       : eval(f, x, s.eval());
    rows.emplace_back(x, v);
  }
  if (s.rc().format == "plain") {
    std::string text;
    for (auto& [x, v] : rows) text += format17(v) + "\n";
    s.emit_text(text, "txt", "eval");
  } else if (s.rc().format == "csv") {
    std::string text = "x,value\n";
    for (auto& [x, v] : rows) text += format17(x) + "," + format17(v) + "\n";
    s.emit_text(text, "csv", "eval");
  } else {
    Json j = s.header(false);
    j["map"] = f.str();
    Json pts = Json::array();
    for (auto& [x, v] : rows) pts.push_back(Json{{"x", report::number(x)}, {"value", report::number(v)}});
    j["points"] = pts;
    s.emit_json(j);
  }
  return kExitOk;
}

int cmd_classify(Session& s, const std::string& map_text) {
  MapExpr f = parse_map(map_text);
  if (s.rc().format == "csv") {
    s.emit_text(profile_csv(displacement_profile(f, s.rc().grid, s.eval())), "csv", "profile");
    return kExitOk;
  }
  auto d = drift_classify(f, s.rc().grid, s.eval());
  if (s.rc().format == "plain") {
    std::string text = to_string(d.kind);
    if (d.kind == DriftClass::Kind::LinearDrift) text += " " + format17(d.lambda);
    s.emit_text(text + "\n", "txt", "classify");
    return kExitOk;
  }
  Json j = s.header();
  j["map"] = f.str();
  j.update(report::to_json(d));
  s.emit_json(j);
  return kExitOk;
}

int cmd_qi(Session& s, const std::string& map_text) {
  MapExpr f = parse_map(map_text);
  auto q = estimate_qi_constants(f, s.rc().grid, s.eval());
  if (s.rc().format == "plain") {
    s.emit_text("K " + format17(q.K) + "\nC " + format17(q.C) + "\n", "txt", "qi-constants");
    return kExitOk;
  }
  Json j = s.header();
  j["map"] = f.str();
  j["K"] = report::number(q.K);
  j["C"] = report::number(q.C);
  s.emit_json(j);
  return kExitOk;
}

int cmd_equiv(Session& s, const std::string& a, const std::string& b) {
  MapExpr f = parse_map(a), g = parse_map(b);
  auto v = bounded_distance(f, g, s.rc().grid, s.eval());
  if (s.rc().format == "plain") {
    s.emit_text(to_string(v.kind) + "\n", "txt", "equiv");
    return kExitOk;
  }
  Json j = s.header();
  j["f"] = f.str();
  j["g"] = g.str();
  j.update(report::to_json(v));
  s.emit_json(j);
  return kExitOk;
}

int cmd_order(Session& s, const std::string& a, const std::string& b) {
  MapExpr f = parse_map(a), g = parse_map(b);
  auto v = compare(f, g, s.rc().grid, s.eval());
  if (s.rc().format == "plain") {
    s.emit_text(to_string(v.kind) + "\n", "txt", "order");
    return kExitOk;
  }
  Json j = s.header();
  j["f"] = f.str();
  j["g"] = g.str();
  j["verdict"] = to_string(v.kind);
  j["exact"] = v.exact;
  j["supDifference"] = v.exact ? Json(nullptr) : report::number(v.evidence.M);
  j["fitSlope"] = v.exact ? Json(nullptr) : report::number(v.evidence.fit_slope);
  s.emit_json(j);
  return kExitOk;
}

int cmd_orderability(Session& s, const std::vector<std::string>& texts) {
  std::vector<MapExpr> fs;
  for (const auto& t : texts) fs.push_back(parse_map(t));
  auto a = assign_signs(fs, s.rc().grid, s.eval());
  auto w = semigroup_word_check(a, fs, s.rc().max_len, s.eval());
  if (s.rc().format == "plain") {
    std::string text = "epsilons";
    for (int e : a.epsilons) text += " " + std::to_string(e);
    text += "\nstages " + std::to_string(a.stages.size()) + "\nallPositive " +
            (w.all_positive ? "true" : "false") + "\n";
    s.emit_text(text, "txt", "orderability");
  } else {
    Json j = s.header();
    j.update(report::to_json(a, fs));
    j["semigroup"] = Json{{"maxLen", s.rc().max_len},
                          {"allPositive", w.all_positive},
                          {"wordsChecked", w.words_checked},
                          {"worstWord", word_string(w.worst_word, fs, a.epsilons)},
                          {"worstValue", report::number(w.worst_value)}};
    s.emit_json(j);
  }
  return w.all_positive ? kExitOk : kExitCheckFailed;
}

int cmd_relations(Session& s, bool all, const std::string& relation, const std::string& params) {
  std::vector<RelationReport> reports;
  if (all) {
    reports = verify_all_relations(s.rc().grid, s.eval());
  } else {
    if (relation.empty()) throw InvariantError("relations needs --all or --relation");
    auto kv = parse_params(params);
    RelationParams p;
    auto get = [&](const char* k, double& dst) {
      if (kv.count(k)) dst = kv[k];
    };
    get("t", p.t), get("t1", p.t), get("t2", p.t2), get("i", p.i), get("j", p.j);
    get("s", p.s1), get("s1", p.s1), get("s2", p.s2);
    reports.push_back(verify_relation(relation_from_string(relation), p, s.rc().grid, s.eval()));
  }
  bool pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  if (s.rc().format == "plain") {
    std::string text;
    for (const auto& r : reports)
      text += to_string(r.id) + " " + format17(r.measured_sup) + " " + (r.pass ? "pass" : "FAIL") + "\n";
    s.emit_text(text, "txt", "relations");
  } else {
    Json j = s.header();
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report::to_json(r));
    j["allPass"] = pass;
    j["reports"] = arr;
    s.emit_json(j);
  }
  return pass ? kExitOk : kExitCheckFailed;
}

int cmd_independence(Session& s, const std::string& word) {
  auto r = independence_test(parse_word(word), s.rc().grid, s.eval());
  if (s.rc().format == "plain") {
    std::string text = r.verdict == IndependenceResult::Verdict::Trivial
                           ? "Trivial\n"
                           : "NontrivialExponent " + format17(r.exponent) + "\n";
    s.emit_text(text, "txt", "independence");
    return kExitOk;
  }
  Json j = s.header();
  j["word"] = word;
  j.update(report::to_json(r));
  s.emit_json(j);
  return kExitOk;
}

int cmd_holder(Session& s, const std::vector<std::string>& texts, double x0, long n, double tau_x0,
               int depth, long orbit_steps) {
  std::vector<MapExpr> gens;
  for (const auto& t : texts) gens.push_back(parse_map(t));
  if (s.rc().format == "csv") {
    s.emit_text(orbit_csv(orbit(gens.front(), x0, orbit_steps, s.eval())), "csv", "orbit");
    return kExitOk;
  }
  auto sc = build_semi_conjugacy(gens, x0, depth, n, tau_x0, s.eval());
  const bool ok = sc.residual <= 1e-2;
  if (s.rc().format == "plain") {
    std::string text;
    for (std::size_t k = 0; k < gens.size(); ++k) text += gens[k].str() + " " + format17(sc.taus[k]) + "\n";
    text += "residual " + format17(sc.residual) + "\n";
    s.emit_text(text, "txt", "holder");
  } else {
    Json j = s.header(false);
    Json names = Json::array();
    Json tau = Json::object();
    for (std::size_t k = 0; k < gens.size(); ++k) {
      names.push_back(gens[k].str());
      tau[gens[k].str()] = report::number(sc.taus[k]);
    }
    j["generators"] = names;
    j["tau"] = tau;
    j["residual"] = report::number(sc.residual);
    j["x0"] = report::number(x0);
    j["depth"] = depth;
    j["iterations"] = n;
    s.emit_json(j);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_obstruction(Session& s, const std::string& family, const std::string& lambdas,
                    const std::string& c1s, const std::string& c2s) {
  CandidateFamily fam;
  if (family == "translation") {
    fam = CandidateFamily::Translation;
  } else if (family == "fixed-point") {
    fam = CandidateFamily::FixedPoint;
  } else {
    throw InvariantError("--family must be translation or fixed-point");
  }
  std::vector<CandidateParams> params;
  for (double l : parse_list(lambdas))
    for (double a : parse_list(c1s))
      for (double b : parse_list(c2s)) params.push_back({l, a, b});
  auto reports = relation_violation_scan(fam, params, s.eval());
  const bool none = no_candidate_survives(reports);
  const std::string conclusion =
      none ? "no candidate satisfies all constraints below 1e-2" : "some candidate survives";
  if (s.rc().format == "plain") {
    s.emit_text(conclusion + "\n", "txt", "obstruction");
  } else {
    Json j = s.header(false);
    Json arr = Json::array();
    for (const auto& r : reports) arr.push_back(report::to_json(r));
    j["reports"] = arr;
    j["conclusion"] = conclusion;
    s.emit_json(j);
  }
  return none ? kExitOk : kExitCheckFailed;
}

int cmd_diffz(Session& s, const std::string& lift_text) {
  MapExpr lift = parse_map(lift_text);
  if (!lift.as<expr::PeriodicLift>()) throw InvariantError("diffz expects a lift[...] map");
  auto e = diffz_escape_check(lift, s.eval());
  bool trivial = diffz_H_triviality_check(lift, s.rc().grid, s.eval());
  const bool ok = (e.vacuous || e.escaped) && trivial;
  if (s.rc().format == "plain") {
    std::string text = e.vacuous ? "vacuous\n" : std::string(e.escaped ? "escaped" : "not escaped") + "\n";
    s.emit_text(text, "txt", "diffz");
  } else {
    Json j = s.header();
    j["lift"] = lift.str();
    j.update(report::to_json(e));
    j["hTrivialIntersection"] = trivial;
    s.emit_json(j);
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qiline: quasi-isometries of the line"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig rc;
  app.add_option("--grid", rc.grid_spec, "x0,ratio,count");
  app.add_option("--tol", rc.tol, "relative evaluation tolerance");
  app.add_option("--bits", rc.bits, "precision bits (53 or up to 113)");
  app.add_option("--format", rc.format, "json|csv|plain")->check(CLI::IsMember({"json", "csv", "plain"}));
  app.add_option("--seed", rc.seed, "recorded in every report");
  app.add_option("--max-len", rc.max_len, "word length for orderability");
  app.add_option("--bundle", rc.bundle, "directory for report artifacts");

  std::string map_a, map_b, word, lift, relation, params, family = "translation";
  std::string lambdas = "1/2,1,2", c1s = "-1,0,1/2", c2s = "0,1/2,2";
  std::vector<std::string> maps;
  std::vector<double> at;
  bool all = false;
  double x0 = 0, tau_x0 = 1e6;
  long n = 10000, orbit_steps = 20;
  int depth = 8;

  auto* e = app.add_subcommand("eval", "evaluate a map");
  e->add_option("map", map_a)->required();
  e->add_option("--at", at, "evaluation points")->required()->delimiter(',');
  auto* c = app.add_subcommand("classify", "sublinear-drift classification");
  c->add_option("map", map_a)->required();
  auto* q = app.add_subcommand("qi-constants", "estimate K and C");
  q->add_option("map", map_a)->required();
  auto* eq = app.add_subcommand("equiv", "bounded-distance verdict");
  eq->add_option("f", map_a)->required();
  eq->add_option("g", map_b)->required();
  auto* o = app.add_subcommand("order", "compare two germs");
  o->add_option("f", map_a)->required();
  o->add_option("g", map_b)->required();
  auto* ob = app.add_subcommand("orderability", "sign assignment and semigroup check");
  ob->add_option("maps", maps)->required();
  auto* r = app.add_subcommand("relations", "certify generator relations");
  r->add_flag("--all", all, "full parameter grid");
  r->add_option("--relation", relation, "conj|addB|commB|multA");
  r->add_option("--params", params, "e.g. t=4,i=1,s=1");
  auto* ind = app.add_subcommand("independence", "exponent fit for a B-word");
  ind->add_option("word", word, "e.g. B(1,1)^2 * B(2,-1)")->required();
  auto* h = app.add_subcommand("holder", "translation numbers and semi-conjugacy");
  h->add_option("generators", maps)->required();
  h->add_option("--x0", x0, "orbit base point");
  h->add_option("--n", n, "iterations for translation numbers");
  h->add_option("--tau-x0", tau_x0, "base point for translation numbers");
  h->add_option("--depth", depth, "orbit word depth");
  h->add_option("--orbit-steps", orbit_steps, "orbit length for csv output");
  auto* obs = app.add_subcommand("obstruction", "relation violation scan");
  obs->add_option("--family", family, "translation|fixed-point");
  obs->add_option("--lambda", lambdas, "comma list");
  obs->add_option("--c1", c1s, "comma list");
  obs->add_option("--c2", c2s, "comma list");
  auto* dz = app.add_subcommand("diffz", "Diff_Z escape check for a lift");
  dz->add_option("lift", lift)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  }

  try {
    if (const char* env = std::getenv("QILINE_PRECISION_BITS")) rc.bits = std::stoi(env);
  } catch (const std::exception&) {
    err << "error: QILINE_PRECISION_BITS must be an integer\n";
    return kExitUsage;
  }

  std::string key;
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--bundle") {
      ++k;
      continue;
    }
    if (args[k].rfind("--bundle=", 0) == 0) continue;
    key += args[k] + '\0';
  }
  key += "bits=" + std::to_string(rc.bits);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    rc.grid = parse_grid(rc.grid_spec);
    Session s(rc, name, key, out);
    if (name == "eval") return cmd_eval(s, map_a, at);
    if (name == "classify") return cmd_classify(s, map_a);
    if (name == "qi-constants") return cmd_qi(s, map_a);
    if (name == "equiv") return cmd_equiv(s, map_a, map_b);
    if (name == "order") return cmd_order(s, map_a, map_b);
    if (name == "orderability") return cmd_orderability(s, maps);
    if (name == "relations") return cmd_relations(s, all, relation, params);
    if (name == "independence") return cmd_independence(s, word);
    if (name == "holder") return cmd_holder(s, maps, x0, n, tau_x0, depth, orbit_steps);
    if (name == "obstruction") return cmd_obstruction(s, family, lambdas, c1s, c2s);
    if (name == "diffz") return cmd_diffz(s, lift);
  } catch (const ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const InvariantError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const BudgetError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitCheckFailed;
  }
  err << "error: unknown subcommand\n";
  return kExitUsage;
}

}  // namespace qiline::cli
