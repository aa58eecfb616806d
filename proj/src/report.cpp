#include "qiline/report.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "qiline/errors.hpp"

namespace qiline::report {

namespace {

void dump_into(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += std::string(",") + nl;
        first = false;
        out += pad + Json(it.key()).dump() + colon;
        dump_into(it.value(), indent, depth + 1, out);
      }
      out += nl + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += std::string(",") + nl;
        out += pad;
        dump_into(j[k], indent, depth + 1, out);
      }
      out += nl + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      double v = j.get<double>();
      out += std::isfinite(v) ? format17(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

Json number(Wide x) {
  if (!finiteq(x)) return nullptr;
  if (fabsq(x) <= std::numeric_limits<double>::max()) return static_cast<double>(x);
  return format_wide(x);
}

std::string dump(const Json& j, int indent) {
  std::string out;
  dump_into(j, indent, 0, out);
  return out;
}

std::string fnv1a64_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path write_artifact(const std::filesystem::path& dir, const std::string& stem,
                                     const std::string& hash, const std::string& ext,
                                     const std::string& content) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  auto path = dir / (stem + "-" + hash + "." + ext);
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) throw Error("cannot write " + path.string());
  return path;
}

Json to_json(const SampleGrid& g) {
  return Json{{"x0", number(g.x0)}, {"ratio", number(g.ratio)}, {"count", g.count}};
}

Json to_json(const RelationReport& r) {
  Json params = Json::object();
  switch (r.id) {
    case RelationId::Conj:
      params = {{"t", number(r.params.t)}, {"i", number(r.params.i)}, {"s", number(r.params.s1)}};
      break;
    case RelationId::AddB:
      params = {{"i", number(r.params.i)}, {"s1", number(r.params.s1)}, {"s2", number(r.params.s2)}};
      break;
    case RelationId::CommB:
      params = {{"i", number(r.params.i)}, {"j", number(r.params.j)}, {"s1", number(r.params.s1)},
                {"s2", number(r.params.s2)}};
      break;
    case RelationId::MultA:
      params = {{"t1", number(r.params.t)}, {"t2", number(r.params.t2)}};
      break;
  }
  return Json{{"relation", to_string(r.id)},
              {"params", params},
              {"measuredSup", number(r.measured_sup)},
              {"paperBound", r.stated_bound ? number(*r.stated_bound) : Json("exact")},
              {"pass", r.pass}};
}

Json to_json(const DriftClass& d) {
  Json j{{"drift", to_string(d.kind)}};
  if (d.kind == DriftClass::Kind::LinearDrift) j["lambda"] = number(d.lambda);
  Json tail = Json::array();
  for (double v : d.tail) tail.push_back(number(v));
  j["tail"] = tail;
  return j;
}

Json to_json(const DistanceVerdict& v) {
  Json j{{"verdict", to_string(v.kind)}};
  if (v.kind == DistanceVerdict::Kind::BoundedEvidence || v.kind == DistanceVerdict::Kind::Divergent) {
    j["M"] = number(v.M);
    j["fitSlope"] = number(v.fit_slope);
    j["sign"] = v.sign;
  }
  return j;
}

Json to_json(const QIEstimate& q) {
  return Json{{"K", number(q.K)}, {"C", number(q.C)}, {"grid", to_json(q.grid)}};
}

Json to_json(const WitnessSequence& w) {
  Json pts = Json::array(), ds = Json::array();
  for (Wide x : w.points) pts.push_back(number(x));
  for (Wide d : w.displacements) ds.push_back(number(d));
  return Json{{"points", pts}, {"displacements", ds}, {"signs", w.signs}};
}

Json to_json(const SignAssignment& a, const std::vector<MapExpr>& fs) {
  Json stages = Json::array();
  for (const auto& s : a.stages) {
    Json surviving = Json::array();
    for (std::size_t i : s.surviving) surviving.push_back(fs[i].str());
    stages.push_back(Json{{"surviving", surviving},
                          {"chosen", fs[s.chosen].str()},
                          {"witness", to_json(s.witness)},
                          {"boundUsed", number(s.bound_used)}});
  }
  Json maps = Json::array();
  for (const auto& f : fs) maps.push_back(f.str());
  return Json{{"maps", maps}, {"epsilons", a.epsilons}, {"stages", stages}};
}

Json to_json(const IndependenceResult& r) {
  Json j{{"verdict", r.verdict == IndependenceResult::Verdict::Trivial ? "Trivial" : "NontrivialExponent"}};
  if (r.verdict == IndependenceResult::Verdict::NontrivialExponent) {
    j["exponent"] = number(r.exponent);
    j["expectedExponent"] = number(r.expected_exponent);
  }
  j["bound"] = number(r.bound);
  j["maxDisplacement"] = number(r.max_displacement);
  Json fit = Json::array();
  for (std::size_t k = 0; k < r.xs.size(); ++k)
    fit.push_back(Json{{"x", number(r.xs[k])}, {"displacement", number(r.displacements[k])}});
  j["fit"] = fit;
  return j;
}

Json to_json(const EscapeResult& r) {
  Json j{{"vacuous", r.vacuous}, {"escaped", r.escaped}};
  if (!r.vacuous) {
    j["xStar"] = number(r.x_star);
    j["fxStar"] = number(r.f_star);
    j["expectedConstant"] = number(r.expected_constant);
    Json g = Json::array();
    for (double v : r.growth) g.push_back(number(v));
    j["witnessGrowth"] = g;
  }
  return j;
}

Json to_json(const ObstructionReport& r) {
  Json res = Json::object();
  for (const auto& [name, v] : r.residuals) res[name] = number(v);
  return Json{{"family", to_string(r.family)},
              {"params", {{"lambda", number(r.params.lambda)}, {"c1", number(r.params.c1)}, {"c2", number(r.params.c2)}}},
              {"residuals", res},
              {"fixedPointWitness", r.fixed_point_witness ? number(*r.fixed_point_witness) : Json(nullptr)},
              {"maxViolation", number(r.max_violation)},
              {"conclusion", r.conclusion}};
}

}  // namespace qiline::report
