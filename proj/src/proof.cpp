#include "dtl/proof.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "dtl/model.hpp"

namespace dtl {

namespace {

const std::pair<Schema, const char*> kSchemaNames[] = {
    {Schema::Taut, "TAUT"},           {Schema::K, "K"},
    {Schema::T, "T"},                 {Schema::Four, "FOUR"},
    {Schema::FixTangle, "FIX_TANGLE"}, {Schema::IndTangle, "IND_TANGLE"},
    {Schema::NegNext, "NEG_NEXT"},    {Schema::AndNext, "AND_NEXT"},
    {Schema::FixHence, "FIX_HENCE"},  {Schema::IndHence, "IND_HENCE"},
    {Schema::KHence, "K_HENCE"},      {Schema::Cont, "CONT"},
};

}  // namespace

std::string schema_name(Schema s) {
  for (const auto& [schema, name] : kSchemaNames)
    if (schema == s) return name;
  throw std::logic_error("unknown schema id");
}

Schema schema_from_name(std::string_view name) {
  for (const auto& [schema, text] : kSchemaNames)
    if (name == text) return schema;
  throw std::invalid_argument("unknown axiom schema '" + std::string(name) + "'");
}

bool is_tautology(const Formula& f) {
  if (!f.is_propositional())
    throw std::invalid_argument("tautology test needs a propositional formula, got " + f.str());
  std::set<int> atoms;
  f.collect_atoms(atoms);
  if (atoms.size() > 16)
    throw std::invalid_argument("tautology test capped at 16 distinct atoms, got " +
                                std::to_string(atoms.size()));
  std::map<int, int> bit;
  int next_bit = 0;
  for (int a : atoms) bit[a] = next_bit++;

  // Recursive truth evaluation against one assignment, atoms read off bits.
  auto truth = [&bit](const Formula& g, std::uint32_t row) {
    auto go = [&bit, row](const Formula& h, auto&& self) -> bool {
      switch (h.kind()) {
        case Kind::Atom:
          return (row >> bit.at(h.atom_index())) & 1u;
        case Kind::Not:
          return !self(h.child(), self);
        case Kind::And:
          return self(h.lhs(), self) && self(h.rhs(), self);
        default:
          throw std::logic_error("non-propositional node in truth table");
      }
    };
    return go(g, go);
  };

  std::uint32_t rows = std::uint32_t{1} << atoms.size();
  for (std::uint32_t row = 0; row < rows; ++row)
    if (!truth(f, row)) return false;
  return true;
}

namespace {

void validate_family(const std::vector<int>& family, const char* which) {
  if (family.empty())
    throw std::invalid_argument(std::string(which) + " needs a nonempty atom family");
  std::set<int> seen;
  for (int a : family) {
    if (a < 1) throw std::invalid_argument(std::string(which) + ": atom indices start at 1");
    if (!seen.insert(a).second)
      throw std::invalid_argument(std::string(which) + ": duplicate atom p" + std::to_string(a));
  }
}

}  // namespace

Formula schema_base(const AxiomInstance& inst) {
  const Formula a1 = Formula::atom(1);
  const Formula a2 = Formula::atom(2);
  switch (inst.schema) {
    case Schema::Taut: {
      if (!inst.taut_base) throw std::invalid_argument("TAUT needs its base formula");
      if (!is_tautology(*inst.taut_base))
        throw std::invalid_argument("TAUT base is not a tautology: " + inst.taut_base->str());
      return *inst.taut_base;
    }
    case Schema::K:
      return Formula::implies(Formula::box(Formula::implies(a1, a2)),
                              Formula::implies(Formula::box(a1), Formula::box(a2)));
    case Schema::T:
      return Formula::implies(Formula::box(a1), a1);
    case Schema::Four:
      return Formula::implies(Formula::box(a1), Formula::box(Formula::box(a1)));
    case Schema::FixTangle: {
      validate_family(inst.family, "FIX_TANGLE");
      std::vector<Formula> atoms;
      for (int q : inst.family) atoms.push_back(Formula::atom(q));
      Formula td = Formula::tangle(atoms);
      std::vector<Formula> parts;
      for (int q : inst.family)
        parts.push_back(Formula::diamond(Formula::conj(Formula::atom(q), td)));
      return Formula::implies(td, Formula::conj(parts));
    }
    case Schema::IndTangle: {
      validate_family(inst.family, "IND_TANGLE");
      if (inst.ind_atom < 1)
        throw std::invalid_argument("IND_TANGLE: atom indices start at 1");
      Formula p = Formula::atom(inst.ind_atom);
      std::vector<Formula> atoms;
      std::vector<Formula> parts;
      for (int q : inst.family) {
        atoms.push_back(Formula::atom(q));
        parts.push_back(Formula::implies(
            p, Formula::diamond(Formula::conj(Formula::atom(q), p))));
      }
      return Formula::implies(Formula::box(Formula::conj(parts)),
                              Formula::implies(p, Formula::tangle(atoms)));
    }
    case Schema::NegNext:
      return Formula::iff(Formula::negation(Formula::next(a1)),
                          Formula::next(Formula::negation(a1)));
    case Schema::AndNext:
      return Formula::iff(Formula::next(Formula::conj(a1, a2)),
                          Formula::conj(Formula::next(a1), Formula::next(a2)));
    case Schema::FixHence:
      return Formula::implies(
          Formula::hence(a1),
          Formula::conj(a1, Formula::next(Formula::hence(a1))));
    case Schema::IndHence:
      return Formula::implies(
          Formula::hence(Formula::implies(a1, Formula::next(a1))),
          Formula::implies(a1, Formula::hence(a1)));
    case Schema::KHence:
      return Formula::implies(Formula::hence(Formula::implies(a1, a2)),
                              Formula::implies(Formula::hence(a1), Formula::hence(a2)));
    case Schema::Cont: {
      if (inst.arity < 1) throw std::invalid_argument("CONT arity must be at least 1");
      std::vector<Formula> lhs, rhs;
      for (int i = 1; i <= inst.arity; ++i) {
        lhs.push_back(Formula::next(Formula::atom(i)));
        rhs.push_back(Formula::atom(i));
      }
      return Formula::implies(Formula::tangle(lhs),
                              Formula::next(Formula::tangle(rhs)));
    }
  }
  throw std::logic_error("unknown schema id");
}

Formula instantiate_axiom(const AxiomInstance& inst) {
  return schema_base(inst).substitute(inst.subst);
}

namespace {

Verdict reject(int line, std::string reason, std::string detail) {
  Verdict v;
  v.accepted = false;
  v.line = line;
  v.reason = std::move(reason);
  v.detail = std::move(detail);
  return v;
}

// CONT substituends are the images of the base atoms p1..p_arity; atoms
// left out of the substitution stay themselves (depth 0).
int max_cont_substituend_depth(const AxiomInstance& inst) {
  int worst = 0;
  for (int i = 1; i <= inst.arity; ++i) {
    auto it = inst.subst.find(i);
    if (it != inst.subst.end()) worst = std::max(worst, it->second.depth());
  }
  return worst;
}

}  // namespace

Verdict check_derivation(const Derivation& d, const SystemDescriptor& sys) {
  for (std::size_t idx = 0; idx < d.lines.size(); ++idx) {
    const DerivationLine& line = d.lines[idx];
    const int num = static_cast<int>(idx) + 1;

    if (const auto* ax = std::get_if<AxiomInstance>(&line.just)) {
      Formula expected = Formula::atom(1);
      try {
        expected = instantiate_axiom(*ax);
      } catch (const std::invalid_argument& e) {
        return reject(num, "bad_axiom_instance", e.what());
      }
      if (expected != line.formula)
        return reject(num, "axiom_mismatch",
                      "line claims " + line.formula.str() + " but " +
                          schema_name(ax->schema) + " instantiates to " + expected.str());
      if (ax->schema == Schema::Cont) {
        if (sys.width_cap == 0)
          return reject(num, "cont_forbidden",
                        "CONT is not available when the width cap is 0");
        if (sys.width_cap != kNoCap && ax->arity > sys.width_cap)
          return reject(num, "cont_width",
                        "CONT arity " + std::to_string(ax->arity) +
                            " exceeds width cap " + std::to_string(sys.width_cap));
        if (sys.depth_cap != kNoCap) {
          int worst = max_cont_substituend_depth(*ax);
          if (worst > sys.depth_cap)
            return reject(num, "cont_depth",
                          "CONT substituend depth " + std::to_string(worst) +
                              " exceeds depth cap " + std::to_string(sys.depth_cap));
        }
      }
    } else if (const auto* mp = std::get_if<MpStep>(&line.just)) {
      if (mp->premise < 1 || mp->premise >= num || mp->implication < 1 ||
          mp->implication >= num)
        return reject(num, "index_order",
                      "MP sources must point to strictly earlier lines");
      const Formula& prem = d.lines[mp->premise - 1].formula;
      const Formula& impl = d.lines[mp->implication - 1].formula;
      if (impl != Formula::implies(prem, line.formula))
        return reject(num, "mp_mismatch",
                      "line " + std::to_string(mp->implication) + " is not (line " +
                          std::to_string(mp->premise) + " -> this line)");
    } else {
      const auto& nec = std::get<NecStep>(line.just);
      if (nec.from < 1 || nec.from >= num)
        return reject(num, "index_order",
                      "necessitation source must point to a strictly earlier line");
      const Formula& src = d.lines[nec.from - 1].formula;
      Formula expected = nec.op == NecOp::Box    ? Formula::box(src)
                         : nec.op == NecOp::Next ? Formula::next(src)
                                                 : Formula::hence(src);
      if (expected != line.formula)
        return reject(num, "nec_mismatch",
                      "necessitation of line " + std::to_string(nec.from) +
                          " yields " + expected.str());
    }

    if (sys.l1_only && line.formula.width() > 1)
      return reject(num, "l1_width",
                    "line has tangle width " + std::to_string(line.formula.width()) +
                        " but the system is confined to width <= 1");
  }
  return Verdict{};
}

ExperimentReport audit_soundness(const Derivation& d, const DynModel& m) {
  auto start = std::chrono::steady_clock::now();
  Verdict v = check_derivation(d, SystemDescriptor{});
  if (!v.accepted)
    throw std::invalid_argument("audit needs an accepted derivation; rejected at line " +
                                std::to_string(v.line) + " (" + v.reason + ")");

  ExperimentReport report;
  report.experiment = "audit_soundness";
  report.parameters["lines"] = d.lines.size();
  report.parameters["model_points"] = m.size();

  int invalid = 0;
  for (std::size_t idx = 0; idx < d.lines.size(); ++idx) {
    const Formula& f = d.lines[idx].formula;
    PointSet sat = m.eval(f);
    if (static_cast<int>(sat.count()) == m.size()) continue;
    ++invalid;
    int witness = sat.complement().members().front();
    report.check("line " + std::to_string(idx + 1) + " valid: " + f.str(), true,
                 nlohmann::ordered_json{{"refuted_at", m.name(witness)}});
  }
  report.check("all " + std::to_string(d.lines.size()) + " lines valid on the model",
               0, invalid);
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

namespace {

nlohmann::ordered_json cap_to_json(int cap) {
  if (cap == kNoCap) return "unbounded";
  return cap;
}

int cap_from_json(const nlohmann::json& v, const char* field) {
  if (v.is_string() && v.get<std::string>() == "unbounded") return kNoCap;
  if (v.is_number_integer() && v.get<int>() >= 0) return v.get<int>();
  throw std::invalid_argument(std::string("system field '") + field +
                              "' must be a nonnegative integer or \"unbounded\"");
}

nlohmann::ordered_json subst_to_json(const std::map<int, Formula>& subst) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  for (const auto& [atom, f] : subst) out["p" + std::to_string(atom)] = f.str();
  return out;
}

std::map<int, Formula> subst_from_json(const nlohmann::json& doc, int lineno) {
  if (!doc.is_object())
    throw std::invalid_argument("line " + std::to_string(lineno) +
                                ": 'subst' must be an object");
  std::map<int, Formula> out;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    std::size_t pos = 0;
    int atom = 0;
    if (key.size() >= 2 && key[0] == 'p') {
      try {
        atom = std::stoi(key.substr(1), &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
    }
    if (pos != key.size() - 1 || atom < 1)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": subst key '" +
                                  key + "' is not an atom (expected p1, p2, ...)");
    if (!it.value().is_string())
      throw std::invalid_argument("line " + std::to_string(lineno) + ": subst values" +
                                  " must be formula strings");
    out.emplace(atom, Formula::parse(it.value().get<std::string>()));
  }
  return out;
}

nlohmann::ordered_json axiom_to_json(const AxiomInstance& ax) {
  nlohmann::ordered_json j;
  j["kind"] = "axiom";
  j["schema"] = schema_name(ax.schema);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  switch (ax.schema) {
    case Schema::Taut:
      params["base"] = ax.taut_base ? ax.taut_base->str() : "";
      break;
    case Schema::FixTangle:
      params["P"] = ax.family;
      break;
    case Schema::IndTangle:
      params["P"] = ax.family;
      params["p"] = ax.ind_atom;
      break;
    case Schema::Cont:
      params["k"] = ax.arity;
      break;
    default:
      break;
  }
  j["params"] = params;
  j["subst"] = subst_to_json(ax.subst);
  return j;
}

AxiomInstance axiom_from_json(const nlohmann::json& j, int lineno) {
  auto fail = [lineno](const std::string& msg) {
    throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
  };
  if (!j.contains("schema") || !j["schema"].is_string())
    fail("axiom justification needs a 'schema' string");
  AxiomInstance ax;
  ax.schema = schema_from_name(j["schema"].get<std::string>());
  nlohmann::json params = j.contains("params") ? j["params"] : nlohmann::json::object();
  if (!params.is_object()) fail("'params' must be an object");
  switch (ax.schema) {
    case Schema::Taut:
      if (!params.contains("base") || !params["base"].is_string())
        fail("TAUT needs params.base, a formula string");
      ax.taut_base = Formula::parse(params["base"].get<std::string>());
      break;
    case Schema::FixTangle:
    case Schema::IndTangle:
      if (!params.contains("P") || !params["P"].is_array())
        fail(schema_name(ax.schema) + " needs params.P, an array of atom indices");
      for (const auto& v : params["P"]) {
        if (!v.is_number_integer()) fail("params.P entries must be atom indices");
        ax.family.push_back(v.get<int>());
      }
      if (ax.schema == Schema::IndTangle) {
        if (!params.contains("p") || !params["p"].is_number_integer())
          fail("IND_TANGLE needs params.p, an atom index");
        ax.ind_atom = params["p"].get<int>();
      }
      break;
    case Schema::Cont:
      if (!params.contains("k") || !params["k"].is_number_integer())
        fail("CONT needs params.k, its arity");
      ax.arity = params["k"].get<int>();
      break;
    default:
      break;
  }
  if (j.contains("subst")) ax.subst = subst_from_json(j["subst"], lineno);
  return ax;
}

}  // namespace

nlohmann::ordered_json Verdict::to_json() const {
  nlohmann::ordered_json doc;
  doc["accepted"] = accepted;
  if (!accepted) {
    doc["line"] = line;
    doc["reason"] = reason;
    doc["detail"] = detail;
  }
  return doc;
}

nlohmann::ordered_json Derivation::to_json() const {
  nlohmann::ordered_json doc;
  doc["system"]["k"] = cap_to_json(width_cap);
  doc["system"]["n"] = cap_to_json(depth_cap);
  doc["lines"] = nlohmann::ordered_json::array();
  for (const DerivationLine& line : lines) {
    nlohmann::ordered_json row;
    row["formula"] = line.formula.str();
    if (const auto* ax = std::get_if<AxiomInstance>(&line.just)) {
      row["just"] = axiom_to_json(*ax);
    } else if (const auto* mp = std::get_if<MpStep>(&line.just)) {
      row["just"]["kind"] = "mp";
      row["just"]["from"] = {mp->premise, mp->implication};
    } else {
      const auto& nec = std::get<NecStep>(line.just);
      row["just"]["kind"] = "nec";
      row["just"]["op"] = nec.op == NecOp::Box    ? "box"
                          : nec.op == NecOp::Next ? "next"
                                                  : "hence";
      row["just"]["from"] = nec.from;
    }
    doc["lines"].push_back(std::move(row));
  }
  return doc;
}

Derivation Derivation::from_json(const nlohmann::json& doc) {
  if (!doc.is_object())
    throw std::invalid_argument("derivation document must be a JSON object");
  if (!doc.contains("system") || !doc["system"].is_object() ||
      !doc["system"].contains("k") || !doc["system"].contains("n"))
    throw std::invalid_argument("derivation needs a 'system' object with 'k' and 'n'");
  if (!doc.contains("lines") || !doc["lines"].is_array())
    throw std::invalid_argument("derivation needs a 'lines' array");

  Derivation d;
  d.width_cap = cap_from_json(doc["system"]["k"], "k");
  d.depth_cap = cap_from_json(doc["system"]["n"], "n");

  int lineno = 0;
  for (const auto& row : doc["lines"]) {
    ++lineno;
    auto fail = [lineno](const std::string& msg) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + msg);
    };
    if (!row.is_object() || !row.contains("formula") || !row["formula"].is_string() ||
        !row.contains("just") || !row["just"].is_object())
      fail("each line needs a 'formula' string and a 'just' object");
    DerivationLine line{Formula::parse(row["formula"].get<std::string>()), MpStep{}};
    const auto& just = row["just"];
    if (!just.contains("kind") || !just["kind"].is_string())
      fail("'just' needs a 'kind'");
    std::string kind = just["kind"].get<std::string>();
    if (kind == "axiom") {
      line.just = axiom_from_json(just, lineno);
    } else if (kind == "mp") {
      if (!just.contains("from") || !just["from"].is_array() || just["from"].size() != 2 ||
          !just["from"][0].is_number_integer() || !just["from"][1].is_number_integer())
        fail("mp needs 'from', a pair of line numbers");
      line.just = MpStep{just["from"][0].get<int>(), just["from"][1].get<int>()};
    } else if (kind == "nec") {
      if (!just.contains("op") || !just["op"].is_string() || !just.contains("from") ||
          !just["from"].is_number_integer())
        fail("nec needs 'op' and 'from'");
      std::string op = just["op"].get<std::string>();
      NecOp nop;
      if (op == "box")
        nop = NecOp::Box;
      else if (op == "next")
        nop = NecOp::Next;
      else if (op == "hence")
        nop = NecOp::Hence;
      else {
        fail("nec op must be box, next or hence");
        nop = NecOp::Box;
      }
      line.just = NecStep{nop, just["from"].get<int>()};
    } else {
      fail("unknown justification kind '" + kind + "'");
    }
    d.lines.push_back(std::move(line));
  }
  return d;
}

}  // namespace dtl
