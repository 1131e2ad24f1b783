// Axiom instantiation, derivation checking and the Trouble^k compiler.
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "dtl/model.hpp"
#include "dtl/proof.hpp"
#include "testutil.hpp"

using namespace dtl;

namespace {

Formula p(int i) { return Formula::atom(i); }

AxiomInstance taut_inst(const Formula& base, std::map<int, Formula> subst = {}) {
  AxiomInstance ax;
  ax.schema = Schema::Taut;
  ax.taut_base = base;
  ax.subst = std::move(subst);
  return ax;
}

DerivationLine line(const Formula& f, std::variant<AxiomInstance, MpStep, NecStep> j) {
  return DerivationLine{f, std::move(j)};
}

// Independent truth evaluation used to cross-check is_tautology.
bool eval_prop(const Formula& f, const std::set<int>& truths) {
  switch (f.kind()) {
    case Kind::Atom:
      return truths.count(f.atom_index()) > 0;
    case Kind::Not:
      return !eval_prop(f.child(), truths);
    case Kind::And:
      return eval_prop(f.lhs(), truths) && eval_prop(f.rhs(), truths);
    default:
      REQUIRE(false);
      return false;
  }
}

bool oracle_tautology(const Formula& f) {
  std::set<int> atoms;
  f.collect_atoms(atoms);
  std::vector<int> order(atoms.begin(), atoms.end());
  for (unsigned mask = 0; mask < (1u << order.size()); ++mask) {
    std::set<int> truths;
    for (std::size_t b = 0; b < order.size(); ++b)
      if (mask & (1u << b)) truths.insert(order[b]);
    if (!eval_prop(f, truths)) return false;
  }
  return true;
}

Formula random_prop(std::mt19937_64& rng, int budget) {
  std::uniform_int_distribution<int> atom_pick(1, 3);
  std::uniform_int_distribution<int> shape(0, 3);
  if (budget == 0) return p(atom_pick(rng));
  switch (shape(rng)) {
    case 0:
      return p(atom_pick(rng));
    case 1:
      return Formula::negation(random_prop(rng, budget - 1));
    case 2:
      return Formula::conj(random_prop(rng, budget - 1), random_prop(rng, budget - 1));
    default:
      return Formula::disj(random_prop(rng, budget - 1), random_prop(rng, budget - 1));
  }
}

}  // namespace

TEST_CASE("schema instances match their displays") {
  AxiomInstance k;
  k.schema = Schema::K;
  k.subst = {{1, p(1)}, {2, p(2)}};
  CHECK(instantiate_axiom(k) ==
        Formula::implies(Formula::box(Formula::implies(p(1), p(2))),
                         Formula::implies(Formula::box(p(1)), Formula::box(p(2)))));

  AxiomInstance fix;
  fix.schema = Schema::FixTangle;
  fix.family = {1, 2};
  CHECK(instantiate_axiom(fix) ==
        Formula::parse("<>{p1,p2} -> <>(p1 & <>{p1,p2}) & <>(p2 & <>{p1,p2})"));

  AxiomInstance ind;
  ind.schema = Schema::IndTangle;
  ind.family = {1, 2};
  ind.ind_atom = 3;
  CHECK(instantiate_axiom(ind) ==
        Formula::parse("[]((p3 -> <>(p1 & p3)) & (p3 -> <>(p2 & p3)))"
                       " -> (p3 -> <>{p1,p2})"));

  AxiomInstance fixh;
  fixh.schema = Schema::FixHence;
  CHECK(instantiate_axiom(fixh) == Formula::parse("G p1 -> p1 & X G p1"));

  AxiomInstance indh;
  indh.schema = Schema::IndHence;
  CHECK(instantiate_axiom(indh) == Formula::parse("G (p1 -> X p1) -> (p1 -> G p1)"));

  AxiomInstance kh;
  kh.schema = Schema::KHence;
  CHECK(instantiate_axiom(kh) == Formula::parse("G (p1 -> p2) -> (G p1 -> G p2)"));

  AxiomInstance nn;
  nn.schema = Schema::NegNext;
  CHECK(instantiate_axiom(nn) ==
        Formula::iff(Formula::negation(Formula::next(p(1))),
                     Formula::next(Formula::negation(p(1)))));

  AxiomInstance an;
  an.schema = Schema::AndNext;
  CHECK(instantiate_axiom(an) ==
        Formula::iff(Formula::next(Formula::conj(p(1), p(2))),
                     Formula::conj(Formula::next(p(1)), Formula::next(p(2)))));
}

TEST_CASE("substituting a repeated atom into the continuity schema collapses its tangle") {
  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = 2;
  cont.subst = {{1, p(1)}, {2, p(1)}};
  Formula got = instantiate_axiom(cont);
  CHECK(got == Formula::implies(Formula::diamond(Formula::next(p(1))),
                                Formula::next(Formula::diamond(p(1)))));
  CHECK(got.width() == 1);
  CHECK(got == build_schema(SchemaName::Cont, 1));
}

TEST_CASE("canonical continuity instances agree with the formula family") {
  for (int k = 1; k <= 4; ++k) {
    AxiomInstance cont;
    cont.schema = Schema::Cont;
    cont.arity = k;
    CHECK(instantiate_axiom(cont) == build_schema(SchemaName::Cont, k));
  }
}

TEST_CASE("malformed axiom parameters are rejected") {
  CHECK_THROWS_AS(instantiate_axiom(taut_inst(p(1))), std::invalid_argument);
  CHECK_THROWS_AS(instantiate_axiom(taut_inst(Formula::next(p(1)))),
                  std::invalid_argument);

  AxiomInstance fix;
  fix.schema = Schema::FixTangle;
  CHECK_THROWS_AS(instantiate_axiom(fix), std::invalid_argument);  // empty P
  fix.family = {1, 1};
  CHECK_THROWS_AS(instantiate_axiom(fix), std::invalid_argument);  // duplicate

  AxiomInstance ind;
  ind.schema = Schema::IndTangle;
  ind.family = {1};
  ind.ind_atom = 0;
  CHECK_THROWS_AS(instantiate_axiom(ind), std::invalid_argument);

  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = 0;
  CHECK_THROWS_AS(instantiate_axiom(cont), std::invalid_argument);
}

TEST_CASE("tautology recognition agrees with a brute-force oracle") {
  CHECK(is_tautology(Formula::disj(p(1), Formula::negation(p(1)))));
  CHECK(is_tautology(Formula::implies(
      Formula::implies(Formula::implies(p(1), p(2)), p(1)), p(1))));
  CHECK_FALSE(is_tautology(p(1)));
  CHECK_FALSE(is_tautology(Formula::implies(Formula::disj(p(1), p(2)), p(1))));

  std::mt19937_64 rng(20260815);
  for (int trial = 0; trial < 500; ++trial) {
    Formula f = random_prop(rng, 3);
    CHECK(is_tautology(f) == oracle_tautology(f));
  }

  CHECK_THROWS_AS(is_tautology(Formula::hence(p(1))), std::invalid_argument);
}

TEST_CASE("modus ponens must cite strictly earlier lines") {
  Formula taut = Formula::implies(p(1), p(1));
  Derivation d;
  d.lines.push_back(line(taut, taut_inst(taut)));
  d.lines.push_back(line(taut, MpStep{1, 2}));
  Verdict v = check_derivation(d, SystemDescriptor{});
  CHECK_FALSE(v.accepted);
  CHECK(v.line == 2);
  CHECK(v.reason == "index_order");
}

TEST_CASE("small derivations: modus ponens and necessitation") {
  Formula a = Formula::implies(p(1), p(1));
  Formula b = Formula::implies(p(2), p(2));
  Derivation d;
  d.lines.push_back(line(a, taut_inst(a)));
  d.lines.push_back(line(Formula::implies(a, b), taut_inst(Formula::implies(a, b))));
  d.lines.push_back(line(b, MpStep{1, 2}));
  d.lines.push_back(line(Formula::box(b), NecStep{NecOp::Box, 3}));
  d.lines.push_back(line(Formula::next(b), NecStep{NecOp::Next, 3}));
  d.lines.push_back(line(Formula::hence(b), NecStep{NecOp::Hence, 3}));
  CHECK(check_derivation(d, SystemDescriptor{}).accepted);

  SUBCASE("wrong conclusion fails at its line") {
    d.lines[2].formula = Formula::implies(p(3), p(3));
    Verdict v = check_derivation(d, SystemDescriptor{});
    CHECK_FALSE(v.accepted);
    CHECK(v.line == 3);
    CHECK(v.reason == "mp_mismatch");
  }

  SUBCASE("wrong necessitation operator fails") {
    d.lines[3].formula = Formula::next(b);
    Verdict v = check_derivation(d, SystemDescriptor{});
    CHECK_FALSE(v.accepted);
    CHECK(v.line == 4);
    CHECK(v.reason == "nec_mismatch");
  }

  SUBCASE("least failing line wins when several are broken") {
    d.lines[2].formula = Formula::implies(p(3), p(3));
    d.lines[5].formula = p(1);
    Verdict v = check_derivation(d, SystemDescriptor{});
    CHECK(v.line == 3);
  }
}

TEST_CASE("axiom lines must carry exactly their instantiation") {
  AxiomInstance k;
  k.schema = Schema::K;
  Derivation d;
  d.lines.push_back(line(Formula::implies(Formula::box(p(1)), Formula::box(p(2))), k));
  Verdict v = check_derivation(d, SystemDescriptor{});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "axiom_mismatch");

  Derivation bad;
  bad.lines.push_back(line(p(1), taut_inst(p(1))));
  v = check_derivation(bad, SystemDescriptor{});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "bad_axiom_instance");
}

TEST_CASE("continuity instances obey the system caps") {
  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = 2;
  cont.subst = {{1, Formula::hence(p(1))}, {2, p(2)}};  // depth-1 substituend
  Derivation d;
  d.lines.push_back(line(instantiate_axiom(cont), cont));

  CHECK(check_derivation(d, SystemDescriptor{2, 1}).accepted);
  CHECK(check_derivation(d, SystemDescriptor{2, kNoCap}).accepted);

  Verdict v = check_derivation(d, SystemDescriptor{1, 1});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "cont_width");

  v = check_derivation(d, SystemDescriptor{0, kNoCap});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "cont_forbidden");

  v = check_derivation(d, SystemDescriptor{2, 0});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "cont_depth");
}

TEST_CASE("trouble derivations are accepted with their milestones in order") {
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    Derivation d = derive_trouble(k);
    CHECK(d.width_cap == k);
    CHECK(d.depth_cap == 2);
    CHECK(check_derivation(d, SystemDescriptor{k, 2}).accepted);

    std::vector<Formula> marks = trouble_milestones(k);
    REQUIRE(marks.size() == 6);
    std::size_t at = 0;
    for (const Formula& mark : marks) {
      bool found = false;
      for (; at < d.lines.size(); ++at) {
        if (d.lines[at].formula == mark) {
          found = true;
          ++at;
          break;
        }
      }
      CAPTURE(mark.str());
      CHECK(found);
    }
    CHECK(d.lines.back().formula == build_schema(SchemaName::Trouble, k));
  }
}

TEST_CASE("trouble derivation endpoints match the formula family") {
  Derivation d1 = derive_trouble(1);
  CHECK(d1.lines.back().formula ==
        Formula::implies(build_schema(SchemaName::Bundle, 1),
                         Formula::hence(Formula::diamond(p(1)))));

  Derivation d2 = derive_trouble(2);
  Formula m2 = Formula::implies(build_schema(SchemaName::TangleFamily, 2),
                                Formula::diamond(p(2)));
  bool found = false;
  for (const auto& l : d2.lines) found = found || l.formula == m2;
  CHECK(found);
}

TEST_CASE("narrower caps reject the trouble derivation at its continuity line") {
  for (int k = 1; k <= 4; ++k) {
    CAPTURE(k);
    Derivation d = derive_trouble(k);
    Verdict v = check_derivation(d, SystemDescriptor{k - 1, kNoCap});
    CHECK_FALSE(v.accepted);
    CHECK(v.reason == (k == 1 ? "cont_forbidden" : "cont_width"));
    REQUIRE(v.line >= 1);
    const auto* ax = std::get_if<AxiomInstance>(&d.lines[v.line - 1].just);
    REQUIRE(ax != nullptr);
    CHECK(ax->schema == Schema::Cont);
  }
}

TEST_CASE("continuity substituends inside trouble derivations have depth exactly 2") {
  for (int k = 1; k <= 4; ++k) {
    Derivation d = derive_trouble(k);
    int cont_lines = 0;
    for (const auto& l : d.lines) {
      const auto* ax = std::get_if<AxiomInstance>(&l.just);
      if (!ax || ax->schema != Schema::Cont) continue;
      ++cont_lines;
      for (int i = 1; i <= ax->arity; ++i) {
        REQUIRE(ax->subst.count(i) == 1);
        CHECK(ax->subst.at(i).depth() == 2);
      }
    }
    CHECK(cont_lines == 1);
  }
}

TEST_CASE("acceptance is monotone in the caps") {
  for (int k = 1; k <= 3; ++k) {
    Derivation d = derive_trouble(k);
    CHECK(check_derivation(d, SystemDescriptor{k, 2}).accepted);
    CHECK(check_derivation(d, SystemDescriptor{k + 1, 2}).accepted);
    CHECK(check_derivation(d, SystemDescriptor{k, 5}).accepted);
    CHECK(check_derivation(d, SystemDescriptor{kNoCap, kNoCap}).accepted);
  }
}

TEST_CASE("the width-1 fragment flag confines every line") {
  Derivation d1 = derive_trouble(1);
  CHECK(check_derivation(d1, SystemDescriptor{1, 2, true}).accepted);

  Derivation d2 = derive_trouble(2);
  Verdict v = check_derivation(d2, SystemDescriptor{2, 2, true});
  CHECK_FALSE(v.accepted);
  CHECK(v.reason == "l1_width");
}

TEST_CASE("single-line tampering is always caught") {
  Derivation pristine = derive_trouble(2);
  std::mt19937_64 rng(404);
  std::map<int, Formula> swap12 = {{1, p(2)}, {2, p(1)}};
  for (int trial = 0; trial < 20; ++trial) {
    Derivation d = pristine;
    std::uniform_int_distribution<std::size_t> pick(0, d.lines.size() - 1);
    std::size_t idx = pick(rng);
    Formula mutated = d.lines[idx].formula.substitute(swap12);
    if (mutated == d.lines[idx].formula)
      mutated = Formula::negation(d.lines[idx].formula);
    d.lines[idx].formula = mutated;
    Verdict v = check_derivation(d, SystemDescriptor{});
    CHECK_FALSE(v.accepted);
    CHECK(v.line <= static_cast<int>(idx) + 1);
  }
}

TEST_CASE("derivations survive the JSON round trip byte for byte") {
  Derivation d = derive_trouble(2);
  auto doc = d.to_json();
  Derivation back = Derivation::from_json(doc);
  CHECK(back.width_cap == 2);
  CHECK(back.depth_cap == 2);
  CHECK(check_derivation(back, SystemDescriptor{2, 2}).accepted);
  CHECK(back.to_json().dump() == doc.dump());
  CHECK(derive_trouble(2).to_json().dump() == doc.dump());
}

TEST_CASE("derivation documents are validated on load") {
  auto doc = derive_trouble(1).to_json();
  auto broken = doc;
  broken.erase("system");
  CHECK_THROWS_AS(Derivation::from_json(broken), std::invalid_argument);

  broken = doc;
  broken["lines"][0]["just"]["kind"] = "guess";
  CHECK_THROWS_AS(Derivation::from_json(broken), std::invalid_argument);

  broken = doc;
  broken["lines"][0]["formula"] = "p1 & & p2";
  CHECK_THROWS_AS(Derivation::from_json(broken), ParseError);

  broken = doc;
  broken["system"]["k"] = -3;
  CHECK_THROWS_AS(Derivation::from_json(broken), std::invalid_argument);
}

TEST_CASE("verdict JSON carries the failing line and reason") {
  Derivation d;
  d.lines.push_back(line(p(1), taut_inst(p(1))));
  Verdict v = check_derivation(d, SystemDescriptor{});
  auto doc = v.to_json();
  CHECK(doc["accepted"] == false);
  CHECK(doc["line"] == 1);
  CHECK(doc["reason"] == "bad_axiom_instance");

  Verdict ok = check_derivation(derive_trouble(1), SystemDescriptor{});
  CHECK(ok.to_json().dump() == "{\"accepted\":true}");
}

TEST_CASE("audits validate every line on continuous models") {
  DynModel one({"w"}, {}, std::map<std::string, std::string>{{"w", "w"}},
               {{1, {"w"}}, {2, {"w"}}});
  for (int k = 1; k <= 2; ++k) {
    ExperimentReport report = audit_soundness(derive_trouble(k), one);
    CHECK(report.passed());
  }

  // Seeded random models, kept only when the point map is continuous; every
  // line of an accepted derivation must hold everywhere on them.
  std::mt19937_64 rng(991);
  Derivation d = derive_trouble(2);
  int audited = 0;
  while (audited < 10) {
    DynModel m = testutil::random_model(rng, 1 + static_cast<int>(rng() % 5), true);
    if (!m.continuity_check().empty()) continue;
    ++audited;
    ExperimentReport report = audit_soundness(d, m);
    CAPTURE(audited);
    CHECK(report.passed());
  }
}

TEST_CASE("audits refuse rejected derivations and static models") {
  Derivation bogus;
  bogus.lines.push_back(line(build_schema(SchemaName::Trouble, 2),
                             taut_inst(build_schema(SchemaName::Trouble, 2))));
  DynModel one({"w"}, {}, std::map<std::string, std::string>{{"w", "w"}}, {});
  CHECK_THROWS_AS(audit_soundness(bogus, one), std::invalid_argument);

  DynModel flat({"w"}, {}, std::nullopt, {});
  CHECK_THROWS_AS(audit_soundness(derive_trouble(1), flat), StaticModelError);
}

TEST_CASE("audit reports name the refuting point when a line fails") {
  // A cluster {c1,c2} mapped pointwise onto two incomparable points: the
  // map tears the cluster apart, so the arity-2 continuity instance fails
  // exactly on the cluster.
  DynModel m({"c1", "c2", "d1", "d2"}, {{"c1", "c2"}, {"c2", "c1"}},
             std::map<std::string, std::string>{
                 {"c1", "d1"}, {"c2", "d2"}, {"d1", "d1"}, {"d2", "d2"}},
             {{1, {"d1"}}, {2, {"d2"}}});
  REQUIRE_FALSE(m.continuity_check().empty());

  Derivation just_cont;
  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = 2;
  just_cont.lines.push_back(line(instantiate_axiom(cont), cont));
  REQUIRE_FALSE(m.valid_on(just_cont.lines[0].formula));

  ExperimentReport report = audit_soundness(just_cont, m);
  CHECK_FALSE(report.passed());
  REQUIRE(report.assertions.size() == 2);
  CHECK(report.assertions.front().observed.contains("refuted_at"));
  CHECK(report.assertions.back().pass == false);
}
