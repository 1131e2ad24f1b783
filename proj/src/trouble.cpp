#include <cassert>
#include <map>
#include <utility>
#include <variant>
#include <vector>

#include "dtl/proof.hpp"

namespace dtl {

namespace {

// Splits a formula of the shape a -> b (stored as ~(a & ~b)) back into
// its two sides.  Double negations never survive construction, so the
// round trip through negation is exact.
std::pair<Formula, Formula> split_implication(const Formula& f) {
  assert(f.kind() == Kind::Not && f.child().kind() == Kind::And);
  return {f.child().lhs(), Formula::negation(f.child().rhs())};
}

// Replaces every maximal subformula that is not a Boolean connective by a
// fresh atom, shared across the whole walk.  The result is a propositional
// skeleton whose substitution restores the original formula.
struct Skeleton {
  std::map<Formula, int> placeholder;
  std::map<int, Formula> restore;

  Formula abstract(const Formula& f) {
    switch (f.kind()) {
      case Kind::Not:
        return Formula::negation(abstract(f.child()));
      case Kind::And:
        return Formula::conj(abstract(f.lhs()), abstract(f.rhs()));
      default: {
        auto it = placeholder.find(f);
        if (it == placeholder.end()) {
          int fresh = static_cast<int>(placeholder.size()) + 1;
          it = placeholder.emplace(f, fresh).first;
          restore.emplace(fresh, f);
        }
        return Formula::atom(it->second);
      }
    }
  }
};

// Emits primitive lines into a derivation, reusing a line whenever the same
// formula was already proved.  Line numbers are 1-based throughout.
struct Builder {
  Derivation d;
  std::map<Formula, int> line_of;

  const Formula& formula(int line) const { return d.lines[line - 1].formula; }

  int have(const Formula& f) const {
    auto it = line_of.find(f);
    return it == line_of.end() ? 0 : it->second;
  }

  int add(const Formula& f, std::variant<AxiomInstance, MpStep, NecStep> just) {
    if (int found = have(f)) return found;
    d.lines.push_back({f, std::move(just)});
    int num = static_cast<int>(d.lines.size());
    line_of.emplace(f, num);
    return num;
  }

  int axiom(AxiomInstance inst) {
    Formula f = instantiate_axiom(inst);
    return add(f, std::move(inst));
  }

  int mp(int premise, int implication) {
    const Formula& impl = formula(implication);
    assert(impl.kind() == Kind::Not && impl.child().kind() == Kind::And &&
           impl.child().lhs() == formula(premise));
    Formula conclusion = Formula::negation(impl.child().rhs());
    return add(conclusion, MpStep{premise, implication});
  }

  int nec(NecOp op, int from) {
    const Formula& src = formula(from);
    Formula out = op == NecOp::Box    ? Formula::box(src)
                  : op == NecOp::Next ? Formula::next(src)
                                      : Formula::hence(src);
    return add(out, NecStep{op, from});
  }

  // Tautological consequence: target follows from the premise lines by
  // Boolean reasoning alone once modal subformulas are read as opaque
  // units.  Emits one TAUT line for the abstracted implication chain and
  // discharges the premises by MP.
  int tc(const Formula& target, const std::vector<int>& premises) {
    if (int found = have(target)) return found;
    Formula chain = target;
    for (auto it = premises.rbegin(); it != premises.rend(); ++it)
      chain = Formula::implies(formula(*it), chain);
    Skeleton sk;
    AxiomInstance inst;
    inst.schema = Schema::Taut;
    inst.taut_base = sk.abstract(chain);
    inst.subst = std::move(sk.restore);
    int cur = axiom(std::move(inst));
    for (int p : premises) cur = mp(p, cur);
    return cur;
  }

  int taut_thm(const Formula& f) { return tc(f, {}); }

  // From a theorem line a -> b, concludes []a -> []b via N_box and K.
  int box_mono(int theorem) {
    auto [a, b] = split_implication(formula(theorem));
    int boxed = nec(NecOp::Box, theorem);
    AxiomInstance k;
    k.schema = Schema::K;
    k.subst = {{1, a}, {2, b}};
    return mp(boxed, axiom(std::move(k)));
  }

  // From a theorem line a -> b, concludes <>a -> <>b by boxing the
  // contrapositive ([]~b -> []~a is literally ~<>b -> ~<>a).
  int dia_mono(int theorem) {
    auto [a, b] = split_implication(formula(theorem));
    int contra = tc(Formula::implies(Formula::negation(b), Formula::negation(a)),
                    {theorem});
    int boxed = box_mono(contra);
    return tc(Formula::implies(Formula::diamond(a), Formula::diamond(b)), {boxed});
  }

  // Theorem [](a -> b) -> (<>a -> <>b), for the given sides: box the
  // contrapositive, distribute the box over it with K ([]~b is literally
  // ~<>b), and close the chain tautologically.
  int dual_k(const Formula& a, const Formula& b) {
    Formula na = Formula::negation(a);
    Formula nb = Formula::negation(b);
    int contra = taut_thm(Formula::implies(Formula::implies(a, b), Formula::implies(nb, na)));
    int boxed = box_mono(contra);
    AxiomInstance k;
    k.schema = Schema::K;
    k.subst = {{1, nb}, {2, na}};
    int dist = axiom(std::move(k));
    return tc(Formula::implies(Formula::box(Formula::implies(a, b)),
                               Formula::implies(Formula::diamond(a), Formula::diamond(b))),
              {boxed, dist});
  }
};

}  // namespace

std::vector<Formula> trouble_milestones(int k) {
  Formula bundle = build_schema(SchemaName::Bundle, k);
  Formula tangled = build_schema(SchemaName::TangleFamily, k);
  Formula dia_pk = Formula::diamond(Formula::atom(k));
  std::vector<Formula> stepped;
  for (int j = 1; j <= k; ++j)
    stepped.push_back(Formula::next(build_schema(SchemaName::Start, k, j)));
  return {
      Formula::implies(bundle, tangled),
      Formula::implies(tangled, dia_pk),
      Formula::implies(tangled, Formula::tangle(stepped)),
      Formula::implies(tangled, Formula::next(tangled)),
      Formula::implies(tangled, Formula::hence(tangled)),
      build_schema(SchemaName::Trouble, k),
  };
}

Derivation derive_trouble(int k) {
  if (k < 1) throw std::invalid_argument("derive_trouble needs k >= 1");

  Builder b;
  b.d.width_cap = k;
  b.d.depth_cap = 2;

  const Formula cycle = build_schema(SchemaName::Cycle, k);
  const Formula bundle = build_schema(SchemaName::Bundle, k);
  const Formula tangled = build_schema(SchemaName::TangleFamily, k);
  std::vector<Formula> start;
  for (int i = 1; i <= k; ++i) start.push_back(build_schema(SchemaName::Start, k, i));
  std::vector<Formula> dia_start;
  for (const Formula& s : start) dia_start.push_back(Formula::diamond(s));
  const Formula all_dia = Formula::conj(dia_start);  // bundle == [](all_dia)
  const Formula dia_pk = Formula::diamond(Formula::atom(k));

  std::vector<int> family;
  for (int i = 1; i <= k; ++i) family.push_back(i);

  // Stage 1: bundle -> tangled.  The T and 4 instances expose the cluster
  // of start points below any bundle point; the tangle induction schema
  // then assembles them into the tangled closure.
  AxiomInstance t_inst;
  t_inst.schema = Schema::T;
  t_inst.subst = {{1, all_dia}};
  int t_line = b.axiom(std::move(t_inst));  // [](all_dia) -> all_dia

  AxiomInstance four_inst;
  four_inst.schema = Schema::Four;
  four_inst.subst = {{1, all_dia}};
  int four_line = b.axiom(std::move(four_inst));  // bundle -> [][](all_dia)

  int bundle_boxed = b.tc(Formula::implies(bundle, Formula::box(bundle)), {four_line});

  std::vector<int> h1(k);
  for (int i = 0; i < k; ++i) {
    int pick = b.tc(Formula::implies(bundle, dia_start[i]), {t_line});
    Formula with_bundle = Formula::conj(start[i], bundle);
    int widen = b.taut_thm(
        Formula::implies(bundle, Formula::implies(start[i], with_bundle)));
    int boxed = b.box_mono(widen);
    int dk = b.dual_k(start[i], with_bundle);
    h1[i] = b.tc(Formula::implies(bundle, Formula::diamond(with_bundle)),
                 {pick, bundle_boxed, boxed, dk});
  }

  std::vector<Formula> h1_formulas;
  for (int line : h1) h1_formulas.push_back(b.formula(line));
  int conj1 = b.tc(Formula::conj(h1_formulas), h1);
  int conj1_boxed = b.nec(NecOp::Box, conj1);

  AxiomInstance ind1;
  ind1.schema = Schema::IndTangle;
  ind1.family = family;
  ind1.ind_atom = k + 1;
  for (int i = 1; i <= k; ++i) ind1.subst.emplace(i, start[i - 1]);
  ind1.subst.emplace(k + 1, bundle);
  int m1 = b.mp(conj1_boxed, b.axiom(std::move(ind1)));  // bundle -> tangled

  // Stage 2: tangled -> <>p_k, read off the k-th component of the tangle
  // fixpoint schema.
  AxiomInstance fix_inst;
  fix_inst.schema = Schema::FixTangle;
  fix_inst.family = family;
  for (int i = 1; i <= k; ++i) fix_inst.subst.emplace(i, start[i - 1]);
  int fix_line = b.axiom(std::move(fix_inst));

  std::vector<int> extract(k);
  for (int i = 0; i < k; ++i)
    extract[i] = b.tc(
        Formula::implies(tangled, Formula::diamond(Formula::conj(start[i], tangled))),
        {fix_line});

  int pk_proj = b.taut_thm(
      Formula::implies(Formula::conj(start[k - 1], tangled), Formula::atom(k)));
  int m2 = b.tc(Formula::implies(tangled, dia_pk),
                {extract[k - 1], b.dia_mono(pk_proj)});  // tangled -> <>p_k

  // Stage 3: inside each tangle component, one application of the point map
  // advances start_i to start_{|i+1|_k}.  The hence fixpoint supplies the
  // current cycle step, X-conjunction folds the advanced pieces back into a
  // start formula.
  const Formula g_cycle = Formula::hence(cycle);
  AxiomInstance fixh_inst;
  fixh_inst.schema = Schema::FixHence;
  fixh_inst.subst = {{1, cycle}};
  int fixh_line = b.axiom(std::move(fixh_inst));  // G cycle -> cycle & XG cycle
  int unfold_now = b.tc(Formula::implies(g_cycle, cycle), {fixh_line});
  int unfold_later =
      b.tc(Formula::implies(g_cycle, Formula::next(g_cycle)), {fixh_line});

  std::vector<int> advanced(k + 1, 0);  // indexed by target j = |i+1|_k
  for (int i = 1; i <= k; ++i) {
    int j = mod_index(i + 1, k);
    Formula step_src = Formula::conj(Formula::conj(g_cycle, dia_pk), Formula::atom(i));
    int step = b.tc(Formula::implies(step_src, Formula::next(Formula::atom(j))),
                    {unfold_now});

    AxiomInstance andn;
    andn.schema = Schema::AndNext;
    andn.subst = {{1, Formula::atom(j)}, {2, g_cycle}};
    int fold = b.axiom(std::move(andn));

    Formula here = Formula::conj(start[i - 1], tangled);
    Formula there = Formula::conj(Formula::next(start[j - 1]), tangled);
    int theta = b.tc(Formula::implies(here, there), {m2, step, unfold_later, fold});
    advanced[j] = b.tc(Formula::implies(tangled, Formula::diamond(there)),
                       {extract[i - 1], b.dia_mono(theta)});
  }

  // Stage 4: the k advanced components reassemble into one tangle via the
  // induction schema, giving tangled -> <>{X start_1, ..., X start_k}.
  std::vector<int> advance_lines(advanced.begin() + 1, advanced.end());
  std::vector<Formula> advance_formulas;
  for (int line : advance_lines) advance_formulas.push_back(b.formula(line));
  int conj4 = b.tc(Formula::conj(advance_formulas), advance_lines);
  int conj4_boxed = b.nec(NecOp::Box, conj4);

  AxiomInstance ind4;
  ind4.schema = Schema::IndTangle;
  ind4.family = family;
  ind4.ind_atom = k + 1;
  for (int i = 1; i <= k; ++i) ind4.subst.emplace(i, Formula::next(start[i - 1]));
  ind4.subst.emplace(k + 1, tangled);
  int m3 = b.mp(conj4_boxed, b.axiom(std::move(ind4)));

  // Stage 5: the continuity schema at arity k commutes X out of the tangle;
  // its substituends are exactly the start formulas, of modal depth 2.
  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = k;
  for (int i = 1; i <= k; ++i) cont.subst.emplace(i, start[i - 1]);
  int cont_line = b.axiom(std::move(cont));
  int m4 = b.tc(Formula::implies(tangled, Formula::next(tangled)), {m3, cont_line});

  // Stage 6: hence induction turns the one-step invariance into invariance
  // along the whole orbit.
  int m4_boxed = b.nec(NecOp::Hence, m4);
  AxiomInstance indh;
  indh.schema = Schema::IndHence;
  indh.subst = {{1, tangled}};
  int m5 = b.mp(m4_boxed, b.axiom(std::move(indh)));  // tangled -> G tangled

  // Stage 7: carry tangled -> <>p_k under G and chain everything together.
  int m2_necked = b.nec(NecOp::Hence, m2);
  AxiomInstance kh;
  kh.schema = Schema::KHence;
  kh.subst = {{1, tangled}, {2, dia_pk}};
  int carried = b.mp(m2_necked, b.axiom(std::move(kh)));  // G tangled -> G<>p_k
  b.tc(build_schema(SchemaName::Trouble, k), {m1, m5, carried});

  return b.d;
}

}  // namespace dtl
