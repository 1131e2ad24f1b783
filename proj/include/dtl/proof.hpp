#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dtl/formula.hpp"
#include "dtl/report.hpp"
#include "json.hpp"

namespace dtl {

class DynModel;

// Axiom schemas of the Hilbert system.  TAUT carries an explicit base
// tautology; FIX_TANGLE / IND_TANGLE carry their atom family P (and the
// induction atom p); CONT carries its arity.  The remaining schemas are
// parameter-free.  K_HENCE (G(p->q) -> (Gp -> Gq)) is included so that
// derived implications can be carried under G; without it the monotonicity
// rule for G is not admissible (a neighborhood-style countermodel separates
// it from the other schemas and rules).
enum class Schema {
  Taut,
  K,
  T,
  Four,
  FixTangle,
  IndTangle,
  NegNext,
  AndNext,
  FixHence,
  IndHence,
  KHence,
  Cont,
};

std::string schema_name(Schema s);
Schema schema_from_name(std::string_view name);  // throws std::invalid_argument

// A schema pick plus everything needed to produce one concrete axiom:
// the schema parameters and a simultaneous substitution applied to the
// base formula.  Substitution happens only here, never as a proof step.
struct AxiomInstance {
  Schema schema = Schema::Taut;
  std::optional<Formula> taut_base;  // TAUT only
  std::vector<int> family;           // FIX_TANGLE / IND_TANGLE: the atoms of P
  int ind_atom = 0;                  // IND_TANGLE: the atom p
  int arity = 0;                     // CONT
  std::map<int, Formula> subst;
};

// Truth-table tautology test.  Requires a purely propositional formula
// with at most 16 distinct atoms; throws std::invalid_argument otherwise.
bool is_tautology(const Formula& f);

// The schema's base formula before substitution.  Validates parameters:
// TAUT base must be a propositional tautology, P must be nonempty and
// duplicate-free, CONT arity must be >= 1.
Formula schema_base(const AxiomInstance& inst);

// schema_base followed by the substitution; tangles re-canonicalize.
Formula instantiate_axiom(const AxiomInstance& inst);

// Proof steps other than axiom instances.  Line numbers are 1-based and
// must point strictly upward.  MP consumes the premise line and the line
// holding premise -> conclusion.
struct MpStep {
  int premise = 0;
  int implication = 0;
};

enum class NecOp { Box, Next, Hence };

struct NecStep {
  NecOp op = NecOp::Box;
  int from = 0;
};

struct DerivationLine {
  Formula formula;
  std::variant<AxiomInstance, MpStep, NecStep> just;
};

// Caps of the system a derivation is checked against: width_cap bounds the
// arity of CONT instances (0 disables CONT, kNoCap leaves it unbounded),
// depth_cap bounds the modal depth of CONT substituends, and l1_only
// additionally confines every line to tangle width <= 1.
inline constexpr int kNoCap = -1;

struct SystemDescriptor {
  int width_cap = kNoCap;
  int depth_cap = kNoCap;
  bool l1_only = false;
};

struct Derivation {
  int width_cap = kNoCap;  // system the derivation was produced for
  int depth_cap = kNoCap;
  std::vector<DerivationLine> lines;

  nlohmann::ordered_json to_json() const;
  static Derivation from_json(const nlohmann::json& doc);
};

// Outcome of checking: on rejection, `line` is the least failing line
// (1-based) and `reason` is a stable machine code with a human sentence
// in `detail`.
struct Verdict {
  bool accepted = true;
  int line = 0;
  std::string reason;
  std::string detail;

  nlohmann::ordered_json to_json() const;
};

Verdict check_derivation(const Derivation& d, const SystemDescriptor& sys);

// Model-checks every line of an accepted derivation on M and reports any
// invalid line.  Throws std::invalid_argument if the derivation is not
// accepted under unbounded caps; StaticModelError propagates from eval.
ExperimentReport audit_soundness(const Derivation& d, const DynModel& m);

// Compiles the stepwise derivation of Trouble^k, accepted under caps
// (width k, depth 2).  The six headline formulas of the argument appear
// as actual lines, in order; trouble_milestones lists them.
Derivation derive_trouble(int k);
std::vector<Formula> trouble_milestones(int k);

}  // namespace dtl
