// Modal-temporal formulas over atoms p1,p2,...: negation, conjunction,
// next-step X, henceforth G, and a polyadic tangle <>{...} whose argument
// set is kept canonically sorted and duplicate-free.  Box, disjunction,
// implication and the remaining connectives are sugar over these six node
// kinds.  Values are immutable shared trees; all operations are pure.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtl {

enum class Kind : std::uint8_t { Atom, Not, And, Next, Hence, Tangle };

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " (at offset " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

class Formula {
public:
  // Primitive constructors.  All canonicalize: negation collapses double
  // negations (so that ~~a and a are the same value, making [] and <> exact
  // duals), tangle sorts and deduplicates its argument set.
  static Formula atom(int index);
  static Formula negation(const Formula& a);
  static Formula conj(const Formula& a, const Formula& b);
  static Formula conj(const std::vector<Formula>& parts);  // left fold; requires nonempty
  static Formula next(const Formula& a);
  static Formula hence(const Formula& a);
  static Formula tangle(std::vector<Formula> args);  // throws on empty set

  // Derived connectives.
  static Formula disj(const Formula& a, const Formula& b);      // ~(~a & ~b)
  static Formula implies(const Formula& a, const Formula& b);   // ~(a & ~b)
  static Formula iff(const Formula& a, const Formula& b);
  static Formula diamond(const Formula& a);                     // <>{a}
  static Formula box(const Formula& a);                         // ~<>{~a}
  static Formula eventually(const Formula& a);                  // ~G~a
  static Formula next_pow(const Formula& a, int n);             // X^n a

  Kind kind() const { return node_->kind; }
  int atom_index() const;                     // Atom only
  const Formula& child() const;               // Not/Next/Hence
  const Formula& lhs() const;                 // And
  const Formula& rhs() const;                 // And
  const std::vector<Formula>& args() const;   // Tangle

  int depth() const { return node_->depth; }  // modal nesting depth
  int width() const { return node_->width; }  // max tangle arity, 0 if tangle-free
  bool has_temporal() const { return node_->temporal; }
  std::size_t hash() const { return node_->hash; }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }
  // Total structural order; used for tangle canonicalization.
  static int compare(const Formula& a, const Formula& b);
  bool operator<(const Formula& o) const { return compare(*this, o) < 0; }

  std::string str() const;
  static Formula parse(std::string_view text);  // throws ParseError

  Formula substitute(const std::map<int, Formula>& sigma) const;
  void collect_atoms(std::set<int>& out) const;
  bool is_propositional() const;  // only Atom/Not/And nodes

  const void* id() const { return node_.get(); }  // stable identity for memo tables

private:
  struct Node {
    Kind kind = Kind::Atom;
    int atom = 0;
    std::vector<Formula> kids;
    int depth = 0;
    int width = 0;
    bool temporal = false;
    std::size_t hash = 0;
  };
  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Formula make(Node n);
  std::shared_ptr<const Node> node_;
};

// Index arithmetic |n|_k: the unique m in [1,k] congruent to n mod k.
int mod_index(long long n, int k);

// Named formula families, indexed by k (and i for START).
enum class SchemaName { Cycle, Start, Bundle, TangleFamily, Trouble, Eta, Cont };
Formula build_schema(SchemaName name, int k, int i = 0);

}  // namespace dtl
