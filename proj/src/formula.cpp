#include "dtl/formula.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <functional>
#include <sstream>

namespace dtl {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula Formula::make(Node n) {
  std::size_t h = mix(static_cast<std::size_t>(n.kind) + 1, static_cast<std::size_t>(n.atom));
  int d = 0, w = 0;
  bool temporal = false;
  for (const auto& k : n.kids) {
    h = mix(h, k.hash());
    d = std::max(d, k.depth());
    w = std::max(w, k.width());
    temporal = temporal || k.has_temporal();
  }
  switch (n.kind) {
    case Kind::Atom:
      break;
    case Kind::Not:
    case Kind::And:
      break;
    case Kind::Next:
    case Kind::Hence:
      d += 1;
      temporal = true;
      break;
    case Kind::Tangle:
      d += 1;
      w = std::max(w, static_cast<int>(n.kids.size()));
      break;
  }
  n.depth = d;
  n.width = w;
  n.temporal = temporal;
  n.hash = h;
  return Formula(std::make_shared<const Node>(std::move(n)));
}

Formula Formula::atom(int index) {
  if (index < 1) throw std::invalid_argument("atom index must be >= 1");
  Node n;
  n.kind = Kind::Atom;
  n.atom = index;
  return make(std::move(n));
}

Formula Formula::negation(const Formula& a) {
  if (a.kind() == Kind::Not) return a.child();  // ~~a = a
  Node n;
  n.kind = Kind::Not;
  n.kids = {a};
  return make(std::move(n));
}

Formula Formula::conj(const Formula& a, const Formula& b) {
  Node n;
  n.kind = Kind::And;
  n.kids = {a, b};
  return make(std::move(n));
}

Formula Formula::conj(const std::vector<Formula>& parts) {
  if (parts.empty()) throw std::invalid_argument("empty conjunction");
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = conj(acc, parts[i]);
  return acc;
}

Formula Formula::next(const Formula& a) {
  Node n;
  n.kind = Kind::Next;
  n.kids = {a};
  return make(std::move(n));
}

Formula Formula::hence(const Formula& a) {
  Node n;
  n.kind = Kind::Hence;
  n.kids = {a};
  return make(std::move(n));
}

Formula Formula::tangle(std::vector<Formula> args) {
  if (args.empty()) throw std::invalid_argument("tangle argument set must be nonempty");
  std::sort(args.begin(), args.end(),
            [](const Formula& x, const Formula& y) { return compare(x, y) < 0; });
  args.erase(std::unique(args.begin(), args.end(),
                         [](const Formula& x, const Formula& y) { return x == y; }),
             args.end());
  Node n;
  n.kind = Kind::Tangle;
  n.kids = std::move(args);
  return make(std::move(n));
}

Formula Formula::disj(const Formula& a, const Formula& b) {
  return negation(conj(negation(a), negation(b)));
}

Formula Formula::implies(const Formula& a, const Formula& b) {
  return negation(conj(a, negation(b)));
}

Formula Formula::iff(const Formula& a, const Formula& b) {
  return conj(implies(a, b), implies(b, a));
}

Formula Formula::diamond(const Formula& a) { return tangle({a}); }

Formula Formula::box(const Formula& a) { return negation(tangle({negation(a)})); }

Formula Formula::eventually(const Formula& a) { return negation(hence(negation(a))); }

Formula Formula::next_pow(const Formula& a, int n) {
  Formula r = a;
  for (int i = 0; i < n; ++i) r = next(r);
  return r;
}

int Formula::atom_index() const {
  assert(kind() == Kind::Atom);
  return node_->atom;
}

const Formula& Formula::child() const {
  assert(node_->kids.size() == 1);
  return node_->kids[0];
}

const Formula& Formula::lhs() const {
  assert(kind() == Kind::And);
  return node_->kids[0];
}

const Formula& Formula::rhs() const {
  assert(kind() == Kind::And);
  return node_->kids[1];
}

const std::vector<Formula>& Formula::args() const {
  assert(kind() == Kind::Tangle);
  return node_->kids;
}

bool Formula::operator==(const Formula& o) const {
  if (node_ == o.node_) return true;
  if (node_->hash != o.node_->hash) return false;
  return compare(*this, o) == 0;
}

int Formula::compare(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return 0;
  if (a.kind() != b.kind())
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind()) ? -1 : 1;
  if (a.kind() == Kind::Atom)
    return a.node_->atom == b.node_->atom ? 0 : (a.node_->atom < b.node_->atom ? -1 : 1);
  const auto& ka = a.node_->kids;
  const auto& kb = b.node_->kids;
  if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
  for (std::size_t i = 0; i < ka.size(); ++i)
    if (int c = compare(ka[i], kb[i]); c != 0) return c;
  return 0;
}

Formula Formula::substitute(const std::map<int, Formula>& sigma) const {
  switch (kind()) {
    case Kind::Atom: {
      auto it = sigma.find(node_->atom);
      return it == sigma.end() ? *this : it->second;
    }
    case Kind::Not:
      return negation(child().substitute(sigma));
    case Kind::And:
      return conj(lhs().substitute(sigma), rhs().substitute(sigma));
    case Kind::Next:
      return next(child().substitute(sigma));
    case Kind::Hence:
      return hence(child().substitute(sigma));
    case Kind::Tangle: {
      std::vector<Formula> out;
      out.reserve(args().size());
      for (const auto& g : args()) out.push_back(g.substitute(sigma));
      return tangle(std::move(out));
    }
  }
  throw std::logic_error("unreachable");
}

void Formula::collect_atoms(std::set<int>& out) const {
  if (kind() == Kind::Atom) {
    out.insert(node_->atom);
    return;
  }
  for (const auto& k : node_->kids) k.collect_atoms(out);
}

bool Formula::is_propositional() const {
  switch (kind()) {
    case Kind::Atom:
      return true;
    case Kind::Not:
    case Kind::And:
      for (const auto& k : node_->kids)
        if (!k.is_propositional()) return false;
      return true;
    default:
      return false;
  }
}

// ---------------------------------------------------------------------------
// Printing.  Emits the ASCII grammar with minimal parentheses, resugaring
// `->`, `|`, `[]`, `F` and unbraced `<>` where the tree shape allows an exact
// round trip.
namespace {

// Precedence levels: -> (1) < | (2) < & (3) < unary (4) < atoms/braces (5).
constexpr int kPrecImp = 1, kPrecOr = 2, kPrecAnd = 3, kPrecUnary = 4, kPrecAtom = 5;

struct Sugar {
  enum class Tag { Atom, Not, And, Or, Imp, Next, Hence, Fut, Box, Dia, Tangle };
  Tag tag;
  const Formula* a = nullptr;
  const Formula* b = nullptr;
};

Sugar classify(const Formula& f) {
  switch (f.kind()) {
    case Kind::Atom:
      return {Sugar::Tag::Atom};
    case Kind::And:
      return {Sugar::Tag::And, &f.lhs(), &f.rhs()};
    case Kind::Next:
      return {Sugar::Tag::Next, &f.child()};
    case Kind::Hence:
      return {Sugar::Tag::Hence, &f.child()};
    case Kind::Tangle:
      if (f.args().size() == 1) return {Sugar::Tag::Dia, &f.args()[0]};
      return {Sugar::Tag::Tangle};
    case Kind::Not: {
      const Formula& c = f.child();
      if (c.kind() == Kind::And) {
        const Formula& l = c.lhs();
        const Formula& r = c.rhs();
        if (l.kind() == Kind::Not && r.kind() == Kind::Not)
          return {Sugar::Tag::Or, &l.child(), &r.child()};
        if (r.kind() == Kind::Not) return {Sugar::Tag::Imp, &l, &r.child()};
      }
      if (c.kind() == Kind::Tangle && c.args().size() == 1 &&
          c.args()[0].kind() == Kind::Not)
        return {Sugar::Tag::Box, &c.args()[0].child()};
      if (c.kind() == Kind::Hence && c.child().kind() == Kind::Not)
        return {Sugar::Tag::Fut, &c.child().child()};
      return {Sugar::Tag::Not, &c};
    }
  }
  throw std::logic_error("unreachable");
}

int prec_of(Sugar::Tag t) {
  switch (t) {
    case Sugar::Tag::Imp:
      return kPrecImp;
    case Sugar::Tag::Or:
      return kPrecOr;
    case Sugar::Tag::And:
      return kPrecAnd;
    case Sugar::Tag::Atom:
    case Sugar::Tag::Tangle:
      return kPrecAtom;
    default:
      return kPrecUnary;
  }
}

// `ctx` is the lowest precedence printable here without parentheses.
void emit(const Formula& f, int ctx, std::string& out) {
  Sugar s = classify(f);
  if (prec_of(s.tag) < ctx) {
    out += '(';
    emit(f, 0, out);
    out += ')';
    return;
  }
  switch (s.tag) {
    case Sugar::Tag::Atom:
      out += 'p';
      out += std::to_string(f.atom_index());
      return;
    case Sugar::Tag::Not:
      out += '~';
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Next:
      out += "X ";
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Hence:
      out += "G ";
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Fut:
      out += "F ";
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Box:
      out += "[]";
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Dia:
      out += "<>";
      emit(*s.a, kPrecUnary, out);
      return;
    case Sugar::Tag::Tangle: {
      out += "<>{";
      bool first = true;
      for (const auto& g : f.args()) {
        if (!first) out += ',';
        first = false;
        emit(g, 0, out);
      }
      out += '}';
      return;
    }
    case Sugar::Tag::And:
      emit(*s.a, kPrecAnd, out);  // left-associative
      out += " & ";
      emit(*s.b, kPrecAnd + 1, out);
      return;
    case Sugar::Tag::Or:
      emit(*s.a, kPrecOr, out);  // left-associative
      out += " | ";
      emit(*s.b, kPrecOr + 1, out);
      return;
    case Sugar::Tag::Imp:
      emit(*s.a, kPrecImp + 1, out);  // right-associative
      out += " -> ";
      emit(*s.b, kPrecImp, out);
      return;
  }
}

}  // namespace

std::string Formula::str() const {
  std::string out;
  emit(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }
  bool eat(std::string_view tok) {
    skip_ws();
    if (text.substr(pos, tok.size()) == tok) {
      pos += tok.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos); }

  Formula formula() { return implication(); }

  Formula implication() {
    Formula lhs = disjunction();
    if (eat("->")) return Formula::implies(lhs, implication());  // right-assoc
    return lhs;
  }

  Formula disjunction() {
    Formula acc = conjunction();
    while (true) {
      skip_ws();
      // `|` but not `|...` variants; single char suffices here
      if (pos < text.size() && text[pos] == '|') {
        ++pos;
        acc = Formula::disj(acc, conjunction());
      } else {
        return acc;
      }
    }
  }

  Formula conjunction() {
    Formula acc = unary();
    while (eat("&")) acc = Formula::conj(acc, unary());
    return acc;
  }

  Formula unary() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (eat("~")) return Formula::negation(unary());
    if (eat("[]")) return Formula::box(unary());
    if (eat("<>")) {
      skip_ws();
      if (eat("{")) {
        std::vector<Formula> args;
        skip_ws();
        if (eat("}")) fail("empty tangle set");
        args.push_back(formula());
        while (eat(",")) args.push_back(formula());
        if (!eat("}")) fail("expected '}' or ',' in tangle set");
        return Formula::tangle(std::move(args));
      }
      return Formula::diamond(unary());
    }
    char c = text[pos];
    if (c == 'X') {
      ++pos;
      return Formula::next(unary());
    }
    if (c == 'G') {
      ++pos;
      return Formula::hence(unary());
    }
    if (c == 'F') {
      ++pos;
      return Formula::eventually(unary());
    }
    if (c == '(') {
      ++pos;
      Formula f = formula();
      if (!eat(")")) fail("expected ')'");
      return f;
    }
    if (c == 'p') {
      ++pos;
      if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos])))
        fail("expected atom index after 'p'");
      long long idx = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        idx = idx * 10 + (text[pos] - '0');
        if (idx > 1'000'000'000) fail("atom index too large");
        ++pos;
      }
      if (idx < 1) fail("atom indices start at 1");
      return Formula::atom(static_cast<int>(idx));
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

Formula Formula::parse(std::string_view text) {
  Parser p{text};
  Formula f = p.formula();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------

int mod_index(long long n, int k) {
  if (k < 1) throw std::invalid_argument("mod_index requires k >= 1");
  long long r = n % k;
  if (r <= 0) r += k;
  return static_cast<int>(r);
}

Formula build_schema(SchemaName name, int k, int i) {
  if (k < 1) throw std::invalid_argument("schema index k must be >= 1");
  auto p = [](int j) { return Formula::atom(j); };
  auto cycle = [&]() {
    std::vector<Formula> steps;
    for (int j = 1; j <= k; ++j)
      steps.push_back(Formula::implies(p(j), Formula::next(p(mod_index(j + 1, k)))));
    return Formula::implies(Formula::diamond(p(k)), Formula::conj(steps));
  };
  auto start = [&](int j) { return Formula::conj(p(j), Formula::hence(cycle())); };
  auto bundle = [&]() {
    std::vector<Formula> parts;
    for (int j = 1; j <= k; ++j) parts.push_back(Formula::diamond(start(j)));
    return Formula::box(Formula::conj(parts));
  };
  auto tangle_family = [&]() {
    std::vector<Formula> starts;
    for (int j = 1; j <= k; ++j) starts.push_back(start(j));
    return Formula::tangle(std::move(starts));
  };
  switch (name) {
    case SchemaName::Cycle:
      return cycle();
    case SchemaName::Start:
      if (i < 1 || i > k) throw std::invalid_argument("start index out of range");
      return start(i);
    case SchemaName::Bundle:
      return bundle();
    case SchemaName::TangleFamily:
      return tangle_family();
    case SchemaName::Trouble:
      return Formula::implies(bundle(), Formula::hence(Formula::diamond(p(k))));
    case SchemaName::Eta: {
      std::vector<Formula> atoms;
      for (int j = 1; j <= k + 1; ++j) atoms.push_back(p(j));
      return Formula::tangle(std::move(atoms));
    }
    case SchemaName::Cont: {
      std::vector<Formula> nexts, plain;
      for (int j = 1; j <= k; ++j) {
        nexts.push_back(Formula::next(p(j)));
        plain.push_back(p(j));
      }
      return Formula::implies(Formula::tangle(std::move(nexts)),
                              Formula::next(Formula::tangle(std::move(plain))));
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace dtl
