#include "dtl/model.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <sstream>
#include <unordered_map>

namespace dtl {

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

DynModel::DynModel(std::vector<std::string> points,
                   std::vector<std::pair<std::string, std::string>> edges,
                   std::optional<std::map<std::string, std::string>> fmap,
                   std::map<int, std::vector<std::string>> valuation)
    : names_(std::move(points)), edges_(std::move(edges)) {
  for (int i = 0; i < static_cast<int>(names_.size()); ++i) {
    if (!index_.emplace(names_[i], i).second)
      throw ModelFormatError("duplicate point name '" + names_[i] + "'");
  }
  const int n = size();

  // Reflexive-transitive closure of the generator edges, one BFS per point.
  std::vector<std::vector<int>> adj(n);
  for (const auto& [a, b] : edges_) adj[index_of(a)].push_back(index_of(b));
  up_.assign(n, PointSet(n));
  for (int x = 0; x < n; ++x) {
    std::deque<int> queue{x};
    up_[x].set(x);
    while (!queue.empty()) {
      int y = queue.front();
      queue.pop_front();
      for (int z : adj[y])
        if (!up_[x].test(z)) {
          up_[x].set(z);
          queue.push_back(z);
        }
    }
  }

  if (fmap) {
    fmap_.assign(n, -1);
    for (const auto& [a, b] : *fmap) fmap_[index_of(a)] = index_of(b);
    for (int x = 0; x < n; ++x)
      if (fmap_[x] < 0)
        throw ModelFormatError("point map is not total: no image for '" + names_[x] + "'");
  }

  for (auto& [atom, members] : valuation) {
    if (atom < 1) throw ModelFormatError("atom indices start at 1");
    PointSet s(n);
    for (const auto& m : members) s.set(index_of(m));
    valuation_.emplace(atom, std::move(s));
  }

  // ≈-classes in point order; block order via any representative.
  clusters_.block_of.assign(n, -1);
  for (int x = 0; x < n; ++x) {
    if (clusters_.block_of[x] != -1) continue;
    int b = clusters_.count();
    std::vector<int> block;
    for (int y = x; y < n; ++y)
      if (clusters_.block_of[y] == -1 && up_[x].test(y) && up_[y].test(x)) {
        clusters_.block_of[y] = b;
        block.push_back(y);
      }
    clusters_.blocks.push_back(std::move(block));
  }
  const int m = clusters_.count();
  clusters_.block_leq.assign(m, PointSet(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if (up_[clusters_.blocks[i][0]].test(clusters_.blocks[j][0]))
        clusters_.block_leq[i].set(j);
}

int DynModel::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end())
    throw ModelFormatError("unknown point name '" + std::string(name) + "'");
  return it->second;
}

bool DynModel::has_point(std::string_view name) const {
  return index_.find(name) != index_.end();
}

int DynModel::f(int x) const {
  require_fmap("point map");
  return fmap_[x];
}

void DynModel::require_fmap(const char* op) const {
  if (fmap_.empty())
    throw StaticModelError(std::string(op) + " requires a model with a point map");
}

PointSet DynModel::atom_set(int atom) const {
  auto it = valuation_.find(atom);
  return it == valuation_.end() ? empty_set() : it->second;
}

PointSet DynModel::closure_up(const PointSet& s) const {
  PointSet r(size());
  s.for_each([&](int x) { r |= up_[x]; });
  return r;
}

PointSet DynModel::preimage(const PointSet& s) const {
  require_fmap("X");
  PointSet r(size());
  for (int x = 0; x < size(); ++x)
    if (s.test(fmap_[x])) r.set(x);
  return r;
}

PointSet DynModel::tangled_clusters(const std::vector<PointSet>& family) const {
  if (family.empty()) throw std::invalid_argument("tangle family must be nonempty");
  PointSet r(size());
  for (const auto& block : clusters_.blocks) {
    bool meets_all = true;
    for (const auto& a : family) {
      bool meets = false;
      for (int p : block)
        if (a.test(p)) {
          meets = true;
          break;
        }
      if (!meets) {
        meets_all = false;
        break;
      }
    }
    if (meets_all) r |= up_[block[0]];
  }
  return r;
}

PointSet DynModel::tangled_gfp(const std::vector<PointSet>& family) const {
  if (family.empty()) throw std::invalid_argument("tangle family must be nonempty");
  PointSet e = full_set();
  while (true) {
    PointSet next = e;
    for (const auto& a : family) next &= closure_up(a & e);
    if (next == e) return e;
    e = std::move(next);
  }
}

Orbit DynModel::orbit(int x) const {
  require_fmap("orbit");
  std::vector<int> seen_at(size(), -1);
  std::vector<int> seq;
  int y = x;
  while (seen_at[y] == -1) {
    seen_at[y] = static_cast<int>(seq.size());
    seq.push_back(y);
    y = fmap_[y];
  }
  Orbit o;
  o.prefix.assign(seq.begin(), seq.begin() + seen_at[y]);
  o.cycle.assign(seq.begin() + seen_at[y], seq.end());
  return o;
}

PointSet DynModel::eval(const Formula& phi) const {
  const int n = size();
  // Orbit-based G: a point satisfies G c iff every forward f-iterate
  // (including itself) lies in c.  Each f-chain is decided in one walk.
  auto hence_orbits = [&](const PointSet& c) {
    std::vector<signed char> state(n, -1);
    std::vector<int> pos(n, -1);
    std::vector<int> path;
    for (int x = 0; x < n; ++x) {
      if (state[x] != -1) continue;
      path.clear();
      int y = x;
      while (state[y] == -1 && pos[y] == -1) {
        pos[y] = static_cast<int>(path.size());
        path.push_back(y);
        y = fmap_[y];
      }
      bool ok;
      int tail_start;
      if (state[y] != -1) {
        ok = state[y] != 0;
        tail_start = static_cast<int>(path.size());
      } else {
        bool cycle_ok = true;
        for (int i = pos[y]; i < static_cast<int>(path.size()); ++i)
          cycle_ok = cycle_ok && c.test(path[i]);
        for (int i = pos[y]; i < static_cast<int>(path.size()); ++i)
          state[path[i]] = cycle_ok ? 1 : 0;
        ok = cycle_ok;
        tail_start = pos[y];
      }
      for (int i = tail_start - 1; i >= 0; --i) {
        ok = ok && c.test(path[i]);
        state[path[i]] = ok ? 1 : 0;
      }
      for (int p : path) pos[p] = -1;
    }
    PointSet r(n);
    for (int x = 0; x < n; ++x)
      if (state[x] == 1) r.set(x);
    return r;
  };

  std::unordered_map<const void*, PointSet> memo;
  std::function<PointSet(const Formula&)> go = [&](const Formula& g) -> PointSet {
    if (auto it = memo.find(g.id()); it != memo.end()) return it->second;
    PointSet r(n);
    switch (g.kind()) {
      case Kind::Atom:
        r = atom_set(g.atom_index());
        break;
      case Kind::Not:
        r = go(g.child()).complement();
        break;
      case Kind::And:
        r = go(g.lhs()) & go(g.rhs());
        break;
      case Kind::Next:
        require_fmap("X");
        r = preimage(go(g.child()));
        break;
      case Kind::Hence:
        require_fmap("G");
        r = hence_orbits(go(g.child()));
        break;
      case Kind::Tangle: {
        std::vector<PointSet> family;
        family.reserve(g.args().size());
        for (const auto& a : g.args()) family.push_back(go(a));
        r = tangled_clusters(family);
        break;
      }
    }
    memo.emplace(g.id(), r);
    return r;
  };
  return go(phi);
}

bool DynModel::holds(int x, const Formula& phi) const { return eval(phi).test(x); }

bool DynModel::holds(std::string_view point, const Formula& phi) const {
  return holds(index_of(point), phi);
}

bool DynModel::valid_on(const Formula& phi) const { return eval(phi) == full_set(); }

PointSet DynModel::hence_gfp(const PointSet& child) const {
  require_fmap("G");
  PointSet s = full_set();
  while (true) {
    PointSet next = child & preimage(s);
    if (next == s) return s;
    s = std::move(next);
  }
}

std::vector<std::pair<int, int>> DynModel::continuity_check() const {
  require_fmap("continuity check");
  std::vector<std::pair<int, int>> bad;
  for (int x = 0; x < size(); ++x)
    for (int y = 0; y < size(); ++y)
      if (up_[x].test(y) && !up_[fmap_[x]].test(fmap_[y])) bad.emplace_back(x, y);
  return bad;
}

// ---------------------------------------------------------------------------
// JSON document handling.

DynModel DynModel::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ModelFormatError("model document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "points" && key != "order" && key != "f" && key != "valuation")
      throw ModelFormatError("unknown field '" + key + "' in model document");
  }
  for (const char* field : {"points", "order", "valuation"})
    if (!doc.contains(field))
      throw ModelFormatError(std::string("missing field '") + field + "'");

  std::vector<std::string> points;
  if (!doc["points"].is_array())
    throw ModelFormatError("'points' must be an array of strings");
  for (const auto& p : doc["points"]) {
    if (!p.is_string()) throw ModelFormatError("'points' must be an array of strings");
    points.push_back(p.get<std::string>());
  }

  std::vector<std::pair<std::string, std::string>> edges;
  if (!doc["order"].is_array()) throw ModelFormatError("'order' must be an array of pairs");
  for (const auto& e : doc["order"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw ModelFormatError("each 'order' entry must be a pair [x, y] of point names");
    edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
  }

  std::optional<std::map<std::string, std::string>> fmap;
  if (doc.contains("f")) {
    if (!doc["f"].is_object()) throw ModelFormatError("'f' must be an object");
    fmap.emplace();
    for (const auto& [key, value] : doc["f"].items()) {
      if (!value.is_string())
        throw ModelFormatError("'f' values must be point names");
      (*fmap)[key] = value.get<std::string>();
    }
  }

  std::map<int, std::vector<std::string>> valuation;
  if (!doc["valuation"].is_object()) throw ModelFormatError("'valuation' must be an object");
  for (const auto& [key, value] : doc["valuation"].items()) {
    if (key.size() < 2 || key[0] != 'p' ||
        key.find_first_not_of("0123456789", 1) != std::string::npos)
      throw ModelFormatError("valuation key '" + key + "' is not an atom (expected p1, p2, ...)");
    int atom = std::stoi(key.substr(1));
    if (atom < 1) throw ModelFormatError("valuation key '" + key + "': atom indices start at 1");
    if (!value.is_array())
      throw ModelFormatError("valuation entry '" + key + "' must be an array of point names");
    std::vector<std::string> members;
    for (const auto& m : value) {
      if (!m.is_string())
        throw ModelFormatError("valuation entry '" + key + "' must be an array of point names");
      members.push_back(m.get<std::string>());
    }
    valuation.emplace(atom, std::move(members));
  }

  return DynModel(std::move(points), std::move(edges), std::move(fmap), std::move(valuation));
}

DynModel DynModel::from_text(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelFormatError(std::string("model document is not valid JSON: ") + e.what());
  }
  return from_json(doc);
}

nlohmann::ordered_json DynModel::to_json() const {
  nlohmann::ordered_json doc;
  doc["points"] = names_;
  auto order = nlohmann::ordered_json::array();
  for (const auto& [a, b] : edges_) order.push_back({a, b});
  doc["order"] = std::move(order);
  if (has_fmap()) {
    auto f = nlohmann::ordered_json::object();
    for (int x = 0; x < size(); ++x) f[names_[x]] = names_[fmap_[x]];
    doc["f"] = std::move(f);
  }
  auto val = nlohmann::ordered_json::object();
  for (const auto& [atom, set] : valuation_) {
    auto members = nlohmann::ordered_json::array();
    set.for_each([&](int x) { members.push_back(names_[x]); });
    val["p" + std::to_string(atom)] = std::move(members);
  }
  doc["valuation"] = std::move(val);
  return doc;
}

std::string DynModel::to_dot() const {
  std::ostringstream out;
  out << "digraph model {\n  rankdir=BT;\n  node [shape=box, fontsize=10];\n";
  for (int b = 0; b < clusters_.count(); ++b) {
    out << "  subgraph cluster_" << b << " {\n    style=rounded;\n";
    for (int x : clusters_.blocks[b]) {
      std::string label = names_[x];
      std::string atoms;
      for (const auto& [atom, set] : valuation_)
        if (set.test(x)) atoms += (atoms.empty() ? "p" : " p") + std::to_string(atom);
      if (!atoms.empty()) label += "\\n" + atoms;
      out << "    " << quoted(names_[x]) << " [label=" << quoted(label) << "];\n";
    }
    out << "  }\n";
  }
  // Hasse edges of the strict block order, drawn lower -> higher.
  const int m = clusters_.count();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j || !clusters_.block_leq[i].test(j)) continue;
      bool covering = true;
      for (int l = 0; l < m && covering; ++l)
        if (l != i && l != j && clusters_.block_leq[i].test(l) &&
            clusters_.block_leq[l].test(j))
          covering = false;
      if (covering)
        out << "  " << quoted(names_[clusters_.blocks[i][0]]) << " -> "
            << quoted(names_[clusters_.blocks[j][0]]) << ";\n";
    }
  if (has_fmap()) {
    for (int x = 0; x < size(); ++x)
      out << "  " << quoted(names_[x]) << " -> " << quoted(names_[fmap_[x]])
          << " [style=dashed, constraint=false];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace dtl
