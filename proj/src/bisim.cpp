#include "dtl/bisim.hpp"

#include <algorithm>
#include <set>

namespace dtl {

namespace {

// Atom profile of every point, over the union of both models' atom keys.
std::vector<std::vector<int>> atom_profiles(const DynModel& m, const std::set<int>& atoms) {
  std::vector<std::vector<int>> prof(m.size());
  for (int a : atoms) {
    PointSet s = m.atom_set(a);
    s.for_each([&](int x) { prof[x].push_back(a); });
  }
  return prof;
}

// All points of the orbit of x (prefix and cycle), as a set.
PointSet orbit_set(const DynModel& m, int x) {
  PointSet s(m.size());
  Orbit o = m.orbit(x);
  for (int p : o.prefix) s.set(p);
  for (int p : o.cycle) s.set(p);
  return s;
}

// One direction of the cluster-matching clause.  For every cluster C in
// `down` (clusters of mx below the focus point) and every subset S of C with
// 1 <= |S| <= cap(C), some cluster D of my below the other focus point must
// rank-m match every member of S.  Since a single D matches S exactly when
// S is contained in {a in C : R(a) meets D}, it is enough to check subsets
// of size exactly min(cap, |C|).
bool cluster_forth(const DynModel& mx, const DynModel& my, const PointSet& down_x,
                   const PointSet& down_y, const std::vector<PointSet>& rel, int width) {
  const auto& cx = mx.clusters();
  const auto& cy = my.clusters();
  for (int ci = 0; ci < cx.count(); ci++) {
    if (!down_x.test(cx.blocks[ci][0])) continue;
    const std::vector<int>& c = cx.blocks[ci];
    int csize = static_cast<int>(c.size());
    int take = width == kUnbounded ? csize : std::min(width - 1, csize);
    if (take == 0) continue;
    // coverage sets: which members of C a given D can match
    std::vector<std::uint64_t> covers;
    for (int dj = 0; dj < cy.count(); dj++) {
      if (!down_y.test(cy.blocks[dj][0])) continue;
      std::uint64_t mask = 0;
      for (int i = 0; i < csize; ++i)
        for (int b : cy.blocks[dj])
          if (rel[c[i]].test(b)) {
            mask |= std::uint64_t{1} << i;
            break;
          }
      covers.push_back(mask);
    }
    const std::uint64_t all = csize == 64 ? ~std::uint64_t{0}
                                          : (std::uint64_t{1} << csize) - 1;
    if (take == csize) {
      bool ok = false;
      for (auto m : covers)
        if ((m & all) == all) {
          ok = true;
          break;
        }
      if (!ok) return false;
      continue;
    }
    // enumerate subsets of size exactly `take`
    std::vector<int> idx(take);
    for (int i = 0; i < take; ++i) idx[i] = i;
    while (true) {
      std::uint64_t s = 0;
      for (int i : idx) s |= std::uint64_t{1} << i;
      bool ok = false;
      for (auto m : covers)
        if ((s & ~m) == 0) {
          ok = true;
          break;
        }
      if (!ok) return false;
      int i = take - 1;
      while (i >= 0 && idx[i] == csize - take + i) --i;
      if (i < 0) break;
      ++idx[i];
      for (int j = i + 1; j < take; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return true;
}

}  // namespace

std::vector<std::pair<int, int>> BisimTable::level_pairs(int rank) const {
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < left_.size(); ++x)
    levels_[rank][x].for_each([&](int y) { out.emplace_back(x, static_cast<int>(y)); });
  return out;
}

nlohmann::ordered_json BisimTable::to_json() const {
  nlohmann::ordered_json doc;
  doc["n"] = max_rank_;
  if (width_ == kUnbounded)
    doc["k"] = "unbounded";
  else
    doc["k"] = width_;
  auto levels = nlohmann::ordered_json::object();
  for (int m = 0; m <= max_rank_; ++m) {
    auto pairs = nlohmann::ordered_json::array();
    for (auto [x, y] : level_pairs(m))
      pairs.push_back({left_.name(x), right_.name(y)});
    levels[std::to_string(m)] = std::move(pairs);
  }
  doc["levels"] = std::move(levels);
  return doc;
}

BisimTable compute_bisim(const DynModel& x, const DynModel& y, int max_rank, int width) {
  if (x.has_fmap() != y.has_fmap())
    throw std::invalid_argument(
        "bisimulation requires both models dynamic or both static");
  if (width != kUnbounded && width < 1)
    throw std::invalid_argument("bisimulation width must be >= 1 or unbounded");
  if (max_rank < 0) throw std::invalid_argument("max rank must be >= 0");
  const bool dynamic = x.has_fmap();
  const int nx = x.size(), ny = y.size();

  std::set<int> atoms;
  for (const auto& [a, s] : x.valuation()) atoms.insert(a);
  for (const auto& [a, s] : y.valuation()) atoms.insert(a);
  auto prof_x = atom_profiles(x, atoms);
  auto prof_y = atom_profiles(y, atoms);

  std::vector<std::vector<PointSet>> levels;
  std::vector<PointSet> base(nx, PointSet(ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j)
      if (prof_x[i] == prof_y[j]) base[i].set(j);
  levels.push_back(base);

  std::vector<PointSet> down_x(nx, PointSet(nx)), down_y(ny, PointSet(ny));
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j)
      if (x.leq(j, i)) down_x[i].set(j);
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < ny; ++j)
      if (y.leq(j, i)) down_y[i].set(j);

  std::vector<PointSet> orbits_x, orbits_y;
  if (dynamic) {
    for (int i = 0; i < nx; ++i) orbits_x.push_back(orbit_set(x, i));
    for (int j = 0; j < ny; ++j) orbits_y.push_back(orbit_set(y, j));
  }

  for (int m = 1; m <= max_rank; ++m) {
    const std::vector<PointSet>& prev = levels.back();
    // reverse of prev, for the backward cluster clause
    std::vector<PointSet> prev_rev(ny, PointSet(nx));
    for (int i = 0; i < nx; ++i)
      prev[i].for_each([&](int j) { prev_rev[j].set(i); });

    std::vector<PointSet> cur(nx, PointSet(ny));
    for (int i = 0; i < nx; ++i) {
      base[i].for_each([&](int j) {
        if (!cluster_forth(x, y, down_x[i], down_y[j], prev, width)) return;
        if (!cluster_forth(y, x, down_y[j], down_x[i], prev_rev, width)) return;
        if (dynamic) {
          if (!prev[x.f(i)].test(y.f(static_cast<int>(j)))) return;
          // orbit sets must match each other at the previous rank
          bool forth = true;
          orbits_x[i].for_each([&](int w) {
            if (!prev[w].intersects(orbits_y[j])) forth = false;
          });
          if (!forth) return;
          bool back = true;
          orbits_y[j].for_each([&](int v) {
            if (!prev_rev[v].intersects(orbits_x[i])) back = false;
          });
          if (!back) return;
        }
        cur[i].set(j);
      });
    }
    levels.push_back(std::move(cur));
  }
  return BisimTable(x, y, max_rank, width, std::move(levels));
}

std::vector<Disagreement> check_agreement(const BisimTable& table,
                                          const std::vector<Formula>& formulas) {
  std::vector<Disagreement> bad;
  for (const Formula& phi : formulas) {
    if (phi.depth() > table.max_rank())
      throw std::invalid_argument("formula depth " + std::to_string(phi.depth()) +
                                  " exceeds table rank " + std::to_string(table.max_rank()));
    if (table.width() != kUnbounded && phi.width() >= table.width())
      throw std::invalid_argument("formula width " + std::to_string(phi.width()) +
                                  " is not below table width " + std::to_string(table.width()));
    PointSet lv = table.left().eval(phi);
    PointSet rv = table.right().eval(phi);
    int rank = phi.depth();
    for (int i = 0; i < table.left().size(); ++i)
      table.level(rank)[i].for_each([&](int j) {
        if (lv.test(i) != rv.test(static_cast<int>(j)))
          bad.push_back({i, static_cast<int>(j), rank, phi});
      });
  }
  return bad;
}

}  // namespace dtl
