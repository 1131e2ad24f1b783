// Dynamic preorder models: loading, clusters, closure, tangles, evaluation,
// continuity.
#include <random>

#include "doctest.h"
#include "dtl/model.hpp"
#include "testutil.hpp"

using namespace dtl;
using testutil::random_formula;
using testutil::random_model;

namespace {

DynModel two_point_cluster() {
  return DynModel({"x", "y"}, {{"x", "y"}, {"y", "x"}}, std::nullopt,
                  {{1, {"x"}}, {2, {"y"}}});
}

}  // namespace

TEST_CASE("model loading") {
  DynModel single({"w"}, {}, std::nullopt, {});
  CHECK(single.size() == 1);
  CHECK_FALSE(single.has_fmap());
  CHECK(single.leq(0, 0));  // closure is reflexive

  DynModel pair = two_point_cluster();
  CHECK(pair.clusters().count() == 1);
  CHECK(pair.clusters().blocks[0].size() == 2);

  DynModel chain({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}}, std::nullopt, {});
  CHECK(chain.leq(0, 2));  // closure is transitive
  CHECK_FALSE(chain.leq(2, 0));
}

TEST_CASE("document diagnostics") {
  CHECK_THROWS_AS(DynModel::from_text("not json"), ModelFormatError);
  CHECK_THROWS_AS(DynModel::from_text(R"({"points":[],"order":[]})"), ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":[],"order":[],"valuation":{},"extra":1})"),
      ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a"],"order":[["a","zz"]],"valuation":{}})"),
      ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a","b"],"order":[],"f":{"a":"b"},"valuation":{}})"),
      ModelFormatError);  // f not total
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a"],"order":[],"valuation":{"p0":[]}})"),
      ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a"],"order":[],"valuation":{"q1":[]}})"),
      ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a","a"],"order":[],"valuation":{}})"),
      ModelFormatError);
  CHECK_THROWS_AS(
      DynModel::from_text(R"({"points":["a"],"order":[],"f":{"a":"b"},"valuation":{}})"),
      ModelFormatError);  // dangling f target
}

TEST_CASE("json round-trip is byte-identical") {
  const char* text =
      R"({"points":["a","b"],"order":[["a","b"]],"f":{"a":"b","b":"b"},"valuation":{"p1":["b"],"p2":[]}})";
  DynModel m = DynModel::from_text(text);
  std::string once = m.to_json().dump();
  DynModel again = DynModel::from_text(once);
  CHECK(again.to_json().dump() == once);
}

TEST_CASE("clusters") {
  DynModel anti({"a", "b", "c", "d"}, {}, std::nullopt, {});
  CHECK(anti.clusters().count() == 4);

  DynModel mixed({"a", "b", "c"}, {{"a", "b"}, {"b", "a"}, {"a", "c"}}, std::nullopt, {});
  const auto& cp = mixed.clusters();
  CHECK(cp.count() == 2);
  CHECK(cp.block_of[0] == cp.block_of[1]);
  CHECK(cp.block_of[2] != cp.block_of[0]);
  // block of {a,b} sits below block of {c}; the block order is antisymmetric
  int low = cp.block_of[0], high = cp.block_of[2];
  CHECK(cp.block_leq[low].test(high));
  CHECK_FALSE(cp.block_leq[high].test(low));
}

TEST_CASE("closure_up") {
  DynModel chain({"a", "b"}, {{"a", "b"}}, std::nullopt, {});
  PointSet s(2);
  CHECK(chain.closure_up(s).none());
  CHECK(chain.closure_up(chain.full_set()) == chain.full_set());
  s.set(0);  // {a}; a ≼ b, so the upset is {a,b}
  CHECK(chain.closure_up(s) == chain.full_set());
  PointSet t(2);
  t.set(1);  // {b} is already an upset
  CHECK(chain.closure_up(t) == t);
}

TEST_CASE("closure_up is a closure operator") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    DynModel m = random_model(rng, 2 + static_cast<int>(rng() % 5), false);
    PointSet a(m.size()), b(m.size());
    for (int i = 0; i < m.size(); ++i) {
      if (rng() & 1) a.set(i);
      if (rng() & 1) b.set(i);
    }
    PointSet ca = m.closure_up(a);
    CHECK(a.subset_of(ca));
    CHECK(m.closure_up(ca) == ca);
    CHECK(m.closure_up(a | b) == (ca | m.closure_up(b)));
    if (a.subset_of(b)) CHECK(ca.subset_of(m.closure_up(b)));
  }
}

TEST_CASE("tangled closure: cluster route") {
  DynModel pair = two_point_cluster();
  std::vector<PointSet> family{pair.atom_set(1), pair.atom_set(2)};
  CHECK(pair.tangled_clusters(family) == pair.full_set());

  // Singleton family is the plain closure.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    DynModel m = random_model(rng, 2 + static_cast<int>(rng() % 4), false);
    PointSet s(m.size());
    for (int i = 0; i < m.size(); ++i)
      if (rng() & 1) s.set(i);
    CHECK(m.tangled_clusters({s}) == m.closure_up(s));
  }
  CHECK_THROWS_AS(pair.tangled_clusters({}), std::invalid_argument);
}

TEST_CASE("tangled closure: fixpoint route") {
  DynModel pair = two_point_cluster();
  CHECK(pair.tangled_gfp({pair.empty_set()}).none());
  CHECK(pair.tangled_gfp({pair.full_set()}) == pair.full_set());
  CHECK_THROWS_AS(pair.tangled_gfp({}), std::invalid_argument);

  // The two routes agree on arbitrary models and families.
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    DynModel m = random_model(rng, 1 + static_cast<int>(rng() % 5), false);
    std::vector<PointSet> family;
    int k = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < k; ++j) {
      PointSet s(m.size());
      for (int i = 0; i < m.size(); ++i)
        if (rng() & 1) s.set(i);
      family.push_back(s);
    }
    CHECK(m.tangled_clusters(family) == m.tangled_gfp(family));
  }
}

TEST_CASE("orbit") {
  DynModel fix({"z"}, {}, std::map<std::string, std::string>{{"z", "z"}}, {});
  Orbit o = fix.orbit(0);
  CHECK(o.prefix.empty());
  CHECK(o.cycle == std::vector<int>{0});

  DynModel two({"a", "b"}, {},
               std::map<std::string, std::string>{{"a", "b"}, {"b", "a"}}, {});
  Orbit o2 = two.orbit(0);
  CHECK(o2.prefix.empty());
  CHECK(o2.cycle == std::vector<int>{0, 1});

  DynModel tail({"c", "a", "b"}, {},
                std::map<std::string, std::string>{{"c", "a"}, {"a", "b"}, {"b", "a"}}, {});
  Orbit o3 = tail.orbit(0);
  CHECK(o3.prefix == std::vector<int>{0});
  CHECK(o3.cycle == std::vector<int>{1, 2});

  DynModel stat({"z"}, {}, std::nullopt, {});
  CHECK_THROWS_AS(stat.orbit(0), StaticModelError);
}

TEST_CASE("eval on a hand-built dynamic model") {
  DynModel m({"a", "b"}, {{"a", "b"}},
             std::map<std::string, std::string>{{"a", "b"}, {"b", "b"}}, {{1, {"b"}}});
  CHECK(m.eval(Formula::atom(1)) == m.atom_set(1));
  CHECK(m.eval(Formula::parse("X p1")) == m.full_set());
  PointSet gp1 = m.eval(Formula::parse("G p1"));
  CHECK(gp1.members() == std::vector<int>{1});
  CHECK(m.eval(Formula::parse("F p1")) == m.full_set());
  CHECK(m.holds("b", Formula::parse("G p1")));
  CHECK_FALSE(m.holds("a", Formula::parse("G p1")));
  CHECK(m.valid_on(Formula::parse("p1 | ~p1")));
  CHECK_FALSE(m.valid_on(Formula::parse("p1")));
}

TEST_CASE("box on a static cluster") {
  DynModel pair = two_point_cluster();
  CHECK(pair.eval(Formula::parse("[](p1 | p2)")) == pair.full_set());
  CHECK_THROWS_AS(pair.eval(Formula::parse("X p1")), StaticModelError);
  CHECK_THROWS_AS(pair.eval(Formula::parse("G p1")), StaticModelError);
}

TEST_CASE("semantic laws on random models") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 150; ++trial) {
    DynModel m = random_model(rng, 1 + static_cast<int>(rng() % 5), true);
    Formula phi = random_formula(rng, 3, 2);
    PointSet v = m.eval(phi);

    // interior duality for the box
    PointSet boxv = m.eval(Formula::box(phi));
    for (int x = 0; x < m.size(); ++x) {
      bool all_below = true;
      for (int y = 0; y < m.size(); ++y)
        if (m.leq(y, x) && !v.test(y)) all_below = false;
      CHECK(boxv.test(x) == all_below);
    }

    // G phi = phi ∩ X G phi, and the orbit clause matches the fixpoint one
    PointSet g = m.eval(Formula::hence(phi));
    CHECK(g == (v & m.eval(Formula::next(Formula::hence(phi)))));
    CHECK(g == m.hence_gfp(v));

    // diamond = closure
    CHECK(m.eval(Formula::diamond(phi)) == m.closure_up(v));
  }
}

TEST_CASE("continuity check") {
  DynModel id({"a", "b"}, {{"a", "b"}},
              std::map<std::string, std::string>{{"a", "a"}, {"b", "b"}}, {});
  CHECK(id.continuity_check().empty());

  DynModel swap({"a", "b"}, {{"a", "b"}},
                std::map<std::string, std::string>{{"a", "b"}, {"b", "a"}}, {});
  auto bad = swap.continuity_check();
  REQUIRE(bad.size() == 1);
  CHECK(bad[0] == std::make_pair(0, 1));

  DynModel stat({"a"}, {}, std::nullopt, {});
  CHECK_THROWS_AS(stat.continuity_check(), StaticModelError);
}

TEST_CASE("monotone maps are exactly the ones with open preimages") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 120; ++trial) {
    int n = 1 + static_cast<int>(rng() % 5);
    DynModel m = random_model(rng, n, true);
    bool monotone = m.continuity_check().empty();
    bool preimages_open = true;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      PointSet s(n);
      for (int i = 0; i < n; ++i)
        if (mask & (1u << i)) s.set(i);
      // downward closed = open in this topology
      bool open = true;
      for (int x = 0; x < n && open; ++x)
        for (int y = 0; y < n; ++y)
          if (s.test(x) && m.leq(y, x) && !s.test(y)) open = false;
      if (!open) continue;
      PointSet pre = m.preimage(s);
      for (int x = 0; x < n && preimages_open; ++x)
        for (int y = 0; y < n; ++y)
          if (pre.test(x) && m.leq(y, x) && !pre.test(y)) preimages_open = false;
    }
    CHECK(monotone == preimages_open);
  }
}

TEST_CASE("dot export mentions every point") {
  DynModel m({"a", "b"}, {{"a", "b"}},
             std::map<std::string, std::string>{{"a", "b"}, {"b", "b"}}, {{1, {"a"}}});
  std::string dot = m.to_dot();
  CHECK(dot.find("\"a\"") != std::string::npos);
  CHECK(dot.find("\"b\"") != std::string::npos);
  CHECK(dot.find("dashed") != std::string::npos);
  CHECK(dot.find("subgraph cluster_0") != std::string::npos);
}
