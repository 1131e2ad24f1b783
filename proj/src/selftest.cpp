// In-process invariant sweeps, one report per library area.  Everything is
// seeded, so two runs produce the same verdicts and counts.
#include "dtl/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "dtl/bisim.hpp"
#include "dtl/gallery.hpp"
#include "dtl/proof.hpp"

namespace dtl {
namespace {

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Static twin of a dynamic model: same order and valuation, point map gone.
DynModel drop_map(const DynModel& m) {
  nlohmann::ordered_json doc = m.to_json();
  doc.erase("f");
  return DynModel::from_json(doc);
}

PointSet random_set(std::mt19937_64& rng, const DynModel& m) {
  PointSet s = m.empty_set();
  for (int x = 0; x < m.size(); ++x)
    if (rng() % 2 == 0) s.set(x);
  return s;
}

bool is_downset(const DynModel& m, const PointSet& s) {
  for (int x : s.members())
    for (int y = 0; y < m.size(); ++y)
      if (m.leq(y, x) && !s.test(y)) return false;
  return true;
}

ExperimentReport formula_report() {
  ExperimentReport r;
  r.experiment = "selftest_formula_core";
  Stopwatch sw;
  std::mt19937_64 rng(11);

  int bad = 0;
  for (int i = 0; i < 300; ++i) {
    Formula f = sample_formula(rng, 3, 3, 4, 10);
    if (Formula::parse(f.str()) != f) ++bad;
  }
  r.check("parse inverts print on 300 seeded formulas", 0, bad);

  bad = 0;
  for (int i = 0; i < 200; ++i) {
    Formula f = sample_formula(rng, 3, 2, 3, 8);
    std::map<int, Formula> sigma;
    int worst = 0;
    for (int a = 1; a <= 3; ++a) {
      Formula g = sample_formula(rng, 2, 2, 3, 6);
      worst = std::max(worst, g.depth());
      sigma.emplace(a, g);
    }
    if (f.substitute(sigma).depth() > f.depth() + worst) ++bad;
  }
  r.check("substitution raises depth by at most the deepest substituend, 200 pairs", 0, bad);

  bool widths = true;
  for (int k = 1; k <= 6; ++k) {
    if (build_schema(SchemaName::Trouble, k).width() != 1) widths = false;
    if (build_schema(SchemaName::Cont, k).width() != k) widths = false;
  }
  r.check("trouble formulas have width 1 and continuity instances width k, k in [1,6]",
          true, widths);

  bool mod_ok = true;
  for (int k = 1; k <= 8; ++k)
    for (int n = -50; n <= 50; ++n) {
      int v = mod_index(n, k);
      if (v < 1 || v > k || (v - n) % k != 0 || mod_index(n + k, k) != v) mod_ok = false;
    }
  r.check("index arithmetic lands in [1,k], stays congruent, and is k-periodic", true, mod_ok);

  bad = 0;
  for (int i = 0; i < 200; ++i) {
    std::vector<Formula> args;
    int arity = 1 + static_cast<int>(rng() % 3);
    for (int j = 0; j < arity; ++j) args.push_back(sample_formula(rng, 2, 2, 3, 5));
    std::vector<Formula> shuffled = args;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (Formula::tangle(args) != Formula::tangle(shuffled)) ++bad;
  }
  r.check("tangle ignores argument order on 200 seeded families", 0, bad);
  r.elapsed_seconds = sw.seconds();
  return r;
}

ExperimentReport semantics_report() {
  ExperimentReport r;
  r.experiment = "selftest_kripke_semantics";
  Stopwatch sw;
  std::mt19937_64 rng(22);

  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DynModel m = gen_random_model(rng(), 2 + rng() % 8, 1 + rng() % 4, 2, false);
    PointSet s = random_set(rng, m), t = random_set(rng, m);
    PointSet cs = m.closure_up(s), ct = m.closure_up(t);
    if (!s.subset_of(cs)) ++bad;
    if (m.closure_up(cs) != cs) ++bad;
    if (!cs.subset_of(m.closure_up(s | t))) ++bad;
    if (m.closure_up(s | t) != (cs | ct)) ++bad;
  }
  r.check("closure laws: extensive, idempotent, monotone, additive (100 models)", 0, bad);

  bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DynModel m = gen_random_model(rng(), 2 + rng() % 8, 1 + rng() % 4, 2, false);
    PointSet s = random_set(rng, m);
    if (m.tangled_clusters({s}) != m.closure_up(s)) ++bad;
  }
  r.check("singleton tangled closure equals topological closure (100 models)", 0, bad);

  bad = 0;
  long agreements = 0;
  for (int size = 1; size <= 3; ++size)
    for (const DynModel& m : enumerate_preorders(size))
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<PointSet> family(1 + rng() % 3);
        for (PointSet& s : family) s = random_set(rng, m);
        ++agreements;
        if (m.tangled_clusters(family) != m.tangled_gfp(family)) ++bad;
      }
  for (int trial = 0; trial < 50; ++trial) {
    DynModel m = gen_random_model(rng(), 2 + rng() % 10, 1 + rng() % 5, 2, false);
    std::vector<PointSet> family(1 + rng() % 3);
    for (PointSet& s : family) s = random_set(rng, m);
    ++agreements;
    if (m.tangled_clusters(family) != m.tangled_gfp(family)) ++bad;
  }
  r.check("cluster route and fixpoint route agree on " + std::to_string(agreements) +
              " tangled closures",
          0, bad);

  bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DynModel m = gen_random_model(rng(), 2 + rng() % 6, 1 + rng() % 3, 3, false);
    Formula f = sample_formula(rng, 2, 2, 3, 8);
    PointSet inner = m.eval(f);
    PointSet boxed = m.eval(Formula::box(f));
    for (int x = 0; x < m.size(); ++x) {
      bool all_below = true;
      for (int y = 0; y < m.size(); ++y)
        if (m.leq(y, x) && !inner.test(y)) all_below = false;
      if (boxed.test(x) != all_below) ++bad;
    }
  }
  r.check("box holds exactly where every point below satisfies the child (100 models)",
          0, bad);

  bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DynModel m = gen_random_model(rng(), 2 + rng() % 6, 1 + rng() % 3, 3, false);
    Formula f = sample_formula(rng, 2, 2, 3, 8);
    Formula gf = Formula::hence(f);
    if (m.eval(gf) != (m.eval(f) & m.eval(Formula::next(gf)))) ++bad;
  }
  r.check("hence is the fixpoint of now-and-next (100 models)", 0, bad);

  bad = 0;
  for (int trial = 0; trial < 30; ++trial) {
    DynModel m = gen_random_model(rng(), 3 + rng() % 8, 1 + rng() % 4, 3, true);
    int largest = 0;
    for (const auto& blk : m.clusters().blocks)
      largest = std::max(largest, static_cast<int>(blk.size()));
    for (int k = 1; k <= std::min(largest, 3); ++k) {
      AxiomInstance inst;
      inst.schema = Schema::Cont;
      inst.arity = k;
      if (!m.valid_on(instantiate_axiom(inst))) ++bad;
      for (int rep = 0; rep < 3; ++rep) {
        AxiomInstance sub = inst;
        for (int a = 1; a <= k; ++a)
          sub.subst.emplace(a, sample_formula(rng, 2, 2, 3, 6));
        if (!m.valid_on(instantiate_axiom(sub))) ++bad;
      }
    }
  }
  r.check("continuity instances up to the cluster size hold on continuous models (30 models)",
          0, bad);

  bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    DynModel m = gen_random_model(rng(), 1 + rng() % 5, 1 + rng() % 3, 2, trial % 2 == 0);
    bool monotone = m.continuity_check().empty();
    bool open_preimages = true;
    for (unsigned mask = 0; mask < 1u << m.size(); ++mask) {
      PointSet s = m.empty_set();
      for (int x = 0; x < m.size(); ++x)
        if (mask >> x & 1) s.set(x);
      if (!is_downset(m, s)) continue;
      if (!is_downset(m, m.preimage(s))) open_preimages = false;
    }
    if (monotone != open_preimages) ++bad;
  }
  r.check("monotone point maps are exactly those with open preimages (200 small models)",
          0, bad);
  r.elapsed_seconds = sw.seconds();
  return r;
}

ExperimentReport bisim_report() {
  ExperimentReport r;
  r.experiment = "selftest_bisimulation";
  Stopwatch sw;
  std::mt19937_64 rng(33);

  int mono_bad = 0, atom_bad = 0, agree_bad = 0, sym_bad = 0, width_bad = 0;
  for (int trial = 0; trial < 40; ++trial) {
    bool dynamic = trial % 2 == 0;
    DynModel a = gen_random_model(rng(), 2 + rng() % 5, 1 + rng() % 3, 3, false);
    DynModel b = gen_random_model(rng(), 2 + rng() % 5, 1 + rng() % 3, 3, false);
    if (!dynamic) {
      a = drop_map(a);
      b = drop_map(b);
    }
    int width = 2 + static_cast<int>(rng() % 2);
    BisimTable t = compute_bisim(a, b, 3, width);
    BisimTable rev = compute_bisim(b, a, 3, width);
    BisimTable narrower = compute_bisim(a, b, 3, width - 1);
    for (int m = 0; m <= 3; ++m)
      for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
          if (m > 0 && t.related(m, i, j) && !t.related(m - 1, i, j)) ++mono_bad;
          if (t.related(m, i, j) != rev.related(m, j, i)) ++sym_bad;
          if (t.related(m, i, j) && !narrower.related(m, i, j)) ++width_bad;
        }
    for (int i = 0; i < a.size(); ++i)
      for (int j = 0; j < b.size(); ++j) {
        bool same = true;
        for (int atom = 1; atom <= 3; ++atom)
          if (a.atom_set(atom).test(i) != b.atom_set(atom).test(j)) same = false;
        if (t.related(0, i, j) != same) ++atom_bad;
      }
    if (dynamic) {
      std::vector<Formula> probes;
      for (int i = 0; i < 10; ++i)
        probes.push_back(sample_formula(rng, 3, width - 1, 3, 8));
      agree_bad += static_cast<int>(check_agreement(t, probes).size());
    }
  }
  r.check("rank m+1 refines rank m on 40 seeded table pairs", 0, mono_bad);
  r.check("rank 0 is atom-profile agreement", 0, atom_bad);
  r.check("related pairs agree on all in-cap probe formulas", 0, agree_bad);
  r.check("tables are symmetric under swapping the models", 0, sym_bad);
  r.check("narrower width relates at least as much, levelwise", 0, width_bad);
  r.elapsed_seconds = sw.seconds();
  return r;
}

ExperimentReport gallery_report() {
  ExperimentReport r;
  r.experiment = "selftest_model_gallery";
  Stopwatch sw;
  std::mt19937_64 rng(44);

  const std::vector<std::pair<int, int>> grid = {{1, 2}, {2, 2}, {3, 2}, {1, 3}, {2, 3}, {3, 3}};

  int bad = 0;
  for (auto [N, K] : grid) {
    for (const DynModel& m : {gen_A(N, K), gen_B(N, K)}) {
      if (DynModel::from_json(m.to_json()).to_json().dump() != m.to_json().dump()) ++bad;
      for (int x = 0; x < m.size(); ++x) {
        int atoms = 0;
        for (int atom = 1; atom <= K; ++atom)
          if (m.atom_set(atom).test(x)) ++atoms;
        if (atoms != 1) ++bad;
      }
    }
  }
  r.check("ladder and grid models reload from JSON and are atom-partitioned", 0, bad);

  bad = 0;
  for (auto [N, K] : grid) {
    DynModel b = gen_B(N, K);
    if (!b.has_fmap()) ++bad;
    if (!b.continuity_check().empty()) ++bad;
  }
  r.check("grid point maps are total and continuous across the grid", 0, bad);

  bad = 0;
  for (auto [N, K] : grid) {
    DynModel b = gen_B(N, K);
    std::set<int> ring;
    for (int x = 0; x < b.size(); ++x)
      if (b.name(x)[0] == '0' && b.name(x)[1] == '.') ring.insert(x);
    Orbit o = b.orbit(b.index_of("0.0.1"));
    if (!o.prefix.empty()) ++bad;
    if (std::set<int>(o.cycle.begin(), o.cycle.end()) != ring) ++bad;
    if (static_cast<int>(o.cycle.size()) != (K - 1) * (N * K + N + 1)) ++bad;
  }
  r.check("the h=0 points form one cycle of length (K-1)(NK+N+1)", 0, bad);

  // Transitivity genuinely fails at m = 0, where the low band s <= K(N-m)
  // reaches the tail band [NK, N(K+1)-m]; from m = 1 up the bands are
  // disjoint and the similarity is an equivalence.
  bad = 0;
  for (auto [N, K] : grid)
    for (int m = 0; m < N; ++m) {
      DynModel b = gen_B(N, K);
      auto sim = sim_pairs(b, N, K, m);
      std::set<std::pair<int, int>> rel(sim.begin(), sim.end());
      for (int x = 0; x < b.size(); ++x)
        if (!rel.count({x, x})) ++bad;
      for (auto [x, y] : rel) {
        if (!rel.count({y, x})) ++bad;
        if (m >= 1)
          for (int z = 0; z < b.size(); ++z)
            if (rel.count({y, z}) && !rel.count({x, z})) ++bad;
      }
    }
  r.check("the coarse similarity is reflexive and symmetric, and an equivalence for m >= 1",
          0, bad);

  bad = 0;
  for (auto [N, K] : grid) {
    for (int m = 0; m <= N; ++m)
      if (!verify_nkbis(N, K, m).passed()) ++bad;
    for (int m = 0; m < N; ++m) {
      if (!verify_bislemm(N, K, m).passed()) ++bad;
      if (!verify_mainaxis(N, K, m).passed()) ++bad;
    }
    if (!verify_trouble_fails(N, K).passed()) ++bad;
  }
  if (!verify_cont_soundness(1, 1, 30, 5).passed()) ++bad;
  if (!verify_cont_soundness(2, 2, 20, 6).passed()) ++bad;
  r.check("every sweep driver passes across the N <= 3, K in {2,3} grid", 0, bad);

  bad = 0;
  std::vector<DynModel> subjects = {gen_A(3, 2), gen_A(1, 3)};
  for (int i = 0; i < 3; ++i)
    subjects.push_back(drop_map(gen_random_model(rng(), 4 + rng() % 7, 1 + rng() % 4, 2, false)));
  for (const DynModel& m : subjects) {
    for (int w = 1; w <= 2; ++w) {
      auto levels = definable_sets(m, {1, 2}, w, 2);
      for (int d = 0; d < 2; ++d) {
        std::set<PointSet> lo(levels[d].begin(), levels[d].end());
        std::set<PointSet> hi(levels[d + 1].begin(), levels[d + 1].end());
        if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) ++bad;
      }
      if (w == 2) {
        auto narrow = definable_sets(m, {1, 2}, 1, 2);
        for (int d = 0; d <= 2; ++d) {
          std::set<PointSet> lo(narrow[d].begin(), narrow[d].end());
          std::set<PointSet> hi(levels[d].begin(), levels[d].end());
          if (!std::includes(hi.begin(), hi.end(), lo.begin(), lo.end())) ++bad;
        }
      }
      for (int d = 0; d <= 2; ++d) {
        BisimTable table = compute_bisim(m, m, d, w + 1);
        for (const PointSet& s : levels[d])
          for (int x = 0; x < m.size(); ++x)
            for (int y = 0; y < m.size(); ++y)
              if (table.related(d, x, y) && s.test(x) != s.test(y)) ++bad;
      }
    }
  }
  r.check("definable sets grow with depth and width and respect bisimilar pairs", 0, bad);
  r.elapsed_seconds = sw.seconds();
  return r;
}

ExperimentReport proof_report() {
  ExperimentReport r;
  r.experiment = "selftest_proof_kernel";
  Stopwatch sw;
  std::mt19937_64 rng(55);

  int bad = 0;
  for (int k = 1; k <= 2; ++k) {
    Derivation d = derive_trouble(k);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      DynModel m = gen_random_model(seed, 4 + seed % 5, 1 + seed % 3, 3, true);
      if (!audit_soundness(d, m).passed()) ++bad;
    }
  }
  r.check("accepted derivations stay valid on 50 seeded continuous models each", 0, bad);

  bad = 0;
  for (int k = 1; k <= 3; ++k) {
    Derivation d = derive_trouble(k);
    for (SystemDescriptor sys : {SystemDescriptor{k, 2, false}, SystemDescriptor{k + 1, 2, false},
                                 SystemDescriptor{k, 3, false}, SystemDescriptor{k, kNoCap, false},
                                 SystemDescriptor{kNoCap, kNoCap, false}})
      if (!check_derivation(d, sys).accepted) ++bad;
  }
  r.check("acceptance is monotone as the caps loosen", 0, bad);

  bad = 0;
  for (int k = 2; k <= 4; ++k) {
    Derivation d = derive_trouble(k);
    if (!check_derivation(d, {k, 2, false}).accepted) ++bad;
    Verdict v = check_derivation(d, {k - 1, kNoCap, false});
    if (v.accepted) ++bad;
    if (v.reason != "cont_width") ++bad;
    int cont_line = 0;
    for (std::size_t i = 0; i < d.lines.size(); ++i)
      if (const auto* ax = std::get_if<AxiomInstance>(&d.lines[i].just);
          ax && ax->schema == Schema::Cont)
        cont_line = static_cast<int>(i) + 1;
    if (v.line != cont_line) ++bad;
  }
  r.check("trouble derivations are rejected exactly at their continuity line one arity down",
          0, bad);

  bad = 0;
  for (int trial = 0; trial < 300; ++trial) {
    std::function<Formula(int)> prop = [&](int budget) -> Formula {
      if (budget <= 0) return Formula::atom(1 + static_cast<int>(rng() % 3));
      switch (rng() % 3) {
        case 0:
          return Formula::atom(1 + static_cast<int>(rng() % 3));
        case 1:
          return Formula::negation(prop(budget - 1));
        default:
          return Formula::conj(prop(budget - 1), prop(budget - 1));
      }
    };
    Formula f = prop(3);
    bool truth_table = true;
    for (unsigned row = 0; row < 8 && truth_table; ++row) {
      std::function<bool(const Formula&)> ev = [&](const Formula& g) -> bool {
        switch (g.kind()) {
          case Kind::Atom: return row >> (g.atom_index() - 1) & 1;
          case Kind::Not: return !ev(g.child());
          default: return ev(g.lhs()) && ev(g.rhs());
        }
      };
      if (!ev(f)) truth_table = false;
    }
    if (is_tautology(f) != truth_table) ++bad;
  }
  r.check("tautology decisions match an exhaustive truth-table oracle on 300 samples",
          0, bad);

  bad = 0;
  Derivation base = derive_trouble(1);
  Verdict clean1 = check_derivation(base, SystemDescriptor{});
  Verdict clean2 = check_derivation(base, SystemDescriptor{});
  if (clean1.to_json().dump() != clean2.to_json().dump()) ++bad;
  std::vector<int> axiom_lines;
  for (std::size_t i = 0; i < base.lines.size() && axiom_lines.size() < 2; ++i)
    if (std::holds_alternative<AxiomInstance>(base.lines[i].just))
      axiom_lines.push_back(static_cast<int>(i));
  Derivation mutated = base;
  for (int i : axiom_lines)
    mutated.lines[i].formula = Formula::negation(mutated.lines[i].formula);
  Verdict v1 = check_derivation(mutated, SystemDescriptor{});
  Verdict v2 = check_derivation(mutated, SystemDescriptor{});
  if (v1.to_json().dump() != v2.to_json().dump()) ++bad;
  if (v1.accepted || v1.line != axiom_lines.front() + 1) ++bad;
  r.check("checking is deterministic and reports the least failing line", 0, bad);
  r.elapsed_seconds = sw.seconds();
  return r;
}

}  // namespace

std::vector<ExperimentReport> run_selftest() {
  return {formula_report(), semantics_report(), bisim_report(), gallery_report(),
          proof_report()};
}

}  // namespace dtl
