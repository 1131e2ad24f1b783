// Acceptance gate.  Each criterion A1..A9 runs as an exact finite check with
// pinned parameters, seeds and runtime budgets, printing one PASS/FAIL line;
// the process exits nonzero if any criterion fails.
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dtl/bisim.hpp"
#include "dtl/experiments.hpp"
#include "dtl/formula.hpp"
#include "dtl/gallery.hpp"
#include "dtl/model.hpp"
#include "dtl/proof.hpp"
#include "dtl/report.hpp"

namespace {

using dtl::Formula;

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (detail.empty()) detail = why;
  }
};

std::string first_failure(const dtl::ExperimentReport& report) {
  for (const dtl::Assertion& a : report.assertions)
    if (!a.pass)
      return a.description + " (expected " + a.expected.dump() + ", observed " +
             a.observed.dump() + ")";
  return "";
}

// A1: the trouble derivations for k = 1..4 are accepted under caps (k, 2)
// and carry their six milestone formulas as lines, in order; < 10 s total.
Outcome a1() {
  Outcome out;
  Stopwatch total;
  for (int k = 1; k <= 4; ++k) {
    dtl::Derivation d = dtl::derive_trouble(k);
    dtl::Verdict v = dtl::check_derivation(d, {k, 2, false});
    if (!v.accepted) {
      out.fail("k=" + std::to_string(k) + " rejected at line " +
               std::to_string(v.line) + ": " + v.reason);
      return out;
    }
    std::vector<Formula> milestones = dtl::trouble_milestones(k);
    if (milestones.size() != 6) {
      out.fail("k=" + std::to_string(k) + " has " +
               std::to_string(milestones.size()) + " milestones, want 6");
      return out;
    }
    std::size_t matched = 0;
    for (const dtl::DerivationLine& line : d.lines)
      if (matched < milestones.size() && line.formula == milestones[matched])
        ++matched;
    if (matched != milestones.size()) {
      out.fail("k=" + std::to_string(k) + " milestones missing or out of order (" +
               std::to_string(matched) + "/6 found)");
      return out;
    }
  }
  if (total.seconds() >= 10.0)
    out.fail("took " + std::to_string(total.seconds()) + " s, budget 10 s");
  return out;
}

// A2: the separation driver passes for k in {1,2}, n in {2,3} -- crown
// refutation, full audit of the arity-k derivation, 200 seeded continuity
// instances, canonical arity-(k+1) refutation; < 2 min per cell.
Outcome a2() {
  Outcome out;
  for (int k : {1, 2}) {
    for (int n : {2, 3}) {
      Stopwatch cell;
      dtl::ExperimentReport report =
          dtl::cmd_experiment_separation(k, n, 100 * k + n);
      if (!report.passed()) {
        out.fail("cell (" + std::to_string(k) + "," + std::to_string(n) +
                 "): " + first_failure(report));
        return out;
      }
      if (cell.seconds() >= 120.0) {
        out.fail("cell (" + std::to_string(k) + "," + std::to_string(n) + ") took " +
                 std::to_string(cell.seconds()) + " s, budget 120 s");
        return out;
      }
    }
  }
  return out;
}

// A3: on gen_D(2,2) the arity-2 continuity instance fails at the two crown
// points and holds at all seventeen grid points; checked point by point.
Outcome a3() {
  Outcome out;
  dtl::DynModel d = dtl::gen_D(2, 2);
  Formula cont2 = dtl::build_schema(dtl::SchemaName::Cont, 2);
  const std::set<std::string> crown = {"0.-1.1", "0.-1.2"};
  int failing = 0;
  for (const std::string& point : d.point_names()) {
    bool want = crown.count(point) == 0;
    bool got = d.holds(point, cont2);
    if (got != want)
      out.fail("at " + point + ": holds=" + (got ? "true" : "false") + ", want " +
               (want ? "true" : "false"));
    if (!got) ++failing;
  }
  if (failing != 2) out.fail(std::to_string(failing) + " failing points, want 2");
  return out;
}

// A4: the expressiveness driver passes for (k,n) in {1,2}^2, and for k = 1
// the width-1 definable-set oracle on gen_A(n+1,2) excludes the extension of
// the width-2 tangle; < 1 min per cell.
Outcome a4() {
  Outcome out;
  for (int k : {1, 2}) {
    for (int n : {1, 2}) {
      Stopwatch cell;
      dtl::ExperimentReport report = dtl::cmd_experiment_expressiveness(k, n);
      if (!report.passed()) {
        out.fail("cell (" + std::to_string(k) + "," + std::to_string(n) +
                 "): " + first_failure(report));
        return out;
      }
      if (k == 1) {
        dtl::DynModel a = dtl::gen_A(n + 1, 2);
        auto levels = dtl::definable_sets(a, {1, 2}, 1, n);
        dtl::PointSet eta = a.eval(dtl::build_schema(dtl::SchemaName::Eta, 1));
        for (const dtl::PointSet& s : levels.back())
          if (s == eta) {
            out.fail("width-1 oracle at depth " + std::to_string(n) +
                     " contains the width-2 tangle's extension");
            return out;
          }
      }
      if (cell.seconds() >= 60.0) {
        out.fail("cell (" + std::to_string(k) + "," + std::to_string(n) + ") took " +
                 std::to_string(cell.seconds()) + " s, budget 60 s");
        return out;
      }
    }
  }
  return out;
}

// A5: the two tangled-closure routes agree on every labeled preorder with at
// most 4 points (all 389) under 20 seeded families each; < 1 min.
Outcome a5() {
  Outcome out;
  Stopwatch total;
  std::mt19937_64 rng(505);
  long preorders = 0;
  long mismatches = 0;
  for (int size = 1; size <= 4; ++size) {
    for (const dtl::DynModel& m : dtl::enumerate_preorders(size)) {
      ++preorders;
      for (int trial = 0; trial < 20; ++trial) {
        int arity = 1 + static_cast<int>(rng() % 3);
        std::vector<dtl::PointSet> family;
        for (int j = 0; j < arity; ++j) {
          dtl::PointSet s = m.empty_set();
          for (int x = 0; x < m.size(); ++x)
            if (rng() % 2) s.set(x);
          if (s.none()) s.set(static_cast<int>(rng() % m.size()));
          family.push_back(s);
        }
        if (m.tangled_clusters(family) != m.tangled_gfp(family)) ++mismatches;
      }
    }
  }
  if (preorders != 389)
    out.fail(std::to_string(preorders) + " preorders enumerated, want 389");
  if (mismatches != 0)
    out.fail(std::to_string(mismatches) + " route mismatches, want 0");
  if (total.seconds() >= 60.0)
    out.fail("took " + std::to_string(total.seconds()) + " s, budget 60 s");
  return out;
}

// A6: 300 seeded bisimulation trials on random dynamic model pairs (rank
// n <= 3, width k <= 3): related pairs agree on sampled formulas of depth
// <= n and width <= k-1, and each table is rank-monotone; < 2 min.
Outcome a6() {
  Outcome out;
  Stopwatch total;
  std::mt19937_64 rng(606);
  for (int trial = 0; trial < 300; ++trial) {
    int n = 1 + static_cast<int>(rng() % 3);
    int k = 1 + static_cast<int>(rng() % 3);
    dtl::DynModel left = dtl::gen_random_model(rng(), 4 + static_cast<int>(rng() % 5),
                                               2 + static_cast<int>(rng() % 3), 2,
                                               trial % 2 == 0);
    dtl::DynModel right = dtl::gen_random_model(rng(), 4 + static_cast<int>(rng() % 5),
                                                2 + static_cast<int>(rng() % 3), 2,
                                                trial % 3 == 0);
    dtl::BisimTable table = dtl::compute_bisim(left, right, n, k);
    for (int m = 0; m < n; ++m)
      for (int x = 0; x < left.size(); ++x)
        if (!table.level(m + 1)[x].subset_of(table.level(m)[x])) {
          out.fail("trial " + std::to_string(trial) + ": rank " +
                   std::to_string(m + 1) + " not within rank " + std::to_string(m));
          return out;
        }
    std::vector<Formula> formulas;
    for (int j = 0; j < 6; ++j) {
      Formula f = dtl::sample_formula(rng, n, 3, 2, 8);
      for (int attempt = 0; attempt < 50 && f.width() > k - 1; ++attempt)
        f = dtl::sample_formula(rng, n, 3, 2, 8);
      if (f.width() > k - 1) f = dtl::sample_formula(rng, 0, 1, 2, 8);
      formulas.push_back(f);
    }
    std::vector<dtl::Disagreement> bad = dtl::check_agreement(table, formulas);
    if (!bad.empty()) {
      out.fail("trial " + std::to_string(trial) + ": " + left.name(bad[0].left_point) +
               " vs " + right.name(bad[0].right_point) + " disagree on " +
               bad[0].formula.str() + " at rank " + std::to_string(bad[0].rank));
      return out;
    }
  }
  if (total.seconds() >= 120.0)
    out.fail("took " + std::to_string(total.seconds()) + " s, budget 120 s");
  return out;
}

// A7: the grid-model lemma drivers pass for every N <= 3, K in {2,3}, m < N,
// and the grid map is continuous while the crown map tears at exactly K-1
// pairs; < 1 min.
Outcome a7() {
  Outcome out;
  Stopwatch total;
  for (int N = 1; N <= 3; ++N) {
    for (int K : {2, 3}) {
      std::string cell = "(" + std::to_string(N) + "," + std::to_string(K) + ")";
      for (int m = 0; m < N; ++m) {
        for (const dtl::LemmaReport& report :
             {dtl::verify_nkbis(N, K, m), dtl::verify_bislemm(N, K, m),
              dtl::verify_mainaxis(N, K, m)}) {
          if (!report.passed()) {
            out.fail(report.lemma + " failed at " + cell + " m=" + std::to_string(m) +
                     ": " + report.failures.front());
            return out;
          }
        }
      }
      if (!dtl::gen_B(N, K).continuity_check().empty()) {
        out.fail("grid map discontinuous at " + cell);
        return out;
      }
      auto tears = dtl::gen_D(N, K).continuity_check();
      if (static_cast<int>(tears.size()) != K - 1) {
        out.fail("crown map has " + std::to_string(tears.size()) + " tears at " +
                 cell + ", want " + std::to_string(K - 1));
        return out;
      }
    }
  }
  if (total.seconds() >= 60.0)
    out.fail("took " + std::to_string(total.seconds()) + " s, budget 60 s");
  return out;
}

// A8: 100 seeded single-line formula mutations of the arity-2 trouble
// derivation are all rejected, and the unmutated derivation audits cleanly
// on 50 seeded continuous models; < 2 min.
Outcome a8() {
  Outcome out;
  Stopwatch total;
  const dtl::Derivation base = dtl::derive_trouble(2);
  std::mt19937_64 rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    dtl::Derivation mutant = base;
    std::size_t at = rng() % mutant.lines.size();
    Formula f = mutant.lines[at].formula;
    switch (rng() % 3) {
      case 0: mutant.lines[at].formula = Formula::negation(f); break;
      case 1: mutant.lines[at].formula = Formula::conj(f, Formula::atom(99)); break;
      default: mutant.lines[at].formula = Formula::next(f); break;
    }
    dtl::Verdict v =
        dtl::check_derivation(mutant, {dtl::kNoCap, dtl::kNoCap, false});
    if (v.accepted) {
      out.fail("mutation of line " + std::to_string(at + 1) + " (trial " +
               std::to_string(trial) + ") was accepted");
      return out;
    }
  }
  for (int i = 0; i < 50; ++i) {
    dtl::DynModel m =
        dtl::gen_random_model(8000 + i, 5 + (i % 4), 2 + (i % 3), 2, true);
    dtl::ExperimentReport audit = dtl::audit_soundness(base, m);
    if (!audit.passed()) {
      out.fail("audit failed on seeded model " + std::to_string(8000 + i) + ": " +
               first_failure(audit));
      return out;
    }
  }
  if (total.seconds() >= 120.0)
    out.fail("took " + std::to_string(total.seconds()) + " s, budget 120 s");
  return out;
}

// A9: 1000 seeded random formulas of depth <= 4 and width <= 3 survive the
// print/parse round trip with exact structural equality.
Outcome a9() {
  Outcome out;
  std::mt19937_64 rng(909);
  for (int i = 0; i < 1000; ++i) {
    Formula f = dtl::sample_formula(rng, 4, 3, 3, 12);
    Formula back = Formula::parse(f.str());
    if (back != f) {
      out.fail("round trip changed " + f.str() + " into " + back.str());
      return out;
    }
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* summary;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria = {
      {"A1", "trouble derivations k=1..4 accepted under (k,2) with ordered milestones", a1},
      {"A2", "separation cells k in {1,2} x n in {2,3} with 200 seeded continuity instances", a2},
      {"A3", "arity-2 continuity instance fails on gen_D(2,2) exactly at the two crown points", a3},
      {"A4", "expressiveness cells (k,n) in {1,2}^2; width-1 oracle excludes the width-2 tangle", a4},
      {"A5", "tangled-closure routes agree on all 389 preorders <= 4 points x 20 seeded families", a5},
      {"A6", "300 seeded bisimulation trials: formula agreement and rank monotonicity", a6},
      {"A7", "gallery lemma drivers on N <= 3, K in {2,3}, m < N; continuity tear counts", a7},
      {"A8", "100 seeded derivation mutations rejected; 50 seeded model audits pass", a8},
      {"A9", "1000 seeded formulas round-trip through print and parse", a9},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    Stopwatch watch;
    Outcome outcome = c.run();
    double elapsed = watch.seconds();
    if (outcome.pass) {
      std::printf("%s PASS (%.2fs) %s\n", c.id, elapsed, c.summary);
    } else {
      std::printf("%s FAIL (%.2fs) %s -- %s\n", c.id, elapsed, c.summary,
                  outcome.detail.c_str());
      ++failures;
    }
  }
  std::printf("acceptance: %zu/%zu criteria pass\n", criteria.size() - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
