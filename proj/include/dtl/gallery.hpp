#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dtl/model.hpp"
#include "json.hpp"

namespace dtl {

// Outcome of one lemma-verification sweep: how many individual claims were
// checked and which ones failed (by description).  Serialized with fields
// {lemma, parameters, checked, failures, elapsed}.
struct LemmaReport {
  std::string lemma;
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
  long checked = 0;
  std::vector<std::string> failures;
  double elapsed_seconds = 0.0;

  bool passed() const { return failures.empty(); }
  nlohmann::ordered_json to_json() const;
};

// Static ladder model: clusters indexed by height h in [0, NK], top cluster
// at h = 0 carrying all K atoms, lower clusters missing exactly atom |h|_K.
// Points are named "h.k".  Order: (h,k) before (h',k') iff h >= h'.
DynModel gen_A(int N, int K);

// Dynamic grid model: points "h.t.k" with s = h+t <= NK (atom k omitted when
// k = s mod K) plus a tail h = 0, t in [NK+1, N(K+1)], k < K.  Clusters are
// the (h,t) groups, ordered by h within equal t; the point map rotates atoms
// below the diagonal, falls toward h = 0 on it, and closes the t-axis into a
// cycle through the tail.  Requires K >= 2.
DynModel gen_B(int N, int K);

// Single K-point cluster "0.-1.k", one point per atom; static.
DynModel gen_C(int K);

// Disjoint union of gen_C(K) and gen_B(N,K) with no order edges between
// them; the C-cluster maps into B pointwise:
//   (0,-1,k) -> (0,0,|k+1|_K)  except  (0,-1,K-1) -> (1,0,K),
// which is the deliberate discontinuity the refutations live on.
DynModel gen_D(int N, int K);

// The coarse similarity on gen_B(N,K)'s points: equal atom, and either equal
// s = h+t, both s <= K(N-m), or both s in [NK, N(K+1)-m].  Returns all
// related ordered index pairs.  Requires m < N.
std::vector<std::pair<int, int>> sim_pairs(const DynModel& b, int N, int K, int m);

// On gen_A(N,K): the top-cluster point (0,k) is rank-m, width-K bisimilar
// to every (h,k) with h in [1, (N-m)K], h not congruent to k mod K.
LemmaReport verify_nkbis(int N, int K, int m);

// On gen_B(N,K): sim_pairs refines rank-m unbounded-width bisimilarity.
LemmaReport verify_bislemm(int N, int K, int m);

// On gen_B(N,K): every point is sim-equivalent to an h = 0 point, every
// orbit sweeps the whole h = 0 cycle, and N(K+1)+1 steps from (0,0,k)
// rotate the atom to |k+1|_{K-1}.
LemmaReport verify_mainaxis(int N, int K, int m);

// On gen_D(N,K): the cycle formula for K holds everywhere, yet Trouble^K
// fails at every C-point.
LemmaReport verify_trouble_fails(int N, int K);

// On gen_D(N+1,K+1): the arity-K continuity instances hold — canonical,
// all atomic substituends over p1..p_{K+1}, and sample_size seeded random
// substituends of modal depth <= N — as do seeded instances of every
// other schema.
LemmaReport verify_cont_soundness(int N, int K, int sample_size, std::uint64_t seed);

// Seeded random dynamic model with the given number of points, at most
// cluster_budget clusters and atoms 1..atom_budget; continuous = true
// forces the point map to be monotone (cluster map sampled along a linear
// extension, identity as a fallback).
DynModel gen_random_model(std::uint64_t seed, int point_budget, int cluster_budget,
                          int atom_budget, bool continuous);

// Seeded random formula over atoms 1..atom_budget with modal depth at most
// depth_budget and tangle arity at most width_cap; size_budget caps the
// Boolean skeleton, which costs no modal depth.
Formula sample_formula(std::mt19937_64& rng, int depth_budget, int width_cap,
                       int atom_budget, int size_budget);

// Every labeled preorder on {1..size} as a static model; size capped at 4.
std::vector<DynModel> enumerate_preorders(int size);

// Extensions of formulas over the given atoms with tangle width <= w,
// stratified by modal depth: level 0 is the Boolean closure of the atom
// extensions, level i+1 adds the tangled closures of families of at most w
// level-i sets and closes under Booleans again.  Static models only, at
// most 12 points.
std::vector<std::vector<PointSet>> definable_sets(const DynModel& m,
                                                  const std::vector<int>& atoms,
                                                  int width_cap, int depth_budget);

}  // namespace dtl
