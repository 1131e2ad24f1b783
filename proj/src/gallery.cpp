// Hand-built model families, seeded random models, and the sweep drivers
// that check the structural claims about them point by point.
#include "dtl/gallery.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

#include "dtl/bisim.hpp"
#include "dtl/proof.hpp"

namespace dtl {
namespace {

using nlohmann::ordered_json;

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string coord_name(int h, int k) {
  return std::to_string(h) + "." + std::to_string(k);
}

std::string coord_name(int h, int t, int k) {
  return std::to_string(h) + "." + std::to_string(t) + "." + std::to_string(k);
}

// Inverse of coord_name: "0.-1.2" -> {0, -1, 2}.
std::vector<int> coords_of(const std::string& name) {
  std::vector<int> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t dot = name.find('.', pos);
    out.push_back(std::stoi(name.substr(pos, dot == std::string::npos ? dot : dot - pos)));
    if (dot == std::string::npos) break;
    pos = dot + 1;
  }
  return out;
}

// Raw pieces of a model under construction, before the DynModel closure.
struct RawModel {
  std::vector<std::string> points;
  std::vector<std::pair<std::string, std::string>> edges;
  std::map<std::string, std::string> fmap;
  std::map<int, std::vector<std::string>> valuation;
};

// Appends one cluster: a ≈-cycle through the members plus, when a lower
// neighbour is given, an edge making every member ≼ it.
void add_cluster(RawModel& raw, const std::vector<std::string>& members,
                 const std::string& below) {
  for (std::size_t i = 0; i + 1 < members.size(); ++i)
    raw.edges.emplace_back(members[i], members[i + 1]);
  if (members.size() > 1) raw.edges.emplace_back(members.back(), members.front());
  if (!below.empty()) raw.edges.emplace_back(members.front(), below);
  raw.points.insert(raw.points.end(), members.begin(), members.end());
}

struct GridPoint {
  int h, t, k;
};

// The point map of the grid model: rotate the atom while the diagonal
// s = h+t has room, fall toward h = 0 on it, coast along the tail, and wrap
// the tail back to t = 0 rotating within the K-1 tail atoms.
GridPoint grid_step(int N, int K, GridPoint x) {
  int s = x.h + x.t;
  if (s < N * K) return {x.h, x.t + 1, mod_index(x.k + 1, K)};
  if (s == N * K && x.h > 0) return {x.h - 1, x.t + 1, x.k};
  if (x.t < N * (K + 1)) return {0, x.t + 1, x.k};
  return {0, 0, mod_index(x.k + 1, K - 1)};
}

RawModel build_grid(int N, int K) {
  if (N < 1) throw std::invalid_argument("gen_B: N must be >= 1");
  if (K < 2) throw std::invalid_argument("gen_B: K must be >= 2");
  RawModel raw;
  for (int t = 0; t <= N * (K + 1); ++t) {
    std::string below;
    int top = t <= N * K ? N * K - t : 0;
    for (int h = 0; h <= top; ++h) {
      std::vector<std::string> members;
      for (int k = 1; k <= K; ++k) {
        bool tail = t > N * K;
        if (tail ? k == K : k == mod_index(h + t, K)) continue;
        members.push_back(coord_name(h, t, k));
        raw.valuation[k].push_back(members.back());
        GridPoint y = grid_step(N, K, {h, t, k});
        raw.fmap[members.back()] = coord_name(y.h, y.t, y.k);
      }
      add_cluster(raw, members, below);
      below = members.front();
    }
  }
  return raw;
}

RawModel build_crown(int K) {
  if (K < 2) throw std::invalid_argument("gen_C: K must be >= 2");
  RawModel raw;
  std::vector<std::string> members;
  for (int k = 1; k <= K; ++k) {
    members.push_back(coord_name(0, -1, k));
    raw.valuation[k].push_back(members.back());
  }
  add_cluster(raw, members, "");
  return raw;
}

// Shared similarity predicate on grid coordinates s = h+t: equal atom and
// either equal s, both at most K(N-m), or both within m of the tail end.
bool sim_related(int N, int K, int m, int sx, int kx, int sy, int ky) {
  if (kx != ky) return false;
  if (sx == sy) return true;
  int low = K * (N - m);
  if (sx <= low && sy <= low) return true;
  int lo = N * K, hi = N * (K + 1) - m;
  return sx >= lo && sx <= hi && sy >= lo && sy <= hi;
}

LemmaReport start_report(const char* lemma, ordered_json parameters) {
  LemmaReport r;
  r.lemma = lemma;
  r.parameters = std::move(parameters);
  return r;
}

std::map<int, Formula> random_subst(std::mt19937_64& rng, const std::vector<int>& atoms,
                                    int depth_budget, int width_cap, int atom_budget) {
  std::map<int, Formula> sigma;
  for (int a : atoms)
    sigma.emplace(a, sample_formula(rng, depth_budget, width_cap, atom_budget, 8));
  return sigma;
}

}  // namespace

Formula sample_formula(std::mt19937_64& rng, int depth_budget, int width_cap,
                       int atom_budget, int size_budget) {
  if (atom_budget < 1) throw std::invalid_argument("sample_formula: need >= 1 atom");
  if (width_cap < 1) throw std::invalid_argument("sample_formula: need width >= 1");
  auto pick_atom = [&] { return Formula::atom(1 + static_cast<int>(rng() % atom_budget)); };
  if (size_budget <= 0 || depth_budget < 0) return pick_atom();
  int shapes = depth_budget > 0 ? 6 : 3;
  switch (rng() % shapes) {
    case 0:
      return pick_atom();
    case 1:
      return Formula::negation(
          sample_formula(rng, depth_budget, width_cap, atom_budget, size_budget - 1));
    case 2:
      return Formula::conj(
          sample_formula(rng, depth_budget, width_cap, atom_budget, size_budget / 2),
          sample_formula(rng, depth_budget, width_cap, atom_budget, size_budget / 2));
    case 3:
      return Formula::next(
          sample_formula(rng, depth_budget - 1, width_cap, atom_budget, size_budget - 1));
    case 4:
      return Formula::hence(
          sample_formula(rng, depth_budget - 1, width_cap, atom_budget, size_budget - 1));
    default: {
      int arity = 1 + static_cast<int>(rng() % width_cap);
      std::vector<Formula> args;
      for (int i = 0; i < arity; ++i)
        args.push_back(
            sample_formula(rng, depth_budget - 1, width_cap, atom_budget, size_budget / arity));
      return Formula::tangle(std::move(args));
    }
  }
}

ordered_json LemmaReport::to_json() const {
  ordered_json doc;
  doc["lemma"] = lemma;
  doc["parameters"] = parameters;
  doc["checked"] = checked;
  doc["failures"] = failures;
  doc["elapsed"] = elapsed_seconds;
  return doc;
}

DynModel gen_A(int N, int K) {
  if (N < 1) throw std::invalid_argument("gen_A: N must be >= 1");
  if (K < 1) throw std::invalid_argument("gen_A: K must be >= 1");
  RawModel raw;
  std::string below;
  for (int h = 0; h <= N * K; ++h) {
    std::vector<std::string> members;
    for (int k = 1; k <= K; ++k) {
      if (h > 0 && k == mod_index(h, K)) continue;
      members.push_back(coord_name(h, k));
      raw.valuation[k].push_back(members.back());
    }
    if (members.empty()) continue;  // K = 1 has no clusters below the top
    add_cluster(raw, members, below);
    below = members.front();
  }
  return DynModel(std::move(raw.points), std::move(raw.edges), std::nullopt,
                  std::move(raw.valuation));
}

DynModel gen_B(int N, int K) {
  RawModel raw = build_grid(N, K);
  return DynModel(std::move(raw.points), std::move(raw.edges), std::move(raw.fmap),
                  std::move(raw.valuation));
}

DynModel gen_C(int K) {
  RawModel raw = build_crown(K);
  return DynModel(std::move(raw.points), std::move(raw.edges), std::nullopt,
                  std::move(raw.valuation));
}

DynModel gen_D(int N, int K) {
  RawModel grid = build_grid(N, K);
  RawModel raw = build_crown(K);
  for (int k = 1; k <= K; ++k) {
    GridPoint y = k != K - 1 ? GridPoint{0, 0, mod_index(k + 1, K)} : GridPoint{1, 0, K};
    raw.fmap[coord_name(0, -1, k)] = coord_name(y.h, y.t, y.k);
  }
  raw.points.insert(raw.points.end(), grid.points.begin(), grid.points.end());
  raw.edges.insert(raw.edges.end(), grid.edges.begin(), grid.edges.end());
  raw.fmap.insert(grid.fmap.begin(), grid.fmap.end());
  for (auto& [atom, names] : grid.valuation) {
    auto& dst = raw.valuation[atom];
    dst.insert(dst.end(), names.begin(), names.end());
  }
  return DynModel(std::move(raw.points), std::move(raw.edges), std::move(raw.fmap),
                  std::move(raw.valuation));
}

std::vector<std::pair<int, int>> sim_pairs(const DynModel& b, int N, int K, int m) {
  if (m < 0 || m >= N) throw std::invalid_argument("sim_pairs: requires 0 <= m < N");
  std::vector<int> s(b.size()), k(b.size());
  for (int x = 0; x < b.size(); ++x) {
    std::vector<int> c = coords_of(b.name(x));
    s[x] = c[0] + c[1];
    k[x] = c[2];
  }
  std::vector<std::pair<int, int>> out;
  for (int x = 0; x < b.size(); ++x)
    for (int y = 0; y < b.size(); ++y)
      if (sim_related(N, K, m, s[x], k[x], s[y], k[y])) out.emplace_back(x, y);
  return out;
}

LemmaReport verify_nkbis(int N, int K, int m) {
  LemmaReport r = start_report("nkbis", {{"N", N}, {"K", K}, {"m", m}});
  Stopwatch sw;
  DynModel a = gen_A(N, K);
  BisimTable table = compute_bisim(a, a, m, K);
  for (int k = 1; k <= K; ++k) {
    for (int h = 1; h <= (N - m) * K; ++h) {
      if (mod_index(h, K) == k) continue;
      ++r.checked;
      int top = a.index_of(coord_name(0, k));
      int low = a.index_of(coord_name(h, k));
      if (!table.related(m, top, low))
        r.failures.push_back(a.name(top) + " !~" + std::to_string(m) + " " + a.name(low));
    }
  }
  r.elapsed_seconds = sw.seconds();
  return r;
}

LemmaReport verify_bislemm(int N, int K, int m) {
  LemmaReport r = start_report("bislemm", {{"N", N}, {"K", K}, {"m", m}});
  Stopwatch sw;
  DynModel b = gen_B(N, K);
  std::vector<std::pair<int, int>> sim = sim_pairs(b, N, K, m);
  BisimTable table = compute_bisim(b, b, m, kUnbounded);
  for (auto [x, y] : sim) {
    ++r.checked;
    if (!table.related(m, x, y))
      r.failures.push_back(b.name(x) + " !~" + std::to_string(m) + " " + b.name(y));
  }
  r.elapsed_seconds = sw.seconds();
  return r;
}

LemmaReport verify_mainaxis(int N, int K, int m) {
  if (m < 0 || m >= N) throw std::invalid_argument("verify_mainaxis: requires 0 <= m < N");
  LemmaReport r = start_report("mainaxis", {{"N", N}, {"K", K}, {"m", m}});
  Stopwatch sw;
  DynModel b = gen_B(N, K);
  std::vector<int> s(b.size()), k(b.size()), h(b.size());
  std::vector<int> ring;  // the h = 0 points
  for (int x = 0; x < b.size(); ++x) {
    std::vector<int> c = coords_of(b.name(x));
    h[x] = c[0];
    s[x] = c[0] + c[1];
    k[x] = c[2];
    if (h[x] == 0) ring.push_back(x);
  }
  for (int x = 0; x < b.size(); ++x) {
    ++r.checked;
    bool found = false;
    for (int y : ring)
      if (sim_related(N, K, m, s[x], k[x], s[y], k[y])) {
        found = true;
        break;
      }
    if (!found) r.failures.push_back(b.name(x) + " has no h=0 partner");
  }
  for (int x = 0; x < b.size(); ++x) {
    ++r.checked;
    Orbit o = b.orbit(x);
    PointSet seen = b.empty_set();
    for (int y : o.prefix) seen.set(y);
    for (int y : o.cycle) seen.set(y);
    for (int y : ring)
      if (!seen.test(y)) {
        r.failures.push_back("orbit of " + b.name(x) + " misses " + b.name(y));
        break;
      }
  }
  int steps = N * (K + 1) + 1;
  for (int kk = 1; kk <= K - 1; ++kk) {
    ++r.checked;
    int x = b.index_of(coord_name(0, 0, kk));
    for (int i = 0; i < steps; ++i) x = b.f(x);
    std::string want = coord_name(0, 0, mod_index(kk + 1, K - 1));
    if (b.name(x) != want)
      r.failures.push_back("f^" + std::to_string(steps) + "(" + coord_name(0, 0, kk) +
                           ") = " + b.name(x) + ", want " + want);
  }
  r.elapsed_seconds = sw.seconds();
  return r;
}

LemmaReport verify_trouble_fails(int N, int K) {
  LemmaReport r = start_report("trouble_fails", {{"N", N}, {"K", K}});
  Stopwatch sw;
  DynModel d = gen_D(N, K);
  Formula trouble = build_schema(SchemaName::Trouble, K);
  for (int k = 1; k <= K; ++k) {
    ++r.checked;
    if (d.holds(coord_name(0, -1, k), trouble))
      r.failures.push_back(coord_name(0, -1, k) + " satisfies the trouble formula");
  }
  ++r.checked;
  if (!d.valid_on(build_schema(SchemaName::Cycle, K)))
    r.failures.push_back("cycle formula not valid");
  r.elapsed_seconds = sw.seconds();
  return r;
}

LemmaReport verify_cont_soundness(int N, int K, int sample_size, std::uint64_t seed) {
  if (sample_size < 0)
    throw std::invalid_argument("verify_cont_soundness: sample_size must be >= 0");
  LemmaReport r = start_report(
      "cont_soundness",
      {{"N", N}, {"K", K}, {"sample_size", sample_size}, {"seed", seed}});
  Stopwatch sw;
  DynModel d = gen_D(N + 1, K + 1);
  std::vector<int> base_atoms(K);
  for (int i = 0; i < K; ++i) base_atoms[i] = i + 1;

  auto check = [&](const AxiomInstance& inst, const std::string& label) {
    ++r.checked;
    if (!d.valid_on(instantiate_axiom(inst))) r.failures.push_back(label);
  };

  AxiomInstance cont;
  cont.schema = Schema::Cont;
  cont.arity = K;
  check(cont, "canonical arity-" + std::to_string(K));

  // Every atomic substituend over p1..p_{K+1}: an odometer over the K slots.
  std::vector<int> choice(K, 1);
  for (;;) {
    AxiomInstance inst = cont;
    std::string label = "atoms";
    for (int i = 0; i < K; ++i) {
      inst.subst.emplace(i + 1, Formula::atom(choice[i]));
      label += " p" + std::to_string(choice[i]);
    }
    check(inst, label);
    int slot = 0;
    while (slot < K && choice[slot] == K + 1) choice[slot++] = 1;
    if (slot == K) break;
    ++choice[slot];
  }

  std::mt19937_64 rng(seed);
  for (int i = 0; i < sample_size; ++i) {
    AxiomInstance inst = cont;
    inst.subst = random_subst(rng, base_atoms, N, K + 1, K + 1);
    check(inst, "sampled continuity instance " + std::to_string(i));
  }

  // Seeded instances of every other schema; these need no continuity at all,
  // so any failure here points at the evaluator or the instantiation.
  const Formula p1 = Formula::atom(1), p2 = Formula::atom(2);
  for (Schema schema :
       {Schema::Taut, Schema::K, Schema::T, Schema::Four, Schema::FixTangle,
        Schema::IndTangle, Schema::NegNext, Schema::AndNext, Schema::FixHence,
        Schema::IndHence, Schema::KHence}) {
    for (int i = 0; i < 5; ++i) {
      AxiomInstance inst;
      inst.schema = schema;
      std::vector<int> atoms = {1, 2};
      switch (schema) {
        case Schema::Taut:
          inst.taut_base = i % 2 == 0
                               ? Formula::disj(p1, Formula::negation(p1))
                               : Formula::implies(Formula::implies(Formula::implies(p1, p2), p1), p1);
          break;
        case Schema::FixTangle:
        case Schema::IndTangle: {
          int arity = 1 + static_cast<int>(rng() % 3);
          inst.family.clear();
          for (int a = 1; a <= arity; ++a) inst.family.push_back(a);
          atoms = inst.family;
          if (schema == Schema::IndTangle) {
            inst.ind_atom = arity + 1;
            atoms.push_back(inst.ind_atom);
          }
          break;
        }
        case Schema::T:
        case Schema::Four:
        case Schema::NegNext:
        case Schema::FixHence:
        case Schema::IndHence:
          atoms = {1};
          break;
        default:
          break;
      }
      inst.subst = random_subst(rng, atoms, N, K + 1, K + 1);
      check(inst, schema_name(schema) + std::string(" instance ") + std::to_string(i));
    }
  }
  r.elapsed_seconds = sw.seconds();
  return r;
}

DynModel gen_random_model(std::uint64_t seed, int point_budget, int cluster_budget,
                          int atom_budget, bool continuous) {
  if (point_budget < 1) throw std::invalid_argument("gen_random_model: need >= 1 point");
  if (cluster_budget < 1) throw std::invalid_argument("gen_random_model: need >= 1 cluster");
  if (atom_budget < 0) throw std::invalid_argument("gen_random_model: negative atom budget");
  if (cluster_budget > 8)
    std::fprintf(stderr,
                 "gen_random_model: cluster budget %d exceeds 8; downstream sweeps may crawl\n",
                 cluster_budget);
  std::mt19937_64 rng(seed);
  int n = point_budget;
  int c = 1 + static_cast<int>(rng() % std::min(cluster_budget, n));
  std::vector<int> block_of(n);
  for (int x = 0; x < n; ++x) block_of[x] = x < c ? x : static_cast<int>(rng() % c);

  // A random partial order on the cluster labels, oriented along the label
  // order so antisymmetry is free; then its transitive closure.
  std::vector<std::vector<bool>> leq(c, std::vector<bool>(c, false));
  for (int i = 0; i < c; ++i) leq[i][i] = true;
  for (int i = 0; i < c; ++i)
    for (int j = i + 1; j < c; ++j) leq[i][j] = rng() % 100 < 35;
  for (int j = 0; j < c; ++j)
    for (int i = 0; i < j; ++i)
      if (leq[i][j])
        for (int k = j + 1; k < c; ++k)
          if (leq[j][k]) leq[i][k] = true;

  std::vector<std::string> names(n);
  for (int x = 0; x < n; ++x) names[x] = "w" + std::to_string(x + 1);
  std::vector<std::vector<int>> members(c);
  for (int x = 0; x < n; ++x) members[block_of[x]].push_back(x);

  std::vector<std::pair<std::string, std::string>> edges;
  for (int b = 0; b < c; ++b) {
    for (std::size_t i = 0; i + 1 < members[b].size(); ++i)
      edges.emplace_back(names[members[b][i]], names[members[b][i + 1]]);
    if (members[b].size() > 1)
      edges.emplace_back(names[members[b].back()], names[members[b].front()]);
  }
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < c; ++j)
      if (i != j && leq[i][j]) edges.emplace_back(names[members[i][0]], names[members[j][0]]);

  std::map<std::string, std::string> fmap;
  if (!continuous) {
    for (int x = 0; x < n; ++x) fmap[names[x]] = names[rng() % n];
  } else {
    // Sample a ≼-monotone cluster map along the label order (labels are a
    // linear extension); fall back to the identity if sampling stalls.
    std::vector<int> g(c);
    bool sampled = false;
    for (int attempt = 0; attempt < 32 && !sampled; ++attempt) {
      sampled = true;
      for (int i = 0; i < c && sampled; ++i) {
        std::vector<int> candidates;
        for (int d = 0; d < c; ++d) {
          bool ok = true;
          for (int j = 0; j < i && ok; ++j)
            if (leq[j][i] && !leq[g[j]][d]) ok = false;
          if (ok) candidates.push_back(d);
        }
        if (candidates.empty())
          sampled = false;
        else
          g[i] = candidates[rng() % candidates.size()];
      }
    }
    if (!sampled)
      for (int i = 0; i < c; ++i) g[i] = i;
    for (int x = 0; x < n; ++x) {
      const std::vector<int>& target = members[g[block_of[x]]];
      fmap[names[x]] = names[target[rng() % target.size()]];
    }
  }

  std::map<int, std::vector<std::string>> valuation;
  for (int a = 1; a <= atom_budget; ++a) {
    valuation[a] = {};
    for (int x = 0; x < n; ++x)
      if (rng() % 2 == 0) valuation[a].push_back(names[x]);
  }
  return DynModel(std::move(names), std::move(edges), std::move(fmap), std::move(valuation));
}

std::vector<DynModel> enumerate_preorders(int size) {
  if (size < 1 || size > 4)
    throw std::invalid_argument("enumerate_preorders: size must be in [1,4]");
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j)
      if (i != j) slots.emplace_back(i, j);
  std::vector<std::string> names(size);
  for (int i = 0; i < size; ++i) names[i] = "x" + std::to_string(i + 1);
  std::vector<DynModel> out;
  for (unsigned mask = 0; mask < 1u << slots.size(); ++mask) {
    std::vector<std::vector<bool>> rel(size, std::vector<bool>(size, false));
    for (int i = 0; i < size; ++i) rel[i][i] = true;
    for (std::size_t b = 0; b < slots.size(); ++b)
      if (mask >> b & 1) rel[slots[b].first][slots[b].second] = true;
    bool transitive = true;
    for (int i = 0; i < size && transitive; ++i)
      for (int j = 0; j < size && transitive; ++j)
        for (int k = 0; k < size && transitive; ++k)
          if (rel[i][j] && rel[j][k] && !rel[i][k]) transitive = false;
    if (!transitive) continue;
    std::vector<std::pair<std::string, std::string>> edges;
    for (std::size_t b = 0; b < slots.size(); ++b)
      if (mask >> b & 1) edges.emplace_back(names[slots[b].first], names[slots[b].second]);
    out.push_back(DynModel(names, std::move(edges), std::nullopt, {}));
  }
  return out;
}

std::vector<std::vector<PointSet>> definable_sets(const DynModel& m,
                                                  const std::vector<int>& atoms,
                                                  int width_cap, int depth_budget) {
  if (m.has_fmap())
    throw std::invalid_argument("definable_sets: static models only");
  if (m.size() > 12)
    throw std::invalid_argument("definable_sets: at most 12 points");
  if (width_cap < 0 || depth_budget < 0)
    throw std::invalid_argument("definable_sets: negative bound");
  int n = m.size();
  auto to_mask = [n](const PointSet& s) {
    unsigned mask = 0;
    for (int x = 0; x < n; ++x)
      if (s.test(x)) mask |= 1u << x;
    return mask;
  };
  auto from_mask = [&](unsigned mask) {
    PointSet s = m.empty_set();
    for (int x = 0; x < n; ++x)
      if (mask >> x & 1) s.set(x);
    return s;
  };

  const ClusterPartition& cp = m.clusters();
  std::vector<unsigned> block_mask(cp.count()), block_up(cp.count());
  for (int b = 0; b < cp.count(); ++b) {
    PointSet blk = m.empty_set();
    for (int x : cp.blocks[b]) blk.set(x);
    block_mask[b] = to_mask(blk);
    block_up[b] = to_mask(m.closure_up(blk));
  }

  // All unions of the blocks of the profile partition the family induces.
  auto boolean_closure = [&](const std::set<unsigned>& family) {
    std::vector<unsigned> blocks = {(1u << n) - 1};
    for (unsigned s : family) {
      std::vector<unsigned> next;
      for (unsigned blk : blocks) {
        if (blk & s) next.push_back(blk & s);
        if (blk & ~s) next.push_back(blk & ~s);
      }
      blocks = std::move(next);
    }
    std::set<unsigned> out;
    for (unsigned pick = 0; pick < 1u << blocks.size(); ++pick) {
      unsigned u = 0;
      for (std::size_t b = 0; b < blocks.size(); ++b)
        if (pick >> b & 1) u |= blocks[b];
      out.insert(u);
    }
    return out;
  };

  std::set<unsigned> level;
  for (int a : atoms) level.insert(to_mask(m.atom_set(a)));
  level = boolean_closure(level);

  std::vector<std::vector<PointSet>> out;
  auto emit = [&] {
    std::vector<PointSet> sets;
    for (unsigned s : level) sets.push_back(from_mask(s));
    out.push_back(std::move(sets));
  };
  emit();

  for (int d = 1; d <= depth_budget; ++d) {
    // The tangled closure of a family depends only on which blocks meet
    // every member, so enumerate intersections of at most width_cap
    // meets-masks instead of families.
    std::set<unsigned> meets;
    for (unsigned s : level) {
      unsigned mm = 0;
      for (int b = 0; b < cp.count(); ++b)
        if (block_mask[b] & s) mm |= 1u << b;
      meets.insert(mm);
    }
    std::set<unsigned> reach = width_cap >= 1 ? meets : std::set<unsigned>{};
    for (int w = 2; w <= width_cap; ++w) {
      std::set<unsigned> grown = reach;
      for (unsigned a : reach)
        for (unsigned b : meets) grown.insert(a & b);
      if (grown == reach) break;
      reach = std::move(grown);
    }
    std::set<unsigned> family = level;
    for (unsigned mm : reach) {
      unsigned value = 0;
      for (int b = 0; b < cp.count(); ++b)
        if (mm >> b & 1) value |= block_up[b];
      family.insert(value);
    }
    level = boolean_closure(family);
    emit();
  }
  return out;
}

}  // namespace dtl
