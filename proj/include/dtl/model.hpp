// Finite dynamic preorder models.  A model is a finite point set with a
// preorder ≼ (stored as generator edges, reflexive-transitive closure taken
// on construction), an optional total point map f, and a valuation.  The
// topology is the downset topology: open sets are the downward closed ones,
// so topological closure of S is the upset {x : some a in S has a ≼ x} and
// the diamond looks ≼-downward.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dtl/bitset.hpp"
#include "dtl/formula.hpp"
#include "json.hpp"

namespace dtl {

// Malformed model documents: dangling names, non-total f, unknown fields.
struct ModelFormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Temporal operation applied to a model without a point map.
struct StaticModelError : std::logic_error {
  using std::logic_error::logic_error;
};

// ≈-classes (mutual ≼) plus the partial order that ≼ induces on them.
struct ClusterPartition {
  std::vector<std::vector<int>> blocks;  // each sorted by point index
  std::vector<int> block_of;             // point index -> block index
  std::vector<PointSet> block_leq;       // block_leq[i].test(j) iff block i ≼ block j

  int count() const { return static_cast<int>(blocks.size()); }
};

// Forward f-orbit of a point: non-repeating prefix, then the cycle.
struct Orbit {
  std::vector<int> prefix;
  std::vector<int> cycle;
};

class DynModel {
public:
  DynModel(std::vector<std::string> points,
           std::vector<std::pair<std::string, std::string>> edges,
           std::optional<std::map<std::string, std::string>> fmap,
           std::map<int, std::vector<std::string>> valuation);

  static DynModel from_json(const nlohmann::json& doc);
  static DynModel from_text(std::string_view text);
  nlohmann::ordered_json to_json() const;
  std::string to_dot() const;

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& point_names() const { return names_; }
  const std::string& name(int x) const { return names_[x]; }
  int index_of(std::string_view name) const;  // throws on unknown name
  bool has_point(std::string_view name) const;

  bool leq(int x, int y) const { return up_[x].test(y); }  // x ≼ y
  bool has_fmap() const { return !fmap_.empty(); }
  int f(int x) const;
  const std::vector<std::pair<std::string, std::string>>& generator_edges() const {
    return edges_;
  }

  PointSet empty_set() const { return PointSet(size()); }
  PointSet full_set() const { return PointSet::full(size()); }
  PointSet atom_set(int atom) const;
  const std::map<int, PointSet>& valuation() const { return valuation_; }

  // Topological closure in the downset topology: the upset of S.
  PointSet closure_up(const PointSet& s) const;
  // {x : f(x) in s}; requires f.
  PointSet preimage(const PointSet& s) const;

  // Tangled closure of a nonempty family, via the cluster characterisation:
  // union of closure_up(C) over clusters C meeting every family member.
  PointSet tangled_clusters(const std::vector<PointSet>& family) const;
  // Same value computed as the greatest fixpoint of
  //   E -> E ∩ ⋂_A closure_up(A ∩ E)
  // starting from all points.  Kept separate as a cross-check.
  PointSet tangled_gfp(const std::vector<PointSet>& family) const;

  Orbit orbit(int x) const;  // requires f

  PointSet eval(const Formula& phi) const;
  bool holds(int x, const Formula& phi) const;
  bool holds(std::string_view point, const Formula& phi) const;
  bool valid_on(const Formula& phi) const;

  // Greatest-fixpoint reading of G over an already-evaluated child set;
  // cross-checks the orbit-based clause inside eval.
  PointSet hence_gfp(const PointSet& child) const;

  // All (x,y) with x ≼ y but not f(x) ≼ f(y); empty iff f is continuous
  // (monotone maps are exactly the continuous ones in the downset topology).
  std::vector<std::pair<int, int>> continuity_check() const;

  const ClusterPartition& clusters() const { return clusters_; }

private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> index_;
  std::vector<std::pair<std::string, std::string>> edges_;  // generators, as given
  std::vector<PointSet> up_;                                // up_[x] = {y : x ≼ y}
  std::vector<int> fmap_;                                   // empty if static
  std::map<int, PointSet> valuation_;
  ClusterPartition clusters_;

  void require_fmap(const char* op) const;
};

}  // namespace dtl
