// Stratified tangled partial bisimulation between two finite models.
//
// Rank 0 relates points satisfying the same atoms.  Rank m+1 additionally
// requires, for every cluster C in the downset of x and every duplicate-free
// subset S of C with |S| <= width-1 (|S| <= |C| when the width is
// unbounded), a cluster D in the downset of y such that each member of S is
// rank-m related to some member of D — and symmetrically; and, when point
// maps are present, that (f(x), f(y)) is rank-m related and that the two
// f-orbits match each other setwise at rank m.  A tuple with repeated
// entries is matched exactly when its underlying set is (witnesses may
// repeat), so subset enumeration suffices.  On static models the map and
// orbit clauses are dropped.
#pragma once

#include <vector>

#include "dtl/model.hpp"

namespace dtl {

// Width / depth cap value meaning "no bound".
constexpr int kUnbounded = -1;

class BisimTable {
public:
  BisimTable(DynModel left, DynModel right, int max_rank, int width,
             std::vector<std::vector<PointSet>> levels)
      : left_(std::move(left)),
        right_(std::move(right)),
        max_rank_(max_rank),
        width_(width),
        levels_(std::move(levels)) {}

  const DynModel& left() const { return left_; }
  const DynModel& right() const { return right_; }
  int max_rank() const { return max_rank_; }
  int width() const { return width_; }  // >= 1, or kUnbounded

  bool related(int rank, int x, int y) const { return levels_[rank][x].test(y); }
  const std::vector<PointSet>& level(int rank) const { return levels_[rank]; }
  std::vector<std::pair<int, int>> level_pairs(int rank) const;

  nlohmann::ordered_json to_json() const;

private:
  DynModel left_;
  DynModel right_;
  int max_rank_;
  int width_;
  std::vector<std::vector<PointSet>> levels_;  // levels_[m][x] = {y : x related y}
};

// Builds the table for ranks 0..max_rank.  width >= 1 bounds tangle matching
// (subsets of size <= width-1); width = kUnbounded removes the bound.  Both
// models must agree on whether a point map is present.
BisimTable compute_bisim(const DynModel& x, const DynModel& y, int max_rank, int width);

struct Disagreement {
  int left_point;
  int right_point;
  int rank;
  Formula formula;
};

// For each formula phi (depth <= max_rank, width < table width unless
// unbounded), checks that every levels(depth(phi))-related pair agrees on
// phi.  The returned list of violations is expected to be empty; a non-empty
// result indicates a defect, not a legitimate outcome.
std::vector<Disagreement> check_agreement(const BisimTable& table,
                                          const std::vector<Formula>& formulas);

}  // namespace dtl
