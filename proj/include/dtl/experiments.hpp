#pragma once

#include <cstdint>

#include "dtl/report.hpp"

namespace dtl {

// One separation cell: the trouble formula of arity k+1 is derivable under
// caps (k+1, 2), refuted throughout the crown of gen_D(n+1, k+1), while
// every line of the arity-k derivation — and a seeded batch of depth-<=n
// arity-k continuity instances — stays valid there, and the canonical
// arity-(k+1) continuity instance does not.  Requires k >= 1, n >= 2.
ExperimentReport cmd_experiment_separation(int k, int n, std::uint64_t seed);

// One expressiveness cell on gen_A(n+1, k+1): the points 0.2 and 1.2 are
// rank-n width-(k+1) bisimilar yet separated by the arity-(k+1) tangle over
// the atoms; for k = 1 the width-1 definable-set oracle confirms that no
// depth-<=n width-<=1 formula has the separating extension.  Requires
// k >= 1, n >= 1.
ExperimentReport cmd_experiment_expressiveness(int k, int n);

}  // namespace dtl
