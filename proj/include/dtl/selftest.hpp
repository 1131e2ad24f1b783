#pragma once

#include <vector>

#include "dtl/report.hpp"

namespace dtl {

// Seeded in-process sweeps over every library-level invariant: formula
// canonicalization and round-trips, semantic operator laws, bisimulation
// table properties, gallery model claims, and kernel acceptance behaviour.
// One report per area; deterministic, no external inputs.
std::vector<ExperimentReport> run_selftest();

}  // namespace dtl
