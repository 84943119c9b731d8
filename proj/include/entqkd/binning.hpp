#pragma once

#include "entqkd/types.hpp"

namespace entqkd::binning {

enum class Strategy { standard, transmitted_only };

// Even split of non-conclusive events: coincidences pass through; no-click,
// all-click and same-side double-clicks give 1/4 to each logical outcome;
// single clicks give 1/2 to the two outcomes sharing that detector; triple
// clicks give 1/2 to the two outcomes of the coincident pairs they contain.
LogicalDistribution bin_standard(const OutcomeDistribution& d);

// A side reads -1 only when its T detector clicked alone; every other event
// on that side (no click, R click, double click) reads +1. tt/tr/rt/rr
// collect the (-1,-1)/(-1,+1)/(+1,-1)/(+1,+1) outcomes.
LogicalDistribution bin_transmitted_only(const OutcomeDistribution& d);

LogicalDistribution bin(const OutcomeDistribution& d, Strategy s);


}  // namespace entqkd::binning
