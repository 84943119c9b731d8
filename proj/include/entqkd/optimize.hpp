#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "entqkd/metrics.hpp"
#include "entqkd/types.hpp"

namespace entqkd::opt {

enum class Objective { bell_parameter, di_key_rate };

enum class Var { theta_a1, theta_a2, theta_b1, theta_b2, xi };

const char* var_name(Var v);

struct Interval {
    double lo;
    double hi;
};

struct Problem {
    Objective objective = Objective::bell_parameter;
    std::vector<Var> free_vars;
    // Bounds default to [0, pi) for angles and (0, 1.5] for xi.
    std::map<Var, Interval> bounds;
    SourceModel source;
    DetectorModel detector;
    binning::Strategy strategy = binning::Strategy::standard;
    MeasurementPlan plan;
    int grid_per_var = 5;  // coarse multi-start grid density
    int starts = 5;        // local refinements launched from the best cells
    void validate() const;
};

struct Result {
    double best_value = 0.0;
    std::map<Var, double> argmax;
    long evaluations = 0;
    bool converged = false;
};

// Coarse grid scan followed by Nelder-Mead refinement from the best grid
// points. Deterministic for a given (problem, seed, budget); refinement stops
// when the simplex diameter drops below 1e-6 in every variable, and the
// budget caps the total number of objective evaluations (converged = false on
// exhaustion). Reported angles are reduced mod pi; for SPDC sources, whose
// statistics depend on theta_a - theta_b only, a common shift additionally
// normalizes theta_b1 into [0, pi/4).
Result optimize(const Problem& p, std::uint64_t seed, long budget);

// The canonical angle form described above, (a1, a2, b1, b2).
std::array<double, 4> canonical_angles(std::array<double, 4> a,
                                       bool difference_only);

// Equality of CHSH angle tuples for difference-only objectives, up to
// per-angle pi periodicity, common shifts, global reflection, relabeling
// a1<->a2 and/or b1<->b2 (relabelings move the minus sign of the CHSH
// combination between its four corners), and a pi/2 shift of one party's
// settings (which flips the sign of every correlation and leaves |S| alone).
bool angles_equivalent(std::array<double, 4> x, std::array<double, 4> y,
                       double tol);

}  // namespace entqkd::opt
