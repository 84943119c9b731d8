#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entqkd/optimize.hpp"
#include "entqkd/types.hpp"

using namespace entqkd;
using namespace entqkd::opt;

namespace {

Problem bell_problem() {
    Problem p;
    p.objective = Objective::bell_parameter;
    p.free_vars = {Var::theta_a1, Var::theta_a2, Var::theta_b1, Var::theta_b2};
    p.source = IdealBell{};
    p.detector = {1.0, 0.0};
    p.strategy = binning::Strategy::standard;
    return p;
}

}  // namespace

TEST_CASE("optimizer input validation") {
    Problem p = bell_problem();
    p.free_vars.push_back(Var::xi);  // xi on a non-spdc source
    CHECK_THROWS_AS(optimize(p, 1, 1000), std::invalid_argument);

    Problem q = bell_problem();
    CHECK_THROWS_AS(optimize(q, 1, 99), std::invalid_argument);
    q.grid_per_var = 3;
    CHECK_THROWS_AS(optimize(q, 1, 1000), std::invalid_argument);
}

TEST_CASE("ideal Bell pair optimization recovers the known maximum") {
    const auto res = optimize(bell_problem(), 42, 40000);
    CHECK(res.best_value == doctest::Approx(two_sqrt2).epsilon(1e-6));
    CHECK(res.converged);
    const std::array<double, 4> found = {
        res.argmax.at(Var::theta_a1), res.argmax.at(Var::theta_a2),
        res.argmax.at(Var::theta_b1), res.argmax.at(Var::theta_b2)};
    const std::array<double, 4> known = {pi / 8, 3 * pi / 8, 0.0, pi / 4};
    CHECK(angles_equivalent(found, known, 2e-3));
}

TEST_CASE("identical inputs give bit-identical results") {
    const auto a = optimize(bell_problem(), 7, 20000);
    const auto b = optimize(bell_problem(), 7, 20000);
    CHECK(a.best_value == b.best_value);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.converged == b.converged);
    for (const auto& [v, x] : a.argmax) CHECK(b.argmax.at(v) == x);
}

TEST_CASE("refinement never loses to the coarse grid") {
    Problem p = bell_problem();
    // exactly the grid fits in the budget: no refinement possible
    const long grid_budget = 5L * 5 * 5 * 5;
    const auto coarse = optimize(p, 3, grid_budget);
    CHECK_FALSE(coarse.converged);
    const auto full = optimize(p, 3, 40000);
    CHECK(full.best_value >= coarse.best_value);
}

TEST_CASE("tiny budgets exhaust without converging") {
    const auto res = optimize(bell_problem(), 1, 100);
    CHECK_FALSE(res.converged);
    CHECK(res.evaluations >= 100);
}

TEST_CASE("canonical angles") {
    const auto c = canonical_angles({1.9, 2.6, 1.4, 2.0}, true);
    CHECK(c[2] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(c[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c[1] == doctest::Approx(1.2).epsilon(1e-12));
    CHECK(c[3] == doctest::Approx(0.6).epsilon(1e-12));
    // without the shift only the mod-pi reduction applies
    const auto m = canonical_angles({1.9 + pi, -0.2, 0.0, pi}, false);
    CHECK(m[0] == doctest::Approx(1.9).epsilon(1e-12));
    CHECK(m[1] == doctest::Approx(pi - 0.2).epsilon(1e-12));
    CHECK(m[3] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("angle equivalence under the documented symmetries") {
    const std::array<double, 4> base = {0.661, 1.248, 2.525, 3.112};
    // common shift
    CHECK(angles_equivalent(base, {0.661 + 0.4, 1.248 + 0.4, 2.525 + 0.4,
                                   3.112 + 0.4},
                            1e-9));
    // pi periodicity per angle
    CHECK(angles_equivalent(base, {0.661 + pi, 1.248, 2.525 - pi, 3.112},
                            1e-9));
    // global reflection
    CHECK(angles_equivalent(base, {-0.661, -1.248, -2.525, -3.112}, 1e-9));
    // relabeling both parties' settings
    CHECK(angles_equivalent(base, {1.248, 0.661, 3.112, 2.525}, 1e-9));
    // an unrelated tuple is not equivalent
    CHECK_FALSE(angles_equivalent(base, {0.661, 1.248, 2.525, 2.0}, 1e-3));
}

TEST_CASE("di key rate objective stays within the physical rate range") {
    Problem p = bell_problem();
    p.objective = Objective::di_key_rate;
    p.source = QuantumDot{0.0, 0.95};
    p.detector = {0.99, 1e-3};
    const auto res = optimize(p, 9, 20000);
    CHECK(res.best_value <= 1.0);
    CHECK(res.best_value > 0.0);  // near-ideal hardware is secure
}
