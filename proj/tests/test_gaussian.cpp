#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entqkd/binning.hpp"
#include "entqkd/fock.hpp"
#include "entqkd/gaussian.hpp"
#include "entqkd/metrics.hpp"
#include "entqkd/types.hpp"

using namespace entqkd;

TEST_CASE("closed-form parameters at reference points") {
    SUBCASE("weak squeezing limit") {
        const auto p = gaussian::closed_form_params(1e-8, 1.0, 0.3, 0.9);
        CHECK(p.zeta == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.gamma == doctest::Approx(0.0).epsilon(1e-7));
        CHECK(p.lambda == doctest::Approx(0.0).epsilon(1e-7));
    }
    SUBCASE("xi 0.5, unit efficiency, aligned analyzers") {
        const auto p = gaussian::closed_form_params(0.5, 1.0, 0.7, 0.7);
        CHECK(p.zeta == doctest::Approx(1.2715403174076219).epsilon(1e-14));
        CHECK(p.gamma == doctest::Approx(0.0).epsilon(1e-15));
        // tanh(0.5) / (1 - tanh^2(0.5)) = sinh(1)/2
        CHECK(p.lambda == doctest::Approx(0.5876005968219007).epsilon(1e-14));
    }
    SUBCASE("angle difference pi/4 balances the couplings") {
        const auto p = gaussian::closed_form_params(0.8, 0.6, pi / 4, 0.0);
        CHECK(p.gamma == doctest::Approx(p.lambda).epsilon(1e-14));
    }
    SUBCASE("eta 0 diverges") {
        CHECK_THROWS_AS(gaussian::closed_form_params(0.5, 0.0, 0.0, 0.0),
                        std::domain_error);
    }
}

TEST_CASE("binned closed form basics") {
    SUBCASE("vacuum limit carries no correlation") {
        const auto L = gaussian::binned_coincidences_closed_form(
            gaussian::closed_form_params(1e-7, 0.9, 0.3, 0.1), 0.0);
        for (const double v : {L.tt, L.tr, L.rt, L.rr})
            CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("symmetric angle difference kills E") {
        const auto L = gaussian::binned_coincidences_closed_form(
            gaussian::closed_form_params(0.6, 0.8, pi / 4, 0.0), 1e-3);
        CHECK(metrics::correlation(L) == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("E is antisymmetric about a pi/4 difference") {
        for (const double d : {0.1, 0.3, 0.6}) {
            const auto lo = gaussian::binned_coincidences_closed_form(
                gaussian::closed_form_params(0.5, 0.9, d, 0.0), 1e-3);
            const auto hi = gaussian::binned_coincidences_closed_form(
                gaussian::closed_form_params(0.5, 0.9, pi / 2 - d, 0.0), 1e-3);
            CHECK(metrics::correlation(lo) ==
                  doctest::Approx(-metrics::correlation(hi)).epsilon(1e-12));
        }
    }
}

TEST_CASE("standard binning suppresses the violation at the figure optimum") {
    const MeasurementPlan plan;  // ideal-pair angles
    const double s = metrics::bell_parameter(Spdc{0.755}, {1.0, 0.0}, plan,
                                             binning::Strategy::standard,
                                             metrics::Backend::gaussian);
    CHECK(s < 2.0);
}

TEST_CASE("gaussian engine reproduces the Fock oracle") {
    // spot checks here; the full grid runs in the acceptance suite
    struct Case {
        double xi, eta, nu, ta, tb;
    };
    const Case cases[] = {{0.3, 0.8, 1e-3, pi / 8, 0.0},
                          {0.6, 1.0, 0.0, 1.1, 0.4},
                          {0.1, 0.6, 1e-3, 2.9, 0.55}};
    for (const auto& c : cases) {
        const DetectorModel det{c.eta, c.nu};
        const AnalyzerSettings s{c.ta, c.tb};
        const auto g = gaussian::outcome_distribution(c.xi, s, det);
        const auto f = fock::outcome_distribution(
            fock::make_source_state(Spdc{c.xi}), s, det);
        for (unsigned i = 0; i < 16; ++i)
            CHECK(g.probs[i] == doctest::Approx(f.probs[i]).epsilon(1e-8));
    }
}

TEST_CASE("marginalized patterns agree with the printed coincidence forms") {
    for (const double d : {0.0, 0.4, 1.0, 2.2}) {
        const DetectorModel det{0.85, 1e-3};
        const auto dist =
            gaussian::outcome_distribution(0.5, {d + 0.3, 0.3}, det);
        const auto binned = binning::bin_standard(dist);
        const auto closed = gaussian::binned_coincidences_closed_form(
            gaussian::closed_form_params(0.5, det.eta, d + 0.3, 0.3), det.nu);
        CHECK(binned.tt == doctest::Approx(closed.tt).epsilon(1e-10));
        CHECK(binned.tr == doctest::Approx(closed.tr).epsilon(1e-10));
        CHECK(binned.rt == doctest::Approx(closed.rt).epsilon(1e-10));
        CHECK(binned.rr == doctest::Approx(closed.rr).epsilon(1e-10));
    }
}

TEST_CASE("statistics depend on the angle difference only") {
    const DetectorModel det{0.9, 1e-3};
    const auto base = gaussian::outcome_distribution(0.4, {0.9, 0.2}, det);
    for (const double shift : {0.37, 1.3, -0.8}) {
        const auto moved = gaussian::outcome_distribution(
            0.4, {0.9 + shift, 0.2 + shift}, det);
        for (unsigned i = 0; i < 16; ++i)
            CHECK(moved.probs[i] ==
                  doctest::Approx(base.probs[i]).epsilon(1e-11));
    }
}

TEST_CASE("gaussian distributions are normalized and in range") {
    for (const double xi : {0.1, 0.5, 1.0, 1.4})
        for (const double eta : {0.3, 0.8, 1.0}) {
            const auto dist = gaussian::outcome_distribution(
                xi, {0.61, 0.13}, {eta, 5e-3});
            CHECK(dist.sum() == doctest::Approx(1.0).epsilon(1e-12));
            for (const double p : dist.probs) {
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
        }
}
