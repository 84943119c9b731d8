#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "entqkd/rates.hpp"
#include "entqkd/types.hpp"

using namespace entqkd;
using namespace entqkd::rates;

TEST_CASE("binary entropy endpoints and maximum") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("binary entropy at 0.11") {
    // -(0.89 log2 0.89 + 0.11 log2 0.11), evaluated independently
    CHECK(binary_entropy(0.11) ==
          doctest::Approx(0.499915958164528).epsilon(1e-12));
}

TEST_CASE("binary entropy domain") {
    CHECK_THROWS_AS(binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(1.01), std::domain_error);
    CHECK_THROWS_AS(binary_entropy(std::nan("")), std::domain_error);
}

TEST_CASE("binary entropy symmetry h(q) = h(1-q)") {
    for (int i = 0; i <= 50; ++i) {
        const double q = i / 50.0;
        CHECK(binary_entropy(q) ==
              doctest::Approx(binary_entropy(1.0 - q)).epsilon(1e-14));
    }
}

TEST_CASE("DI rate endpoints") {
    const auto perfect = di_key_rate({0.0, two_sqrt2});
    CHECK(perfect.rate == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.secure);

    const auto classical = di_key_rate({0.0, 2.0});
    CHECK(classical.rate == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(classical.secure);
}

TEST_CASE("DI rate below the classical bound is -h(Q)") {
    for (const double s : {0.0, 1.0, 1.9999, 2.0}) {
        const auto r = di_key_rate({0.21, s});
        CHECK(r.rate ==
              doctest::Approx(-binary_entropy(0.21)).epsilon(1e-14));
        CHECK_FALSE(r.secure);
    }
}

TEST_CASE("DI rate at the depolarized-QD operating point") {
    // Q and S from the closed forms at eta = 0.99, p = 0.9, nu = 1e-3
    const double k = std::exp(-2e-3) * 0.9 * 0.99 * 0.99;
    const auto r = di_key_rate({(1.0 - k) / 2.0, two_sqrt2 * k});
    CHECK(r.rate == doctest::Approx(0.11794951196441716).epsilon(1e-12));
    CHECK(r.secure);
}

TEST_CASE("DI rate monotone in Q and S") {
    for (int si = 0; si <= 8; ++si) {
        const double s = 2.0 + si * (two_sqrt2 - 2.0) / 8.0;
        double prev = 2.0;
        for (int qi = 0; qi <= 10; ++qi) {
            const double q = qi * 0.05;
            const double r = di_key_rate({q, s}).rate;
            CHECK(r <= prev + 1e-12);
            prev = r;
        }
    }
    for (int qi = 0; qi <= 10; ++qi) {
        const double q = qi * 0.05;
        double prev = -2.0;
        for (int si = 0; si <= 8; ++si) {
            const double s = 2.0 + si * (two_sqrt2 - 2.0) / 8.0;
            const double r = di_key_rate({q, s}).rate;
            CHECK(r >= prev - 1e-12);
            prev = r;
        }
    }
}

TEST_CASE("DI rate at maximal violation dominates BB84") {
    for (int qi = 0; qi <= 20; ++qi) {
        const double q = qi * 0.025;
        const double di = di_key_rate({q, two_sqrt2}).rate;
        CHECK(di == doctest::Approx(1.0 - binary_entropy(q)).epsilon(1e-12));
        CHECK(di >= bb84_key_rate(q).rate - 1e-12);
    }
}

TEST_CASE("DI rate input validation") {
    CHECK_THROWS_AS(di_key_rate({0.6, 2.5}), std::domain_error);
    CHECK_THROWS_AS(di_key_rate({-0.1, 2.5}), std::domain_error);
    CHECK_THROWS_AS(di_key_rate({0.1, two_sqrt2 + 1e-9}), std::domain_error);
    CHECK_THROWS_AS(di_key_rate({0.1, -0.1}), std::domain_error);
    // numerical headroom just above the Tsirelson bound is accepted
    CHECK(di_key_rate({0.0, two_sqrt2 + 0.9e-12}).rate ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("BB84 rate endpoints and the 11% threshold") {
    CHECK(bb84_key_rate(0.0).rate == 1.0);
    CHECK(bb84_key_rate(0.0).secure);
    CHECK(bb84_key_rate(0.5).rate == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK_FALSE(bb84_key_rate(0.5).secure);

    const auto near = bb84_key_rate(0.11);
    CHECK(near.rate ==
          doctest::Approx(0.0001680836709440081).epsilon(1e-9));
    CHECK(near.secure);
    CHECK(bb84_key_rate(0.112).rate < 0.0);

    CHECK(bb84_qber_threshold() ==
          doctest::Approx(0.11002786443835955).epsilon(1e-10));
    CHECK_THROWS_AS(bb84_key_rate(0.51), std::domain_error);
}
