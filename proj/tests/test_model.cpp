#include "doctest.h"
#include "oracles.hpp"

#include "rtrg/error.hpp"
#include "rtrg/model.hpp"

using namespace rtrg;

TEST_CASE("g is one minus twice alpha") {
    for (double a : {0.1, 0.3, 0.45, 0.5, 0.55, 0.9}) CHECK(derive_scales(a).g == 1.0 - 2.0 * a);
}

TEST_CASE("delta at alpha one half is sqrt(omega_c)") {
    ModelParams p = derive_scales(0.5, 1e4);
    CHECK(p.delta == oracle::approx(100.0, 1e-13));
    CHECK(p.initial_rate() == oracle::approx(1.0, 1e-13));
}

TEST_CASE("delta approaches the Kondo scale as alpha goes to zero") {
    CHECK(derive_scales(1e-9, 1e4).delta == oracle::approx(1.0, 1e-7));
}

TEST_CASE("delta at alpha 0.45 matches bisection oracle") {
    const double ref = oracle::delta_for_unit_kondo(0.45, 1e4);
    CHECK(ref == oracle::approx(std::pow(10.0, 1.8), 1e-12));
    CHECK(derive_scales(0.45, 1e4).delta == oracle::approx(ref, 1e-12));
}

TEST_CASE("Kondo scale round trip") {
    for (double a : {0.05, 0.3, 0.45, 0.5, 0.55, 0.8, 0.95}) {
        for (double wc : {1e3, 1e4, 1e6}) {
            ModelParams p = derive_scales(a, wc);
            CHECK(p.kondo_from_delta() == oracle::approx(1.0, 1e-12));
            CHECK(oracle::kondo(a, p.delta, wc) == oracle::approx(1.0, 1e-12));
        }
    }
}

TEST_CASE("delta increases with alpha") {
    double prev = 0.0;
    for (int k = 1; k < 100; ++k) {
        double d = derive_scales(k / 100.0, 1e4).delta;
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("derive_scales rejects bad input") {
    CHECK_THROWS_AS(derive_scales(0.0), DomainError);
    CHECK_THROWS_AS(derive_scales(1.0), DomainError);
    CHECK_THROWS_AS(derive_scales(-0.2), DomainError);
    CHECK_THROWS_AS(derive_scales(0.45, 500.0), ConfigError);
    CHECK_THROWS_AS(derive_scales(0.45).with_temperature(-1e-3), DomainError);
}

TEST_CASE("Matsubara frequencies") {
    const double T = 0.37;
    CHECK(matsubara(0, T).value == doctest::Approx(oracle::pi * T));
    for (std::size_t m = 0; m < 50; ++m) {
        CHECK(matsubara(m, T).index == m);
        CHECK(matsubara(m, T).value > 0.0);
        CHECK(matsubara(m + 1, T).value - matsubara(m, T).value == doctest::Approx(2.0 * oracle::pi * T));
    }
}
