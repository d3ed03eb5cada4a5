#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

#include "rtrg/analytic.hpp"
#include "rtrg/error.hpp"
#include "rtrg/spectral.hpp"

using namespace rtrg;

namespace {
const cplx I(0.0, 1.0);
}

TEST_CASE("residual map vanishes for g = 0 away from the pole") {
    ModelParams p = derive_scales(0.5).with_temperature(0.1);
    Rectangle r{-1.5, 1.5, -1.55, 0.5};
    MapOptions o;
    o.fd_step = 1e-4; // grid-spacing steps leave an O(h^2) residual even for analytic Pi
    o.fd_order = 4;
    ResidualMap m = cr_residual_map(p, r, 30, 20, o);
    const double dx = m.x(1) - m.x(0), dy = m.y(1) - m.y(0);
    std::size_t near = 0;
    for (std::size_t j = 0; j < m.ny; ++j)
        for (std::size_t i = 0; i < m.nx; ++i) {
            cplx E(m.x(i), m.y(j));
            if (std::abs(E.real()) < dx && std::abs(E.imag() + 1.0) < dy) {
                ++near;
                continue;
            }
            CHECK(m.at(i, j) < 1e-8);
        }
    CHECK(near <= 4);
}

TEST_CASE("residual map is small in the upper half plane") {
    ModelParams p = derive_scales(0.45).with_temperature(0.1);
    MapOptions o;
    o.fd_step = 1e-4;
    o.fd_order = 4;
    ResidualMap m = cr_residual_map(p, Rectangle{-1.0, 1.0, 0.2, 1.0}, 16, 16, o);
    CHECK(m.flagged() == 0);
    CHECK(*std::max_element(m.values.begin(), m.values.end()) < 1e-6);
}

TEST_CASE("residual map is mirror symmetric") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    ResidualMap m = cr_residual_map(p, Rectangle{-1.2, 1.2, -1.5, 0.0}, 25, 16);
    for (std::size_t j = 0; j < m.ny; ++j)
        for (std::size_t i = 0; i < m.nx / 2; ++i) {
            double a = m.at(i, j), b = m.at(m.nx - 1 - i, j);
            if (a == ResidualMap::kSentinel || b == ResidualMap::kSentinel) {
                CHECK(a == b);
                continue;
            }
            CHECK(std::abs(a - b) <= 1e-6 * std::max(1.0, std::max(a, b)));
        }
}

TEST_CASE("serial and parallel maps agree bitwise") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    Rectangle r{-1.0, 1.0, -1.2, 0.0};
    ResidualMap a = cr_residual_map(p, r, 16, 16, {}, Exec::Serial);
    ResidualMap b = cr_residual_map(p, r, 16, 16, {}, Exec::Parallel);
    CHECK(a.values == b.values);
}

TEST_CASE("map error when too many points fail") {
    ModelParams p = derive_scales(0.45);
    MapOptions o;
    o.max_failed_fraction = 0.01;
    CHECK_THROWS_AS(cr_residual_map(p, Rectangle{-1.0, 1.0, -1.5, 0.0}, 21, 16, o), MapError);
}

TEST_CASE("map rejects tiny grids") {
    ModelParams p = derive_scales(0.45).with_temperature(0.1);
    CHECK_THROWS_AS(cr_residual_map(p, Rectangle{}, 8, 16), ConfigError);
}

TEST_CASE("g = 0 pole at -i T_K") {
    PoleResult r = find_poles(derive_scales(0.5).with_temperature(0.1), cplx(0.2, -0.7));
    REQUIRE(r.converged);
    REQUIRE(r.poles.size() == 1);
    CHECK(std::abs(r.poles[0].z + I) < 1e-10);
    CHECK_FALSE(r.poles[0].finite_frequency);
}

TEST_CASE("zero-T pole matches the closed form") {
    ZeroTRates z = zero_t_rates(0.1);
    PoleResult r = find_poles(derive_scales(0.45), zero_t_pole_seed(0.1));
    REQUIRE(r.converged);
    REQUIRE(r.poles.size() == 1);
    const Pole& q = r.poles[0];
    CHECK(q.finite_frequency);
    CHECK(q.omega == oracle::approx(z.omega, 0.01));
    CHECK(q.omega == oracle::approx(oracle::pi * 0.1, 0.05));
    CHECK(q.decay == oracle::approx(1.0, 0.05));
    // the root satisfies i z = Gamma_1(z)
    Rates rt = evaluate_rates(q.z, derive_scales(0.45));
    CHECK(std::abs(I * q.z - rt.gamma1) < 1e-9);
}

TEST_CASE("poles come in mirror pairs") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    PoleResult a = find_poles(p, cplx(0.3, -1.0));
    PoleResult b = find_poles(p, cplx(-0.3, -1.0));
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    CHECK(std::abs(b.raw + std::conj(a.raw)) < 1e-8);
    CHECK(std::abs(a.poles[0].z - b.poles[0].z) < 1e-8);
}

TEST_CASE("spectral regimes at alpha 0.45") {
    auto regime = [](double T) {
        return classify_regime(spectral_features(derive_scales(0.45).with_temperature(T))).regime;
    };
    CHECK(regime(0.01) == Regime::PartiallyCoherent);
    CHECK(regime(0.3) == Regime::AsymptoticallyCoherent);
    CHECK(regime(0.59) == Regime::Incoherent);
}

TEST_CASE("alpha above one half is incoherent") {
    for (double T : {0.01, 0.1, 1.0}) {
        SpectralFeatures f = spectral_features(derive_scales(0.55).with_temperature(T));
        CHECK(classify_regime(f).regime == Regime::Incoherent);
    }
}

TEST_CASE("empty features cannot be classified") {
    CHECK_THROWS_AS(classify_regime(SpectralFeatures{}), ClassificationError);
}

TEST_CASE("topmost singularity sits at pi T + Gamma_2*/2") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    SingularityList s = find_imag_axis_singularities(p, 3);
    REQUIRE(s.rates.size() == 3);
    CHECK_FALSE(s.short_list);
    double g2 = gamma2_star_finite_T(p).value;
    CHECK(s.rates[0] == oracle::approx(oracle::pi * 0.05 + g2 / 2, 0.01));
}

TEST_CASE("singularity spacing is 2 pi T [1 + O(g)]") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    SingularityList s = find_imag_axis_singularities(p, 4);
    REQUIRE(s.rates.size() == 4);
    const double a = 2 * oracle::pi * 0.05;
    for (std::size_t m = 1; m < s.rates.size(); ++m) {
        CHECK(s.rates[m] > s.rates[m - 1]);
        CHECK(std::abs((s.rates[m] - s.rates[m - 1]) / a - 1.0) <= 10 * p.g);
    }
}

TEST_CASE("at T = 0 only the branching point near -i T_K/2 is reported") {
    SingularityList s = find_imag_axis_singularities(derive_scales(0.45), 2);
    REQUIRE(s.rates.size() == 1);
    CHECK(s.short_list);
    CHECK(s.rates[0] == oracle::approx(zero_t_rates(0.1).gamma2_star / 2, 0.05));
}

TEST_CASE("singularities move down with T while Gamma_1* barely changes") {
    std::vector<double> prev;
    double g1_ref = 0.0;
    const double tc1 = tc1_analytic(0.45);
    for (double T = 0.02; T < 0.8 * tc1; T += 0.02) {
        SpectralFeatures f = spectral_features(derive_scales(0.45).with_temperature(T), [] {
            FeatureOptions o;
            o.singularities = 3;
            return o;
        }());
        REQUIRE(f.imag_singularities.size() == 3);
        if (!prev.empty())
            for (std::size_t m = 0; m < 3; ++m) CHECK(f.imag_singularities[m] > prev[m]);
        prev = f.imag_singularities;
        REQUIRE(f.poles.size() == 1);
        if (g1_ref == 0.0) g1_ref = f.poles[0].decay;
        CHECK(std::abs(f.poles[0].decay / g1_ref - 1.0) < 0.1);
    }
}

TEST_CASE("upper axis pole approaches T_K from above at high T") {
    double prev = INFINITY;
    for (double T : {0.6, 0.7, 0.8, 1.0, 1.2}) {
        AxisScan ax = axis_scan(derive_scales(0.45).with_temperature(T));
        REQUIRE_FALSE(ax.axis_poles.empty());
        double top = ax.axis_poles.front();
        CHECK(top > 1.0);
        CHECK(top - 1.0 < prev - 1.0);
        prev = top;
    }
}

TEST_CASE("extra finite-frequency features lie below the leading singularity") {
    ModelParams p = derive_scales(0.45).with_temperature(0.05);
    SpectralFeatures f = spectral_features(p);
    REQUIRE(f.poles.size() == 1);
    REQUIRE_FALSE(f.imag_singularities.empty());
    const cplx main = f.poles[0].z;
    for (double x : {0.1, 0.4, 0.8})
        for (double y : {-0.9, -1.3, -1.7}) {
            PoleResult r = find_poles(p, cplx(x, y));
            if (!r.converged || r.poles.empty()) continue;
            const Pole& q = r.poles[0];
            if (!q.finite_frequency || std::abs(q.z - main) < 1e-6) continue;
            CHECK(q.decay > f.imag_singularities[0]);
        }
}

TEST_CASE("leading rate picks the feature closest to the real axis") {
    SpectralFeatures f;
    f.poles.push_back(Pole{cplx(0.3, -0.9), 0.3, 0.9, true});
    f.imag_singularities = {0.7, 1.0};
    CHECK(leading_rate(f) == 0.7);
    f.axis_poles = {0.5};
    CHECK(leading_rate(f) == 0.5);
}
