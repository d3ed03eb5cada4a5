#include "doctest.h"
#include "oracles.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "rtrg/analytic.hpp"
#include "rtrg/error.hpp"
#include "rtrg/phase.hpp"

using namespace rtrg;

namespace {

const double kTriple = 1.0 / (2.0 * oracle::pi);

const PhaseRow& row(double alpha) {
    static std::map<double, PhaseRow> cache;
    auto it = cache.find(alpha);
    if (it == cache.end()) it = cache.emplace(alpha, scan_phase_diagram({alpha}, {}, Exec::Serial).at(0)).first;
    return it->second;
}

Regime regime_at(double alpha, double T) {
    return classify_regime(spectral_features(derive_scales(alpha).with_temperature(T))).regime;
}

} // namespace

TEST_CASE("lower transition near the triple point") {
    Transition t = find_tc1_numeric(0.49);
    REQUIRE(t.T.has_value());
    CHECK(*t.T == oracle::approx(kTriple, 0.05));
}

TEST_CASE("upper transition near the triple point") {
    Transition t = find_tc2_numeric(0.49);
    REQUIRE(t.T.has_value());
    CHECK(*t.T == oracle::approx(kTriple, 0.05));
}

TEST_CASE("transitions at alpha 0.45") {
    Transition t1 = find_tc1_numeric(0.45);
    Transition t2 = find_tc2_numeric(0.45);
    REQUIRE(t1.T.has_value());
    REQUIRE(t2.T.has_value());
    CHECK(*t1.T > 0.01);
    CHECK(*t1.T < 0.3);
    CHECK(*t2.T > 0.3);
    CHECK(*t2.T < 0.59);
    CHECK(*t1.T == oracle::approx(tc1_analytic(0.45), 0.15));
    CHECK(*t2.T == oracle::approx(tc2_analytic(0.45), 0.15));
}

TEST_CASE("bisection resolves to the requested tolerance") {
    TransitionSpec s;
    s.t_tol = 1e-4;
    Transition fine = find_tc1_numeric(0.45, s);
    Transition coarse = find_tc1_numeric(0.45);
    REQUIRE(fine.T.has_value());
    REQUIRE(coarse.T.has_value());
    CHECK(std::abs(*fine.T - *coarse.T) < 1e-3);
    CHECK(fine.evaluations > coarse.evaluations);
}

TEST_CASE("no sign change in the bracket gives no transition") {
    TransitionSpec s;
    s.tc1_bracket = {0.2, 0.4};
    Transition t = find_tc1_numeric(0.45, s);
    CHECK_FALSE(t.T.has_value());
    CHECK_FALSE(t.note.empty());
}

TEST_CASE("transition search needs 0 < g <= 0.4") {
    CHECK_THROWS_AS(find_tc1_numeric(0.25), DomainError);
    CHECK_THROWS_AS(find_tc2_numeric(0.5), DomainError);
    CHECK_THROWS_AS(find_tc2_numeric(0.55), DomainError);
}

TEST_CASE("no transitions above one half") {
    const PhaseRow& r = row(0.55);
    CHECK_FALSE(r.tc1_numeric.has_value());
    CHECK_FALSE(r.tc2_numeric.has_value());
    CHECK_FALSE(r.tc1_analytic.has_value());
    CHECK_FALSE(r.tc2_analytic.has_value());
}

TEST_CASE("exactly solvable row") {
    const PhaseRow& r = row(0.5);
    REQUIRE(r.tc1_analytic.has_value());
    CHECK(*r.tc1_analytic == doctest::Approx(kTriple));
    CHECK(std::find(r.flags.begin(), r.flags.end(), "exactly_solvable") != r.flags.end());
}

TEST_CASE("branches meet as alpha approaches one half") {
    const PhaseRow& r = row(0.499);
    REQUIRE(r.tc1_numeric.has_value());
    REQUIRE(r.tc2_numeric.has_value());
    CHECK(std::abs(*r.tc1_numeric - *r.tc2_numeric) < 0.02);
}

TEST_CASE("lower branch vanishes toward alpha 0.3") {
    double prev = INFINITY;
    for (double a : {0.45, 0.40, 0.35, 0.32}) {
        const PhaseRow& r = row(a);
        REQUIRE(r.tc1_numeric.has_value());
        CHECK(*r.tc1_numeric < prev);
        prev = *r.tc1_numeric;
    }
    CHECK(prev < 0.05);
    CHECK_FALSE(find_tc1_numeric(0.30).T.has_value());
}

TEST_CASE("rows keep tc1 below tc2") {
    for (double a : {0.35, 0.40, 0.43, 0.45, 0.48, 0.49}) {
        const PhaseRow& r = row(a);
        if (r.tc1_numeric && r.tc2_numeric) CHECK(*r.tc1_numeric <= *r.tc2_numeric);
    }
}

TEST_CASE("regimes are consistent with the located transitions") {
    for (double a : {0.40, 0.45}) {
        const PhaseRow& r = row(a);
        REQUIRE(r.tc1_numeric.has_value());
        REQUIRE(r.tc2_numeric.has_value());
        const double t1 = *r.tc1_numeric, t2 = *r.tc2_numeric;
        CAPTURE(a);
        CHECK(regime_at(a, 0.5 * (t1 + t2)) == Regime::AsymptoticallyCoherent);
        CHECK(regime_at(a, 0.5 * t1) == Regime::PartiallyCoherent);
        CHECK(regime_at(a, 1.2 * t2) == Regime::Incoherent);
    }
}

TEST_CASE("scan is deterministic") {
    std::vector<double> grid{0.45, 0.48, 0.55};
    auto a = scan_phase_diagram(grid, {}, Exec::Parallel);
    auto b = scan_phase_diagram(grid, {}, Exec::Serial);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].tc1_numeric == b[i].tc1_numeric);
        CHECK(a[i].tc2_numeric == b[i].tc2_numeric);
        CHECK(a[i].flags == b[i].flags);
    }
    std::ostringstream x, y;
    write_phase_csv(x, a);
    write_phase_csv(y, b);
    CHECK(x.str() == y.str());
}

TEST_CASE("numeric branches stay within 20% of the closed forms") {
    for (double a : {0.40, 0.43, 0.45, 0.48}) {
        const PhaseRow& r = row(a);
        CAPTURE(a);
        REQUIRE(r.tc1_numeric.has_value());
        REQUIRE(r.tc2_numeric.has_value());
        CHECK(*r.tc1_numeric == oracle::approx(tc1_analytic(a), 0.2));
        CHECK(*r.tc2_numeric == oracle::approx(tc2_analytic(a), 0.2));
    }
}

TEST_CASE("scan rejects alpha outside (0.3, 0.55]") {
    CHECK_THROWS_AS(scan_phase_diagram({0.45, 0.6}), DomainError);
    CHECK_THROWS_AS(scan_phase_diagram({0.3}), DomainError);
}

TEST_CASE("phase CSV carries units and empty fields for absent values") {
    std::ostringstream os;
    write_phase_csv(os, {closed_form_row(0.55)});
    std::string s = os.str();
    CHECK(s.rfind("alpha [1],tc1_numeric [T_K],tc2_numeric [T_K],tc1_analytic [T_K],tc2_analytic [T_K],flags [-]\n", 0) == 0);
    CHECK(s.find("0.55,,,,") != std::string::npos);
    std::ostringstream cmp;
    write_comparison_csv(cmp, {closed_form_row(0.5)});
    CHECK(cmp.str().find("[T_K]") != std::string::npos);
    CHECK(cmp.str().find("0.3183098862") != std::string::npos);
}
