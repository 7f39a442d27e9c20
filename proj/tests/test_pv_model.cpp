#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "pvboost/pv_model.hpp"
#include "pvboost/rng.hpp"

using namespace pvboost;

namespace {

DimensionlessParams paper_params(double x_minus, double q) {
    return DimensionlessParams(1.0, 0.875, 3.5, x_minus, q);
}

// A circuit built by inverting the dimensionless map by hand:
// R_s = 0 makes V_p = V_T; g_d R_p = 3 makes beta = 4 alpha.
PhysicalCircuit reference_circuit() {
    PhysicalCircuit c;
    c.r_s = 0.0;
    c.r_p = 30.0;
    c.g_d = 0.1;
    c.v_t = 0.6;
    c.i_s = 0.09;  // I_p = 0.09 - 0.6/30 = 0.07
    c.l = 1e-3;
    c.t = c.l * 0.07 / 0.6;  // T_p = 1
    c.i_minus = 0.726 * 0.07;
    c.v_o = 1.66 * 0.6;
    return c;
}

}  // namespace

TEST_CASE("reduce_diode branches and continuity") {
    CHECK(reduce_diode(2.0, 0.6, 0.6) == 0.0);
    CHECK(reduce_diode(2.0, 0.6, 1.1) == doctest::Approx(1.0));
    CHECK(reduce_diode(2.0, 0.6, 0.0) == 0.0);
    CHECK(reduce_diode(0.0, 0.6, 5.0) == 0.0);
    CHECK_THROWS_AS(reduce_diode(-1.0, 0.6, 1.0), DomainError);
}

TEST_CASE("pv_curve values and break point") {
    const auto p = paper_params(0.5, 2.0);
    CHECK(pv_curve(p, 1.0) == 1.0);
    CHECK(pv_curve(p, 0.5) == 1.4375);
    CHECK(pv_curve(p, 1.2) == doctest::Approx(0.3));
    CHECK_THROWS_AS(pv_curve(p, 0.0), DomainError);
    CHECK_THROWS_AS(pv_curve(p, -1.0), DomainError);
}

TEST_CASE("pv_curve is continuous and strictly decreasing") {
    const auto p = paper_params(0.5, 2.0);
    CHECK(pv_curve(p, 1.0 - 1e-12) == doctest::Approx(1.0).epsilon(1e-9));
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const double a = rng.uniform(1e-3, 3.0);
        const double b = rng.uniform(1e-3, 3.0);
        if (a == b) continue;
        const double lo = std::min(a, b), hi = std::max(a, b);
        CHECK(pv_curve(p, lo) > pv_curve(p, hi));
    }
}

TEST_CASE("instantaneous power is exactly 1 at the break point") {
    const auto p = paper_params(0.3, 3.0);
    CHECK(1.0 * pv_curve(p, 1.0) == 1.0);
}

TEST_CASE("parameter construction guards") {
    CHECK_THROWS_AS(DimensionlessParams(0.0, 0.875, 3.5, 0.5, 2.0),
                    DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.0, 3.5, 0.5, 2.0), DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.875, -1.0, 0.5, 2.0),
                    DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.875, 3.5, 0.0, 2.0),
                    DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.875, 3.5, 1.0, 2.0),
                    DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.875, 3.5, 0.5, 0.0),
                    DomainError);
    CHECK_THROWS_AS(DimensionlessParams(1.0, 0.875, 3.5, 0.5, -2.0),
                    DomainError);
    // q in (0, 1] is constructible; the orbit solver reports it instead.
    CHECK_NOTHROW(DimensionlessParams(1.0, 0.875, 3.5, 0.5, 0.5));
}

TEST_CASE("equilibrium levels are cached with the parameters") {
    const auto p = paper_params(0.726, 1.66);
    CHECK(p.aux.a1 == doctest::Approx(1.875 / 0.875));
    CHECK(p.aux.b1 == doctest::Approx(4.5 / 3.5));
    CHECK(p.aux.a2 == doctest::Approx((1.875 - 1.66) / 0.875));
    CHECK(p.aux.b2 == doctest::Approx((4.5 - 1.66) / 3.5));
    CHECK(p.aux.a1 > 1.0);
    CHECK(p.aux.b1 > 1.0);
}

TEST_CASE("to_dimensionless reproduces the hand-built target") {
    const auto p = to_dimensionless(reference_circuit());
    CHECK(p.t_p == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.alpha == doctest::Approx(0.875).epsilon(1e-12));
    CHECK(p.beta == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(p.x_minus == doctest::Approx(0.726).epsilon(1e-12));
    CHECK(p.q == doctest::Approx(1.66).epsilon(1e-12));
}

TEST_CASE("to_dimensionless special cases") {
    // R_s = 0: V_p = V_T and r_b = R_p, so beta/alpha = 1 + g_d R_p.
    PhysicalCircuit c = reference_circuit();
    auto p = to_dimensionless(c);
    CHECK(p.beta / p.alpha == doctest::Approx(1.0 + c.g_d * c.r_p));

    // g_d = 0 and R_s = 0: both slopes collapse to R_p.
    c.g_d = 0.0;
    p = to_dimensionless(c);
    CHECK(p.alpha == doctest::Approx(p.beta));
}

TEST_CASE("to_dimensionless rejections") {
    PhysicalCircuit c = reference_circuit();
    c.r_p = 0.0;
    CHECK_THROWS_AS(to_dimensionless(c), DomainError);
    c = reference_circuit();
    c.l = -1.0;
    CHECK_THROWS_AS(to_dimensionless(c), DomainError);
    c = reference_circuit();
    c.i_s = 0.01;  // I_p = 0.01 - 0.02 < 0
    CHECK_THROWS_AS(to_dimensionless(c), DomainError);
    c = reference_circuit();
    c.r_s = 100.0;  // V_p goes negative
    CHECK_THROWS_AS(to_dimensionless(c), DomainError);
}

TEST_CASE("scaling L and T together leaves all five parameters unchanged") {
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        PhysicalCircuit c = reference_circuit();
        const double k = rng.uniform(0.01, 100.0);
        PhysicalCircuit scaled = c;
        scaled.l *= k;
        scaled.t *= k;
        const auto p0 = to_dimensionless(c);
        const auto p1 = to_dimensionless(scaled);
        CHECK(p1.t_p == doctest::Approx(p0.t_p).epsilon(1e-12));
        CHECK(p1.alpha == doctest::Approx(p0.alpha).epsilon(1e-12));
        CHECK(p1.beta == doctest::Approx(p0.beta).epsilon(1e-12));
        CHECK(p1.x_minus == doctest::Approx(p0.x_minus).epsilon(1e-12));
        CHECK(p1.q == doctest::Approx(p0.q).epsilon(1e-12));
    }
}

TEST_CASE("json parsing of parameter documents") {
    const nlohmann::json j = {{"T_p", 1.0},
                              {"alpha", 0.875},
                              {"beta", 3.5},
                              {"X_minus", 0.726},
                              {"q", 1.66}};
    const auto p = params_from_json(j);
    CHECK(p.q == 1.66);
    CHECK(p.x_minus == 0.726);

    nlohmann::json unknown = j;
    unknown["extra"] = 1.0;
    CHECK_THROWS_AS(params_from_json(unknown), ConfigError);

    nlohmann::json missing = j;
    missing.erase("q");
    CHECK_THROWS_AS(params_from_json(missing), ConfigError);

    nlohmann::json wrong = j;
    wrong["q"] = "high";
    CHECK_THROWS_AS(params_from_json(wrong), ConfigError);
}

TEST_CASE("json parsing of circuit documents") {
    const PhysicalCircuit ref = reference_circuit();
    const nlohmann::json j = {{"I_s", ref.i_s}, {"V_T", ref.v_t},
                              {"g_d", ref.g_d}, {"R_s", ref.r_s},
                              {"R_p", ref.r_p}, {"L", ref.l},
                              {"T", ref.t},     {"I_minus", ref.i_minus},
                              {"V_o", ref.v_o}};
    const auto p = params_or_circuit_from_json(j);
    CHECK(p.alpha == doctest::Approx(0.875));
    CHECK(p.q == doctest::Approx(1.66));

    nlohmann::json unknown = j;
    unknown["C"] = 1e-6;
    CHECK_THROWS_AS(circuit_from_json(unknown), ConfigError);

    CHECK_THROWS_AS(params_or_circuit_from_json(nlohmann::json::array()),
                    ConfigError);
    CHECK_THROWS_AS(params_or_circuit_from_json(nlohmann::json::object()),
                    ConfigError);
}
