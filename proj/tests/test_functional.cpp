#include <doctest.h>

#include <cmath>

#include "expstable/errors.hpp"
#include "expstable/functional.hpp"

using namespace expstable;

namespace {

DpppSpec battery_spec(DecorationLaw law, double c = 0.0) {
    DpppSpec spec;
    spec.decoration = std::move(law);
    spec.density_coeff = c;
    spec.window = Window{-2.0, kInf};
    return spec;
}

TestFunction zero_function() {
    TestFunction f;
    f.id = "zero";
    f.eval = [](double) { return 0.0; };
    f.support = Window{0.0, 1.0};
    f.breakpoints = {0.0, 1.0};
    return f;
}

// Decoration whose samples carry no atoms: only the deterministic
// component of the process survives.
DecorationLaw null_decoration() {
    DecorationLaw law;
    law.name = "null";
    law.sample = [](Rng&) { return PointConfiguration{}; };
    law.support_upper_bound = 0.0;
    law.support_lower_bound = 0.0;
    law.mean_exp_pairing = 0.0;
    law.rightmost_tail_integral = [](double) { return 0.0; };
    return law;
}

}  // namespace

TEST_CASE("the zero function has cumulant exactly zero on both routes") {
    const auto spec = battery_spec(dirac0_decoration());
    const auto mc = estimate_cumulant(spec, zero_function(), 2000, 1);
    CHECK(mc.value == 0.0);
    CHECK(mc.std_error == 0.0);

    const auto formula = eval_cumulant_formula(0.0, spec.decoration, zero_function(), 500, 2);
    CHECK(formula.value == 0.0);
}

TEST_CASE("dirac0 cumulant of the unit indicator hits the Poisson closed form") {
    // K(f) = int_0^1 e^{-x} (1 - e^{-1}) dx = (1 - 1/e)^2.
    const double closed = 0.39957640089372803;
    const auto spec = battery_spec(dirac0_decoration());
    const auto f = test_function_battery()[0];  // ind_0_1

    const auto mc = estimate_cumulant(spec, f, 100000, 33);
    CHECK(std::abs(mc.value - closed) < 4.0 * mc.std_error);

    // All dirac0 draws coincide, so the formula route is quadrature-exact.
    const auto formula = eval_cumulant_formula(0.0, spec.decoration, f, 200, 34);
    CHECK(formula.std_error == 0.0);
    CHECK(formula.value == doctest::Approx(closed).epsilon(1e-9));

    const double se = std::hypot(mc.std_error, formula.std_error);
    CHECK(std::abs(mc.value - formula.value) <= 3.0 * se);
}

TEST_CASE("a decoration with zero mass leaves only the density term") {
    const auto spec = battery_spec(null_decoration(), 1.0);
    const auto f = test_function_battery()[0];
    const double closed = 0.6321205588285577;  // int_0^1 e^{-x} dx

    const auto mc = estimate_cumulant(spec, f, 2000, 3);
    CHECK(mc.value == doctest::Approx(closed).epsilon(1e-9));
    CHECK(mc.std_error == 0.0);

    const auto formula = eval_cumulant_formula(1.0, spec.decoration, f, 500, 4);
    CHECK(formula.value == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("the two cumulant routes agree for a decorated process") {
    const auto spec = battery_spec(geometric_staircase_decoration());
    for (const auto* id : {"ind_0_1", "tri_m1_1"}) {
        const TestFunction* f = nullptr;
        for (const auto& g : test_function_battery()) {
            if (g.id == id) f = &g;
        }
        REQUIRE(f != nullptr);
        const auto mc = estimate_cumulant(spec, *f, 20000, 71);
        const auto formula = eval_cumulant_formula(0.0, spec.decoration, *f, 5000, 72);
        const double se = std::hypot(mc.std_error, formula.std_error);
        CHECK(std::abs(mc.value - formula.value) < 4.0 * se);
    }
}

TEST_CASE("cumulants are monotone in the test function") {
    const auto spec = battery_spec(finite_cluster_decoration());
    const auto& battery = test_function_battery();
    const auto& small = battery[0];  // ind_0_1
    const auto& large = battery[2];  // ind_0_2 >= ind_0_1 pointwise

    const auto k_small = estimate_cumulant(spec, small, 20000, 5);
    const auto k_large = estimate_cumulant(spec, large, 20000, 6);
    const double se = std::hypot(k_small.std_error, k_large.std_error);
    CHECK(k_large.value - k_small.value > -3.0 * se);

    const auto f_small = eval_cumulant_formula(0.0, spec.decoration, small, 4000, 7);
    const auto f_large = eval_cumulant_formula(0.0, spec.decoration, large, 4000, 7);
    CHECK(f_large.value >= f_small.value);
}

TEST_CASE("independent superposition doubles the cumulant") {
    // Linearity of the formula in the deterministic component.
    const auto f = test_function_battery()[0];
    const auto one = eval_cumulant_formula(1.0, null_decoration(), f, 200, 8);
    const auto two = eval_cumulant_formula(2.0, null_decoration(), f, 200, 8);
    CHECK(two.value == doctest::Approx(2.0 * one.value).epsilon(1e-12));
}

TEST_CASE("homogeneity: shifted cumulants scale exponentially") {
    const auto spec = battery_spec(dirac0_decoration());
    const auto f = test_function_battery()[0];

    const auto rows =
        homogeneity_check(spec, f, {0.0, -1.0, -std::log(2.0), 1.0}, 100000, 2026);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].z == 0.0);  // x = 0 is the same estimate on both sides
    for (const auto& row : rows) {
        CHECK(std::abs(row.z) < 3.0);
    }

    // Closed form for x = -log 2: half of (1 - 1/e)^2.
    const double half_closed = 0.19978820044686402;
    CHECK(std::abs(rows[2].k_shifted - half_closed) < 4.0 * rows[2].k_shifted_se);
}

TEST_CASE("shifted supports outside the window are rejected") {
    const auto spec = battery_spec(dirac0_decoration());
    const auto f = test_function_battery()[0];
    CHECK_THROWS_AS(estimate_cumulant(spec, shift_test_function(f, 2.5), 2000, 9),
                    WindowTooSmallError);
}

TEST_CASE("the replica floor is enforced") {
    const auto spec = battery_spec(dirac0_decoration());
    CHECK_THROWS_AS(estimate_cumulant(spec, test_function_battery()[0], 500, 10),
                    ConfigurationError);
}

TEST_CASE("unbounded decorations cannot enter the formula") {
    CHECK_THROWS_AS(
        eval_cumulant_formula(0.0, exp_spike_decoration(2.0), test_function_battery()[0], 100, 1),
        UnboundedDecorationError);
}
