#include "doctest.h"

#include "besq/bessel.hpp"
#include "besq/laws.hpp"
#include "besq/validate.hpp"

#include <cmath>

using namespace besq::validate;

TEST_CASE("identity suite passes and sizes match") {
    const auto h = check_half_order();
    CHECK(h.points == 200);
    CHECK(h.pass);
    const auto tc = check_time_change();
    CHECK(tc.points == 100);
    CHECK(tc.pass);
    const auto c = check_conditional();
    CHECK(c.points == 50);
    CHECK(c.pass);
    CHECK(check_z4_density().points == 10);
    CHECK(analytic_pairs().size() >= 5);
    for (const auto& r : run_suite()) {
        INFO(r.name << " residual " << r.max_residual);
        CHECK(r.pass);
    }
}

TEST_CASE("a perturbed Bessel kernel is detected") {
    SuiteOptions o;
    o.bessel_perturbation = 1e-6;
    o.include_jumps = false;
    const auto res = run_suite(o);
    REQUIRE(res.front().name == "half-order closed forms");
    CHECK_FALSE(res.front().pass);
    CHECK(res.front().max_residual > 1e-8);
    // analytic round trips do not touch the kernels
    for (const auto& r : res)
        if (r.name == "inversion round trips") CHECK(r.pass);
    // the guard is scoped
    CHECK(check_half_order().pass);
    {
        const besq::bessel::ScopedArgumentPerturbation g(1e-3);
        CHECK(besq::laws::laplace_sigma({{1.0, 1.0}, 0.0, 1.0, 2.0}) != doctest::Approx(0.9212839843029861).epsilon(1e-9));
    }
    CHECK(besq::laws::laplace_sigma({{1.0, 1.0}, 0.0, 1.0, 2.0}) == doctest::Approx(0.9212839843029861).epsilon(1e-12));
}
