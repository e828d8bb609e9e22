#include "doctest.h"

#include "besq/errors.hpp"
#include "besq/inversion.hpp"
#include "besq/laws.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

using namespace besq::inversion;
namespace laws = besq::laws;

namespace {

struct Pair {
    std::string name;
    Transform f;
    std::function<double(double)> exact;
};

// Analytic pairs, each with a precise real-axis form for Gaver-Stehfest.
std::vector<Pair> analytic_pairs() {
    std::vector<Pair> out;
    out.push_back({"1/s",
                   {[](double s) { return 1.0 / s; }, [](cdouble s) { return 1.0 / s; },
                    [](const mpfr& s) { return mpfr(1) / s; }},
                   [](double) { return 1.0; }});
    out.push_back({"1/(s+1)",
                   {[](double s) { return 1.0 / (s + 1.0); }, [](cdouble s) { return 1.0 / (s + 1.0); },
                    [](const mpfr& s) { return mpfr(1) / (s + 1); }},
                   [](double t) { return std::exp(-t); }});
    out.push_back({"exp(-sqrt(2s))",
                   {[](double s) { return std::exp(-std::sqrt(2.0 * s)); },
                    [](cdouble s) { return std::exp(-std::sqrt(2.0 * s)); },
                    [](const mpfr& s) { return mpfr(exp(-sqrt(2 * s))); }},
                   [](double t) { return std::exp(-0.5 / t) / std::sqrt(2.0 * std::numbers::pi * t * t * t); }});
    out.push_back({"1/s^2",
                   {[](double s) { return 1.0 / (s * s); }, [](cdouble s) { return 1.0 / (s * s); },
                    [](const mpfr& s) { return mpfr(1) / (s * s); }},
                   [](double t) { return t; }});
    out.push_back({"1/sqrt(s)",
                   {[](double s) { return 1.0 / std::sqrt(s); }, [](cdouble s) { return 1.0 / std::sqrt(s); },
                    [](const mpfr& s) { return mpfr(1 / sqrt(s)); }},
                   [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); }});
    out.push_back({"1/(s+1)^2",
                   {[](double s) { return 1.0 / ((s + 1.0) * (s + 1.0)); },
                    [](cdouble s) { return 1.0 / ((s + 1.0) * (s + 1.0)); },
                    [](const mpfr& s) { return mpfr(1) / ((s + 1) * (s + 1)); }},
                   [](double t) { return t * std::exp(-t); }});
    return out;
}

const std::vector<double> kAbscissae{0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0};

// forward jump density for nu = 1, p = 1, x = 1 as a theta series
double forward_jump_exact(double b) {
    double s = 0.0;
    for (int n = -40; n <= 40; ++n) s += std::exp(-double(n * n) / (2.0 * b));
    return s / std::sqrt(2.0 * std::numbers::pi * b) - 1.0;
}

} // namespace

TEST_CASE("elementary transform pairs") {
    Transform one{[](double s) { return 1.0 / s; }, [](cdouble s) { return 1.0 / s; }, {}};
    for (double t : {0.01, 1.0, 100.0}) CHECK(std::abs(invert(one, t) - 1.0) < 1e-8);
    const auto pairs = analytic_pairs();
    CHECK(std::abs(invert(pairs[1].f, 1.0) - std::exp(-1.0)) < 1e-8);
    CHECK(std::abs(invert(pairs[2].f, 1.0) - 0.24197072451914337) < 1e-8);
}

TEST_CASE("round trips on analytic pairs") {
    for (const auto& p : analytic_pairs()) {
        double worst_t = 0.0;
        double worst_cross = 0.0;
        for (double t : kAbscissae) {
            const auto r = invert_detailed(p.f, t, {Method::Talbot, 0, 0, 1e-6});
            worst_t = std::max(worst_t, std::abs(r.value - p.exact(t)));
            worst_cross = std::max(worst_cross, r.discrepancy);
        }
        INFO(p.name);
        CHECK(worst_t < 1e-8);
        CHECK(worst_cross < 1e-6);
    }
}

TEST_CASE("Gaver-Stehfest configuration") {
    const auto p = analytic_pairs()[1];
    CHECK(max_stehfest_order(40) == 36);
    CHECK_THROWS_AS((void)gaver_stehfest(p.f, 1.0, 38, 40), besq::DomainError);
    CHECK_THROWS_AS((void)gaver_stehfest(p.f, 1.0, 15, 40), besq::DomainError);
    CHECK_THROWS_AS((void)gaver_stehfest(p.f, -1.0, 16, 40), besq::DomainError);
    // double-valued input at order 16 is far from Talbot accuracy
    Transform coarse{p.f.real, p.f.complex, {}};
    CHECK(std::abs(gaver_stehfest(coarse, 1.0, 16, 40) - std::exp(-1.0)) < 1e-6);
    CHECK_THROWS_AS((void)invert(coarse, 5.0, {Method::Talbot, 0, 0, 1e-9}), besq::Unstable);
    // higher order with precise input converges
    CHECK(std::abs(gaver_stehfest(p.f, 1.0, 36, 40) - std::exp(-1.0)) < 1e-11);
    CHECK(default_precision_digits() >= 16);
    Transform only_real{p.f.real, {}, {}};
    CHECK_THROWS_AS((void)talbot(only_real, 1.0), besq::UsageError);
    CHECK_THROWS_AS((void)talbot(p.f, 1.0, 4), besq::DomainError);
}

TEST_CASE("distribution function of Sigma") {
    const laws::BesqParams pr{1.0, 1.0};
    CHECK(cdf_sigma(pr, 0.0, 1.0, 1e-3) <= 1e-4);
    CHECK(cdf_sigma(pr, 0.5, 0.5, 0.1) == 1.0);
    double prev = 0.0;
    for (double t = 0.01; t < 1.0; t += 0.03) {
        const double v = cdf_sigma(pr, 0.0, 1.0, t, {Method::Talbot, 0, 0, 1e-6});
        CHECK(v >= prev - 1e-12);
        CHECK(v <= 1.0);
        prev = v;
    }
    // defective law: mass (y/x)^nu is approached from below at rate t^-nu
    const double far = cdf_sigma({3.0, 0.0}, 2.0, 1.0, 1e4);
    CHECK(far < 0.125);
    CHECK(far == doctest::Approx(0.125).epsilon(1e-6));
}

TEST_CASE("Z^4 subordinator is a Brownian hitting time") {
    for (double x : {0.2, 0.5, 1.0})
        for (double lam : {0.01, 1.0, 30.0, 1e4})
            CHECK(std::abs(z4_transform(x, lam) - std::exp(-std::sqrt(lam / 2.0) * x)) < 1e-10);
    double worst = 0.0;
    for (double t : kAbscissae) {
        const double x = 1.0;
        const double a = x / 2.0;
        const double dens = a / std::sqrt(2.0 * std::numbers::pi * t * t * t) * std::exp(-a * a / (2.0 * t));
        const auto r = z4_density(x, t, {Method::Talbot, 0, 0, 1e-6});
        worst = std::max(worst, std::abs(r - dens));
        const double cdf = std::erfc(a / std::sqrt(2.0 * t));
        CHECK(std::abs(cdf_sigma({-1.0, 1.0}, 1.0, 0.0, t, {Method::Talbot, 0, 0, 1e-6}) - cdf) < 1e-6);
    }
    CHECK(worst < 1e-6);
    CHECK_THROWS_AS((void)z4_transform(1.5, 1.0), besq::DomainError);
}

TEST_CASE("jump densities") {
    // reversed, nu/(p+1) = 1/2
    for (double nu : {0.25, 0.5, 1.0}) {
        const laws::BesqParams pr{nu, 2.0 * nu - 1.0};
        for (double x : {0.0, 0.4})
            for (double b : {0.01, 0.3, 2.0}) {
                const double want = std::pow(1.0 - x, nu - 1.0) / std::sqrt(2.0 * std::numbers::pi * b);
                CHECK(std::abs(jump_density(pr, x, b, laws::Direction::Reversed, {Method::Talbot, 0, 0, 1e-6}) -
                               want) < 1e-6);
            }
    }
    // forward, nu = 1, p = 1, x = 1
    const laws::BesqParams pr{1.0, 1.0};
    double prev = 1e300;
    for (double b : {0.005, 0.01, 0.05, 0.1, 0.2, 0.4, 0.6}) {
        const double v = jump_density(pr, 1.0, b, laws::Direction::Forward, {Method::Talbot, 0, 0, 1e-6});
        CHECK(std::abs(v - forward_jump_exact(b)) < 1e-8);
        CHECK(v >= 0.0);
        CHECK(v < prev);
        prev = v;
    }
    CHECK(std::abs(jump_density(pr, 1.0, 50.0, laws::Direction::Forward)) < 1e-10);
}

TEST_CASE("jump density re-transform") {
    const laws::BesqParams pr{1.0, 1.0};
    boost::math::quadrature::exp_sinh<double> es;
    auto dens = [&](double b) { return jump_density(pr, 1.0, b, laws::Direction::Forward); };
    for (double lam : {1.0, 2.0, 8.0}) {
        auto g = [&](double b) { return b > 40.0 ? 0.0 : std::exp(-0.5 * lam * b) * dens(b); };
        const double v = es.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-10);
        CHECK(std::abs(v - laws::jump_measure_transform(pr, 1.0, lam, laws::Direction::Forward)) < 1e-6);
    }
}

TEST_CASE("truncated Stieltjes moment stabilizes") {
    // int_eps^1 b (-d pi) = eps pi(eps) - pi(1) + int_eps^1 pi db
    const laws::BesqParams pr{1.0, 1.0};
    auto dens = [&](double b) { return jump_density(pr, 1.0, b, laws::Direction::Forward); };
    boost::math::quadrature::tanh_sinh<double> ts;
    std::vector<double> m;
    for (double eps : {1e-2, 1e-3, 1e-4, 1e-5}) m.push_back(eps * dens(eps) - dens(1.0) + ts.integrate(dens, eps, 1.0));
    // the missing piece near 0 is O(sqrt(eps)), so increments shrink by about sqrt(10)
    for (std::size_t i = 2; i < m.size(); ++i) CHECK(std::abs(m[i] - m[i - 1]) < 0.5 * std::abs(m[i - 1] - m[i - 2]));
    CHECK(std::abs(m.back() - m[m.size() - 2]) < 0.4 * std::sqrt(1e-4));
}
