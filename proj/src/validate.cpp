#include "besq/validate.hpp"

#include "besq/bessel.hpp"
#include "besq/errors.hpp"
#include "besq/laws.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace besq::validate {

namespace {

using inversion::cdouble;
using inversion::mpfr;
using laws::BesqParams;

double rel(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

class Tally {
public:
    Tally(std::string name, double tol) {
        r_.name = std::move(name);
        r_.tolerance = tol;
    }
    void add(double residual) {
        ++r_.points;
        if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
        r_.max_residual = std::max(r_.max_residual, residual);
    }
    CheckResult done() {
        r_.pass = r_.points > 0 && r_.max_residual <= r_.tolerance;
        return r_;
    }
    std::size_t points() const { return r_.points; }

private:
    CheckResult r_;
};

bool in_regime(const BesqParams& pr, double x, double y) {
    try {
        laws::check_regime(pr, x, y);
        return true;
    } catch (const RegimeViolation&) {
        return false;
    }
}

// nu/(p+1) = -1/2
double half_minus(double nu, double x, double y, double lam) {
    if (y <= x) return std::exp(std::sqrt(lam) * (std::pow(x, -nu) - std::pow(y, -nu)) / (2.0 * nu));
    const double c = -std::sqrt(lam) / (2.0 * nu);
    return std::cosh(c * std::pow(x, -nu)) / std::cosh(c * std::pow(y, -nu));
}

// nu/(p+1) = 1/2
double half_plus(double nu, double x, double y, double lam) {
    const double c = std::sqrt(lam) / (2.0 * nu);
    if (y <= x) return std::pow(y / x, nu) * std::exp(-c * (std::pow(x, nu) - std::pow(y, nu)));
    auto f = [&](double t) { return t == 0.0 ? c : std::sinh(c * std::pow(t, nu)) / std::pow(t, nu); };
    return f(x) / f(y);
}

double brownian_density(double a, double t) {
    return a / std::sqrt(2.0 * std::numbers::pi * t * t * t) * std::exp(-a * a / (2.0 * t));
}

} // namespace

CheckResult check_half_order() {
    Tally t("half-order closed forms", 1e-10);
    const std::array<double, 5> ps{-0.5, 0.0, 0.5, 1.0, 3.0};
    const std::array<double, 4> lams{1e-3, 0.7, 4.0, 60.0};
    const std::array<double, 4> levels{0.0, 0.3, 1.0, 2.5};
    for (double lam : lams)
        for (double p : ps)
            for (double x : levels)
                for (double y : levels) {
                    if (x == y || t.points() >= 200) continue;
                    for (double sign : {-1.0, 1.0}) {
                        const BesqParams pr{0.5 * sign * (p + 1.0), p};
                        if (pr.nu < -1.0 || !in_regime(pr, x, y) || t.points() >= 200) continue;
                        const double want = sign < 0 ? half_minus(pr.nu, x, y, lam) : half_plus(pr.nu, x, y, lam);
                        t.add(rel(laws::laplace_sigma({pr, x, y, lam}), want));
                    }
                }
    return t.done();
}

CheckResult check_time_change() {
    Tally t("time-change identity", 1e-10);
    const std::array<std::pair<double, double>, 5> levels{{{0.5, 2.0}, {3.0, 1.0}, {0.0, 1.0}, {2.0, 0.7}, {0.1, 0.4}}};
    for (double lam : {0.3, 1.7, 20.0})
        for (double nu : {-0.75, 0.0, 1.0, 2.0})
            for (double p : {0.0, 0.5, 1.0, 2.0})
                for (auto [x, y] : levels) {
                    if (t.points() >= 100) continue;
                    const laws::SigmaQuery q{{nu, p}, x, y, lam};
                    const auto h = laws::equivalent_hitting_params(q);
                    t.add(rel(laws::laplace_sigma(q), laws::laplace_hitting_time(h.nu, h.x, h.y, lam)));
                }
    return t.done();
}

CheckResult check_z4_transform() {
    Tally t("Z4 transform", 1e-10);
    for (double x : {0.05, 0.2, 0.5, 0.8, 1.0})
        for (double lam : {1e-2, 1.0, 30.0, 1e3, 1e5})
            t.add(std::abs(inversion::z4_transform(x, lam) - std::exp(-std::sqrt(lam / 2.0) * x)));
    return t.done();
}

CheckResult check_z4_density() {
    Tally t("Z4 density", 1e-6);
    for (double s : inversion_abscissae()) t.add(std::abs(inversion::z4_density(1.0, s) - brownian_density(0.5, s)));
    return t.done();
}

CheckResult check_conditional() {
    Tally t("conditional laws", 1e-8);
    auto sq = [](double v) { return v * v; };
    const std::array<std::array<double, 3>, 2> triples{{{1.0, 0.5, 2.0}, {2.0, 0.2, 3.0}}};
    for (double lam : {0.2, 1.0, 5.0, 20.0})
        for (double p : {-0.5, 0.0, 0.5, 1.0})
            for (const auto& [x, y, a] : triples)
                for (double sign : {-1.0, 1.0}) {
                    if (t.points() >= 50) continue;
                    const double nu = 0.5 * sign * (p + 1.0);
                    const double g = laws::conditional_max_laplace({{{nu, p}, x, y, lam}, a});
                    const double m = std::abs(nu);
                    const double hx = sq(std::pow(a, m) - std::pow(x, m)) / (4.0 * m * m);
                    const double hy = sq(std::pow(a, m) - std::pow(y, m)) / (4.0 * m * m);
                    t.add(rel(g, laws::laplace_hitting_time(0.5, hx, hy, lam)));
                }
    return t.done();
}

CheckResult check_scaling() {
    Tally t("scaling identity", 1e-10);
    for (double nu : {-0.5, 0.0, 1.0})
        for (double p : {0.0, 1.0, 2.0})
            for (double y : {0.3, 3.0})
                for (double lam : {0.5, 5.0}) t.add(laws::scaling_identity_check({nu, p}, y, lam));
    return t.done();
}

std::vector<AnalyticPair> analytic_pairs() {
    std::vector<AnalyticPair> out;
    out.push_back({"1/s",
                   {[](double s) { return 1.0 / s; }, [](cdouble s) { return 1.0 / s; },
                    [](const mpfr& s) { return mpfr(1 / s); }},
                   [](double) { return 1.0; }});
    out.push_back({"1/(s+1)",
                   {[](double s) { return 1.0 / (s + 1.0); }, [](cdouble s) { return 1.0 / (s + 1.0); },
                    [](const mpfr& s) { return mpfr(1 / (s + 1)); }},
                   [](double t) { return std::exp(-t); }});
    out.push_back({"exp(-sqrt(2s))",
                   {[](double s) { return std::exp(-std::sqrt(2.0 * s)); },
                    [](cdouble s) { return std::exp(-std::sqrt(2.0 * s)); },
                    [](const mpfr& s) { return mpfr(exp(-sqrt(2 * s))); }},
                   [](double t) { return brownian_density(1.0, t); }});
    out.push_back({"1/s^2",
                   {[](double s) { return 1.0 / (s * s); }, [](cdouble s) { return 1.0 / (s * s); },
                    [](const mpfr& s) { return mpfr(1 / (s * s)); }},
                   [](double t) { return t; }});
    out.push_back({"1/sqrt(s)",
                   {[](double s) { return 1.0 / std::sqrt(s); }, [](cdouble s) { return 1.0 / std::sqrt(s); },
                    [](const mpfr& s) { return mpfr(1 / sqrt(s)); }},
                   [](double t) { return 1.0 / std::sqrt(std::numbers::pi * t); }});
    out.push_back({"1/(s+1)^2",
                   {[](double s) { return 1.0 / ((s + 1.0) * (s + 1.0)); },
                    [](cdouble s) { return 1.0 / ((s + 1.0) * (s + 1.0)); },
                    [](const mpfr& s) { return mpfr(1 / ((s + 1) * (s + 1))); }},
                   [](double t) { return t * std::exp(-t); }});
    return out;
}

std::vector<double> inversion_abscissae() { return {0.05, 0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 5.0, 8.0}; }

CheckResult check_round_trip() {
    Tally t("inversion round trips", 1e-8);
    for (const auto& p : analytic_pairs())
        for (double s : inversion_abscissae()) t.add(std::abs(inversion::talbot(p.transform, s) - p.exact(s)));
    return t.done();
}

CheckResult check_cross_agreement() {
    Tally t("Talbot vs Gaver-Stehfest", 1e-6);
    auto both = [&](const inversion::Transform& f, double s) {
        t.add(std::abs(inversion::talbot(f, s) - inversion::gaver_stehfest(f, s)));
    };
    for (const auto& p : analytic_pairs())
        for (double s : inversion_abscissae()) both(p.transform, s);
    // the library's own inverted laws
    const BesqParams pr{1.0, 1.0};
    const auto sig = inversion::sigma_transform(pr, 0.0, 1.0);
    const inversion::Transform cdf{[sig](double s) { return sig.real(s) / s; },
                                   [sig](cdouble s) { return sig.complex(s) / s; },
                                   [sig](const mpfr& s) { return mpfr(sig.precise(s) / s); }};
    for (double s : {0.02, 0.05, 0.1, 0.2, 0.5, 1.0}) {
        both(sig, s);
        both(cdf, s);
    }
    const inversion::InversionConfig gs{inversion::Method::GaverStehfest, 0, 0, {}};
    for (double s : inversion_abscissae())
        t.add(std::abs(inversion::z4_density(1.0, s) - inversion::z4_density(1.0, s, gs)));
    for (double b : {0.01, 0.1, 0.5}) {
        const double f = inversion::jump_density(pr, 1.0, b, laws::Direction::Forward);
        t.add(std::abs(f - inversion::jump_density(pr, 1.0, b, laws::Direction::Forward, gs)));
        const BesqParams half{0.5, 0.0};
        const double r = inversion::jump_density(half, 0.4, b, laws::Direction::Reversed);
        t.add(std::abs(r - inversion::jump_density(half, 0.4, b, laws::Direction::Reversed, gs)));
    }
    return t.done();
}

CheckResult check_jump_shape() {
    Tally t("jump density shape", 0.0);
    const BesqParams pr{1.0, 1.0};
    double prev = std::numeric_limits<double>::infinity();
    for (double b : {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4, 0.6, 1.0, 2.0}) {
        const double v = inversion::jump_density(pr, 1.0, b, laws::Direction::Forward);
        // tolerate inversion noise far in the tail
        t.add((v < -1e-10 ? 1.0 : 0.0) + (v > prev + 1e-10 ? 1.0 : 0.0));
        prev = v;
    }
    return t.done();
}

CheckResult check_jump_retransform() {
    Tally t("jump density re-transform", 1e-6);
    const BesqParams pr{1.0, 1.0};
    boost::math::quadrature::exp_sinh<double> es;
    auto dens = [&](double b) { return inversion::jump_density(pr, 1.0, b, laws::Direction::Forward); };
    for (double lam : {1.0, 2.0, 8.0}) {
        auto g = [&](double b) { return b > 40.0 ? 0.0 : std::exp(-0.5 * lam * b) * dens(b); };
        const double v = es.integrate(g, 0.0, std::numeric_limits<double>::infinity(), 1e-10);
        t.add(std::abs(v - laws::jump_measure_transform(pr, 1.0, lam, laws::Direction::Forward)));
    }
    return t.done();
}

CheckResult check_jump_reversed() {
    Tally t("reversed half-order jump density", 1e-6);
    for (double nu : {0.25, 0.5, 1.0}) {
        const BesqParams pr{nu, 2.0 * nu - 1.0};
        for (double x : {0.0, 0.4})
            for (double b : {0.01, 0.3, 2.0}) {
                const double want = std::pow(1.0 - x, nu - 1.0) / std::sqrt(2.0 * std::numbers::pi * b);
                t.add(std::abs(inversion::jump_density(pr, x, b, laws::Direction::Reversed) - want));
            }
    }
    return t.done();
}

std::vector<CheckResult> run_suite(const SuiteOptions& opts) {
    const bessel::ScopedArgumentPerturbation guard(opts.bessel_perturbation);
    using Named = std::pair<const char*, std::function<CheckResult()>>;
    std::vector<Named> checks{{"half-order closed forms", check_half_order},
                              {"time-change identity", check_time_change},
                              {"scaling identity", check_scaling},
                              {"conditional laws", check_conditional},
                              {"Z4 transform", check_z4_transform},
                              {"Z4 density", check_z4_density},
                              {"inversion round trips", check_round_trip},
                              {"Talbot vs Gaver-Stehfest", check_cross_agreement}};
    if (opts.include_jumps) {
        checks.emplace_back("jump density shape", check_jump_shape);
        checks.emplace_back("jump density re-transform", check_jump_retransform);
        checks.emplace_back("reversed half-order jump density", check_jump_reversed);
    }
    std::vector<CheckResult> out;
    for (const auto& [name, run] : checks) {
        try {
            out.push_back(run());
        } catch (const Error&) {
            CheckResult r;
            r.name = name;
            r.max_residual = std::numeric_limits<double>::infinity();
            out.push_back(r);
        }
    }
    return out;
}

} // namespace besq::validate
