#include "doctest.h"

#include "besq/errors.hpp"
#include "besq/laws.hpp"
#include "besq/simulate.hpp"

#include <cmath>
#include <sstream>

using namespace besq::simulate;
namespace laws = besq::laws;

namespace {

void check_moments(double x, double delta, double h, int n) {
    Rng rng = path_rng(7, 0);
    double s = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = besq_step(x, h, delta, rng);
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    const double var = s2 / n - mean * mean;
    const double want_mean = x + delta * h;
    const double want_var = 4.0 * x * h + 2.0 * delta * h * h;
    // SE of the sample variance from the fourth central moment of a noncentral chi-squared
    const double k = delta;
    const double lam = x / h;
    const double mu4 = h * h * h * h * (12.0 * (k + 4.0 * lam) * (k + 4.0 * lam) / 4.0 + 48.0 * (k + 4.0 * lam) + 0.0);
    const double se_var = std::sqrt(std::max(mu4, 3.0 * want_var * want_var) / n) * 2.0;
    CHECK(std::abs(mean - want_mean) < 3.0 * std::sqrt(want_var / n));
    CHECK(std::abs(var - want_var) < 3.0 * se_var);
}

PathConfig cfg(double h, std::int64_t n, std::uint64_t seed) {
    PathConfig c;
    c.h = h;
    c.n_paths = n;
    c.seed = seed;
    return c;
}

bool within(const Estimate& e, double want, double k = 3.0) { return std::abs(e.value - want) <= k * e.std_error; }

} // namespace

TEST_CASE("exact transition moments") {
    check_moments(1.0, 4.0, 0.01, 1000000);
    check_moments(0.3, 0.5, 0.02, 400000);
    check_moments(0.0, 3.0, 0.1, 400000);
    Rng rng = path_rng(1, 2);
    for (int i = 0; i < 100; ++i) CHECK(besq_step(0.0, 0.1, 0.0, rng) == 0.0);
    CHECK_THROWS_AS((void)besq_step(-1.0, 0.1, 2.0, rng), besq::DomainError);
    CHECK_THROWS_AS((void)besq_step(1.0, 0.0, 2.0, rng), besq::DomainError);
}

TEST_CASE("determinism across worker counts") {
    auto c = cfg(1e-3, 64, 99);
    c.workers = 1;
    const auto a = run_paths({0.5, 1.0}, 0.2, 1.0, c);
    c.workers = 3;
    const auto b = run_paths({0.5, 1.0}, 0.2, 1.0, c);
    REQUIRE(a.paths.size() == b.paths.size());
    for (std::size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(a.paths[i].sigma == b.paths[i].sigma);
        CHECK(a.paths[i].hit_time == b.paths[i].hit_time);
    }
    // a path can be replayed alone
    auto one = cfg(1e-3, 1, 99);
    const auto first = run_paths({0.5, 1.0}, 0.2, 1.0, one);
    CHECK(first.paths[0].sigma == a.paths[0].sigma);
}

TEST_CASE("trivial passage") {
    const auto b = run_paths({1.0, 1.0}, 0.7, 0.7, cfg(1e-3, 10, 1));
    for (const auto& p : b.paths) {
        CHECK(p.hit_time == 0.0);
        CHECK(p.sigma == 0.0);
    }
    const auto e = estimate_laplace({1.0, 1.0}, 0.7, 0.7, 3.0, cfg(1e-3, 10, 1));
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("path summaries are consistent") {
    auto c = cfg(1e-3, 500, 3);
    c.max_time = 20.0;
    const auto b = run_paths({1.0, 1.0}, 1.0, 0.5, c);
    for (const auto& p : b.paths) {
        CHECK(p.sigma >= 0.0);
        CHECK(p.max_level >= 1.0);
        CHECK(p.min_level <= 1.0);
        if (!p.censored) CHECK(p.min_level <= 0.5 + 1e-12);
    }
}

TEST_CASE("Laplace transform estimates") {
    // half-order downward passage, defective
    const auto e = estimate_laplace({1.0, 1.0}, 1.0, 0.5, 4.0, cfg(1e-3, 20000, 11));
    CHECK(within(e, 0.5 * std::exp(-0.5)));
    CHECK(e.censored_fraction > 0.3);
    CHECK(e.censor_bound < 1e-15);
    // lambda = 0 is the hitting probability up to censoring
    const auto up = estimate_laplace({0.3, 0.5}, 0.5, 2.0, 0.0, cfg(1e-3, 2000, 5));
    CHECK(up.value == doctest::Approx(1.0));
    const auto f = estimate_laplace({1.0, 1.0}, 0.0, 1.0, 2.0, cfg(1e-3, 20000, 12));
    CHECK(within(f, laws::laplace_sigma({{1.0, 1.0}, 0.0, 1.0, 2.0})));
}

TEST_CASE("barrier and hitting-time joint estimates") {
    const auto m = estimate_joint_max({-0.5, 0.0}, 1.0, 0.0, 1.0, 4.0, cfg(1e-3, 20000, 21));
    CHECK(within(m, std::sinh(1.0) / std::sinh(2.0)));
    const laws::SigmaQuery q{{1.0, 1.0}, 1.0, 0.5, 2.0};
    auto c = cfg(1e-3, 20000, 23);
    c.max_time = 50.0;
    c.track_extremes = false;
    const auto r = estimate_joint_r(q.params, q.x, q.y, q.lambda, 1.0, c);
    CHECK(within(r, laws::joint_r_sigma_laplace(q, 1.0)));
    CHECK_THROWS_AS((void)estimate_joint_max({-0.5, 0.0}, 1.0, 0.0, 1.0, 0.5, cfg(1e-3, 10, 1)), besq::OrientationError);
}

TEST_CASE("mean of Sigma") {
    auto c = cfg(1e-3, 20000, 31);
    c.track_extremes = false;
    const auto e = estimate_mean_sigma({1.0, 1.0}, 0.0, 1.0, c);
    CHECK(within(e, 1.0 / 12.0));
    auto tiny = cfg(1e-3, 50, 31);
    tiny.max_time = 0.01;
    CHECK_THROWS_AS((void)estimate_mean_sigma({1.0, 1.0}, 0.0, 1.0, tiny), besq::CensoredMajority);
}

TEST_CASE("bias study") {
    auto c = cfg(0, 4000, 41);
    c.track_extremes = false;
    const auto s = bias_study({1.0, 0.0}, 0.0, 1.0, 2.0, {4e-2, 2e-2, 1e-2}, c);
    REQUIRE(s.rows.size() == 3);
    const double exact = laws::laplace_hitting_time(1.0, 0.0, 1.0, 2.0);
    for (const auto& row : s.rows) CHECK(std::abs(row.estimate - exact) < 3.0 * row.std_error + 0.05);
    CHECK(std::isfinite(s.intercept));
    const auto flat = bias_study({1.0, 0.0}, 0.5, 0.5, 2.0, {4e-2, 2e-2, 1e-2}, c);
    for (const auto& row : flat.rows) CHECK(row.estimate == 1.0);
}

TEST_CASE("scaling law in distribution") {
    const laws::BesqParams pr{1.0, 1.0};
    const double y = 2.0;
    auto c = cfg(1e-3, 10000, 51);
    c.track_extremes = false;
    const auto one = run_paths(pr, 0.0, 1.0, c);
    c.seed = 52;
    c.h = 4e-3;
    const auto big = run_paths(pr, 0.0, y, c);
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& p : one.paths) a.push_back(std::pow(y, 2.0) * p.sigma);
    for (const auto& p : big.paths) b.push_back(p.sigma);
    CHECK(ks_distance(a, b) < 0.02);
}

TEST_CASE("increments over disjoint level intervals are uncorrelated") {
    auto c = cfg(1e-3, 4000, 61);
    const auto rows = run_passages({1.0, 1.0}, 0.0, {0.5, 1.0, 1.5}, c);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double u = r[0].sigma;
        const double v = r[2].sigma - r[1].sigma;
        sx += u;
        sy += v;
        sxx += u * u;
        syy += v * v;
        sxy += u * v;
    }
    const double corr = (sxy / n - sx / n * sy / n) /
                        std::sqrt((sxx / n - sx * sx / (n * n)) * (syy / n - sy * sy / (n * n)));
    CHECK(std::abs(corr) < 3.0 / std::sqrt(n));
    for (const auto& r : rows) {
        CHECK(r[0].sigma <= r[1].sigma);
        CHECK(r[1].sigma <= r[2].sigma);
    }
}

TEST_CASE("Kolmogorov distance and CSV") {
    CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_distance({1, 2}, {3, 4}) == 1.0);
    const auto b = run_paths({1.0, 1.0}, 0.0, 0.1, cfg(1e-3, 3, 1));
    std::ostringstream out;
    write_csv(out, b);
    const auto s = out.str();
    CHECK(s.rfind("# schema besq-paths 1\npath_id,hit_time,sigma,max,min,censored\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
