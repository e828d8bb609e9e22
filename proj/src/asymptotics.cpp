#include "besq/asymptotics.hpp"

#include "besq/errors.hpp"
#include "besq/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace besq::asymptotics {

namespace {

void check_levels(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw NonFinite("levels must be finite");
    if (x < 0.0 || y < 0.0) throw DomainError("levels must be nonnegative");
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

} // namespace

SmallBallTarget small_ball_targets(const BesqParams& params, double x, double y) {
    laws::validate(params);
    check_levels(x, y);
    const double q = params.p + 1.0;
    const double gap = std::pow(x, q / 2.0) - std::pow(y, q / 2.0);
    SmallBallTarget t;
    t.lt_rate = -std::numbers::sqrt2 / q * std::abs(gap);
    t.sb_constant = gap * gap / (2.0 * q * q);
    t.lil_constant = 1.0 / (2.0 * q * q);
    return t;
}

std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int k = 2; k <= 8; ++k) g.push_back(std::pow(10.0, k));
    return g;
}

std::vector<RatePoint> lt_rate_empirical(const BesqParams& params, double x, double y,
                                         const std::vector<double>& lambda_grid) {
    laws::check_regime(params, x, y);
    std::vector<RatePoint> out;
    out.reserve(lambda_grid.size());
    const auto br = laws::branch_for(x, y);
    for (double lam : lambda_grid) {
        if (!(lam > 0.0)) throw DomainError("lambda grid must be positive");
        const double logl =
            x == y ? 0.0 : laws::kernel_w(params, x, 2.0 * lam, br) - laws::kernel_w(params, y, 2.0 * lam, br);
        out.push_back({lam, logl / std::sqrt(lam)});
    }
    return out;
}

std::vector<double> default_eps_grid() {
    std::vector<double> g;
    for (int k = 2; k <= 12; ++k) g.push_back(std::pow(10.0, -0.5 * k));
    return g;
}

std::vector<TauberianPoint> tauberian_series(const BesqParams& params, double x, double y,
                                             const std::vector<double>& eps_grid, double tol) {
    laws::check_regime(params, x, y);
    if (!(params.p > 0.0)) throw DomainError("the small-ball limit needs p > 0");
    std::vector<TauberianPoint> out;
    for (double eps : eps_grid) {
        TauberianPoint pt{eps, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity(),
                          false};
        try {
            const auto r = inversion::log_cdf_sigma(params, x, y, eps);
            pt.value = eps * r.log_value;
            pt.error = r.error;
            pt.stable = std::isfinite(pt.value) && r.error <= tol;
        } catch (const Unstable&) {
        } catch (const QuadratureFailure&) {
        }
        out.push_back(pt);
    }
    return out;
}

TauberianPoint smallest_stable(const std::vector<TauberianPoint>& series) {
    const TauberianPoint* best = nullptr;
    for (const auto& p : series)
        if (p.stable && (!best || p.eps < best->eps)) best = &p;
    if (!best) throw Unstable("no stable point in the small-ball series");
    return *best;
}

double lil_phi(double p, double y) {
    if (!(y > std::numbers::e)) throw DomainError("phi(y) needs y > e");
    return std::pow(y, p + 1.0) / std::log(std::log(y));
}

std::vector<double> lil_grid(double y_max) {
    if (!(y_max > 4.0) || !std::isfinite(y_max)) throw DomainError("LIL grid needs y_max > 4");
    std::vector<double> g;
    for (int n = 2;; ++n) {
        const double v = std::pow(double(n), double(n));
        if (v >= y_max) break;
        g.push_back(v);
    }
    g.push_back(y_max);
    return g;
}

std::vector<double> geometric_grid(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("geometric grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, double(i) / (n - 1));
    return g;
}

LilResult lil_experiment(const BesqParams& params, const simulate::PathConfig& cfg, const std::vector<double>& y_grid) {
    laws::validate(params);
    if (!(params.p > 0.0)) throw DomainError("the LIL experiment needs p > 0");
    if (y_grid.size() < 2) throw DomainError("LIL grid needs at least two levels");
    for (double y : y_grid) (void)lil_phi(params.p, y);
    LilResult res;
    res.y_grid = y_grid;
    res.target = 1.0 / (2.0 * (params.p + 1.0) * (params.p + 1.0));
    res.qualitative = params.nu < 0.0;
    const auto rows = simulate::run_passages(params, 0.0, y_grid, cfg);
    const std::size_t tail = y_grid.size() / 2;
    std::size_t censored = 0;
    for (const auto& row : rows) {
        std::vector<double> r(y_grid.size(), std::numeric_limits<double>::quiet_NaN());
        bool done = true;
        for (std::size_t k = 0; k < y_grid.size(); ++k) {
            if (std::isnan(row[k].time)) {
                done = false;
                break;
            }
            r[k] = row[k].sigma / lil_phi(params.p, y_grid[k]);
        }
        if (done) {
            res.proxy.push_back(*std::min_element(r.begin() + static_cast<std::ptrdiff_t>(tail), r.end()));
        } else {
            ++censored;
        }
        res.ratio.push_back(std::move(r));
    }
    res.censored_fraction = rows.empty() ? 0.0 : double(censored) / double(rows.size());
    if (res.censored_fraction > 0.5) throw CensoredMajority("most LIL paths were censored before the last level");
    if (res.proxy.empty()) throw DomainError("LIL experiment needs at least one path");
    res.median = quantile(res.proxy, 0.5);
    res.q10 = quantile(res.proxy, 0.1);
    res.q90 = quantile(res.proxy, 0.9);
    return res;
}

} // namespace besq::asymptotics
