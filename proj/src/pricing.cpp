#include "besq/pricing.hpp"

#include "besq/asymptotics.hpp"
#include "besq/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace besq::pricing {

namespace {

using inversion::cdouble;
using inversion::mpfr;

void check_spec(const OptionSpec& s) {
    laws::validate(s.params);
    if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.strike) || !std::isfinite(s.rate))
        throw NonFinite("option inputs must be finite");
    if (!(s.rate > 0.0)) throw DomainError("discount rate must be positive");
    laws::check_regime(s.params, s.x, s.y);
}

// E[exp(-s rate Sigma)] on each axis
inversion::Transform discounted(const OptionSpec& s) {
    const auto base = inversion::sigma_transform(s.params, s.x, s.y);
    const double r = s.rate;
    return {[base, r](double v) { return base.real(r * v); }, [base, r](cdouble v) { return base.complex(r * v); },
            [base, r](const mpfr& v) { return base.precise(r * v); }};
}

double quad(const std::function<double(double)>& f, double lo, double hi, double* err) {
    double l1 = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 10, 1e-9, err, &l1);
    if (!std::isfinite(v)) throw QuadratureFailure("price quadrature produced a non-finite value");
    return v;
}

double digital_at(const OptionSpec& spec, double k, const inversion::InversionConfig& cfg, double* disc) {
    if (k <= 0.0 || spec.x == spec.y) return spec.x == spec.y ? 1.0 : 0.0;
    const auto L = discounted(spec);
    inversion::Transform f{[L](double m) { return L.real(m + 1.0) / m; },
                           [L](cdouble m) { return L.complex(m + 1.0) / m; },
                           [L](const mpfr& m) { return mpfr(L.precise(m + 1) / m); }};
    const auto r = inversion::invert_detailed(f, k, cfg);
    if (disc) *disc = r.discrepancy;
    const double hi = L.real(1.0);
    if (r.value < -1e-8 || r.value > hi + 1e-8) {
        std::ostringstream msg;
        msg << "inverted digital price " << r.value << " left [0, " << hi << "]";
        throw Unstable(msg.str());
    }
    return std::clamp(r.value, 0.0, hi);
}

} // namespace

PriceResult price_digital(const OptionSpec& spec, const inversion::InversionConfig& cfg) {
    check_spec(spec);
    if (!(spec.strike >= 0.0)) throw DomainError("digital log-threshold must be nonnegative");
    PriceResult out;
    double disc = 0.0;
    out.value = digital_at(spec, spec.strike, cfg, &disc);
    out.error = std::isnan(disc) ? 0.0 : disc;
    out.method = cfg.method == inversion::Method::Talbot ? "talbot" : "gaver-stehfest";
    return out;
}

double digital_limit(const OptionSpec& spec) {
    check_spec(spec);
    return laws::laplace_sigma({spec.params, spec.x, spec.y, 2.0 * spec.rate});
}

PriceResult price_put_accumulated(const OptionSpec& spec, const inversion::InversionConfig& cfg) {
    check_spec(spec);
    if (!(spec.strike >= 1.0)) throw DomainError("put strike on accumulated interest must be at least 1");
    PriceResult out;
    out.method = "quadrature of inverted digitals";
    if (spec.strike == 1.0) return out;
    const double top = std::log(spec.strike);
    if (spec.x == spec.y) {
        out.value = spec.strike - 1.0;
        return out;
    }
    auto f = [&](double u) { return std::exp(u) * digital_at(spec, u, cfg, nullptr); };
    out.value = quad(f, 0.0, top, &out.error);
    out.error *= std::max(1.0, std::abs(out.value));
    return out;
}

inversion::LogInversion log_put_accumulated(const OptionSpec& spec) {
    check_spec(spec);
    if (!(spec.strike > 1.0)) throw DomainError("log price needs K > 1");
    if (spec.x == spec.y) return {std::log(spec.strike - 1.0), 0.0, 0.0};
    const auto br = laws::branch_for(spec.x, spec.y);
    auto log_f = [&](cdouble m) {
        const cdouble lam = 2.0 * spec.rate * m;
        return laws::kernel_w(spec.params, spec.x, lam, br) - laws::kernel_w(spec.params, spec.y, lam, br) -
               std::log(m) - std::log(m - 1.0);
    };
    return inversion::saddle_log_invert(log_f, std::log(spec.strike), 1.0);
}

double small_strike_asymptote(const OptionSpec& spec) {
    check_spec(spec);
    return -spec.rate * asymptotics::small_ball_targets(spec.params, spec.x, spec.y).sb_constant;
}

std::vector<StrikePoint> small_strike_series(const OptionSpec& spec, const std::vector<double>& log_strikes,
                                             const inversion::InversionConfig& cfg) {
    std::vector<StrikePoint> out;
    for (double lk : log_strikes) {
        if (!(lk > 0.0)) throw DomainError("log strikes must be positive");
        OptionSpec s = spec;
        s.strike = std::exp(lk);
        const double log_p = log_put_accumulated(s).log_value;
        double quad_p = 0.0;
        try {
            quad_p = price_put_accumulated(s, cfg).value;
        } catch (const Unstable&) {
        }
        // the digitals lose relative accuracy once they underflow Talbot's range
        const bool agree = quad_p > 0.0 && std::abs(std::log(quad_p) - log_p) < 1e-6 * std::max(1.0, std::abs(log_p));
        out.push_back({lk, lk * (agree ? std::log(quad_p) : log_p), agree});
    }
    return out;
}

double max_rate_integrand(const OptionSpec& spec, double a) {
    return laws::joint_max_laplace({{spec.params, spec.x, spec.y, 2.0 * spec.rate}, a});
}

PriceResult price_put_max_rate(const OptionSpec& spec) {
    check_spec(spec);
    if (!(spec.y < spec.x && spec.x <= spec.strike)) throw OrientationError("max-rate put needs y < x <= K");
    PriceResult out;
    out.method = "quadrature of joint max transforms";
    if (spec.strike == spec.x) return out;
    auto f = [&](double a) { return a == spec.x ? 0.0 : max_rate_integrand(spec, a); };
    out.value = quad(f, spec.x, spec.strike, &out.error);
    out.error *= std::max(1.0, std::abs(out.value));
    return out;
}

DigitalIdentity digital_identity(const OptionSpec& spec, double z, const inversion::InversionConfig& cfg) {
    if (!(z > 0.0)) throw DomainError("identity check needs z > 0");
    OptionSpec s = spec;
    s.strike = std::exp(z);
    DigitalIdentity d;
    d.lhs = price_put_accumulated(s, cfg).value;
    d.rhs = inversion::cdf_sigma(spec.params, spec.x, spec.y, z / spec.rate, cfg);
    return d;
}

simulate::Estimate price_mc(const OptionSpec& spec, const simulate::PathConfig& cfg) {
    check_spec(spec);
    const double r = spec.rate;
    const double K = spec.strike;
    simulate::PathConfig c = cfg;
    std::function<double(const simulate::PathResult&)> f;
    std::function<double(const simulate::PathResult&)> bound;
    switch (spec.kind) {
    case OptionKind::Digital:
        if (!(K >= 0.0)) throw DomainError("digital log-threshold must be nonnegative");
        // the payoff is 0 once r Sigma > k
        c.max_sigma = std::min(c.max_sigma, K / r);
        f = [=](const simulate::PathResult& p) { return r * p.sigma <= K ? std::exp(-r * p.sigma) : 0.0; };
        bound = f;
        break;
    case OptionKind::PutAccumulated:
        if (!(K >= 1.0)) throw DomainError("put strike on accumulated interest must be at least 1");
        c.max_sigma = std::min(c.max_sigma, std::log(K) / r);
        f = [=](const simulate::PathResult& p) { return std::max(K * std::exp(-r * p.sigma) - 1.0, 0.0); };
        bound = f;
        break;
    case OptionKind::PutMaxRate:
        if (!(spec.y < spec.x && spec.x <= K)) throw OrientationError("max-rate put needs y < x <= K");
        c.track_extremes = true;
        c.max_sigma = std::min(c.max_sigma, 40.0 / r);
        f = [=](const simulate::PathResult& p) { return std::exp(-r * p.sigma) * std::max(K - p.max_level, 0.0); };
        bound = f;
        break;
    }
    return simulate::estimate(simulate::run_paths(spec.params, spec.x, spec.y, c), f, bound);
}

PriceResult price(const OptionSpec& spec, const inversion::InversionConfig& cfg) {
    switch (spec.kind) {
    case OptionKind::Digital:
        return price_digital(spec, cfg);
    case OptionKind::PutAccumulated:
        return price_put_accumulated(spec, cfg);
    case OptionKind::PutMaxRate:
        return price_put_max_rate(spec);
    }
    throw UsageError("unknown option kind");
}

} // namespace besq::pricing
