#include "besq/inversion.hpp"

#include "besq/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace besq::inversion {

namespace mp = boost::multiprecision;
namespace bm = boost::math;

namespace {

constexpr int kDefaultDigits = 60;
constexpr int kDefaultStehfest = 16;
constexpr int kDefaultTalbot = 24;

void check_t(double t) {
    if (!std::isfinite(t)) throw NonFinite("inversion abscissa is not finite");
    if (!(t > 0.0)) throw DomainError("inversion abscissa must be positive");
}

// Stehfest weights V_1..V_N at the given precision.
const std::vector<mpfr>& stehfest_weights(int n, int digits) {
    static thread_local std::map<std::pair<int, int>, std::vector<mpfr>> cache;
    const auto key = std::make_pair(n, digits);
    if (auto it = cache.find(key); it != cache.end()) return it->second;

    mpfr::default_precision(digits);
    auto fact = [&](int k) {
        mpfr f = 1;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    const int h = n / 2;
    std::vector<mpfr> v(n + 1, mpfr(0));
    for (int k = 1; k <= n; ++k) {
        mpfr s = 0;
        for (int j = (k + 1) / 2; j <= std::min(k, h); ++j) {
            mpfr num = mp::pow(mpfr(j), h) * fact(2 * j);
            mpfr den = fact(h - j) * fact(j) * fact(j - 1) * fact(k - j) * fact(2 * j - k);
            s += num / den;
        }
        v[k] = ((h + k) % 2 == 0 ? 1 : -1) * s;
    }
    return cache.emplace(key, std::move(v)).first->second;
}

// Extended-precision kernel ratios for Gaver-Stehfest, mirroring laws::laplace_sigma
// and laws::jump_measure_transform with Boost's arbitrary-precision Bessel functions.

mpfr bessel_z(const laws::BesqParams& params, double x, const mpfr& lambda) {
    const double q = params.p + 1.0;
    return mp::sqrt(lambda) * mp::pow(mpfr(x), mpfr(0.5 * q)) / q;
}

mpfr kernel_precise(const laws::BesqParams& params, double x, const mpfr& lambda, laws::Branch br) {
    const double q = params.p + 1.0;
    const double nu = params.nu;
    const mpfr z = bessel_z(params, x, lambda);
    if (br == laws::Branch::I) {
        const mpfr alpha = nu / q;
        if (x == 0.0) return 1 / bm::tgamma(alpha + 1);
        return bm::cyl_bessel_i(alpha, z) * mp::pow(z / 2, -alpha);
    }
    const mpfr beta = std::abs(nu) / q;
    if (beta == 0) return bm::cyl_bessel_k(beta, z);
    const mpfr power = 0.5 * (std::abs(nu) + nu);
    if (x == 0.0) return mp::pow(mpfr(2), beta - 1) * bm::tgamma(beta);
    return bm::cyl_bessel_k(beta, z) * mp::pow(z, beta) * mp::pow(mpfr(x), -power);
}

mpfr sigma_precise(const laws::BesqParams& params, double x, double y, const mpfr& lambda) {
    if (x == y) return mpfr(1);
    const auto br = laws::branch_for(x, y);
    return kernel_precise(params, x, lambda, br) / kernel_precise(params, y, lambda, br);
}

mpfr jump_precise(const laws::BesqParams& params, double x, const mpfr& lambda, laws::Direction dir) {
    const double q = params.p + 1.0;
    const double nu = params.nu;
    if (dir == laws::Direction::Forward) {
        if (x == 0.0) {
            if (params.p > 0.0) return mpfr(0);
            return mpfr(1) / (2 * (mpfr(nu) + 1));
        }
        const mpfr z = bessel_z(params, x, lambda);
        const mpfr alpha = nu / q;
        return q * z * bm::cyl_bessel_i(alpha + 1, z) / bm::cyl_bessel_i(alpha, z) / (lambda * x);
    }
    const double xi = 1.0 - x;
    const mpfr z = bessel_z(params, xi, lambda);
    const mpfr beta = nu / q;
    return q * z * bm::cyl_bessel_k(beta - 1, z) / bm::cyl_bessel_k(beta, z) / (lambda * xi);
}

} // namespace

int default_precision_digits() {
    if (const char* env = std::getenv("BESQ_PRECISION_DIGITS")) {
        char* end = nullptr;
        const long d = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && d >= 16 && d <= 1000) return static_cast<int>(d);
    }
    return kDefaultDigits;
}

int max_stehfest_order(int digits) { return 2 * static_cast<int>(std::floor(digits / 2.2)); }

double talbot(const Transform& f, double t, int nodes) {
    check_t(t);
    if (!f.complex) throw UsageError("Talbot inversion needs the transform off the real axis");
    if (nodes < 8) throw DomainError("Talbot needs at least 8 nodes");
    const double m = nodes;
    const double r = 2.0 * m / (5.0 * t);
    double acc = 0.5 * std::exp(r * t) * f.complex(cdouble(r, 0.0)).real();
    for (int k = 1; k < nodes; ++k) {
        const double theta = k * std::numbers::pi / m;
        const double cot = 1.0 / std::tan(theta);
        const cdouble s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        acc += (std::exp(t * s) * f.complex(s) * cdouble(1.0, sigma)).real();
    }
    const double v = r / m * acc;
    if (!std::isfinite(v)) throw Overflow("Talbot inversion produced a non-finite value");
    return v;
}

double gaver_stehfest(const Transform& f, double t, int order, int digits) {
    check_t(t);
    if (!f.real) throw UsageError("Gaver-Stehfest inversion needs the transform on the real axis");
    if (digits <= 0) digits = default_precision_digits();
    if (order == 0) order = f.precise ? max_stehfest_order(digits) : kDefaultStehfest;
    if (order < 0 || order % 2 != 0) throw DomainError("Gaver-Stehfest order must be positive and even");
    if (order > max_stehfest_order(digits)) {
        std::ostringstream msg;
        msg << "Gaver-Stehfest order " << order << " exceeds the cap " << max_stehfest_order(digits) << " for "
            << digits << " digits";
        throw DomainError(msg.str());
    }
    const auto& v = stehfest_weights(order, digits);
    mpfr::default_precision(digits);
    mpfr acc = 0;
    if (f.precise) {
        const mpfr a = mp::log(mpfr(2)) / mpfr(t);
        for (int k = 1; k <= order; ++k) {
            const mpfr fk = f.precise(a * k);
            if (!mp::isfinite(fk)) throw NonFinite("transform is not finite on the Gaver-Stehfest nodes");
            acc += v[k] * fk;
        }
        acc *= a;
    } else {
        const double a = std::numbers::ln2 / t;
        for (int k = 1; k <= order; ++k) {
            const double fk = f.real(k * a);
            if (!std::isfinite(fk)) throw NonFinite("transform is not finite on the Gaver-Stehfest nodes");
            acc += v[k] * fk;
        }
        acc *= a;
    }
    const double out = static_cast<double>(acc);
    if (!std::isfinite(out)) throw Overflow("Gaver-Stehfest inversion produced a non-finite value");
    return out;
}

InversionResult invert_detailed(const Transform& f, double t, const InversionConfig& cfg) {
    const int digits = cfg.precision_digits > 0 ? cfg.precision_digits : default_precision_digits();
    auto run = [&](Method m) {
        if (m == Method::Talbot) return talbot(f, t, cfg.order > 0 && cfg.method == m ? cfg.order : kDefaultTalbot);
        return gaver_stehfest(f, t, cfg.order > 0 && cfg.method == m ? cfg.order : 0, digits);
    };
    InversionResult res;
    res.method = cfg.method;
    res.value = run(cfg.method);
    res.discrepancy = std::numeric_limits<double>::quiet_NaN();
    if (cfg.cross_tolerance) {
        const Method other = cfg.method == Method::Talbot ? Method::GaverStehfest : Method::Talbot;
        const double w = run(other);
        res.discrepancy = std::abs(res.value - w);
        if (res.discrepancy > *cfg.cross_tolerance * std::max(1.0, std::abs(res.value))) {
            std::ostringstream msg;
            msg.precision(12);
            msg << "inversion methods disagree at t=" << t << ": " << res.value << " vs " << w;
            throw Unstable(msg.str());
        }
    }
    return res;
}

double invert(const Transform& f, double t, const InversionConfig& cfg) { return invert_detailed(f, t, cfg).value; }

Transform sigma_transform(const laws::BesqParams& params, double x, double y) {
    laws::check_regime(params, x, y);
    Transform f;
    f.real = [=](double s) { return laws::laplace_sigma({params, x, y, 2.0 * s}); };
    f.complex = [=](cdouble s) { return laws::laplace_sigma(params, x, y, 2.0 * s); };
    f.precise = [=](const mpfr& s) { return sigma_precise(params, x, y, 2 * s); };
    return f;
}

double cdf_sigma(const laws::BesqParams& params, double x, double y, double t, const InversionConfig& cfg) {
    check_t(t);
    if (x == y) return 1.0;
    const Transform base = sigma_transform(params, x, y);
    Transform f;
    f.real = [base](double s) { return base.real(s) / s; };
    f.complex = [base](cdouble s) { return base.complex(s) / s; };
    f.precise = [base](const mpfr& s) { return base.precise(s) / s; };
    const double v = invert(f, t, cfg);
    if (v < -1e-8 || v > 1.0 + 1e-8) {
        std::ostringstream msg;
        msg << "inverted distribution function left [0, 1]: " << v;
        throw Unstable(msg.str());
    }
    return std::clamp(v, 0.0, 1.0);
}

double density_sigma(const laws::BesqParams& params, double x, double y, double t, const InversionConfig& cfg) {
    check_t(t);
    if (x == y) throw DomainError("Sigma is identically 0 when x = y; no density");
    return invert(sigma_transform(params, x, y), t, cfg);
}

double jump_density(const laws::BesqParams& params, double x, double b, laws::Direction dir,
                    const InversionConfig& cfg) {
    check_t(b);
    // probe the regime once so errors surface before inversion
    (void)laws::jump_measure_transform(params, x, 1.0, dir);
    Transform f;
    f.real = [=](double s) { return laws::jump_measure_transform(params, x, 2.0 * s, dir); };
    f.complex = [=](cdouble s) { return laws::jump_measure_transform(params, x, 2.0 * s, dir); };
    f.precise = [=](const mpfr& s) { return jump_precise(params, x, 2 * s, dir); };
    return invert(f, b, cfg);
}

LogInversion saddle_log_invert(const std::function<cdouble(cdouble)>& log_f, double t, double abscissa) {
    check_t(t);
    auto g = [&](double s) { return log_f(cdouble(s, 0.0)).real() + s * t; };
    // g is convex in s; search in log(s - abscissa)
    auto gv = [&](double v) {
        const double r = g(abscissa + std::exp(v));
        return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
    };
    const double v_hi = std::log(1e4 + 1e4 / (t * t));
    const auto [v_star, g_star] = bm::tools::brent_find_minima(gv, -40.0, v_hi, 52);
    if (!std::isfinite(g_star)) throw Unstable("no finite saddle point for the Bromwich contour");
    LogInversion out;
    out.saddle = abscissa + std::exp(v_star);
    const double s0 = out.saddle;
    const double ds = 1e-3 * (s0 - abscissa);
    const double curv = (g(s0 + ds) - 2.0 * g_star + g(s0 - ds)) / (ds * ds);
    const double width = curv > 0.0 ? 1.0 / std::sqrt(curv) : s0;
    const cdouble base = log_f(cdouble(s0, 0.0));
    auto f = [&](double u) {
        const double v = width * u;
        return std::exp(log_f(cdouble(s0, v)) - base + cdouble(0.0, v * t)).real();
    };
    boost::math::quadrature::exp_sinh<double> es;
    double err = 0.0;
    double l1 = 0.0;
    const double integral = es.integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-10, &err, &l1);
    if (!(integral > 0.0) || !std::isfinite(integral)) throw Unstable("saddle-point Bromwich integral is not positive");
    out.log_value = g_star + std::log(width * integral / std::numbers::pi);
    out.error = (err + std::numeric_limits<double>::epsilon() * l1) / integral;
    return out;
}

LogInversion log_cdf_sigma(const laws::BesqParams& params, double x, double y, double t) {
    check_t(t);
    laws::check_regime(params, x, y);
    if (x == y) return {0.0, 0.0, 0.0};
    const auto br = laws::branch_for(x, y);
    auto log_f = [&](cdouble s) {
        return laws::kernel_w(params, x, 2.0 * s, br) - laws::kernel_w(params, y, 2.0 * s, br) - std::log(s);
    };
    return saddle_log_invert(log_f, t);
}

namespace {

const laws::BesqParams kZ4{-1.0, 1.0};

void check_z4(double x) {
    if (!std::isfinite(x)) throw NonFinite("Z^4 index is not finite");
    if (x < 0.0 || x > 1.0) throw DomainError("Z^4_x is defined for x in [0, 1]");
}

} // namespace

double z4_transform(double x, double lambda) {
    check_z4(x);
    return laws::laplace_sigma({kZ4, 1.0, 1.0 - x, 2.0 * lambda});
}

cdouble z4_transform(double x, cdouble lambda) {
    check_z4(x);
    return laws::laplace_sigma(kZ4, 1.0, 1.0 - x, 2.0 * lambda);
}

double z4_density(double x, double t, const InversionConfig& cfg) {
    check_z4(x);
    if (x == 0.0) throw DomainError("Z^4_0 = 0 has no density");
    return invert(sigma_transform(kZ4, 1.0, 1.0 - x), t, cfg);
}

} // namespace besq::inversion
