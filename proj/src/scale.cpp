#include "besq/bessel.hpp"
#include "besq/errors.hpp"
#include "besq/laws.hpp"
#include "laws_detail.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace besq::laws {

namespace bs = besq::bessel;

namespace detail {

double integrate(const std::function<double(double)>& f, double lo, double hi, const char* what) {
    if (!(hi > lo)) return 0.0;
    static thread_local boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0;
    double l1 = 0.0;
    double v = std::numeric_limits<double>::quiet_NaN();
    try {
        v = ts.integrate(f, lo, hi, 1e-14, &err, &l1);
    } catch (const std::domain_error&) {
        v = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isfinite(v) && err <= 1e-10 * std::max(l1, std::abs(v))) return v;
    double gk_err = 0.0;
    const double gk = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-11,
                                                                                     &gk_err);
    if (std::isfinite(gk) && gk_err <= 1e-9 * std::abs(gk) + 1e-300) return gk;
    std::ostringstream msg;
    msg << what << ": quadrature on [" << lo << ", " << hi << "] did not converge (tanh-sinh " << v
        << " +- " << err << ", Gauss-Kronrod " << gk << " +- " << gk_err << ")";
    throw QuadratureFailure(msg.str());
}

} // namespace detail

namespace {

using detail::integrate;

void check_levels(double x, double y, double a) {
    detail::require_finite(x, "x");
    detail::require_finite(y, "y");
    detail::require_finite(a, "a");
    if (x < 0.0 || y < 0.0 || a < 0.0) throw DomainError("levels must be nonnegative");
}

Branch barrier_branch(double x, double y, double a) {
    if (y <= x && x < a) return Branch::K;
    if (a < x && x <= y) return Branch::I;
    std::ostringstream msg;
    msg << "barrier a=" << a << " must satisfy y <= x < a or a < x <= y (x=" << x << ", y=" << y << ")";
    throw OrientationError(msg.str());
}

// log of 1/(t u(sqrt t)^2) up to a lambda-only constant.
double log_scale_density(const BesqParams& params, double t, double lambda, Branch branch) {
    const double nu = params.nu;
    const double q = params.p + 1.0;
    const double z = detail::bessel_arg(params, t, lambda);
    if (branch == Branch::I) {
        const double alpha = nu / q;
        return -(1.0 + nu) * std::log(t) - 2.0 * bs::log_i_reduced(bs::Order(alpha), z);
    }
    const double beta = std::abs(nu) / q;
    if (beta == 0.0) return -std::log(t) - 2.0 * bs::bessel_k(bs::Order(0.0), z).log_magnitude;
    return -(1.0 - std::abs(nu)) * std::log(t) - 2.0 * bs::log_k_reduced(bs::Order(beta), z);
}

// (s(x) - s(a)) / (s(y) - s(a)) for the tilted scale function.
double tilted_scale_ratio(const BesqParams& params, double x, double y, double a, double lambda,
                          Branch branch) {
    auto lg = [&](double t) { return log_scale_density(params, t, lambda, branch); };
    double ref;
    double lo_near;
    double hi_near;
    double lo_far;
    double hi_far;
    if (branch == Branch::K) {
        // near: [x, a], far: [y, x]
        lo_near = x;
        hi_near = a;
        lo_far = y;
        hi_far = x;
        ref = std::max(lg(a), lg(x));
        if (y > 0.0) ref = std::max(ref, lg(y));
    } else {
        // near: [a, x], far: [x, y]
        lo_near = a;
        hi_near = x;
        lo_far = x;
        hi_far = y;
        if (a > 0.0) {
            ref = lg(a);
        } else {
            const double q = params.p + 1.0;
            const double t1 = std::pow(q / std::sqrt(lambda), 2.0 / q);
            ref = lg(std::min(x, t1));
        }
    }
    auto g = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp(lg(t) - ref);
    };
    const double near = integrate(g, lo_near, hi_near, "scale function");
    const double far = integrate(g, lo_far, hi_far, "scale function");
    if (!(near > 0.0)) return 0.0;
    return near / (near + far);
}

} // namespace

double scale_tilde(const BesqParams& params, double x, double lambda, Branch branch) {
    validate(params);
    detail::require_finite(x, "x");
    detail::require_finite(lambda, "lambda");
    if (x < 0.0) throw DomainError("scale function needs x >= 0");
    if (!(lambda > 0.0)) throw DomainError("scale function needs lambda > 0");
    const double q = params.p + 1.0;
    auto g = [&](double t) {
        if (t <= 0.0) return 0.0;
        const double z = std::sqrt(lambda) * std::pow(t, 0.5 * q) / q;
        const double log_u = branch == Branch::I ? bs::bessel_i(bs::Order(params.nu / q), z).log_magnitude
                                                 : bs::bessel_k(bs::Order(params.nu / q), z).log_magnitude;
        return std::exp(-std::log(t) - 2.0 * log_u);
    };
    if (x == 1.0) return 0.0;
    const double v = x > 1.0 ? integrate(g, 1.0, x, "scale_tilde") : -integrate(g, x, 1.0, "scale_tilde");
    if (!std::isfinite(v)) throw QuadratureFailure("scale_tilde: value not finite");
    return v;
}

double barrier_probability(const BesqParams& params, double x, double y, double a) {
    validate(params);
    check_levels(x, y, a);
    barrier_branch(x, y, a);
    check_regime(params, x, y);
    if (x == y) return 1.0;
    const double nu = params.nu;
    if (a == 0.0) return nu < 0.0 ? std::pow(x / y, -nu) : 1.0;
    const double lx = std::log(x / a);
    const double ly = std::log(y / a);
    if (std::abs(nu) < 1e-8) {
        if (y == 0.0) return 0.0;
        // expm1(u) ~ u (1 + u/2)
        return (lx / ly) * (1.0 - 0.5 * nu * lx) / (1.0 - 0.5 * nu * ly);
    }
    return std::expm1(-nu * lx) / std::expm1(-nu * ly);
}

double joint_max_laplace(const BarrierQuery& bq) {
    const SigmaQuery& q = bq.base;
    validate(q.params);
    check_levels(q.x, q.y, bq.a);
    detail::require_finite(q.lambda, "lambda");
    if (q.lambda < 0.0) throw DomainError("lambda must be nonnegative");
    const Branch br = barrier_branch(q.x, q.y, bq.a);
    check_regime(q.params, q.x, q.y);
    if (q.x == q.y) return 1.0;
    if (q.lambda == 0.0) return barrier_probability(q.params, q.x, q.y, bq.a);
    const double base = laplace_sigma(q);
    if (br == Branch::I && bq.a == 0.0 && q.params.nu >= 0.0) return base;
    return base * tilted_scale_ratio(q.params, q.x, q.y, bq.a, q.lambda, br);
}

double conditional_max_laplace(const BarrierQuery& bq) {
    const double prob = barrier_probability(bq.base.params, bq.base.x, bq.base.y, bq.a);
    if (!(prob > 1e-300)) throw DegenerateConditioning("conditioning event has negligible probability");
    return joint_max_laplace(bq) / prob;
}

} // namespace besq::laws
