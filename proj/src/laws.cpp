#include "besq/laws.hpp"

#include "besq/bessel.hpp"
#include "besq/errors.hpp"
#include "laws_detail.hpp"

#include <cmath>
#include <string>

namespace besq::laws {

namespace bs = besq::bessel;

namespace detail {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFinite(std::string("non-finite ") + what);
}

double bessel_arg(const BesqParams& params, double x, double lambda) {
    const double q = params.p + 1.0;
    return std::sqrt(lambda) * std::pow(x, 0.5 * q) / q;
}

double tilted_drift(const BesqParams& params, double x, double lambda, Branch branch) {
    const double nu = params.nu;
    const double q = params.p + 1.0;
    const double z = bessel_arg(params, x, lambda);
    if (branch == Branch::K) {
        if (z == 0.0) return 2.0 * (1.0 - std::abs(nu));
        const double beta = std::abs(nu) / q;
        const double zrho = z * bs::ratio_k_lower(bs::Order(beta), z);
        return 2.0 * (1.0 - std::abs(nu) - q * zrho);
    }
    if (z == 0.0) return 2.0 * (1.0 + nu);
    const double alpha = nu / q;
    return 2.0 * (1.0 + nu + q * z * bs::ratio_i(bs::Order(alpha), z));
}

} // namespace detail

using detail::require_finite;

BesqParams BesqParams::from_delta(double delta, double p) {
    require_finite(delta, "delta");
    return {0.5 * delta - 1.0, p};
}

void validate(const BesqParams& params) {
    require_finite(params.nu, "nu");
    require_finite(params.p, "p");
    if (params.nu < -1.0) throw DomainError("nu must be >= -1 (delta >= 0)");
    if (params.p <= -1.0) throw DomainError("p must be > -1");
}

namespace {

void validate_levels(double x, double y) {
    require_finite(x, "x");
    require_finite(y, "y");
    if (x < 0.0 || y < 0.0) throw DomainError("levels must be nonnegative");
}

void validate_lambda(double lambda) {
    require_finite(lambda, "lambda");
    if (lambda < 0.0) throw DomainError("lambda must be nonnegative");
}

void validate_lambda(cdouble lambda) {
    require_finite(lambda.real(), "lambda");
    require_finite(lambda.imag(), "lambda");
    if (lambda.imag() == 0.0 && lambda.real() <= 0.0 && lambda.real() != 0.0)
        throw DomainError("complex lambda must avoid the negative real axis");
}

double log_k0(double z) { return bs::bessel_k(bs::Order(0.0), z).log_magnitude; }
cdouble log_k0(cdouble z) { return bs::log_bessel_k(bs::Order(0.0), z); }

template <class T>
T log_w(const BesqParams& params, double x, T lambda, Branch branch) {
    const double nu = params.nu;
    const double q = params.p + 1.0;
    const T z = std::sqrt(lambda) * (std::pow(x, 0.5 * q) / q);
    if (branch == Branch::I) {
        const double alpha = nu / q;
        if (alpha <= -1.0) throw RegimeViolation("increasing kernel needs nu/(p+1) > -1");
        if (x == 0.0) return T(-std::lgamma(alpha + 1.0));
        return bs::log_i_reduced(bs::Order(alpha), z);
    }
    const double beta = std::abs(nu) / q;
    if (beta == 0.0) {
        if (x == 0.0) throw RegimeViolation("decreasing kernel is infinite at 0 for nu = 0");
        if (lambda == T(0.0)) return T(0.0);
        return log_k0(z);
    }
    const double power = 0.5 * (std::abs(nu) + nu);
    if (x == 0.0) {
        if (power > 0.0) throw RegimeViolation("decreasing kernel is infinite at 0 for nu > 0");
        return bs::log_k_reduced(bs::Order(beta), z);
    }
    return bs::log_k_reduced(bs::Order(beta), z) - power * std::log(x);
}

template <class T>
T laplace_sigma_impl(const BesqParams& params, double x, double y, T lambda) {
    validate(params);
    validate_levels(x, y);
    validate_lambda(lambda);
    if (x == y) return T(1.0);
    check_regime(params, x, y);
    const Branch br = branch_for(x, y);
    return std::exp(log_w(params, x, lambda, br) - log_w(params, y, lambda, br));
}

} // namespace

void check_regime(const BesqParams& params, double x, double y) {
    validate(params);
    validate_levels(x, y);
    const double nu = params.nu;
    const double p = params.p;
    if (x == y) return;
    if (y < x) {
        if (y == 0.0 && nu >= 0.0)
            throw RegimeViolation("0 is polar for nu >= 0; the level y = 0 is never reached");
        return;
    }
    if (nu < 0.0) {
        const bool ok = (p >= 0.0 && nu > -1.0) || (nu == -1.0 && p > 0.0);
        if (!ok)
            throw RegimeViolation(
                "upward passage with nu < 0 requires p >= 0 and -1 < nu < 0, or nu = -1 and p > 0");
        if (nu == -1.0 && x == 0.0)
            throw RegimeViolation("0 is absorbing for nu = -1; the process started at 0 stays there");
    }
}

bool is_defective(const BesqParams& params, double x, double y) {
    return params.nu > 0.0 && y < x;
}

double kernel_w(const BesqParams& params, double x, double lambda, Branch branch) {
    validate(params);
    validate_levels(x, x);
    validate_lambda(lambda);
    return log_w(params, x, lambda, branch);
}

cdouble kernel_w(const BesqParams& params, double x, cdouble lambda, Branch branch) {
    validate(params);
    validate_levels(x, x);
    validate_lambda(lambda);
    return log_w(params, x, lambda, branch);
}

double laplace_sigma(const SigmaQuery& q) {
    return laplace_sigma_impl(q.params, q.x, q.y, q.lambda);
}

cdouble laplace_sigma(const BesqParams& params, double x, double y, cdouble lambda) {
    return laplace_sigma_impl(params, x, y, lambda);
}

double laplace_hitting_time(double nu, double x, double y, double lambda) {
    require_finite(nu, "nu");
    if (nu <= -1.0) throw DomainError("hitting-time transform needs nu > -1");
    return laplace_sigma_impl(BesqParams{nu, 0.0}, x, y, lambda);
}

cdouble laplace_hitting_time(double nu, double x, double y, cdouble lambda) {
    require_finite(nu, "nu");
    if (nu <= -1.0) throw DomainError("hitting-time transform needs nu > -1");
    return laplace_sigma_impl(BesqParams{nu, 0.0}, x, y, lambda);
}

HittingParams equivalent_hitting_params(const SigmaQuery& q) {
    validate(q.params);
    validate_levels(q.x, q.y);
    const double q1 = 1.0 + q.params.p;
    const double nu_star = q.params.nu / q1;
    return {2.0 * (nu_star + 1.0), nu_star, std::pow(q.x, q1) / (q1 * q1), std::pow(q.y, q1) / (q1 * q1)};
}

double mean_sigma(const BesqParams& params, double x, double y) {
    validate(params);
    validate_levels(x, y);
    if (params.nu <= 0.0) throw RegimeViolation("mean formula requires nu > 0");
    if (x > y) throw DomainError("mean formula requires x <= y");
    const double q = params.p + 1.0;
    return (std::pow(y, q) - std::pow(x, q)) / (2.0 * q * (q + params.nu));
}

namespace {

template <class T>
T jump_transform_impl(const BesqParams& params, double x, T lambda, Direction dir) {
    validate(params);
    require_finite(x, "x");
    validate_lambda(lambda);
    if (lambda == T(0.0)) throw DomainError("jump transform needs lambda > 0");
    const double q = params.p + 1.0;
    const double nu = params.nu;
    if (dir == Direction::Forward) {
        if (nu < 0.0) throw RegimeViolation("forward jump measure requires nu >= 0");
        if (x < 0.0) throw DomainError("forward jump measure requires x >= 0");
        if (x == 0.0) {
            if (params.p > 0.0) return T(0.0);
            if (params.p == 0.0) return T(1.0 / (2.0 * (nu + 1.0)));
            throw DomainError("forward jump transform is infinite at x = 0 for p < 0");
        }
        const T z = std::sqrt(lambda) * (std::pow(x, 0.5 * q) / q);
        return q * z * bs::ratio_i(bs::Order(nu / q), z) / (lambda * x);
    }
    if (!(nu > 0.0 && nu <= 1.0)) throw RegimeViolation("reversed jump measure requires nu in (0, 1]");
    if (x < 0.0 || x >= 1.0) throw DomainError("reversed jump measure requires x in [0, 1)");
    const double xi = 1.0 - x;
    const T z = std::sqrt(lambda) * (std::pow(xi, 0.5 * q) / q);
    return q * z * bs::ratio_k_lower(bs::Order(nu / q), z) / (lambda * xi);
}

} // namespace

double jump_measure_transform(const BesqParams& params, double x, double lambda, Direction dir) {
    return jump_transform_impl(params, x, lambda, dir);
}

cdouble jump_measure_transform(const BesqParams& params, double x, cdouble lambda, Direction dir) {
    return jump_transform_impl(params, x, lambda, dir);
}

double scaling_identity_check(const BesqParams& params, double y, double lambda) {
    check_regime(params, 0.0, y);
    check_regime(params, 0.0, 1.0);
    const double lhs = laplace_sigma({params, 0.0, y, lambda});
    const double rhs = laplace_sigma({params, 0.0, 1.0, lambda * std::pow(y, params.p + 1.0)});
    return std::abs(lhs - rhs);
}

} // namespace besq::laws
