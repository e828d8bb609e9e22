#pragma once

// Closed-form laws of Sigma = int_0^{R_y} X_s^p ds for X = BESQ^delta(x).
//
// Transform convention throughout: E[exp(-(lambda/2) Sigma)].
// All kernel ratios are formed as differences of logs.

#include <complex>

namespace besq::laws {

using cdouble = std::complex<double>;

struct BesqParams {
    double nu = 0.0;
    double p = 0.0;

    double delta() const { return 2.0 * (nu + 1.0); }
    static BesqParams from_delta(double delta, double p);
};

/// Throws NonFinite / DomainError unless nu >= -1, p > -1.
void validate(const BesqParams& params);

struct SigmaQuery {
    BesqParams params;
    double x = 0.0;
    double y = 0.0;
    double lambda = 0.0;
};

/// K-branch is the decreasing solution (used for y <= x), I-branch the
/// increasing one (y >= x).
enum class Branch { K, I };

inline Branch branch_for(double x, double y) { return y <= x ? Branch::K : Branch::I; }

/// Throws RegimeViolation when (params, x, y) fall outside the hypotheses
/// under which w(x)/w(y) is the transform of Sigma.
void check_regime(const BesqParams& params, double x, double y);

/// True when the law carries mass at Sigma = +inf (nu > 0, y < x).
bool is_defective(const BesqParams& params, double x, double y);

/// log w(x) up to an additive constant that depends on lambda only, so
/// differences are exact log-ratios.  Finite at x = 0 and lambda = 0 where
/// the branch allows it.
double kernel_w(const BesqParams& params, double x, double lambda, Branch branch);
cdouble kernel_w(const BesqParams& params, double x, cdouble lambda, Branch branch);

double laplace_sigma(const SigmaQuery& q);
/// Analytic continuation to complex lambda off the negative real axis.
cdouble laplace_sigma(const BesqParams& params, double x, double y, cdouble lambda);

/// E[exp(-(lambda/2) R_y)] for BESQ with index nu > -1.
double laplace_hitting_time(double nu, double x, double y, double lambda);
cdouble laplace_hitting_time(double nu, double x, double y, cdouble lambda);

struct HittingParams {
    double delta;
    double nu;
    double x;
    double y;
};

/// Time change: Sigma under (nu, p, x, y) has the law of R_{y*} under
/// BESQ^{delta*}(x*).
HittingParams equivalent_hitting_params(const SigmaQuery& q);

/// s~(x) = int_1^x dt / (t u(sqrt t)^2), u in standard normalisation.
double scale_tilde(const BesqParams& params, double x, double lambda, Branch branch);

struct BarrierQuery {
    SigmaQuery base;
    double a = 0.0;
};

/// Q[1{R_a > R_y} exp(-(lambda/2) Sigma)].  Requires y <= x < a (maximum
/// stays below a) or a < x <= y (minimum stays above a).
double joint_max_laplace(const BarrierQuery& bq);

/// Q[R_a > R_y] from the scale function of BESQ itself.
double barrier_probability(const BesqParams& params, double x, double y, double a);

/// joint_max_laplace / barrier_probability.
double conditional_max_laplace(const BarrierQuery& bq);

/// Q[exp(-r R_y - (lambda/2) Sigma)].
double joint_r_sigma_laplace(const SigmaQuery& q, double r);

/// E[Sigma] for nu > 0, 0 <= x <= y.
double mean_sigma(const BesqParams& params, double x, double y);

enum class Direction { Forward, Reversed };

/// Transform in lambda/2 of the jump density of y -> Sigma_{p,0,y}
/// (forward, nu >= 0) or of the time-reversed process Z (reversed,
/// nu in (0,1], x in [0,1)).
double jump_measure_transform(const BesqParams& params, double x, double lambda, Direction dir);
cdouble jump_measure_transform(const BesqParams& params, double x, cdouble lambda, Direction dir);

/// |L(0 -> y, lambda) - L(0 -> 1, lambda y^{p+1})|.
double scaling_identity_check(const BesqParams& params, double y, double lambda);

} // namespace besq::laws
