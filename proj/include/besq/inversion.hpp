#pragma once

// Numerical Laplace inversion: f(t) from F(s) = int_0^inf e^{-st} f(t) dt.
//
// Talbot needs F on a complex contour; Gaver-Stehfest only on the positive
// reals, with its alternating weights summed in extended precision.

#include "besq/laws.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <complex>
#include <functional>
#include <optional>

namespace besq::inversion {

using cdouble = std::complex<double>;
using mpfr = boost::multiprecision::mpfr_float;

enum class Method { GaverStehfest, Talbot };

struct InversionConfig {
    Method method = Method::Talbot;
    /// Gaver-Stehfest order (even) or Talbot node count; 0 picks the default
    /// (24 nodes; order 16, or the largest order the precision allows when the
    /// transform has an extended-precision form).
    int order = 0;
    /// Working precision for Gaver-Stehfest; 0 reads BESQ_PRECISION_DIGITS, else 60.
    int precision_digits = 0;
    /// When set, both methods run and Unstable is thrown above this discrepancy.
    std::optional<double> cross_tolerance;
};

/// A transform known on the real axis and, optionally, off it.  `precise`
/// evaluates on the real axis at the current mpfr precision; Gaver-Stehfest
/// prefers it, since double-valued inputs cap its accuracy near 1e-5.
struct Transform {
    std::function<double(double)> real;
    std::function<cdouble(cdouble)> complex;
    std::function<mpfr(const mpfr&)> precise;
};

struct InversionResult {
    double value = 0.0;
    /// |Talbot - Gaver-Stehfest| when both were run, else NaN.
    double discrepancy = 0.0;
    Method method = Method::Talbot;
};

int default_precision_digits();
int max_stehfest_order(int digits);

double talbot(const Transform& f, double t, int nodes = 24);
double gaver_stehfest(const Transform& f, double t, int order = 0, int digits = 0);

InversionResult invert_detailed(const Transform& f, double t, const InversionConfig& cfg = {});
double invert(const Transform& f, double t, const InversionConfig& cfg = {});

/// Transform of the law of Sigma in s: E[exp(-s Sigma)] = laplace_sigma at lambda = 2s.
Transform sigma_transform(const laws::BesqParams& params, double x, double y);

/// Q[Sigma <= t], inverted from E[exp(-s Sigma)]/s.
double cdf_sigma(const laws::BesqParams& params, double x, double y, double t, const InversionConfig& cfg = {});

/// Density of Sigma at t.
double density_sigma(const laws::BesqParams& params, double x, double y, double t,
                     const InversionConfig& cfg = {});

/// Jump density pi(x, b) whose transform in lambda/2 is jump_measure_transform.
double jump_density(const laws::BesqParams& params, double x, double b, laws::Direction dir,
                    const InversionConfig& cfg = {});

/// E[exp(-lambda Z_x)] for the subordinator Z^4 of the time-reversed BESQ(0) with p = 1.
double z4_transform(double x, double lambda);
cdouble z4_transform(double x, cdouble lambda);

/// log f(t) from the Bromwich integral along the vertical line through the
/// real saddle point of s t + Re log F(s).  The integrand there never exceeds
/// the result, so far tails keep their relative accuracy.  `log_f` is log F;
/// `abscissa` bounds its real singularities from the right.
struct LogInversion {
    double log_value = 0.0;
    double saddle = 0.0;
    /// Relative error estimate of exp(log_value).
    double error = 0.0;
};
LogInversion saddle_log_invert(const std::function<cdouble(cdouble)>& log_f, double t, double abscissa = 0.0);

/// log Q[Sigma <= t] by saddle_log_invert; usable where the value underflows.
LogInversion log_cdf_sigma(const laws::BesqParams& params, double x, double y, double t);

/// Density of Z^4_x at t by inversion.
double z4_density(double x, double t, const InversionConfig& cfg = {});

} // namespace besq::inversion
