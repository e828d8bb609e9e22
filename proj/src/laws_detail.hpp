#pragma once

#include "besq/laws.hpp"

#include <functional>

namespace besq::laws::detail {

/// z = sqrt(lambda) x^{(p+1)/2} / (p+1), the Bessel argument at level x.
double bessel_arg(const BesqParams& params, double x, double lambda);

/// Drift 2(u'(sqrt x) sqrt x / u(sqrt x) + 1) of X under the u-transformed law.
double tilted_drift(const BesqParams& params, double x, double lambda, Branch branch);

/// Finite-interval quadrature with error control; throws QuadratureFailure.
double integrate(const std::function<double(double)>& f, double lo, double hi, const char* what);

void require_finite(double v, const char* what);

} // namespace besq::laws::detail
