#pragma once

// Modified Bessel functions I_alpha and K_alpha of real order.
//
// Values are carried in log scale so that the large-argument regime
// (I ~ e^z, K ~ e^-z) never overflows.  Complex-argument overloads cover
// Re z > 0 and exist for contour-based Laplace inversion; they return the
// complex logarithm (any branch, only exp() of differences is meaningful).

#include <complex>

namespace besq::bessel {

using cdouble = std::complex<double>;

/// Real order.  Must be finite.
struct Order {
    double alpha = 0.0;

    constexpr Order() = default;
    constexpr explicit Order(double a) : alpha(a) {}
};

/// Log-magnitude plus sign of a real Bessel value.
struct BesselEval {
    double log_magnitude = 0.0;
    int sign = 1;

    /// Linear value; throws Overflow instead of returning inf.
    double value() const;
};

/// I_alpha(z), alpha >= -1, z >= 0.
BesselEval bessel_i(Order order, double z);
/// K_alpha(z), any real alpha, z > 0.  K is even in alpha.
BesselEval bessel_k(Order order, double z);

/// I'_alpha(z) / I_alpha(z).
double log_derivative_i(Order order, double z);
/// K'_alpha(z) / K_alpha(z).
double log_derivative_k(Order order, double z);

/// I_{alpha+1}(z) / I_alpha(z).
double ratio_i(Order order, double z);
/// K_{alpha-1}(z) / K_alpha(z).
double ratio_k_lower(Order order, double z);

/// log( I_alpha(z) (z/2)^-alpha ); finite at z = 0 where it equals -lgamma(alpha+1).
double log_i_reduced(Order order, double z);
/// log( z^alpha K_alpha(z) ) for alpha > 0; finite at z = 0.
double log_k_reduced(Order order, double z);

cdouble log_bessel_i(Order order, cdouble z);
cdouble log_bessel_k(Order order, cdouble z);
cdouble ratio_i(Order order, cdouble z);
cdouble ratio_k_lower(Order order, cdouble z);
cdouble log_i_reduced(Order order, cdouble z);
cdouble log_k_reduced(Order order, cdouble z);

/// While alive, the reduced kernels on this thread evaluate at z (1 + eps).
/// Lets oracle suites demonstrate that they detect kernel errors.
class ScopedArgumentPerturbation {
public:
    explicit ScopedArgumentPerturbation(double eps);
    ~ScopedArgumentPerturbation();
    ScopedArgumentPerturbation(const ScopedArgumentPerturbation&) = delete;
    ScopedArgumentPerturbation& operator=(const ScopedArgumentPerturbation&) = delete;

private:
    double previous_;
};

} // namespace besq::bessel
