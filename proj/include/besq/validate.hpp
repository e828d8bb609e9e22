#pragma once

// Identity and oracle suite over the closed-form laws and the inversions.

#include "besq/inversion.hpp"

#include <functional>
#include <string>
#include <vector>

namespace besq::validate {

struct CheckResult {
    std::string name;
    std::size_t points = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// nu/(p+1) = +-1/2 against hyperbolic closed forms on 200 (x, y, lambda) points.
CheckResult check_half_order();
/// laplace_sigma against the time-changed hitting transform on 100 points.
CheckResult check_time_change();
/// E[exp(-lambda Z_x)] = exp(-sqrt(lambda/2) x).
CheckResult check_z4_transform();
/// Inverted Z^4 density against the Brownian hitting-time density at 10 abscissae.
CheckResult check_z4_density();
/// Conditional max/min transforms against BESQ(3) hitting transforms on 50 points.
CheckResult check_conditional();
/// L(0 -> y, lambda) = L(0 -> 1, lambda y^{p+1}).
CheckResult check_scaling();

struct AnalyticPair {
    std::string name;
    inversion::Transform transform;
    std::function<double(double)> exact;
};
std::vector<AnalyticPair> analytic_pairs();
std::vector<double> inversion_abscissae();

/// Talbot round trips on the analytic pairs.
CheckResult check_round_trip();
/// |Talbot - Gaver-Stehfest| on the analytic pairs and the library's inverted laws.
CheckResult check_cross_agreement();

/// Inverted forward jump density is nonnegative and decreasing on a b-grid
/// (residual counts violations).
CheckResult check_jump_shape();
/// exp_sinh re-transform of the inverted density against the closed-form transform.
CheckResult check_jump_retransform();
/// Reversed half-order jump density against (1-x)^{nu-1} / sqrt(2 pi b).
CheckResult check_jump_reversed();

struct SuiteOptions {
    /// Relative perturbation of Bessel kernel arguments during the run.
    double bessel_perturbation = 0.0;
    bool include_jumps = true;
};

std::vector<CheckResult> run_suite(const SuiteOptions& opts = {});

} // namespace besq::validate
