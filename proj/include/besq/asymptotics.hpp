#pragma once

// Small-ball limits of Sigma and the Chung-type LIL experiment.

#include "besq/laws.hpp"
#include "besq/simulate.hpp"

#include <vector>

namespace besq::asymptotics {

using laws::BesqParams;

struct SmallBallTarget {
    /// lim lambda^{-1/2} log E[exp(-lambda Sigma)].
    double lt_rate = 0.0;
    /// c in log Q[Sigma <= eps] ~ -c / eps.
    double sb_constant = 0.0;
    /// liminf of Sigma_{p,0,y} / phi(y).
    double lil_constant = 0.0;
};

SmallBallTarget small_ball_targets(const BesqParams& params, double x, double y);

/// 10^2, 10^3, ..., 10^8.
std::vector<double> default_lambda_grid();

struct RatePoint {
    double lambda;
    double rate;
};

/// lambda^{-1/2} log E[exp(-lambda Sigma)] on the grid, straight from the
/// kernels (laplace_sigma at 2 lambda).
std::vector<RatePoint> lt_rate_empirical(const BesqParams& params, double x, double y,
                                         const std::vector<double>& lambda_grid = default_lambda_grid());

/// 10^-1, 10^-1.5, ..., 10^-6.
std::vector<double> default_eps_grid();

struct TauberianPoint {
    double eps;
    /// eps log Q[Sigma <= eps], i.e. e^p log Q[||X||_p < e] with e = eps^{1/p}.
    double value;
    /// Relative error estimate of the inverted probability.
    double error;
    bool stable;
};

/// Points with error above `tol` (or failed inversions) are marked unstable.
std::vector<TauberianPoint> tauberian_series(const BesqParams& params, double x, double y,
                                             const std::vector<double>& eps_grid = default_eps_grid(),
                                             double tol = 1e-8);

/// Stable point with the smallest eps; throws Unstable if there is none.
TauberianPoint smallest_stable(const std::vector<TauberianPoint>& series);

/// y^{p+1} / log log y, defined for y > e.
double lil_phi(double p, double y);

struct LilResult {
    std::vector<double> y_grid;
    /// ratio[i][k] = Sigma_{p,0,y_k} / phi(y_k) on path i; NaN after censoring.
    std::vector<std::vector<double>> ratio;
    /// Minimum of ratio[i] over the last half of y_grid.
    std::vector<double> proxy;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
    double target = 0.0;
    double censored_fraction = 0.0;
    /// nu < 0 runs are not covered by the default regime.
    bool qualitative = false;
};

/// Paths start at 0.  Censored paths are dropped from the proxy statistics;
/// throws CensoredMajority when more than half are censored.
LilResult lil_experiment(const BesqParams& params, const simulate::PathConfig& cfg, const std::vector<double>& y_grid);

/// Levels n^n (n >= 2) below y_max, then y_max.
std::vector<double> lil_grid(double y_max);

/// n points geometric between lo and hi.
std::vector<double> geometric_grid(double lo, double hi, int n);

} // namespace besq::asymptotics
