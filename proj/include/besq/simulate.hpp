#pragma once

// Monte Carlo paths of BESQ^delta with exact transitions, first-passage
// detection and pathwise accumulation of Sigma = int X^p ds.

#include "besq/laws.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <random>
#include <vector>

namespace besq::simulate {

using laws::BesqParams;
using Rng = std::mt19937_64;

struct PathConfig {
    double h = 1e-3;
    std::int64_t n_paths = 10000;
    std::uint64_t seed = 0;
    double max_time = 1e3;
    /// Paths whose Sigma exceeds this stop early and count as censored.
    double max_sigma = std::numeric_limits<double>::infinity();
    /// Levels within hit_tol of the target count as hits.
    double hit_tol = 0.0;
    /// Correct discrete monitoring with the bridge crossing probability.
    bool bridge = true;
    /// Sample the bridge maximum and minimum on each step (needed for barrier events).
    bool track_extremes = true;
    /// Step h * max(1, X) instead of h; keeps relative resolution at high levels.
    bool level_scaled_step = false;
    /// 0 uses std::thread::hardware_concurrency().
    unsigned workers = 0;
};

struct PathResult {
    std::int64_t path_id = 0;
    double hit_time = std::numeric_limits<double>::quiet_NaN();
    double sigma = 0.0;
    double max_level = 0.0;
    double min_level = 0.0;
    bool censored = false;
};

struct PathBatch {
    std::vector<PathResult> paths;
    double censored_fraction = 0.0;
    bool censored_majority() const { return censored_fraction > 0.5; }
};

/// Generator for path `path_id`, independent of how paths are scheduled.
Rng path_rng(std::uint64_t seed, std::uint64_t path_id);

/// One exact transition of BESQ^delta over time h.
double besq_step(double x, double h, double delta, Rng& rng);

PathBatch run_paths(const BesqParams& params, double x, double y, const PathConfig& cfg);

/// First passages of an increasing ladder of levels above x along each path.
/// Row i holds (hit time, Sigma) for levels[i]; NaN time marks censoring.
struct Passage {
    double time;
    double sigma;
};
std::vector<std::vector<Passage>> run_passages(const BesqParams& params, double x,
                                               const std::vector<double>& levels, const PathConfig& cfg);

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
    double censored_fraction = 0.0;
    /// Largest amount censored paths could add to value.
    double censor_bound = 0.0;
};

/// Sample mean of f over paths; censored paths contribute 0 and at most `bound(path)`.
Estimate estimate(const PathBatch& batch, const std::function<double(const PathResult&)>& f,
                  const std::function<double(const PathResult&)>& bound = {});

Estimate estimate_laplace(const BesqParams& params, double x, double y, double lambda, const PathConfig& cfg);

/// E[1{max < a} exp(-(lambda/2) Sigma)] for a > x, or 1{min > a} for a < x.
Estimate estimate_joint_max(const BesqParams& params, double x, double y, double lambda, double a,
                            const PathConfig& cfg);

/// E[exp(-r R_y - (lambda/2) Sigma)].
Estimate estimate_joint_r(const BesqParams& params, double x, double y, double lambda, double r,
                          const PathConfig& cfg);

Estimate estimate_mean_sigma(const BesqParams& params, double x, double y, const PathConfig& cfg);

struct BiasRow {
    double h;
    double estimate;
    double std_error;
};

struct BiasStudy {
    std::vector<BiasRow> rows;
    /// Exponent k in estimate(h) ~ intercept + c h^k, from the last three rows.
    double order = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
};

/// Laplace estimates over a ladder of steps with common random numbers.
BiasStudy bias_study(const BesqParams& params, double x, double y, double lambda, const std::vector<double>& h_list,
                     const PathConfig& cfg);

/// Kolmogorov distance between two samples.
double ks_distance(std::vector<double> a, std::vector<double> b);

void write_csv(std::ostream& out, const PathBatch& batch);

} // namespace besq::simulate
