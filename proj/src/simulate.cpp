#include "besq/simulate.hpp"

#include "besq/bessel.hpp"
#include "besq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

namespace besq::simulate {

namespace {

std::uint64_t splitmix(std::uint64_t& s) {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform_open(Rng& rng) {
    // (0, 1]
    return 1.0 - std::generate_canonical<double, 53>(rng);
}

// Neumaier summation.
struct Sum {
    double s = 0.0;
    double c = 0.0;
    void add(double v) {
        const double t = s + v;
        if (std::abs(s) >= std::abs(v))
            c += (s - t) + v;
        else
            c += (v - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

void check_config(const PathConfig& cfg) {
    if (!(cfg.h > 0.0) || !std::isfinite(cfg.h)) throw DomainError("step h must be positive");
    if (cfg.n_paths < 1) throw DomainError("n_paths must be at least 1");
    if (!(cfg.max_time > 0.0) || !std::isfinite(cfg.max_time)) throw DomainError("max_time must be positive and finite");
    if (!(cfg.hit_tol >= 0.0)) throw DomainError("hit_tol must be nonnegative");
    if (!(cfg.max_sigma > 0.0)) throw DomainError("max_sigma must be positive");
}

// besq_step with the distributions built once per path.
class Stepper {
public:
    explicit Stepper(double delta) : delta_(delta), chi_(delta > 1.0 ? 0.5 * (delta - 1.0) : 1.0) {}

    double operator()(double x, double h, Rng& rng) {
        if (delta_ < 1.0) return besq_step(x, h, delta_, rng);
        const double s = std::sqrt(x) + std::sqrt(h) * normal_(rng);
        double v = s * s;
        if (delta_ > 1.0) v += 2.0 * h * chi_(rng);
        return v;
    }

private:
    double delta_;
    std::normal_distribution<double> normal_;
    std::gamma_distribution<double> chi_;
};

class Walker {
public:
    Walker(const BesqParams& params, const PathConfig& cfg) : params_(params), cfg_(cfg), delta_(params.delta()) {}

    double powp(double v) const {
        if (params_.p == 0.0) return 1.0;
        if (params_.p == 1.0) return v;
        if (v <= 0.0) return 0.0;
        return std::pow(v, params_.p);
    }

    double step_size(double x) const { return cfg_.level_scaled_step ? cfg_.h * std::max(1.0, x) : cfg_.h; }

    // Probability that the bridge from a to b over time h touched level y,
    // given both endpoints are strictly on the same side of it.
    double bridge_cross(double a, double b, double h, double y) const {
        if (!cfg_.bridge) return 0.0;
        if (y > 0.0) {
            const double var = 4.0 * y * h;
            return std::exp(-2.0 * std::abs(y - a) * std::abs(y - b) / var);
        }
        // y = 0: the BESQ bridge avoids 0 with probability I_{|nu|}(w)/I_{-|nu|}(w)
        const double nu = params_.nu;
        if (!(nu < 0.0 && nu > -1.0)) return 0.0;
        const double w = std::sqrt(a * b) / h;
        if (w > 25.0) return 0.0;
        const double m = -nu;
        const double la = bessel::bessel_i(bessel::Order(m), w).log_magnitude;
        const double lb = bessel::bessel_i(bessel::Order(-m), w).log_magnitude;
        return -std::expm1(la - lb);
    }

    // Running extremes of the bridge between a and b.
    void sample_extremes(double a, double b, double h, Rng& rng, double& mx, double& mn) const {
        if (!cfg_.bridge || !cfg_.track_extremes) {
            mx = std::max(mx, b);
            mn = std::min(mn, b);
            return;
        }
        const double var = 2.0 * (a + b) * h;
        const double d2 = (b - a) * (b - a);
        const double up = 0.5 * (a + b + std::sqrt(d2 - 2.0 * var * std::log(uniform_open(rng))));
        const double dn = 0.5 * (a + b - std::sqrt(d2 - 2.0 * var * std::log(uniform_open(rng))));
        mx = std::max(mx, up);
        mn = std::min(mn, std::max(0.0, dn));
    }

    PathResult run(std::int64_t id, double x, double y, Rng& rng) const {
        PathResult r;
        r.path_id = id;
        r.max_level = x;
        r.min_level = x;
        if (x == y) {
            r.hit_time = 0.0;
            return r;
        }
        const bool up = y > x;
        Stepper step(delta_);
        double t = 0.0;
        double cur = x;
        double sigma = 0.0;
        for (;;) {
            const double h = step_size(cur);
            if (t + h > cfg_.max_time || sigma > cfg_.max_sigma) {
                r.censored = true;
                r.sigma = sigma;
                return r;
            }
            const double next = step(cur, h, rng);
            const bool crossed = up ? next >= y - cfg_.hit_tol : next <= y + cfg_.hit_tol;
            if (crossed) {
                const double frac = next == cur ? 1.0 : std::clamp((y - cur) / (next - cur), 0.0, 1.0);
                sigma += frac * h * 0.5 * (powp(cur) + powp(y));
                r.hit_time = t + frac * h;
                r.sigma = sigma;
                r.max_level = std::max(r.max_level, up ? y : cur);
                r.min_level = std::min(r.min_level, up ? cur : y);
                return r;
            }
            const double pc = bridge_cross(cur, next, h, y);
            if (pc > 0.0 && uniform_open(rng) <= pc) {
                sigma += 0.5 * h * 0.5 * (powp(cur) + powp(y));
                r.hit_time = t + 0.5 * h;
                r.sigma = sigma;
                r.max_level = std::max(r.max_level, up ? y : cur);
                r.min_level = std::min(r.min_level, up ? cur : y);
                return r;
            }
            sample_extremes(cur, next, h, rng, r.max_level, r.min_level);
            sigma += h * 0.5 * (powp(cur) + powp(next));
            t += h;
            cur = next;
        }
    }

    std::vector<Passage> ladder(double x, const std::vector<double>& levels, Rng& rng) const {
        std::vector<Passage> out(levels.size(), Passage{std::numeric_limits<double>::quiet_NaN(), 0.0});
        std::size_t k = 0;
        Stepper step(delta_);
        double t = 0.0;
        double cur = x;
        double sigma = 0.0;
        while (k < levels.size() && levels[k] <= x) out[k++] = {0.0, 0.0};
        while (k < levels.size()) {
            const double h = step_size(cur);
            if (t + h > cfg_.max_time || sigma > cfg_.max_sigma) {
                for (; k < levels.size(); ++k) out[k].sigma = sigma;
                break;
            }
            const double next = step(cur, h, rng);
            const double seg = h * 0.5 * (powp(cur) + powp(next));
            bool bridged = false;
            while (k < levels.size()) {
                const double y = levels[k];
                if (next >= y - cfg_.hit_tol) {
                    const double frac = next == cur ? 1.0 : std::clamp((y - cur) / (next - cur), 0.0, 1.0);
                    out[k++] = {t + frac * h, sigma + frac * h * 0.5 * (powp(cur) + powp(y))};
                    continue;
                }
                if (!bridged) {
                    bridged = true;
                    const double pc = bridge_cross(cur, next, h, y);
                    if (pc > 0.0 && uniform_open(rng) <= pc) {
                        out[k++] = {t + 0.5 * h, sigma + 0.5 * h * 0.5 * (powp(cur) + powp(y))};
                        continue;
                    }
                }
                break;
            }
            sigma += seg;
            t += h;
            cur = next;
        }
        return out;
    }

private:
    BesqParams params_;
    PathConfig cfg_;
    double delta_;
};

template <class F>
void parallel_for(std::int64_t n, unsigned workers, F&& body) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::int64_t>(workers, n));
    if (workers <= 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::int64_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

void check_levels(const BesqParams& params, double x, double y) {
    laws::validate(params);
    if (!std::isfinite(x) || !std::isfinite(y)) throw NonFinite("levels must be finite");
    if (x < 0.0 || y < 0.0) throw DomainError("levels must be nonnegative");
}

} // namespace

Rng path_rng(std::uint64_t seed, std::uint64_t path_id) {
    std::uint64_t s = seed ^ splitmix(path_id);
    std::seed_seq seq{static_cast<std::uint32_t>(splitmix(s)), static_cast<std::uint32_t>(splitmix(s)),
                      static_cast<std::uint32_t>(splitmix(s)), static_cast<std::uint32_t>(splitmix(s))};
    return Rng(seq);
}

double besq_step(double x, double h, double delta, Rng& rng) {
    if (!std::isfinite(x) || !std::isfinite(h) || !std::isfinite(delta)) throw NonFinite("besq_step: non-finite input");
    if (x < 0.0 || !(h > 0.0) || delta < 0.0) throw DomainError("besq_step needs x >= 0, h > 0, delta >= 0");
    if (delta >= 1.0) {
        std::normal_distribution<double> normal;
        const double s = std::sqrt(x) + std::sqrt(h) * normal(rng);
        double v = s * s;
        if (delta > 1.0) v += 2.0 * h * std::gamma_distribution<double>(0.5 * (delta - 1.0))(rng);
        return v;
    }
    // noncentral chi-squared as a Poisson mixture of central ones
    long n = 0;
    if (x > 0.0) n = std::poisson_distribution<long>(x / (2.0 * h))(rng);
    const double shape = 0.5 * delta + static_cast<double>(n);
    if (shape == 0.0) return 0.0;
    const double v = 2.0 * h * std::gamma_distribution<double>(shape)(rng);
    if (!std::isfinite(v)) throw RngFailure("besq_step drew a non-finite value");
    return v;
}

PathBatch run_paths(const BesqParams& params, double x, double y, const PathConfig& cfg) {
    check_config(cfg);
    check_levels(params, x, y);
    laws::check_regime(params, x, y);
    const Walker walker(params, cfg);
    PathBatch batch;
    batch.paths.resize(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(cfg.n_paths, cfg.workers, [&](std::int64_t i) {
        Rng rng = path_rng(cfg.seed, static_cast<std::uint64_t>(i));
        batch.paths[static_cast<std::size_t>(i)] = walker.run(i, x, y, rng);
    });
    std::int64_t censored = 0;
    for (const auto& p : batch.paths) censored += p.censored ? 1 : 0;
    batch.censored_fraction = static_cast<double>(censored) / static_cast<double>(cfg.n_paths);
    return batch;
}

std::vector<std::vector<Passage>> run_passages(const BesqParams& params, double x, const std::vector<double>& levels,
                                               const PathConfig& cfg) {
    check_config(cfg);
    check_levels(params, x, x);
    if (!std::is_sorted(levels.begin(), levels.end())) throw DomainError("passage levels must be increasing");
    if (!levels.empty()) laws::check_regime(params, x, levels.back());
    const Walker walker(params, cfg);
    std::vector<std::vector<Passage>> out(static_cast<std::size_t>(cfg.n_paths));
    parallel_for(cfg.n_paths, cfg.workers, [&](std::int64_t i) {
        Rng rng = path_rng(cfg.seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = walker.ladder(x, levels, rng);
    });
    return out;
}

Estimate estimate(const PathBatch& batch, const std::function<double(const PathResult&)>& f,
                  const std::function<double(const PathResult&)>& bound) {
    Estimate e;
    e.n = static_cast<std::int64_t>(batch.paths.size());
    if (e.n == 0) return e;
    std::vector<double> vals(batch.paths.size(), 0.0);
    Sum sum;
    Sum cb;
    for (std::size_t i = 0; i < batch.paths.size(); ++i) {
        const auto& p = batch.paths[i];
        if (p.censored) {
            if (bound) cb.add(bound(p));
            continue;
        }
        vals[i] = f(p);
        sum.add(vals[i]);
    }
    const double n = static_cast<double>(e.n);
    e.value = sum.value() / n;
    Sum sq;
    for (double v : vals) sq.add((v - e.value) * (v - e.value));
    e.std_error = e.n > 1 ? std::sqrt(sq.value() / (n - 1.0) / n) : 0.0;
    e.censored_fraction = batch.censored_fraction;
    e.censor_bound = cb.value() / n;
    return e;
}

namespace {

// Beyond this the discount exp(-(lambda/2) Sigma) is below e^-40.
PathConfig discount_capped(PathConfig cfg, double lambda) {
    if (lambda > 0.0) cfg.max_sigma = std::min(cfg.max_sigma, 80.0 / lambda);
    return cfg;
}

} // namespace

Estimate estimate_laplace(const BesqParams& params, double x, double y, double lambda, const PathConfig& cfg) {
    if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
    const auto batch = run_paths(params, x, y, discount_capped(cfg, lambda));
    auto f = [lambda](const PathResult& p) { return std::exp(-0.5 * lambda * p.sigma); };
    return estimate(batch, f, f);
}

Estimate estimate_joint_max(const BesqParams& params, double x, double y, double lambda, double a,
                            const PathConfig& cfg) {
    if (!(lambda >= 0.0)) throw DomainError("lambda must be nonnegative");
    if (!((y <= x && x < a) || (a < x && x <= y))) throw OrientationError("barrier must satisfy y <= x < a or a < x <= y");
    const auto batch = run_paths(params, x, y, discount_capped(cfg, lambda));
    const bool is_max = a > x;
    auto f = [=](const PathResult& p) {
        const bool ok = is_max ? p.max_level < a : p.min_level > a;
        return ok ? std::exp(-0.5 * lambda * p.sigma) : 0.0;
    };
    return estimate(batch, f, f);
}

Estimate estimate_joint_r(const BesqParams& params, double x, double y, double lambda, double r,
                          const PathConfig& cfg) {
    if (!(lambda >= 0.0) || !(r >= 0.0)) throw DomainError("lambda and r must be nonnegative");
    PathConfig c = discount_capped(cfg, lambda);
    if (r > 0.0) c.max_time = std::min(c.max_time, 40.0 / r);
    const auto batch = run_paths(params, x, y, c);
    auto f = [=](const PathResult& p) { return std::exp(-r * p.hit_time - 0.5 * lambda * p.sigma); };
    auto bound = [=](const PathResult& p) { return std::exp(-r * c.max_time - 0.5 * lambda * p.sigma); };
    return estimate(batch, f, bound);
}

Estimate estimate_mean_sigma(const BesqParams& params, double x, double y, const PathConfig& cfg) {
    const auto batch = run_paths(params, x, y, cfg);
    if (batch.censored_majority()) throw CensoredMajority("more than half of the paths were censored");
    auto e = estimate(batch, [](const PathResult& p) { return p.sigma; });
    if (batch.censored_fraction > 0.0) e.censor_bound = std::numeric_limits<double>::infinity();
    return e;
}

BiasStudy bias_study(const BesqParams& params, double x, double y, double lambda, const std::vector<double>& h_list,
                     const PathConfig& cfg) {
    BiasStudy out;
    for (double h : h_list) {
        PathConfig c = cfg;
        c.h = h;
        const auto e = estimate_laplace(params, x, y, lambda, c);
        out.rows.push_back({h, e.value, e.std_error});
    }
    const std::size_t n = out.rows.size();
    if (n >= 3) {
        const auto& a = out.rows[n - 3];
        const auto& b = out.rows[n - 2];
        const auto& c = out.rows[n - 1];
        const double ratio = a.h / b.h;
        const double d1 = a.estimate - b.estimate;
        const double d2 = b.estimate - c.estimate;
        if (std::abs(ratio - b.h / c.h) < 1e-12 * ratio && d1 != 0.0 && d2 != 0.0 && d1 / d2 > 1.0) {
            out.order = std::log(d1 / d2) / std::log(ratio);
            out.intercept = c.estimate - d2 / (std::pow(ratio, out.order) - 1.0);
        }
    }
    if (!std::isfinite(out.intercept) && n >= 2) {
        // least squares in h
        Sum sh, se, shh, she;
        for (const auto& r : out.rows) {
            sh.add(r.h);
            se.add(r.estimate);
            shh.add(r.h * r.h);
            she.add(r.h * r.estimate);
        }
        const double m = static_cast<double>(n);
        const double den = m * shh.value() - sh.value() * sh.value();
        if (den != 0.0) {
            const double slope = (m * she.value() - sh.value() * se.value()) / den;
            out.intercept = (se.value() - slope * sh.value()) / m;
        }
    }
    return out;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_distance needs two nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

void write_csv(std::ostream& out, const PathBatch& batch) {
    out << "# schema besq-paths 1\n";
    out << "path_id,hit_time,sigma,max,min,censored\n";
    out.precision(17);
    for (const auto& p : batch.paths) {
        out << p.path_id << ',';
        if (!p.censored) out << p.hit_time;
        out << ',' << p.sigma << ',' << p.max_level << ',' << p.min_level << ',' << (p.censored ? 1 : 0) << '\n';
    }
}

} // namespace besq::simulate
