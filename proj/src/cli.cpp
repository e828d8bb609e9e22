#include "besq/cli.hpp"

#include "besq/asymptotics.hpp"
#include "besq/errors.hpp"
#include "besq/inversion.hpp"
#include "besq/laws.hpp"
#include "besq/pricing.hpp"
#include "besq/simulate.hpp"
#include "besq/validate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace besq::cli {

namespace {

using json = nlohmann::ordered_json;

struct Common {
    std::optional<double> nu;
    std::optional<double> delta;
    double p = 0.0;
    double x = 0.0;
    double y = 1.0;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* app, Common& c) {
    auto* nu = app->add_option("--nu", c.nu, "index nu >= -1");
    auto* delta = app->add_option("--delta", c.delta, "dimension delta = 2(nu + 1)");
    (void)nu;
    (void)delta;
    app->add_option("--p", c.p, "power in Sigma = int X^p ds")->capture_default_str();
    app->add_option("--x", c.x, "start level")->capture_default_str();
    app->add_option("--y", c.y, "target level")->capture_default_str();
    app->add_option("--out", c.out, "write data here instead of stdout");
}

laws::BesqParams params_of(const Common& c) {
    if (!c.nu && !c.delta) throw UsageError("one of --nu or --delta is required");
    double nu = c.nu ? *c.nu : 0.5 * *c.delta - 1.0;
    if (c.nu && c.delta && std::abs(*c.delta - 2.0 * (*c.nu + 1.0)) > 1e-12 * std::max(1.0, std::abs(*c.delta)))
        throw UsageError("--nu and --delta disagree; delta must equal 2(nu + 1)");
    laws::BesqParams pr{nu, c.p};
    laws::validate(pr);
    return pr;
}

std::uint64_t require_seed(const Common& c) {
    if (!c.seed) throw UsageError("this command draws random paths; --seed is required");
    return *c.seed;
}

json manifest(const std::string& command, const Common& c, const laws::BesqParams& pr, json extra) {
    json m;
    m["command"] = command;
    m["tool_version"] = kVersion;
    m["nu"] = pr.nu;
    m["delta"] = pr.delta();
    m["p"] = pr.p;
    m["x"] = c.x;
    m["y"] = c.y;
    for (auto& [k, v] : extra.items()) m[k] = v;
    if (c.seed) m["seed"] = *c.seed;
    return m;
}

// Writes to --out when given, else to the command's stdout.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot open output file " + path);
            stream_ = &file_;
        }
        *stream_ << std::setprecision(17);
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void csv_header(std::ostream& o, const std::string& schema, const json& m) {
    o << "# schema besq-" << schema << ' ' << kSchemaVersion << '\n';
    o << "# manifest " << m.dump() << '\n';
}

std::vector<double> lambda_values(const std::vector<double>& lambdas, const std::vector<double>& ss,
                                  const std::string& grid) {
    std::vector<double> v = lambdas;
    for (double s : ss) v.push_back(2.0 * s);
    if (!grid.empty()) {
        double lo = 0.0;
        double hi = 0.0;
        int n = 0;
        char c1 = 0;
        char c2 = 0;
        std::istringstream in(grid);
        if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':')
            throw UsageError("--grid expects lo:hi:n");
        if (n == 1) {
            v.push_back(lo);
        } else {
            const auto g = asymptotics::geometric_grid(lo, hi, n);
            v.insert(v.end(), g.begin(), g.end());
        }
    }
    if (v.empty()) throw UsageError("give --lambda, --s or --grid");
    return v;
}

inversion::InversionConfig inversion_config(const std::string& method, int order, bool cross) {
    inversion::InversionConfig cfg;
    if (method == "talbot") {
        cfg.method = inversion::Method::Talbot;
    } else if (method == "gs" || method == "gaver-stehfest") {
        cfg.method = inversion::Method::GaverStehfest;
    } else {
        throw UsageError("--method must be talbot or gs");
    }
    cfg.order = order;
    if (cross) cfg.cross_tolerance = 1e-6;
    return cfg;
}

simulate::PathConfig path_config(std::int64_t paths, double step, std::uint64_t seed, double max_time) {
    simulate::PathConfig c;
    c.n_paths = paths;
    c.h = step;
    c.seed = seed;
    c.max_time = max_time;
    c.track_extremes = false;
    return c;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Laws of int_0^{R_y} X^p ds for squared Bessel processes", "besq"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    // laplace
    Common lc;
    std::vector<double> lambdas;
    std::vector<double> ss;
    std::string grid;
    std::string kind = "sigma";
    std::optional<double> barrier;
    double r_rate = 0.0;
    auto* laplace = app.add_subcommand("laplace", "evaluate closed-form transforms, one CSV row per lambda");
    add_common(laplace, lc);
    laplace->add_option("--lambda", lambdas, "transform argument(s) in E[exp(-(lambda/2) Sigma)]");
    laplace->add_option("--s", ss, "argument(s) in E[exp(-s Sigma)]; lambda = 2s");
    laplace->add_option("--grid", grid, "geometric lambda grid lo:hi:n");
    laplace->add_option("--kind", kind, "sigma | hitting | joint-max | joint-r")->capture_default_str();
    laplace->add_option("--barrier", barrier, "barrier a for joint-max");
    laplace->add_option("--r", r_rate, "rate on R_y for joint-r")->capture_default_str();

    // price
    Common pc;
    std::string pkind = "digital";
    double strike = 0.0;
    double rate = 1.0;
    std::string method = "talbot";
    int order = 0;
    bool cross = false;
    bool mc_check = false;
    std::int64_t paths = 20000;
    double step = 1e-3;
    double max_time = 1e3;
    auto* price = app.add_subcommand("price", "price a claim paid at R_y; JSON report");
    add_common(price, pc);
    price->add_option("--kind", pkind, "digital | put | maxput")->capture_default_str();
    price->add_option("--strike", strike, "log-threshold k (digital) or K (puts)")->required();
    price->add_option("--rate", rate, "discount exp(-rate Sigma)")->capture_default_str();
    price->add_option("--method", method, "talbot | gs")->capture_default_str();
    price->add_option("--order", order, "Talbot nodes or Gaver-Stehfest order; 0 = default");
    price->add_flag("--cross-check", cross, "run both inversions and fail above 1e-6 disagreement");
    price->add_flag("--mc-check", mc_check, "add a Monte Carlo estimate and standard error");
    price->add_option("--paths", paths, "Monte Carlo paths")->capture_default_str();
    price->add_option("--step", step, "Monte Carlo time step")->capture_default_str();
    price->add_option("--max-time", max_time, "Monte Carlo censoring horizon")->capture_default_str();
    price->add_option("--seed", pc.seed, "random seed (required with --mc-check)");

    // validate
    double perturb = 0.0;
    bool no_jumps = false;
    std::string vout;
    auto* val = app.add_subcommand("validate", "run the identity suite; CSV of per-identity residuals");
    val->add_option("--perturb-bessel", perturb, "relative perturbation of Bessel kernel arguments");
    val->add_flag("--no-jumps", no_jumps, "skip the jump-density checks");
    val->add_option("--out", vout, "write the report here instead of stdout");

    // experiment
    Common ec;
    std::string which;
    std::int64_t epaths = 200;
    double estep = 1e-3;
    double y_max = 1e3;
    double elambda = 2.0;
    std::vector<double> steps{4e-2, 2e-2, 1e-2, 5e-3};
    auto* exp = app.add_subcommand("experiment", "smallball | lil | bias-study series as CSV");
    add_common(exp, ec);
    exp->add_option("which", which, "smallball | lil | bias-study")->required();
    exp->add_option("--paths", epaths, "paths (lil, bias-study)")->capture_default_str();
    exp->add_option("--step", estep, "time step (lil)")->capture_default_str();
    exp->add_option("--y-max", y_max, "last level (lil)")->capture_default_str();
    exp->add_option("--lambda", elambda, "transform argument (bias-study)")->capture_default_str();
    exp->add_option("--steps", steps, "step ladder (bias-study)");
    exp->add_option("--seed", ec.seed, "random seed (lil, bias-study)");

    const auto t0 = std::chrono::steady_clock::now();
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << '\n';
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    }

    int status = 0;
    try {
        if (laplace->parsed()) {
            const auto pr = params_of(lc);
            const auto lams = lambda_values(lambdas, ss, grid);
            json extra;
            extra["kind"] = kind;
            if (barrier) extra["barrier"] = *barrier;
            if (kind == "joint-r") extra["r"] = r_rate;
            std::vector<double> values;
            for (double lam : lams) {
                const laws::SigmaQuery q{pr, lc.x, lc.y, lam};
                if (kind == "sigma") {
                    values.push_back(laws::laplace_sigma(q));
                } else if (kind == "hitting") {
                    values.push_back(laws::laplace_hitting_time(pr.nu, lc.x, lc.y, lam));
                } else if (kind == "joint-max") {
                    if (!barrier) throw UsageError("joint-max needs --barrier");
                    values.push_back(laws::joint_max_laplace({q, *barrier}));
                } else if (kind == "joint-r") {
                    values.push_back(laws::joint_r_sigma_laplace(q, r_rate));
                } else {
                    throw UsageError("--kind must be sigma, hitting, joint-max or joint-r");
                }
            }
            Sink sink(lc.out, out);
            csv_header(*sink, "laplace", manifest("laplace", lc, pr, extra));
            *sink << "index,lambda,s,value\n";
            for (std::size_t i = 0; i < lams.size(); ++i)
                *sink << i << ',' << lams[i] << ',' << 0.5 * lams[i] << ',' << values[i] << '\n';
        } else if (price->parsed()) {
            const auto pr = params_of(pc);
            pricing::OptionSpec spec{pricing::OptionKind::Digital, pr, pc.x, pc.y, strike, rate};
            if (pkind == "put") {
                spec.kind = pricing::OptionKind::PutAccumulated;
            } else if (pkind == "maxput") {
                spec.kind = pricing::OptionKind::PutMaxRate;
            } else if (pkind != "digital") {
                throw UsageError("--kind must be digital, put or maxput");
            }
            if (mc_check) (void)require_seed(pc);
            const auto icfg = inversion_config(method, order, cross);
            const auto res = pricing::price(spec, icfg);
            json extra;
            extra["kind"] = pkind;
            extra["strike"] = strike;
            extra["rate"] = rate;
            extra["method"] = method;
            extra["order"] = order;
            if (mc_check) {
                extra["paths"] = paths;
                extra["step"] = step;
                extra["max_time"] = max_time;
            }
            json doc;
            doc["schema_version"] = kSchemaVersion;
            doc["manifest"] = manifest("price", pc, pr, extra);
            doc["price"] = res.value;
            doc["error_estimate"] = res.error;
            doc["method"] = res.method;
            if (spec.kind != pricing::OptionKind::PutMaxRate) doc["no_exercise_limit"] = pricing::digital_limit(spec);
            if (mc_check) {
                const auto e = pricing::price_mc(spec, path_config(paths, step, *pc.seed, max_time));
                json m;
                m["estimate"] = e.value;
                m["std_error"] = e.std_error;
                m["z"] = e.std_error > 0.0 ? (e.value - res.value) / e.std_error : 0.0;
                m["censored_fraction"] = e.censored_fraction;
                m["censor_bound"] = e.censor_bound;
                doc["mc"] = m;
            }
            Sink sink(pc.out, out);
            *sink << doc.dump(2) << '\n';
        } else if (val->parsed()) {
            validate::SuiteOptions o;
            o.bessel_perturbation = perturb;
            o.include_jumps = !no_jumps;
            const auto res = validate::run_suite(o);
            json m;
            m["command"] = "validate";
            m["tool_version"] = kVersion;
            m["perturb_bessel"] = perturb;
            m["jumps"] = !no_jumps;
            Sink sink(vout, out);
            csv_header(*sink, "validate", m);
            *sink << "check,points,max_residual,tolerance,pass\n";
            for (const auto& r : res) {
                *sink << '"' << r.name << "\"," << r.points << ',' << r.max_residual << ',' << r.tolerance << ','
                      << (r.pass ? "true" : "false") << '\n';
                if (!r.pass) {
                    err << "FAILED " << r.name << ": residual " << r.max_residual << " > " << r.tolerance << '\n';
                    status = 1;
                }
            }
        } else if (exp->parsed()) {
            const auto pr = params_of(ec);
            json extra;
            extra["experiment"] = which;
            if (which == "smallball") {
                Sink sink(ec.out, out);
                const auto t = asymptotics::small_ball_targets(pr, ec.x, ec.y);
                csv_header(*sink, "smallball", manifest("experiment", ec, pr, extra));
                *sink << "series,abscissa,value,target,stable\n";
                for (const auto& pt : asymptotics::lt_rate_empirical(pr, ec.x, ec.y))
                    *sink << "lambda-rate," << pt.lambda << ',' << pt.rate << ',' << t.lt_rate << ",true\n";
                if (pr.p > 0.0)
                    for (const auto& pt : asymptotics::tauberian_series(pr, ec.x, ec.y))
                        *sink << "eps-log-cdf," << pt.eps << ',' << pt.value << ',' << -t.sb_constant << ','
                              << (pt.stable ? "true" : "false") << '\n';
            } else if (which == "lil") {
                const auto seed = require_seed(ec);
                if (ec.x != 0.0) throw UsageError("the LIL experiment starts at x = 0");
                auto cfg = path_config(epaths, estep, seed, 1e6);
                cfg.level_scaled_step = true;
                extra["paths"] = epaths;
                extra["step"] = estep;
                extra["y_max"] = y_max;
                const auto grid_y = asymptotics::lil_grid(y_max);
                const auto r = asymptotics::lil_experiment(pr, cfg, grid_y);
                if (r.qualitative) err << "note: nu < 0 LIL runs are qualitative only\n";
                Sink sink(ec.out, out);
                csv_header(*sink, "lil", manifest("experiment", ec, pr, extra));
                *sink << "path_id,y,ratio\n";
                for (std::size_t i = 0; i < r.ratio.size(); ++i)
                    for (std::size_t k = 0; k < grid_y.size(); ++k)
                        *sink << i << ',' << grid_y[k] << ',' << r.ratio[i][k] << '\n';
                *sink << "# summary median=" << r.median << " q10=" << r.q10 << " q90=" << r.q90
                      << " target=" << r.target << " censored=" << r.censored_fraction << '\n';
            } else if (which == "bias-study") {
                const auto seed = require_seed(ec);
                extra["paths"] = epaths;
                extra["lambda"] = elambda;
                extra["steps"] = steps;
                const auto s = simulate::bias_study(pr, ec.x, ec.y, elambda, steps, path_config(epaths, 0.0, seed, 1e3));
                Sink sink(ec.out, out);
                csv_header(*sink, "bias-study", manifest("experiment", ec, pr, extra));
                *sink << "h,estimate,std_error\n";
                for (const auto& row : s.rows) *sink << row.h << ',' << row.estimate << ',' << row.std_error << '\n';
                *sink << "# summary order=" << s.order << " intercept=" << s.intercept
                      << " exact=" << laws::laplace_sigma({pr, ec.x, ec.y, elambda}) << '\n';
            } else {
                throw UsageError("experiment must be smallball, lil or bias-study");
            }
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const RegimeViolation& e) {
        err << "regime error: " << e.what() << '\n';
        return 2;
    } catch (const OrientationError& e) {
        err << "regime error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const NonFinite& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const UnsupportedOrder& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 3;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    err << "elapsed " << std::fixed << std::setprecision(3) << secs << " s\n";
    return status;
}

} // namespace besq::cli
