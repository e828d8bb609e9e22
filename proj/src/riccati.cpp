#include "besq/errors.hpp"
#include "besq/laws.hpp"
#include "laws_detail.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <sstream>

// Joint transform of (R_y, Sigma).  With h = v'/v and t = log x the
// second-order equation 2x v'' + b(x) v' = r v becomes the Riccati system
//   dh/dt = (r - b h)/2 - x h^2,   dJ/dt = x h,   J = log v.
// The decreasing solution is recessive when integrated towards 0, the
// increasing one when integrated away from 0, so both runs are stable.

namespace besq::laws {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 2>;

constexpr double kTol = 1e-12;
constexpr double kDecayTarget = 40.0;

struct Riccati {
    const BesqParams& params;
    double lambda;
    double r;
    Branch branch;

    double drift(double x) const { return detail::tilted_drift(params, x, lambda, branch); }

    void operator()(const State& s, State& ds, double t) const {
        const double x = std::exp(t);
        const double b = drift(x);
        ds[0] = 0.5 * (r - b * s[0]) - x * s[0] * s[0];
        ds[1] = x * s[0];
    }
};

void check_state(const State& s, const char* where) {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1])) {
        std::ostringstream msg;
        msg << "joint transform ODE diverged " << where;
        throw OdeFailure(msg.str());
    }
}

void advance(const Riccati& sys, State& s, double t0, double t1) {
    if (t0 == t1) return;
    auto stepper = odeint::make_controlled(kTol, kTol, odeint::runge_kutta_dopri5<State>());
    const double dt = (t1 > t0 ? 1.0 : -1.0) * std::min(0.01, std::abs(t1 - t0));
    try {
        odeint::integrate_adaptive(stepper, sys, s, t0, t1, dt);
    } catch (const std::exception& e) {
        throw OdeFailure(std::string("joint transform ODE: ") + e.what());
    }
    check_state(s, "during integration");
}

// Phi(x)/Phi(y) for y < x, Phi the decreasing solution.
double decreasing_ratio(const Riccati& sys, double x, double y) {
    // march outward until the two local exponents have separated enough
    double t_start = std::log(x);
    double t = t_start;
    double acc = 0.0;
    const double dt = 0.25;
    while (acc < kDecayTarget || t < t_start + 1.0) {
        const double xx = std::exp(t);
        const double b = sys.drift(xx);
        acc += 0.5 * std::sqrt(b * b + 8.0 * xx * sys.r) * dt;
        t += dt;
        if (t > 650.0) throw OdeFailure("joint transform: no decaying regime found for the decreasing solution");
    }
    const double x_max = std::exp(t);
    const double b = sys.drift(x_max);
    State s{(-b - std::sqrt(b * b + 8.0 * x_max * sys.r)) / (4.0 * x_max), 0.0};
    advance(sys, s, t, std::log(x));
    const double j_x = s[1];
    double j_y;
    if (y > 0.0) {
        advance(sys, s, std::log(x), std::log(y));
        j_y = s[1];
    } else {
        // near 0, h = A x^(e-1) + r/b(0) + ..., e = 1 - b(0)/2 > 0; integrate that below x0
        const double x0 = 1e-14 * x;
        advance(sys, s, std::log(x), std::log(x0));
        const double b0 = sys.drift(0.0);
        const double e = 1.0 - 0.5 * b0;
        const double reg = sys.r / b0;
        j_y = s[1] - ((s[0] - reg) * x0 / e + reg * x0);
    }
    return std::exp(j_x - j_y);
}

// Psi(x)/Psi(y) for x < y, Psi the increasing solution regular at 0.
double increasing_ratio(const Riccati& sys, double x, double y) {
    const double b0 = sys.drift(0.0);
    if (!(b0 > 0.0)) throw RegimeViolation("joint transform on the upward branch requires nu > -1");
    const double x0 = 1e-14 * (x > 0.0 ? x : y);
    State s{sys.r / b0, sys.r / b0 * x0};
    double j_x = 0.0;
    double t = std::log(x0);
    if (x > 0.0) {
        advance(sys, s, t, std::log(x));
        t = std::log(x);
        j_x = s[1];
    }
    advance(sys, s, t, std::log(y));
    return std::exp(j_x - s[1]);
}

} // namespace

double joint_r_sigma_laplace(const SigmaQuery& q, double r) {
    detail::require_finite(r, "r");
    if (r < 0.0) throw DomainError("r must be nonnegative");
    const double base = laplace_sigma(q);
    if (r == 0.0 || q.x == q.y) return base;
    const Branch br = branch_for(q.x, q.y);
    const Riccati sys{q.params, q.lambda, r, br};
    const double ratio = br == Branch::K ? decreasing_ratio(sys, q.x, q.y) : increasing_ratio(sys, q.x, q.y);
    return base * ratio;
}

} // namespace besq::laws
