#include "besq/bessel.hpp"

#include "besq/errors.hpp"

#include <boost/math/special_functions/sin_pi.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>

namespace besq::bessel {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 20'000'000;
constexpr double kPi = std::numbers::pi;

// Taylor coefficients of 1/Gamma(1+x) about x = 0.
constexpr double kRecipGamma[] = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
    -2.2987456844353702066e-19,
};

struct TemmeGammas {
    double gam1;  // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
    double gam2;  // (1/G(1-mu) + 1/G(1+mu)) / 2
    double gampl; // 1/G(1+mu)
    double gammi; // 1/G(1-mu)
};

TemmeGammas temme_gammas(double mu) {
    const double mu2 = mu * mu;
    double even = 0.0;
    double odd = 0.0;
    double pw = 1.0;
    constexpr int n = static_cast<int>(std::size(kRecipGamma));
    for (int j = 0; j + 1 < n; j += 2) {
        even += kRecipGamma[j] * pw;
        odd += kRecipGamma[j + 1] * pw;
        pw *= mu2;
    }
    if (n % 2 == 1) even += kRecipGamma[n - 1] * pw;
    TemmeGammas g{};
    g.gam1 = -odd;
    g.gam2 = even;
    g.gampl = g.gam2 - mu * g.gam1;
    g.gammi = g.gam2 + mu * g.gam1;
    return g;
}

template <class T>
double mag(const T& v) {
    return std::abs(v);
}

template <class T>
constexpr bool is_real = std::is_same_v<T, double>;

[[noreturn]] void no_convergence(const char* what) {
    throw Error(std::string("bessel: ") + what + " failed to converge");
}

/// K_mu and K_{mu+1}/K_mu for |mu| <= 1/2.
// log K = lead + rest, with lead = -z (or 0) kept apart so large arguments
// lose no bits before the final sum.
template <class T>
struct KBase {
    T lead;
    T rest;
    T ratio;
};

// Temme's series, |z| <= 2.
template <class T>
KBase<T> k_base_temme(double mu, T z) {
    const T x2 = 0.5 * z;
    const double pimu = kPi * mu;
    const double fact = std::abs(pimu) < 1e-15 ? 1.0 : pimu / std::sin(pimu);
    const T d = -std::log(x2);
    const T e = mu * d;
    T fact2;
    if (mag(e) < 1e-3) {
        const T e2 = e * e;
        fact2 = 1.0 + e2 / 6.0 + e2 * e2 / 120.0;
    } else {
        fact2 = std::sinh(e) / e;
    }
    const TemmeGammas g = temme_gammas(mu);
    T ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
    T sum = ff;
    const T ee = std::exp(e);
    T p = 0.5 * ee / g.gampl;
    T q = 0.5 / (ee * g.gammi);
    T c = 1.0;
    const T dd = x2 * x2;
    T sum1 = p;
    const double mu2 = mu * mu;
    for (int i = 1;; ++i) {
        if (i > kMaxIter) no_convergence("Temme series");
        const double di = i;
        ff = (di * ff + p + q) / (di * di - mu2);
        c *= dd / di;
        p /= (di - mu);
        q /= (di + mu);
        const T del = c * ff;
        sum += del;
        const T del1 = c * (p - di * ff);
        sum1 += del1;
        if (mag(del) < mag(sum) * kEps && mag(del1) < mag(sum1) * kEps) break;
    }
    return {T(0.0), std::log(sum), 2.0 * sum1 / (z * sum)};
}

// Steed's continued fraction, |z| > 2.
template <class T>
KBase<T> k_base_steed(double mu, T z) {
    T b = 2.0 * (1.0 + z);
    T d = 1.0 / b;
    T h = d;
    T delh = d;
    T q1 = 0.0;
    T q2 = 1.0;
    const double a1 = 0.25 - mu * mu;
    T q = a1;
    T c = a1;
    double a = -a1;
    T s = 1.0 + q * delh;
    for (int i = 2;; ++i) {
        if (i > kMaxIter) no_convergence("Steed continued fraction");
        a -= 2.0 * (i - 1);
        c = -a * c / static_cast<double>(i);
        const T qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const T dels = q * delh;
        s += dels;
        if (mag(dels) < mag(s) * kEps) break;
    }
    h = a1 * h;
    const T rest = 0.5 * std::log(kPi / (2.0 * z)) - std::log(s);
    return {-z, rest, (mu + z + 0.5 - h) / z};
}

template <class T>
KBase<T> k_base(double mu, T z) {
    return mag(z) <= 2.0 ? k_base_temme(mu, z) : k_base_steed(mu, z);
}

template <class T>
struct KCore {
    T lead;
    T rest;     // log K_nu = lead + rest
    T ratio_up; // K_{nu+1} / K_nu
    T ratio_dn; // K_{nu-1} / K_nu
};

// nu >= 0.  Forward recurrence on ratios keeps everything overflow-free.
template <class T>
KCore<T> k_core(double nu, T z) {
    const int n = static_cast<int>(std::floor(nu + 0.5));
    const double mu = nu - n;
    const KBase<T> base = k_base(mu, z);
    T rest = base.rest;
    T r = base.ratio;
    T down{};
    if (n == 0) {
        down = k_base(-mu, z).ratio; // K_{1-mu}/K_{-mu}
    }
    for (int m = 1; m <= n; ++m) {
        rest += std::log(r);
        down = 1.0 / r;
        r = down + 2.0 * (mu + m) / z;
    }
    return {base.lead, rest, r, down};
}

// I_{nu+1}/I_nu by the continued fraction (modified Lentz).
template <class T>
T i_ratio_cf1(double nu, T z) {
    const T zi = 1.0 / z;
    T f = 2.0 * (nu + 1.0) * zi;
    if (mag(f) < kTiny) f = kTiny;
    T c = f;
    T d = 0.0;
    for (int k = 2;; ++k) {
        if (k > kMaxIter) no_convergence("I-ratio continued fraction");
        const T bk = 2.0 * (nu + k) * zi;
        d = bk + d;
        if (mag(d) < kTiny) d = kTiny;
        d = 1.0 / d;
        c = bk + 1.0 / c;
        if (mag(c) < kTiny) c = kTiny;
        const T delta = c * d;
        f *= delta;
        if (mag(delta - 1.0) < kEps) break;
    }
    return 1.0 / f;
}

// sum_k (-1)^k a_k(nu) / z^k of the large-argument expansion of I.
template <class T>
T hankel_i_sum(double nu, T z) {
    const double mu4 = 4.0 * nu * nu;
    T term = 1.0;
    T sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        const double odd = 2.0 * k - 1.0;
        const T next = -term * (mu4 - odd * odd) / (8.0 * k * z);
        if (mag(next) > mag(term) && k > nu) break;
        term = next;
        sum += term;
        if (mag(term) < kEps * mag(sum)) break;
    }
    return sum;
}

// Off the real axis the dropped e^{-z} companion is relatively e^{-2 Re z}.
template <class T>
bool use_hankel_i(double nu, T z) {
    const double nu1 = nu + 1.0;
    const double lim = std::max(40.0, nu1 * nu1);
    if constexpr (is_real<T>) {
        return z >= lim;
    } else {
        return z.real() >= 40.0 && std::abs(z) >= lim;
    }
}

template <class T>
struct ICore {
    T lead;
    T rest;
    T ratio; // I_{nu+1}/I_nu
};

// nu >= 0.
template <class T>
ICore<T> i_core(double nu, T z) {
    if (use_hankel_i(nu, z)) {
        const T s0 = hankel_i_sum(nu, z);
        const T s1 = hankel_i_sum(nu + 1.0, z);
        return {z, std::log(s0) - 0.5 * std::log(2.0 * kPi * z), s1 / s0};
    }
    const KCore<T> k = k_core(nu, z);
    const T r = i_ratio_cf1(nu, z);
    // Wronskian: I_nu K_{nu+1} + I_{nu+1} K_nu = 1/z.
    return {-k.lead, -std::log(z) - k.rest - std::log(k.ratio_up + r), r};
}

template <class T>
T log1p_exp(T d) {
    if constexpr (is_real<T>) {
        return std::log1p(std::exp(d));
    } else {
        return std::log(1.0 + std::exp(d));
    }
}

template <class T>
T log_i_any(double alpha, T z) {
    if (alpha >= 0.0) {
        const ICore<T> c = i_core(alpha, z);
        return c.lead + c.rest;
    }
    // I_{-mu} = I_mu + (2/pi) sin(pi mu) K_mu
    const double mu = -alpha;
    const double c = 2.0 / kPi * boost::math::sin_pi(mu);
    const ICore<T> ic = i_core(mu, z);
    if (c == 0.0) return ic.lead + ic.rest;
    const KCore<T> kc = k_core(mu, z);
    T a_lead = ic.lead, a_rest = ic.rest;
    T b_lead = kc.lead, b_rest = std::log(c) + kc.rest;
    if (std::real(b_lead + b_rest) > std::real(a_lead + a_rest)) {
        std::swap(a_lead, b_lead);
        std::swap(a_rest, b_rest);
    }
    return a_lead + (a_rest + log1p_exp<T>((b_lead - a_lead) + (b_rest - a_rest)));
}

template <class T>
T ratio_i_any(double alpha, T z) {
    if (alpha >= 0.0) return i_core(alpha, z).ratio;
    const ICore<T> up = i_core(alpha + 1.0, z);
    const double mu = -alpha;
    const double c = 2.0 / kPi * boost::math::sin_pi(mu);
    const ICore<T> ic = i_core(mu, z);
    if (c == 0.0) return std::exp(up.rest - ic.rest);
    const KCore<T> kc = k_core(mu, z);
    // I_{alpha+1}/I_{alpha} = 1 / (I_mu/I_{alpha+1} + c K_mu/I_{alpha+1})
    const T t1 = std::exp(ic.rest - up.rest);
    const T t2 = c * std::exp((kc.lead - up.lead) + (kc.rest - up.rest));
    return 1.0 / (t1 + t2);
}

template <class T>
T log_k_of(const KCore<T>& k) {
    return k.lead + k.rest;
}

template <class T>
T ratio_k_lower_any(double alpha, T z) {
    if (alpha >= 0.0) return k_core(alpha, z).ratio_dn;
    return k_core(-alpha, z).ratio_up;
}

// Power series of I_alpha(z)(z/2)^-alpha * Gamma(alpha+1); alpha > -1.
template <class T>
T reduced_series(double alpha, T z) {
    const T q = 0.25 * z * z;
    T term = 1.0;
    T sum = 1.0;
    for (int m = 1; m < 1000; ++m) {
        term *= q / (m * (m + alpha));
        sum += term;
        if (mag(term) < kEps * mag(sum)) break;
    }
    return sum;
}

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw NonFinite(std::string("bessel: non-finite ") + what);
}

void require_finite(cdouble v, const char* what) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw NonFinite(std::string("bessel: non-finite ") + what);
}

void require_i_order(double alpha) {
    require_finite(alpha, "order");
    if (alpha < -1.0) throw UnsupportedOrder("bessel_i: order below -1 is not supported");
}

void require_positive(double z) {
    require_finite(z, "argument");
    if (!(z > 0.0)) throw DomainError("bessel: argument must be positive");
}

void require_right_half(cdouble z) {
    require_finite(z, "argument");
    if (!(z.real() > 0.0) && !(z.real() == 0.0 && z.imag() != 0.0))
        throw DomainError("bessel: complex argument must satisfy Re z > 0");
}

} // namespace

double BesselEval::value() const {
    if (log_magnitude > std::log(std::numeric_limits<double>::max()))
        throw Overflow("bessel: value overflows double; use log_magnitude");
    return sign * std::exp(log_magnitude);
}

BesselEval bessel_i(Order order, double z) {
    const double alpha = order.alpha;
    require_i_order(alpha);
    require_finite(z, "argument");
    if (z < 0.0) throw DomainError("bessel_i: negative argument");
    if (z == 0.0) {
        if (alpha == 0.0) return {0.0, 1};
        if (alpha > 0.0 || alpha == -1.0)
            return {-std::numeric_limits<double>::infinity(), 1};
        throw Overflow("bessel_i: I_alpha(0) is infinite for negative non-integer order");
    }
    return {log_i_any(alpha, z), 1};
}

BesselEval bessel_k(Order order, double z) {
    require_finite(order.alpha, "order");
    require_positive(z);
    return {log_k_of(k_core(std::abs(order.alpha), z)), 1};
}

double log_derivative_i(Order order, double z) {
    require_i_order(order.alpha);
    require_positive(z);
    return order.alpha / z + ratio_i_any(order.alpha, z);
}

double log_derivative_k(Order order, double z) {
    require_finite(order.alpha, "order");
    require_positive(z);
    const double nu = std::abs(order.alpha);
    return -nu / z - k_core(nu, z).ratio_dn;
}

double ratio_i(Order order, double z) {
    require_i_order(order.alpha);
    require_positive(z);
    return ratio_i_any(order.alpha, z);
}

double ratio_k_lower(Order order, double z) {
    require_finite(order.alpha, "order");
    require_positive(z);
    return ratio_k_lower_any(order.alpha, z);
}

namespace {

thread_local double g_perturbation = 0.0;

} // namespace

ScopedArgumentPerturbation::ScopedArgumentPerturbation(double eps) : previous_(g_perturbation) {
    g_perturbation = eps;
}

ScopedArgumentPerturbation::~ScopedArgumentPerturbation() { g_perturbation = previous_; }

double log_i_reduced(Order order, double z) {
    z *= 1.0 + g_perturbation;
    const double alpha = order.alpha;
    require_finite(alpha, "order");
    if (alpha <= -1.0) throw UnsupportedOrder("log_i_reduced: order must exceed -1");
    require_finite(z, "argument");
    if (z < 0.0) throw DomainError("log_i_reduced: negative argument");
    if (z <= 1.0) return std::log(reduced_series(alpha, z)) - std::lgamma(alpha + 1.0);
    return log_i_any(alpha, z) - alpha * std::log(0.5 * z);
}

double log_k_reduced(Order order, double z) {
    z *= 1.0 + g_perturbation;
    const double alpha = std::abs(order.alpha);
    require_finite(alpha, "order");
    if (alpha == 0.0) throw UnsupportedOrder("log_k_reduced: order must be nonzero");
    require_finite(z, "argument");
    if (z < 0.0) throw DomainError("log_k_reduced: negative argument");
    if (z == 0.0) return std::lgamma(alpha) + (alpha - 1.0) * std::numbers::ln2;
    const auto k = k_core(alpha, z);
    return k.lead + (alpha * std::log(z) + k.rest);
}

cdouble log_bessel_i(Order order, cdouble z) {
    require_i_order(order.alpha);
    require_right_half(z);
    return log_i_any(order.alpha, z);
}

cdouble log_bessel_k(Order order, cdouble z) {
    require_finite(order.alpha, "order");
    require_right_half(z);
    return log_k_of(k_core(std::abs(order.alpha), z));
}

cdouble ratio_i(Order order, cdouble z) {
    require_i_order(order.alpha);
    require_right_half(z);
    return ratio_i_any(order.alpha, z);
}

cdouble ratio_k_lower(Order order, cdouble z) {
    require_finite(order.alpha, "order");
    require_right_half(z);
    return ratio_k_lower_any(order.alpha, z);
}

cdouble log_i_reduced(Order order, cdouble z) {
    z *= 1.0 + g_perturbation;
    const double alpha = order.alpha;
    require_finite(alpha, "order");
    if (alpha <= -1.0) throw UnsupportedOrder("log_i_reduced: order must exceed -1");
    require_finite(z, "argument");
    if (z == 0.0) return -std::lgamma(alpha + 1.0);
    if (std::abs(z) <= 1.0) return std::log(reduced_series(alpha, z)) - std::lgamma(alpha + 1.0);
    require_right_half(z);
    return log_i_any(alpha, z) - alpha * std::log(0.5 * z);
}

cdouble log_k_reduced(Order order, cdouble z) {
    z *= 1.0 + g_perturbation;
    const double alpha = std::abs(order.alpha);
    require_finite(alpha, "order");
    if (alpha == 0.0) throw UnsupportedOrder("log_k_reduced: order must be nonzero");
    require_finite(z, "argument");
    if (z == 0.0) return std::lgamma(alpha) + (alpha - 1.0) * std::numbers::ln2;
    require_right_half(z);
    const auto k = k_core(alpha, z);
    return k.lead + (alpha * std::log(z) + k.rest);
}

} // namespace besq::bessel
