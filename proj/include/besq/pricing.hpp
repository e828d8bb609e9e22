#pragma once

// Prices of claims paid at R_y and discounted by exp(-rate * Sigma).

#include "besq/inversion.hpp"
#include "besq/laws.hpp"
#include "besq/simulate.hpp"

#include <string>
#include <vector>

namespace besq::pricing {

using laws::BesqParams;

enum class OptionKind { Digital, PutAccumulated, PutMaxRate };

struct OptionSpec {
    OptionKind kind = OptionKind::Digital;
    BesqParams params;
    double x = 0.0;
    double y = 0.0;
    /// log-threshold k for digitals, K for puts.
    double strike = 0.0;
    /// Discount exp(-rate * Sigma); 1 is the unit-rate model.
    double rate = 1.0;
};

struct PriceResult {
    double value = 0.0;
    /// Quadrature error estimate, or the inversion cross discrepancy when requested.
    double error = 0.0;
    std::string method;
};

/// D(k) = Q[1{rate Sigma <= k} exp(-rate Sigma)], inverted from
/// mu -> E[exp(-(mu + 1) rate Sigma)] / mu.
PriceResult price_digital(const OptionSpec& spec, const inversion::InversionConfig& cfg = {});

/// Q[exp(-rate Sigma)], the limit of D(k) as k -> inf.
double digital_limit(const OptionSpec& spec);

/// P(K) = int_0^{log K} e^u D(u) du = Q[(K exp(-rate Sigma) - 1)^+].
PriceResult price_put_accumulated(const OptionSpec& spec, const inversion::InversionConfig& cfg = {});

/// log P(K) from mu -> E[exp(-mu rate Sigma)] / (mu (mu - 1)) on a saddle-point
/// contour; reaches strikes where P underflows.
inversion::LogInversion log_put_accumulated(const OptionSpec& spec);

/// lim_{K -> 1} log K log P(K).
double small_strike_asymptote(const OptionSpec& spec);

struct StrikePoint {
    double log_strike;
    /// log K * log P(K).
    double value;
    /// True when P came from price_put_accumulated; false when the inverted
    /// digitals underflow and the saddle-point log price is used instead.
    bool from_quadrature;
};

std::vector<StrikePoint> small_strike_series(const OptionSpec& spec, const std::vector<double>& log_strikes,
                                             const inversion::InversionConfig& cfg = {});

/// Integrand of the max-rate put at barrier a: Q[1{max X < a} exp(-rate Sigma)].
double max_rate_integrand(const OptionSpec& spec, double a);

/// Q[exp(-rate Sigma) (K - max_{t <= R_y} X_t)^+] for y < x < K.
PriceResult price_put_max_rate(const OptionSpec& spec);

/// Both sides of the printed digital identity int_0^z e^u D(u) du = Q[Sigma <= z];
/// they differ in general and are reported, not reconciled.
struct DigitalIdentity {
    double lhs;
    double rhs;
};
DigitalIdentity digital_identity(const OptionSpec& spec, double z, const inversion::InversionConfig& cfg = {});

/// Monte Carlo value of the same claim.
simulate::Estimate price_mc(const OptionSpec& spec, const simulate::PathConfig& cfg);

PriceResult price(const OptionSpec& spec, const inversion::InversionConfig& cfg = {});

} // namespace besq::pricing
