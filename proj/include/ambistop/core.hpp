#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ambistop {

// Global tolerance for comparisons against region boundaries, in log-odds.
inline constexpr double kBoundaryTolZ = 1e-10;

// Regime/configuration errors the CLI maps to exit code 3.
struct UnsupportedRegime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Config/schema errors the CLI maps to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Log-likelihood ratio of a belief. Endpoints map to signed infinities,
// not errors: the limits p -> {0,1} appear in the Knightian analysis.
inline double log_odds(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(p) - std::log1p(-p);
}

inline double from_log_odds(double z) {
    if (z > 0) {
        const double e = std::exp(-z);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Payoffs of the two irreversible actions in the two states, plus the flow
// cost and the breakthrough arrival rate.
struct PayoffSpec {
    double u_r_R = 1.0;
    double u_l_R = 0.0;
    double u_r_L = 0.0;
    double u_l_L = 1.0;
    double c = 0.1;
    double lambda = 1.0;

    // payoff gaps across states for a fixed action
    double delta_l() const { return u_l_L - u_l_R; }
    double delta_r() const { return u_r_R - u_r_L; }
    // payoff gaps across actions for a fixed state
    double delta_R() const { return u_r_R - u_l_R; }
    double delta_L() const { return u_l_L - u_r_L; }

    double U_l(double p) const { return p * u_l_R + (1.0 - p) * u_l_L; }
    double U_r(double p) const { return p * u_r_R + (1.0 - p) * u_r_L; }
    double U(double p) const { return std::max(U_l(p), U_r(p)); }
    double U_mixed(double rho, double p) const {
        return rho * U_r(p) + (1.0 - rho) * U_l(p);
    }
    // payoff of the mixed action in a fixed state
    double u_state_R(double rho) const { return rho * u_r_R + (1.0 - rho) * u_l_R; }
    double u_state_L(double rho) const { return rho * u_r_L + (1.0 - rho) * u_l_L; }

    void validate() const {
        if (!(u_r_R > u_l_R)) throw ConfigError("PayoffSpec: require u_r_R > u_l_R");
        if (!(u_l_L > u_r_L)) throw ConfigError("PayoffSpec: require u_l_L > u_r_L");
        if (!(u_r_R > u_r_L)) throw ConfigError("PayoffSpec: require u_r_R > u_r_L");
        if (!(u_l_R < u_l_L)) throw ConfigError("PayoffSpec: require u_l_R < u_l_L");
        if (!(c > 0.0)) throw ConfigError("PayoffSpec: require c > 0");
        if (!(lambda > 0.0)) throw ConfigError("PayoffSpec: require lambda > 0");
        for (double v : {u_r_R, u_l_R, u_r_L, u_l_L, c, lambda})
            if (!std::isfinite(v)) throw ConfigError("PayoffSpec: non-finite field");
    }

    bool symmetric() const {
        return u_r_R == u_l_L && u_l_R == u_r_L;
    }
};

// Bayesian update of p after duration t without news: solves dp/dt = -lambda p(1-p).
inline double bayes_update(double p, double t, const PayoffSpec& spec) {
    if (t < 0.0) throw std::domain_error("bayes_update: negative duration");
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double num = p * std::exp(-spec.lambda * t);
    return num / (num + 1.0 - p);
}

// Time for the no-news drift to carry p down to p_target.
inline double drift_time(double p, double p_target, const PayoffSpec& spec) {
    if (!(p_target <= p)) throw std::domain_error("drift_time: p_target > p");
    if (!(p_target > 0.0 && p < 1.0)) throw std::domain_error("drift_time: beliefs outside (0,1)");
    return (log_odds(p) - log_odds(p_target)) / spec.lambda;
}

// Interval of posteriors, indexed by its upper endpoint (the "state") and the
// log-odds width. The width is invariant under simultaneous updating.
struct AmbiguityInterval {
    double p_bar = 0.5;
    double delta = 0.0;

    double p_lower() const { return from_log_odds(log_odds(p_bar) - delta); }
};

inline double p_lower(double p_bar, double delta) {
    return from_log_odds(log_odds(p_bar) - delta);
}
// Inverse map: the state whose lower endpoint is p_low.
inline double p_upper(double p_low, double delta) {
    return from_log_odds(log_odds(p_low) + delta);
}

// Indifference belief, hedging action weight and guaranteed stopping payoff.
struct StoppingPayoffs {
    double p_hat;
    double u_hat;
    double rho_hat;
};

inline StoppingPayoffs stopping_payoffs(const PayoffSpec& spec) {
    StoppingPayoffs s;
    s.p_hat = (spec.u_l_L - spec.u_r_L) / (spec.delta_l() + spec.delta_r());
    s.rho_hat = spec.delta_l() / (spec.delta_r() + spec.delta_l());
    s.u_hat = spec.U(s.p_hat);
    return s;
}

inline double c_bar(const PayoffSpec& spec) {
    return spec.lambda * spec.delta_R() * spec.delta_L() /
           (spec.delta_R() + spec.delta_L());
}

inline double c_lower(const PayoffSpec& spec) {
    return spec.delta_r() / (spec.delta_r() + spec.delta_l()) * c_bar(spec);
}

}  // namespace ambistop
