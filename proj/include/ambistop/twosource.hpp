#pragma once

#include <optional>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/equilibrium.hpp"

namespace ambistop {

// Symmetric two-news-source model: payoff delta on the diagonal, zero off it.
struct TwoSourceSpec {
    double delta_payoff = 1.0;
    double c = 0.2;
    double lambda = 1.0;

    PayoffSpec embedded() const {
        return {delta_payoff, 0.0, 0.0, delta_payoff, c, lambda};
    }
    void validate() const {
        if (!(delta_payoff > 0.0)) throw ConfigError("TwoSourceSpec: delta must be > 0");
        if (!(c > 0.0) || !(lambda > 0.0))
            throw ConfigError("TwoSourceSpec: require c > 0 and lambda > 0");
    }
    double c_bar2() const { return lambda * delta_payoff / 2.0; }
    double c_lower_star() const { return lambda * delta_payoff / (1.0 + std::exp(2.0)); }
    double u_split() const { return delta_payoff - 2.0 * c / lambda; }
    double u_hat() const { return delta_payoff / 2.0; }
};

enum class TwoSourceAction { StopL, StopR, SeekR, SeekL, Split, HedgeAction };

// Attention share alpha to the R-evidence source plus the usual policy data.
struct AttentionPolicy {
    TwoSourceAction action = TwoSourceAction::Split;
    double alpha = 0.5;
    double m = 0.0;
    double nu = 0.0;
    double rho = std::numeric_limits<double>::quiet_NaN();
    double pi = 0.5;
};

// Bayesian two-source benchmark computed by discrete-time value iteration
// over attention levels {0, 1/2, 1}; boundaries located at policy switches.
struct TwoSourceBayes {
    TwoSourceSpec spec;
    double dt = 5e-4;
    std::vector<double> z;     // log-odds grid
    std::vector<double> V;
    std::vector<int> action;   // index into {StopL, SeekR(a=1), Split, SeekL(a=0), StopR}
    bool low_cost = false;
    double p_l_B = 0, p_L_B = 0, p_R_B = 0, p_r_B = 0;  // inner pair NaN when not low cost
    double value_at(double p) const;
    TwoSourceAction action_at(double p) const;
};

TwoSourceBayes bayes_two_source(const TwoSourceSpec& spec, double dt = 5e-4);

AttentionPolicy bayes_policy_at(const TwoSourceBayes& bayes, double p);

// (p_minus, p_plus) band edges of Theorem 5; empty when the hedging level
// already exceeds the segment value at 1/2.
std::optional<std::pair<double, double>> p_plus_minus(const TwoSourceSpec& spec);

// Region-3 machinery reused with boundary (1/2, Phi*(1/2)).
double two_source_vhat(const TwoSourceSpec& spec, double p_bar);
double two_source_nu(const TwoSourceSpec& spec, double p_bar);
double two_source_pi(const TwoSourceSpec& spec, double p_bar);

AttentionPolicy two_source_equilibrium(double p_bar, double delta_amb,
                                       const TwoSourceSpec& spec);

// Split-attention absorption: evolve the posterior interval under alpha=1/2
// until evidence arrives; absent evidence the interval never moves.
struct SplitSimStep {
    double p_lo, p_hi;
    bool evidence = false;
};
std::vector<SplitSimStep> simulate_split_attention(const TwoSourceSpec& spec,
                                                   double p_lo, double p_hi,
                                                   double theta_true, double dt,
                                                   int n_steps, std::uint64_t seed);

}  // namespace ambistop
