#pragma once

#include <optional>

#include "ambistop/core.hpp"

namespace ambistop {

enum class BayesCase { Case1, Case2, NoExperimentation };

// Value of experimenting from belief p until it drifts to p_stop (collecting
// stop_value there), taking action r on a breakthrough. Closed-form solution
// of c = lambda p (u_r_R - phi) + phi' eta(p).
double phi(double p, double p_stop, double stop_value, const PayoffSpec& spec);
double phi_dp(double p, double p_stop, double stop_value, const PayoffSpec& spec);
double phi_dpp(double p, const PayoffSpec& spec);

// Left Bayesian stopping boundary c/(lambda (u_r_R - u_l_R)).
// Empty when the experimentation region is empty (c >= c_bar).
std::optional<double> left_boundary(const PayoffSpec& spec);

// Bayesian benchmark: boundaries, cost threshold, minimizer and case tag.
struct BayesBenchmark {
    PayoffSpec spec;
    BayesCase kind = BayesCase::NoExperimentation;
    double p_l_B = std::numeric_limits<double>::quiet_NaN();
    double p_r_B = std::numeric_limits<double>::quiet_NaN();
    double c_bar = std::numeric_limits<double>::quiet_NaN();
    double p_star = std::numeric_limits<double>::quiet_NaN();
    double phi_at_p_star = std::numeric_limits<double>::quiet_NaN();

    bool experimentation() const { return kind != BayesCase::NoExperimentation; }

    // Phi: value of the optimal stop-left experimentation plan (U_l below p_l_B).
    double Phi(double p) const;
    double Phi_prime(double p) const;
    double Phi_second(double p) const;
    // Phi* = max(Phi, U_r); equals U when there is no experimentation.
    double PhiStar(double p) const;
};

BayesBenchmark solve_bayesian(const PayoffSpec& spec);

// (p_r_B, c_bar); p_r_B empty when c >= c_bar.
std::pair<std::optional<double>, double> right_boundary_and_cbar(const PayoffSpec& spec);

}  // namespace ambistop
