#pragma once

#include <vector>

#include "ambistop/equilibrium.hpp"

namespace ambistop {

// Strategy value at (p, state) recovered by direct quadrature of the
// payoff integral along the deterministic state path; independent of the
// closed-form segment representation it is used to check.
double value_by_quadrature(const EquilibriumSolution& sol, double p, double p_bar0);

// Saddle-point HJB functional G evaluated with left-limit value derivatives.
double hjb_G(const EquilibriumSolution& sol, double m, double nu, double rho,
             double p, double z_state);

struct HjbReport {
    double g_at_policy = 0.0;        // G(sigma(pbar), pi(pbar))
    double max_over_controls = 0.0;  // max of G over the control grid at pi
    double min_over_nature = 0.0;    // min of G over nature's candidates at sigma
    bool ok(double tol = 1e-6) const {
        return std::abs(g_at_policy) < tol && max_over_controls < g_at_policy + tol &&
               min_over_nature > g_at_policy - tol;
    }
};

HjbReport hjb_residual(const EquilibriumSolution& sol, double p_bar,
                       bool full_nature_grid = false, int nature_points = 41);

// Discrete-time epsilon-commitment solver: backward induction over a uniform
// log-odds grid, each stage a 3x2 zero-sum game (stop-l / stop-r / continue
// against nature's interval corners; payoffs are affine in nature's belief).
struct DiscreteGameGrid {
    double dt = 1e-3;
    double z_lo = 0.0, z_hi = 0.0;  // derived from the solution when equal
    bool full_nature_grid = false;
    int nature_points = 21;
};

struct DiscreteSolution {
    std::vector<double> z;       // states (log-odds)
    std::vector<double> value;   // stage saddle value
    std::vector<double> v_R, v_L;
    std::vector<double> w_stop_l, w_stop_r, w_cont;
    double max_exchange_gap = 0.0;  // max |maxmin - minmax| over stages
    double band_lo = std::numeric_limits<double>::quiet_NaN();
    double band_hi = std::numeric_limits<double>::quiet_NaN();
    bool band_empty() const { return !(band_lo == band_lo); }
};

DiscreteSolution discrete_saddle_solve(const PayoffSpec& spec, double delta,
                                       DiscreteGameGrid grid = {});

// Closed-form saddle value V(pi(pbar), pbar) for comparison against the
// discrete table.
double closed_form_saddle_value(const EquilibriumSolution& sol, double p_bar);

}  // namespace ambistop
