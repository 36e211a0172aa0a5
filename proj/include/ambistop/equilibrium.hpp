#pragma once

#include <optional>

#include "ambistop/bayesian.hpp"
#include "ambistop/core.hpp"

namespace ambistop {

enum class CostRegime { Low, Intermediate, High };

// Strategy at one state: instantaneous stopping probability m, stopping rate
// nu, action mix rho (unset when m = nu = 0, mirroring the theorem's
// "rho unspecified"), nature's worst-case belief pi, and the region tag 1..5.
struct PolicyPoint {
    double m = 0.0;
    double nu = 0.0;
    std::optional<double> rho;
    double pi = 0.0;
    int region = 0;
};

// The affine map p -> V(p, p_bar) restricted to the posterior interval.
struct ValueSegment {
    double v_at_lower = 0.0;
    double v_at_upper = 0.0;
};

// Value function and its partial left limits at a state, as used by the
// saddle-point HJB functional.
struct ValueDerivs {
    double v = 0.0;
    double v_p = 0.0;
    double v_pbar = 0.0;
};

// lower/higher roots of (u_r_R - u)(u_l_L - u) = (c/lambda) delta_l
std::pair<double, double> u_roots(const PayoffSpec& spec);

// Intrapersonal equilibrium of the Poisson model: region boundaries, cached
// closed-form coefficients, and policy/value query surface. Boundaries are
// kept in log-odds (z*) as the canonical representation; probabilities can
// degenerate to 0/1 for extreme widths.
struct EquilibriumSolution {
    PayoffSpec spec;
    BayesBenchmark bayes;
    StoppingPayoffs hat;
    double delta = 0.0;            // width actually used (capped)
    double delta_requested = 0.0;
    bool knightian_capped = false;

    CostRegime regime = CostRegime::Low;
    BayesCase kind = BayesCase::Case1;
    bool region3_empty = true;
    bool variant_b = false;        // Delta > Delta_c branch (hedged fourth region)
    bool at_delta_c = false;
    double delta_c = std::numeric_limits<double>::infinity();

    double z1 = 0, z2 = 0, z3 = 0, z4 = 0;
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0;

    double u1 = 0, u2 = 0;
    double C_coef = 0;             // integration constant of Vhat
    double v_dstar = 0;            // v** = Vhat(p3)
    double p_dstar = 0, z_dstar = 0;  // p** of the auxiliary problem
    double m_atom_p2 = 0.0;        // Case 2 atom at p2

    // Region-3 value and policy pieces (defined for z >= z2).
    double vhat_z(double z) const;
    double vhat(double p_bar) const { return vhat_z(log_odds(p_bar)); }
    double vhat_prime_z(double z) const;  // d Vhat / dz
    double nu_star(double p_bar) const;
    double pi_star(double p_bar) const;

    // Region-4 auxiliary stopping problem.
    double psi(double p) const;
    double psi_prime(double p) const;
    double psi_second(double p) const;
    double q_llr(double z_state) const { return z_state - z3 + z_dstar; }

    // Region of a state: policy semantics (boundaries resolved per theorem).
    int region_of(double z_state) const;
    // Region governing the left limit of the value function at z_state.
    int region_left(double z_state) const;

    PolicyPoint policy(double p_bar) const;
    PolicyPoint policy_z(double z_state) const;
    ValueSegment value_segment(double p_bar) const;
    double value(double p, double p_bar) const;
    ValueDerivs value_left(double p, double z_state) const;

    bool case2_atom_state(double z_state) const;
};

EquilibriumSolution solve(const PayoffSpec& spec, double delta,
                          double knightian_cap = 50.0);

// Knightian prior set [0,1]: hedged action when c >= c_lower, else stationary
// randomized stopping. Region tag is 0 (stationary).
PolicyPoint knightian(const PayoffSpec& spec);
double knightian_value(const PayoffSpec& spec);

// Pure-strategy preemption state of the symmetric-payoff restriction; empty
// when ambiguity is too small for a root.
std::optional<double> pure_strategy_stop_state(const PayoffSpec& spec, double delta);

}  // namespace ambistop
