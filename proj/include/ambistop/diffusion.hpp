#pragma once

#include <cstdint>
#include <vector>

#include "ambistop/core.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop {

// Incremental-learning variant: dX = mu_w dt + sigma dB, symmetric payoffs.
struct DiffusionSpec {
    double mu_R = 0.5;
    double mu_L = -0.5;
    double sigma = 1.0;
    double delta_payoff = 1.0;
    double c = 0.05;

    double psi() const { return (mu_R - mu_L) / sigma; }
    void validate() const {
        if (!(mu_R > mu_L)) throw ConfigError("DiffusionSpec: require mu_R > mu_L");
        if (!(sigma > 0.0)) throw ConfigError("DiffusionSpec: require sigma > 0");
        if (!(delta_payoff > 0.0) || !(c > 0.0))
            throw ConfigError("DiffusionSpec: require delta > 0 and c > 0");
    }
    // stopping payoffs in log-likelihood-ratio coordinates
    double U_r(double z) const { return delta_payoff * from_log_odds(z); }
    double U_l(double z) const { return delta_payoff * from_log_odds(-z); }
    double U(double z) const { return std::max(U_r(z), U_l(z)); }
};

// General solution pieces of c = psi^2 (p(z)-1/2) V' + (psi^2/2) V'':
// V = A + B tanh(z/2) + W(z) with W(z) = (2c/psi^2) z tanh(z/2).
double diffusion_W(double z, const DiffusionSpec& spec);
double diffusion_W_prime(double z, const DiffusionSpec& spec);

// Two-point boundary-value solution of the experimentation ODE and its slope.
std::pair<double, double> diffusion_phi_bvp(double y, double a, double b, double Ua,
                                            double Ub, const DiffusionSpec& spec);

struct DiffusionBayes {
    DiffusionSpec spec;
    double z_r_B = 0.0;   // = -z_l_B by symmetry
    double value0 = 0.0;  // Phi^B(0)
    double PhiB(double z) const;
    double PhiB_prime(double z) const;
};

DiffusionBayes bayes_boundaries_z(const DiffusionSpec& spec);

enum class DiffusionRegime { SmallDelta, LargeDelta };

struct DiffusionSolution {
    DiffusionSpec spec;
    double delta = 0.0;
    DiffusionRegime regime = DiffusionRegime::SmallDelta;
    double z_l_B = 0.0, z_r_B = 0.0;
    double z_l = 0.0, z_r = 0.0;  // equilibrium stopping boundaries, z_r = -z_l

    // large-Delta pieces: mixed band (z_m, 0) with mirror, plus outer
    // pure-experimentation values on (z_l, z_m)
    double z_m = std::numeric_limits<double>::quiet_NaN();
    double v0 = std::numeric_limits<double>::quiet_NaN();        // Vhat(0)
    double theta_edge = std::numeric_limits<double>::quiet_NaN(); // local-time rate at +-z_m
    HermiteTable band;                                            // Vhat on [z_m, 0]
    double aR = 0, bR = 0, aL = 0, bL = 0;  // outer closed forms

    double vhat(double z) const;        // symmetric band value
    double vhat_prime(double z) const;  // d/dz, odd
    double nu(double z) const;          // stopping rate on the band, 0 outside
    double zeta(double z) const;        // nature's log-odds choice on the band
    double outer_VR(double z) const { return aR + bR * std::exp(-z) + kc() * z; }
    double outer_VL(double z) const { return aL + bL * std::exp(z) - kc() * z; }
    double outer_VR_prime(double z) const { return -bR * std::exp(-z) + kc(); }
    double outer_VL_prime(double z) const { return bL * std::exp(z) - kc(); }
    double kc() const { return 2.0 * spec.c / (spec.psi() * spec.psi()); }

    // small-Delta value of the equilibrium strategy at belief y, state z
    double value_small(double y, double z) const;
};

DiffusionSolution solve_diffusion(const DiffusionSpec& spec, double delta);

struct DiffusionMc {
    double mean = 0.0;
    double se = 0.0;
    double mean_time = 0.0;
};

// First-passage Euler-Maruyama simulation of the solved policy, evaluated at
// belief y0 with the state started at z0; antithetic pairs, deterministic per
// path index.
DiffusionMc simulate_diffusion(const DiffusionSolution& sol, double y0, double z0,
                               std::size_t n_paths, std::uint64_t seed,
                               double dt = 1e-4, int n_threads = 0);

}  // namespace ambistop
