#pragma once

#include <cstdint>
#include <vector>

#include "ambistop/equilibrium.hpp"

namespace ambistop {

enum class Conditioning { StateL, StateR, Prior };

// Piecewise stopping-time CDF: continuous hazard stretches plus atoms.
// Knots are right-continuous; atoms appear as duplicated knot times.
struct StoppingDistribution {
    struct Atom {
        double t;
        double mass;    // unconditional jump size
        int action;     // 0 = l, 1 = r, 2 = hedged mix
    };
    struct Segment {
        double t0, t1;  // support of a continuous-hazard stretch
    };
    std::vector<double> t_knots;
    std::vector<double> F_knots;
    std::vector<Atom> atoms;
    std::vector<Segment> segments;
    Conditioning conditioning = Conditioning::StateL;
    double theta = std::numeric_limits<double>::quiet_NaN();  // Prior mixing weight

    double cdf(double t) const;
    double total_mass() const { return F_knots.empty() ? 0.0 : F_knots.back(); }
    double horizon() const { return t_knots.empty() ? 0.0 : t_knots.back(); }
};

StoppingDistribution stopping_cdf(const EquilibriumSolution& sol, double p_bar0,
                                  Conditioning cond, double theta = 0.5);

// Naive benchmark: follows each instant's worst-case-optimal plan, so it
// never stops before the state reaches p1.
StoppingDistribution naive_cdf(const EquilibriumSolution& sol, double p_bar0,
                               Conditioning cond, double theta = 0.5);

struct TrajectorySample {
    double stop_time = 0.0;
    int action = 0;       // 0 = l, 1 = r
    bool breakthrough = false;
    std::uint64_t path_index = 0;
};

// Exact-sampling simulation of the induced stopping behavior: state drawn
// Bernoulli(theta_true), breakthrough clock in state R, policy hazards and
// atoms inverted along the deterministic state path. Deterministic given
// (seed, path index).
std::vector<TrajectorySample> simulate(const EquilibriumSolution& sol, double p_bar0,
                                       double theta_true, std::size_t n_paths,
                                       std::uint64_t seed);

// Expected experimentation length for the centered prior set P_Delta(theta).
// Scope: Case 1 with c <= c_lower (hard error otherwise).
double expected_learning_time(const PayoffSpec& spec, double delta, double theta);

// Knightian reference curve T(theta) = theta/(lambda+nu~) + (1-theta)/nu~.
double knightian_learning_time(const PayoffSpec& spec, double theta);

// Kolmogorov-Smirnov distance between samples and an analytic CDF.
double ks_distance(std::vector<double> stop_times, const StoppingDistribution& F);

struct CrossingReport {
    bool single_crossing = false;
    double t_hat = 0.0;
    int sign_changes = 0;
    double max_violation = 0.0;  // largest wrong-signed gap
};

// Prop-4 harness: F_Q - F_P should cross zero once from above, P inside Q.
CrossingReport single_crossing_check(const PayoffSpec& spec,
                                     const AmbiguityInterval& inner,
                                     const AmbiguityInterval& outer,
                                     int grid_n = 10000, double tol = 1e-9);

}  // namespace ambistop
