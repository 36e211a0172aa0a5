#pragma once

#include "ambistop/bayesian.hpp"
#include "ambistop/core.hpp"

namespace ambistop {

enum class PlanKind { BayesPlanAt, MixActionVsExperiment, MixActions };

// Ex-ante maxmin plan over a prior interval. `mix_prob` is xi for
// MixActionVsExperiment (weight on immediate action r) and rho_hat for
// MixActions; unused otherwise.
struct CommitmentPlan {
    PlanKind kind = PlanKind::BayesPlanAt;
    double value = 0.0;
    double p_min = 0.0;
    double mix_prob = std::numeric_limits<double>::quiet_NaN();
};

double commitment_value(const AmbiguityInterval& interval, const BayesBenchmark& bayes);
CommitmentPlan commitment_plan(const AmbiguityInterval& interval, const BayesBenchmark& bayes);

// Expected payoff of the plan as a function of nature's belief p (the line
// V_0(p)); used by the saddle-point checks.
double plan_value_at(const CommitmentPlan& plan, double p, const BayesBenchmark& bayes);

}  // namespace ambistop
