#include "ambistop/commitment.hpp"

#include <algorithm>
#include <cmath>

namespace ambistop {

namespace {

// Minimizer of Phi* over the interval: clamp the global minimizer.
double minimizer(const AmbiguityInterval& interval, const BayesBenchmark& bayes) {
    const double lo = interval.p_lower();
    return std::clamp(bayes.p_star, lo, interval.p_bar);
}

}  // namespace

double commitment_value(const AmbiguityInterval& interval, const BayesBenchmark& bayes) {
    return bayes.PhiStar(minimizer(interval, bayes));
}

CommitmentPlan commitment_plan(const AmbiguityInterval& interval, const BayesBenchmark& bayes) {
    const PayoffSpec& spec = bayes.spec;
    CommitmentPlan plan;
    plan.p_min = minimizer(interval, bayes);
    plan.value = bayes.PhiStar(plan.p_min);
    if (!bayes.experimentation()) {
        // Phi* = U; nature's minimizer is the hedging belief when interior.
        if (plan.p_min > interval.p_lower() + 1e-15 && plan.p_min < interval.p_bar - 1e-15) {
            plan.kind = PlanKind::MixActions;
            plan.mix_prob = stopping_payoffs(spec).rho_hat;
        } else {
            plan.kind = PlanKind::BayesPlanAt;
        }
        return plan;
    }
    // Randomization is needed only when nature's minimizer sits exactly at the
    // right Bayesian boundary (Case 2 with p_star = p_r_B inside the interval).
    const bool at_right_boundary =
        bayes.kind == BayesCase::Case2 &&
        std::abs(log_odds(plan.p_min) - log_odds(bayes.p_r_B)) < kBoundaryTolZ &&
        interval.p_lower() < bayes.p_r_B && bayes.p_r_B < interval.p_bar;
    if (at_right_boundary) {
        plan.kind = PlanKind::MixActionVsExperiment;
        const double dUr = spec.u_r_R - spec.u_r_L;
        const double dPhi = bayes.Phi_prime(bayes.p_r_B);
        plan.mix_prob = -dPhi / (dUr - dPhi);
    } else {
        plan.kind = PlanKind::BayesPlanAt;
    }
    return plan;
}

double plan_value_at(const CommitmentPlan& plan, double p, const BayesBenchmark& bayes) {
    const PayoffSpec& spec = bayes.spec;
    switch (plan.kind) {
        case PlanKind::BayesPlanAt: {
            // Tangent of Phi* at p_min; at a kink of Phi* (p_min = p_r_B in
            // Case 1) the plan is the pure Bayesian r-threshold plan, U_r.
            if (bayes.experimentation() &&
                std::abs(log_odds(plan.p_min) - log_odds(bayes.p_r_B)) < kBoundaryTolZ &&
                bayes.kind == BayesCase::Case1)
                return spec.U_r(p);
            double slope;
            if (!bayes.experimentation()) {
                slope = plan.p_min >= stopping_payoffs(spec).p_hat
                            ? spec.u_r_R - spec.u_r_L
                            : spec.u_l_R - spec.u_l_L;
            } else if (plan.p_min > bayes.p_r_B) {
                slope = spec.u_r_R - spec.u_r_L;
            } else {
                slope = bayes.Phi_prime(plan.p_min);
            }
            return bayes.PhiStar(plan.p_min) + (p - plan.p_min) * slope;
        }
        case PlanKind::MixActionVsExperiment: {
            const double xi = plan.mix_prob;
            const double base = bayes.Phi(bayes.p_r_B);
            const double slope = bayes.Phi_prime(bayes.p_r_B);
            return xi * spec.U_r(p) + (1.0 - xi) * (base + (p - bayes.p_r_B) * slope);
        }
        case PlanKind::MixActions:
            return spec.U_mixed(plan.mix_prob, p);
    }
    return 0.0;
}

}  // namespace ambistop
