#include "ambistop/bayesian.hpp"

#include <cmath>

#include "ambistop/numerics.hpp"

namespace ambistop {

double phi(double p, double p_stop, double stop_value, const PayoffSpec& spec) {
    if (p < p_stop - 1e-15) throw std::domain_error("phi: p below stopping belief");
    p = std::max(p, p_stop);
    const double A = (p - p_stop) / (1.0 - p_stop);
    const double B = (1.0 - p) / (1.0 - p_stop);
    const double L = log_odds(p) - log_odds(p_stop);
    return A * spec.u_r_R + B * stop_value - (A + (1.0 - p) * L) * spec.c / spec.lambda;
}

double phi_dp(double p, double p_stop, double stop_value, const PayoffSpec& spec) {
    const double L = log_odds(p) - log_odds(p_stop);
    return (spec.u_r_R - stop_value) / (1.0 - p_stop) -
           spec.c / spec.lambda * (1.0 / (1.0 - p_stop) - L + 1.0 / p);
}

double phi_dpp(double p, const PayoffSpec& spec) {
    return spec.c / spec.lambda * (1.0 / (p * (1.0 - p)) + 1.0 / (p * p));
}

std::optional<double> left_boundary(const PayoffSpec& spec) {
    if (spec.c >= c_bar(spec)) return std::nullopt;
    return spec.c / (spec.lambda * spec.delta_R());
}

double BayesBenchmark::Phi(double p) const {
    if (!experimentation() || p <= p_l_B) return spec.U_l(p);
    return phi(p, p_l_B, spec.U_l(p_l_B), spec);
}

double BayesBenchmark::Phi_prime(double p) const {
    if (!experimentation() || p <= p_l_B) return spec.u_l_R - spec.u_l_L;
    return phi_dp(p, p_l_B, spec.U_l(p_l_B), spec);
}

double BayesBenchmark::Phi_second(double p) const {
    if (!experimentation() || p <= p_l_B) return 0.0;
    return phi_dpp(p, spec);
}

double BayesBenchmark::PhiStar(double p) const {
    if (!experimentation()) return spec.U(p);
    return std::max(Phi(p), spec.U_r(p));
}

std::pair<std::optional<double>, double> right_boundary_and_cbar(const PayoffSpec& spec) {
    const double cb = c_bar(spec);
    if (spec.c >= cb) return {std::nullopt, cb};
    const double p1 = *left_boundary(spec);
    const double stop = spec.U_l(p1);
    const auto sp = stopping_payoffs(spec);
    // Phi - U_r is single-crossing on (p_hat, 1) by convexity; bisect in log-odds.
    auto f = [&](double z) {
        const double p = from_log_odds(z);
        return phi(std::max(p, p1), p1, stop, spec) - spec.U_r(p);
    };
    const double z_lo = log_odds(std::max(sp.p_hat, p1));
    double z_hi = z_lo + 1.0;
    while (f(z_hi) > 0 && z_hi < 60.0) z_hi += 1.0;
    if (f(z_hi) > 0) return {std::nullopt, cb};
    return {from_log_odds(bisect(f, z_lo, z_hi, kBoundaryTolZ)), cb};
}

BayesBenchmark solve_bayesian(const PayoffSpec& spec) {
    spec.validate();
    BayesBenchmark b;
    b.spec = spec;
    b.c_bar = c_bar(spec);
    if (spec.c >= b.c_bar) {
        b.kind = BayesCase::NoExperimentation;
        b.p_star = stopping_payoffs(spec).p_hat;
        b.phi_at_p_star = spec.U(b.p_star);
        return b;
    }
    b.p_l_B = *left_boundary(spec);
    auto [prB, cb] = right_boundary_and_cbar(spec);
    b.p_r_B = *prB;
    // Case split: Phi' at p_r_B discriminates the interior-minimum case from
    // the boundary-minimum case, with a 1e-8 cut on the derivative.
    b.kind = BayesCase::Case1;
    const double dphi_at_prB = b.Phi_prime(b.p_r_B);
    if (dphi_at_prB < -1e-8) {
        b.kind = BayesCase::Case2;
        b.p_star = b.p_r_B;
    } else {
        // Phi is convex, so Phi' is increasing: bisect Phi' = 0 in log-odds.
        auto g = [&](double z) { return b.Phi_prime(from_log_odds(z)); };
        const double z_lo = log_odds(b.p_l_B) + 1e-12;
        const double z_hi = log_odds(b.p_r_B);
        b.p_star = from_log_odds(bisect(g, z_lo, z_hi, kBoundaryTolZ));
    }
    b.phi_at_p_star = b.Phi(b.p_star);
    return b;
}

}  // namespace ambistop
