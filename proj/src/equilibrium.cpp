#include "ambistop/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "ambistop/numerics.hpp"

namespace ambistop {

namespace {

// phi and its p-derivative evaluated from log-odds, stable near p = 1:
// 1-p is carried as from_log_odds(-z) and the log term as a z-difference.
double phi_z(double z, double z_stop, double stop_value, const PayoffSpec& spec) {
    const double pc = from_log_odds(-z);          // 1 - p
    const double psc = from_log_odds(-z_stop);    // 1 - p_stop
    const double A = 1.0 - pc / psc;
    const double B = pc / psc;
    return A * spec.u_r_R + B * stop_value -
           (A + pc * (z - z_stop)) * spec.c / spec.lambda;
}

double phi_dp_z(double z, double z_stop, double stop_value, const PayoffSpec& spec) {
    const double psc = from_log_odds(-z_stop);
    const double p = from_log_odds(z);
    return (spec.u_r_R - stop_value) / psc -
           spec.c / spec.lambda * (1.0 / psc - (z - z_stop) + 1.0 / p);
}

double eta(double p, const PayoffSpec& spec) { return -spec.lambda * p * (1.0 - p); }

}  // namespace

std::pair<double, double> u_roots(const PayoffSpec& spec) {
    const double mid = 0.5 * (spec.u_r_R + spec.u_l_L);
    const double rad = std::sqrt(0.25 * (spec.u_r_R - spec.u_l_L) * (spec.u_r_R - spec.u_l_L) +
                                 spec.c / spec.lambda * spec.delta_l());
    return {mid - rad, mid + rad};
}

double EquilibriumSolution::vhat_z(double z) const {
    // Vhat = u1 + (u2-u1) / (1 + exp(k (z - z2) + ln R)), stable for large z.
    const double k = (u2 - u1) / spec.delta_l();
    const double phi2 = bayes.Phi(p2);
    const double lnR = std::log((u2 - phi2) / (phi2 - u1));
    const double g = k * (z - z2) + lnR;
    return u1 + (u2 - u1) / (1.0 + std::exp(g));
}

double EquilibriumSolution::vhat_prime_z(double z) const {
    const double k = (u2 - u1) / spec.delta_l();
    const double v = vhat_z(z);
    const double s = (v - u1) / (u2 - u1);
    return -(u2 - u1) * k * s * (1.0 - s);
}

double EquilibriumSolution::nu_star(double p_bar) const {
    return spec.lambda * (spec.u_r_R - vhat(p_bar)) / spec.delta_l();
}

double EquilibriumSolution::pi_star(double p_bar) const {
    return (spec.u_l_L - vhat(p_bar)) / spec.delta_l();
}

double EquilibriumSolution::psi(double p) const {
    return phi_z(log_odds(p), z_dstar, v_dstar, spec);
}
double EquilibriumSolution::psi_prime(double p) const {
    return phi_dp_z(log_odds(p), z_dstar, v_dstar, spec);
}
double EquilibriumSolution::psi_second(double p) const { return phi_dpp(p, spec); }

bool EquilibriumSolution::case2_atom_state(double z_state) const {
    return kind == BayesCase::Case2 && regime != CostRegime::High && delta > 0.0 &&
           std::abs(z_state - z2) <= kBoundaryTolZ;
}

int EquilibriumSolution::region_of(double z_state) const {
    if (regime == CostRegime::High) {
        if (z_state <= z1 + kBoundaryTolZ) return 1;
        if (z_state >= z4 - kBoundaryTolZ) return 5;
        return 4;
    }
    if (z_state <= z1 + kBoundaryTolZ) return 1;
    if (z_state <= z2 + kBoundaryTolZ) return 2;
    if (!region3_empty && z_state < z3 - kBoundaryTolZ) return 3;
    if (z_state < z4 - kBoundaryTolZ) return 4;
    return 5;
}

int EquilibriumSolution::region_left(double z_state) const {
    if (regime == CostRegime::High) {
        if (z_state <= z1 + kBoundaryTolZ) return 1;
        if (z_state <= z4 + kBoundaryTolZ) return 4;
        return 5;
    }
    if (z_state <= z1 + kBoundaryTolZ) return 1;
    if (z_state <= z2 + kBoundaryTolZ) return 2;
    if (!region3_empty && z_state <= z3 + kBoundaryTolZ) return 3;
    if (z_state <= z4 + kBoundaryTolZ) return 4;
    return 5;
}

PolicyPoint EquilibriumSolution::policy_z(double z_state) const {
    const double p_bar = from_log_odds(z_state);
    const double pl = from_log_odds(z_state - delta);
    PolicyPoint pp;
    if (regime == CostRegime::High) {
        pp.region = region_of(z_state);
        pp.m = 1.0;
        if (pp.region == 1) {
            pp.rho = 0.0;
            pp.pi = p_bar;
        } else if (pp.region == 5) {
            pp.rho = 1.0;
            pp.pi = pl;
        } else {
            pp.rho = hat.rho_hat;
            pp.pi = hat.p_hat;
        }
        return pp;
    }
    if (case2_atom_state(z_state)) {
        pp.region = 2;
        pp.m = m_atom_p2;
        pp.rho = 1.0;
        pp.pi = p2;
        return pp;
    }
    pp.region = region_of(z_state);
    switch (pp.region) {
        case 1:
            pp.m = 1.0;
            pp.rho = 0.0;
            pp.pi = p_bar;
            break;
        case 2:
            pp.pi = p_bar;
            break;
        case 3:
            pp.nu = nu_star(p_bar);
            pp.rho = 0.0;
            pp.pi = pi_star(p_bar);
            break;
        case 4:
            if (variant_b) {
                pp.m = 1.0;
                pp.rho = hat.rho_hat;
                pp.pi = hat.p_hat;
            } else {
                pp.pi = pl;
            }
            break;
        case 5:
            pp.m = 1.0;
            pp.rho = 1.0;
            pp.pi = pl;
            break;
    }
    return pp;
}

PolicyPoint EquilibriumSolution::policy(double p_bar) const {
    return policy_z(log_odds(p_bar));
}

ValueDerivs EquilibriumSolution::value_left(double p, double z_state) const {
    ValueDerivs d;
    const double p_bar = from_log_odds(z_state);
    switch (region_left(z_state)) {
        case 1:
            d.v = spec.U_l(p);
            d.v_p = spec.u_l_R - spec.u_l_L;
            d.v_pbar = 0.0;
            break;
        case 2: {
            const double f = bayes.Phi(p_bar);
            const double fp = bayes.Phi_prime(p_bar);
            d.v = f + (p - p_bar) * fp;
            d.v_p = fp;
            d.v_pbar = (p - p_bar) * bayes.Phi_second(p_bar);
            break;
        }
        case 3:
            d.v = vhat_z(z_state);
            d.v_p = 0.0;
            d.v_pbar = vhat_prime_z(z_state) / (p_bar * (1.0 - p_bar));
            break;
        case 4: {
            if (regime == CostRegime::High || variant_b) {
                d.v = hat.u_hat;
                d.v_p = 0.0;
                d.v_pbar = 0.0;
                break;
            }
            const double q = from_log_odds(q_llr(z_state));
            const double Pp = psi_prime(q);
            d.v = psi(q) + (p - q) * Pp;
            d.v_p = Pp;
            // q moves with the state at matched drift speed: q'(pbar) = eta(q)/eta(pbar)
            d.v_pbar = (p - q) * psi_second(q) * (q * (1.0 - q)) / (p_bar * (1.0 - p_bar));
            break;
        }
        case 5:
            d.v = spec.U_r(p);
            d.v_p = spec.u_r_R - spec.u_r_L;
            d.v_pbar = 0.0;
            break;
    }
    return d;
}

double EquilibriumSolution::value(double p, double p_bar) const {
    const double z = log_odds(p_bar);
    if (case2_atom_state(z)) return spec.U_r(p2);  // flattened segment
    switch (region_of(z)) {
        case 1: return spec.U_l(p);
        case 5: return spec.U_r(p);
        default: return value_left(p, z).v;
    }
}

ValueSegment EquilibriumSolution::value_segment(double p_bar) const {
    const double pl = p_lower(p_bar, delta);
    return {value(pl, p_bar), value(p_bar, p_bar)};
}

namespace {

// z3 of the (a)-branch: unique root of Vhat(z) = U_l(p_lower(z)) above z2.
double solve_z3_a(const EquilibriumSolution& sol) {
    auto g = [&](double z) {
        return sol.vhat_z(z) - sol.spec.U_l(from_log_odds(z - sol.delta));
    };
    const double zlo = sol.z2 + 1e-12;
    const double zhi = sol.z2 + sol.delta + 60.0;
    return bisect(g, zlo, zhi, kBoundaryTolZ);
}

// z3' of the (b)-branch: Vhat(z) = u_hat.
double solve_z3_b(const EquilibriumSolution& sol) {
    auto g = [&](double z) { return sol.vhat_z(z) - sol.hat.u_hat; };
    return bisect(g, sol.z2 + 1e-12, sol.z2 + sol.delta + 200.0, kBoundaryTolZ);
}

bool region3_exists(const EquilibriumSolution& sol) {
    const double phi2 = sol.bayes.Phi(sol.p2);
    return sol.spec.U_l(from_log_odds(sol.z2 - sol.delta)) > phi2 + 1e-14;
}

}  // namespace

EquilibriumSolution solve(const PayoffSpec& spec, double delta, double knightian_cap) {
    spec.validate();
    if (!(delta >= 0.0)) throw ConfigError("solve: delta must be >= 0");
    EquilibriumSolution sol;
    sol.spec = spec;
    sol.bayes = solve_bayesian(spec);
    sol.hat = stopping_payoffs(spec);
    sol.delta_requested = delta;
    sol.knightian_capped = delta > knightian_cap;
    sol.delta = std::min(delta, knightian_cap);
    std::tie(sol.u1, sol.u2) = u_roots(spec);

    const double cl = c_lower(spec), cb = c_bar(spec);
    if (spec.c >= cb) {
        sol.regime = CostRegime::High;
        sol.kind = BayesCase::NoExperimentation;
        sol.z1 = log_odds(sol.hat.p_hat);
        sol.z2 = sol.z3 = sol.z1;
        sol.z4 = sol.z1 + sol.delta;
        sol.p1 = sol.p2 = sol.p3 = sol.hat.p_hat;
        sol.p4 = from_log_odds(sol.z4);
        sol.delta_c = 0.0;
        return sol;
    }
    sol.regime = spec.c <= cl ? CostRegime::Low : CostRegime::Intermediate;
    sol.kind = sol.bayes.kind;
    sol.p1 = sol.bayes.p_l_B;
    sol.p2 = sol.bayes.p_star;
    sol.z1 = log_odds(sol.p1);
    sol.z2 = log_odds(sol.p2);
    {
        const double phi2 = sol.bayes.Phi(sol.p2);
        const double k = (sol.u2 - sol.u1) / spec.delta_l();
        sol.C_coef = (sol.u2 - phi2) / (phi2 - sol.u1) * std::exp(-k * sol.z2);
    }
    if (sol.kind == BayesCase::Case2 && sol.delta > 0.0) {
        const double dPhi = sol.bayes.Phi_prime(sol.p2);
        sol.m_atom_p2 = -dPhi / ((spec.u_r_R - spec.u_r_L) - dPhi);
    }

    // Delta_c: where the (a)-branch segment bottoms out at u_hat; +inf iff c <= c_lower.
    if (sol.regime == CostRegime::Intermediate) {
        auto f = [&](double d) {
            EquilibriumSolution tmp = sol;
            tmp.delta = d;
            tmp.region3_empty = !region3_exists(tmp);
            const double z3 = tmp.region3_empty ? tmp.z2 : solve_z3_a(tmp);
            return tmp.vhat_z(z3) - sol.hat.u_hat;
        };
        sol.delta_c = bisect(f, 1e-9, 250.0, 1e-10);
        sol.at_delta_c = std::abs(sol.delta - sol.delta_c) < 1e-9;
        sol.variant_b = sol.delta > sol.delta_c && !sol.at_delta_c;
    }

    sol.region3_empty = !region3_exists(sol);
    if (sol.variant_b) {
        sol.z3 = solve_z3_b(sol);
        sol.z4 = log_odds(sol.hat.p_hat) + sol.delta;
        sol.v_dstar = sol.hat.u_hat;
        sol.p_dstar = sol.hat.p_hat;
        sol.z_dstar = log_odds(sol.hat.p_hat);
        sol.region3_empty = false;
    } else {
        sol.z3 = sol.region3_empty ? sol.z2 : solve_z3_a(sol);
        sol.v_dstar = sol.vhat_z(sol.z3);
        // p**: interior smooth-pasting belief of the auxiliary problem,
        // floored at the lowest posterior reachable at the band edge
        const double r = spec.c / (spec.lambda * (spec.u_r_R - sol.v_dstar));
        sol.z_dstar = std::max(sol.z3 - sol.delta, log_odds(r));
        sol.p_dstar = from_log_odds(sol.z_dstar);
        auto f4 = [&](double z) {
            const double pl = from_log_odds(z - sol.delta);
            const double q = from_log_odds(sol.q_llr(z));
            const double v = phi_z(sol.q_llr(z), sol.z_dstar, sol.v_dstar, spec) +
                             (pl - q) * phi_dp_z(sol.q_llr(z), sol.z_dstar, sol.v_dstar, spec);
            return v - spec.U_r(pl);
        };
        if (f4(sol.z3 + 1e-10) <= 0.0) {
            sol.z4 = sol.z3;  // Delta = 0 in Case 2: regions 3 and 4 are empty
        } else {
            sol.z4 = bisect(f4, sol.z3 + 1e-10, sol.z3 + sol.delta + 80.0, kBoundaryTolZ);
        }
    }
    sol.p3 = from_log_odds(sol.z3);
    sol.p4 = from_log_odds(sol.z4);
    return sol;
}

PolicyPoint knightian(const PayoffSpec& spec) {
    spec.validate();
    const auto hat = stopping_payoffs(spec);
    PolicyPoint pp;
    pp.region = 0;
    if (spec.c >= c_lower(spec)) {
        pp.m = 1.0;
        pp.rho = hat.rho_hat;
        pp.pi = hat.p_hat;
        return pp;
    }
    const double u1 = u_roots(spec).first;
    pp.nu = spec.lambda / spec.delta_l() * (spec.u_r_R - u1);
    pp.rho = 0.0;
    pp.pi = (spec.u_l_L - u1) / spec.delta_l();
    return pp;
}

double knightian_value(const PayoffSpec& spec) {
    if (spec.c >= c_lower(spec)) return stopping_payoffs(spec).u_hat;
    return u_roots(spec).first;
}

std::optional<double> pure_strategy_stop_state(const PayoffSpec& spec, double delta) {
    spec.validate();
    if (!spec.symmetric()) throw UnsupportedRegime("pure_strategy_stop_state: symmetric payoffs required");
    const auto bayes = solve_bayesian(spec);
    if (!bayes.experimentation() || bayes.kind != BayesCase::Case1)
        throw UnsupportedRegime("pure_strategy_stop_state: requires Case 1 with experimentation");
    // tangent-line value at the lowest posterior vs stopping payoff at the state
    auto f = [&](double z) {
        const double p = from_log_odds(z);
        const double pl = from_log_odds(z - delta);
        return bayes.Phi(p) + bayes.Phi_prime(p) * (pl - p) - spec.U_l(p);
    };
    const double z_lo = log_odds(bayes.p_star) + 1e-9;
    const double z_hi = 36.0;  // beliefs beyond are not representable
    const auto brackets = scan_brackets(f, z_lo, z_hi, 8000);
    if (brackets.empty()) return std::nullopt;
    return from_log_odds(bisect(f, brackets.front().first, brackets.front().second, kBoundaryTolZ));
}

}  // namespace ambistop
