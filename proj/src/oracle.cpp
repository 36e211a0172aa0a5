#include "ambistop/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ambistop/numerics.hpp"

namespace ambistop {

namespace {

double eta(double p, const PayoffSpec& spec) { return -spec.lambda * p * (1.0 - p); }

}  // namespace

double value_by_quadrature(const EquilibriumSolution& sol, double p, double p_bar0) {
    const PayoffSpec& spec = sol.spec;
    const double lam = spec.lambda;
    const double z0 = log_odds(p_bar0);
    const auto pp0 = sol.policy_z(z0);
    if (pp0.m >= 1.0) {
        const double rho = pp0.rho.value_or(0.0);
        return p * spec.u_state_R(rho) + (1.0 - p) * spec.u_state_L(rho);
    }
    // Event times along the no-news path (state falls at rate lambda in
    // log-odds): region-3 hazard stretch, Case-2 atom, terminal stop at z1.
    const double t_final = (z0 - sol.z1) / lam;
    double t_h0 = -1.0, t_h1 = -1.0;
    if (!sol.region3_empty && z0 > sol.z2) {
        t_h0 = z0 > sol.z3 ? (z0 - sol.z3) / lam : 0.0;
        t_h1 = (z0 - sol.z2) / lam;
    }
    const bool atom = sol.kind == BayesCase::Case2 && sol.delta > 0.0 &&
                      z0 > sol.z2 - kBoundaryTolZ && sol.regime != CostRegime::High;
    const double t_atom = atom ? std::max(0.0, (z0 - sol.z2) / lam) : -1.0;

    // state-conditional accumulators with running survival probabilities
    double VR = 0.0, VL = 0.0, SR = 1.0, SL = 1.0;
    auto apply_atom = [&] {
        VR += SR * sol.m_atom_p2 * spec.u_r_R;
        VL += SL * sol.m_atom_p2 * spec.u_r_L;
        SR *= 1.0 - sol.m_atom_p2;
        SL *= 1.0 - sol.m_atom_p2;
    };
    auto flow_no_hazard = [&](double t0, double t1) {
        const double dt = t1 - t0;
        if (dt <= 0) return;
        VR += SR * (spec.u_r_R - spec.c / lam) * (1.0 - std::exp(-lam * dt));
        VL += SL * (-spec.c * dt);
        SR *= std::exp(-lam * dt);
    };
    auto flow_hazard = [&](double t0, double t1) {
        if (t1 <= t0) return;
        const int n = 2000;  // Simpson intervals over the hazard stretch
        const double h = (t1 - t0) / n;
        std::vector<double> nu(2 * n + 1);
        for (int i = 0; i <= 2 * n; ++i)
            nu[i] = sol.nu_star(from_log_odds(z0 - lam * (t0 + h / 2 * i)));
        const double SR0 = SR, SL0 = SL;
        auto fR = [&](double t, double cumh, double nuv) {
            return SR0 * std::exp(-lam * (t - t0) - cumh) *
                   (lam * spec.u_r_R + nuv * spec.u_l_R - spec.c);
        };
        auto fL = [&](double cumh, double nuv) {
            return SL0 * std::exp(-cumh) * (nuv * spec.u_l_L - spec.c);
        };
        double cum = 0.0, accR = 0.0, accL = 0.0;
        for (int k = 0; k < n; ++k) {
            const double ta = t0 + h * k;
            const double cum_mid =
                cum + h / 24.0 * (5.0 * nu[2 * k] + 8.0 * nu[2 * k + 1] - nu[2 * k + 2]);
            const double cum_end =
                cum + h / 6.0 * (nu[2 * k] + 4.0 * nu[2 * k + 1] + nu[2 * k + 2]);
            accR += h / 6.0 * (fR(ta, cum, nu[2 * k]) +
                               4.0 * fR(ta + h / 2, cum_mid, nu[2 * k + 1]) +
                               fR(ta + h, cum_end, nu[2 * k + 2]));
            accL += h / 6.0 * (fL(cum, nu[2 * k]) + 4.0 * fL(cum_mid, nu[2 * k + 1]) +
                               fL(cum_end, nu[2 * k + 2]));
            cum = cum_end;
        }
        VR += accR;
        VL += accL;
        SR = SR0 * std::exp(-lam * (t1 - t0) - cum);
        SL = SL0 * std::exp(-cum);
    };

    if (atom && t_atom <= 0.0) apply_atom();
    double t = 0.0;
    std::array<double, 4> marks{t_h0, t_h1, t_atom, t_final};
    std::sort(marks.begin(), marks.end());
    for (double m : marks) {
        if (m <= t || m > t_final) continue;
        const bool hazard_piece = t_h1 > t_h0 && t >= t_h0 - 1e-15 && m <= t_h1 + 1e-15;
        if (hazard_piece)
            flow_hazard(t, m);
        else
            flow_no_hazard(t, m);
        t = m;
        if (atom && t_atom > 0.0 && std::abs(t - t_atom) < 1e-15) apply_atom();
    }
    // terminal stop with action l
    VR += SR * spec.u_l_R;
    VL += SL * spec.u_l_L;
    return p * VR + (1.0 - p) * VL;
}

double hjb_G(const EquilibriumSolution& sol, double m, double nu, double rho,
             double p, double z_state) {
    const PayoffSpec& spec = sol.spec;
    const auto d = sol.value_left(p, z_state);
    const double p_bar = from_log_odds(z_state);
    const double U_rho = rho * spec.U_r(p) + (1.0 - rho) * spec.U_l(p);
    return m * (U_rho - d.v) +
           (1.0 - m) * (-spec.c + nu * (U_rho - d.v) + p * spec.lambda * (spec.u_r_R - d.v) +
                        d.v_p * eta(p, spec) + d.v_pbar * eta(p_bar, spec));
}

HjbReport hjb_residual(const EquilibriumSolution& sol, double p_bar,
                       bool full_nature_grid, int nature_points) {
    const double z = log_odds(p_bar);
    const auto pp = sol.policy_z(z);
    const double rho_pol = pp.rho.value_or(0.0);
    HjbReport rep;
    rep.g_at_policy = hjb_G(sol, pp.m, pp.nu, rho_pol, pp.pi, z);

    // DM controls: G is linear in m, nu and rho, so corners plus the policy
    // point cover the grid maxima; a coarse interior grid guards the claim.
    const double nu_cap = 4.0 * sol.spec.lambda *
                          std::max(1.0, (sol.spec.u_r_R - sol.u1) / sol.spec.delta_l());
    double best = -std::numeric_limits<double>::infinity();
    for (double m : {0.0, 0.25, 0.5, 0.75, 1.0, pp.m})
        for (double nu : {0.0, 0.25 * nu_cap, 0.5 * nu_cap, nu_cap, pp.nu})
            for (double rho : {0.0, 0.5, 1.0, sol.hat.rho_hat, rho_pol})
                best = std::max(best, hjb_G(sol, m, nu, rho, pp.pi, z));
    rep.max_over_controls = best;

    // Nature: G is affine in p (the quadratic terms cancel against the drift
    // term), so the corners suffice; the full grid mode audits that claim.
    const double pl = from_log_odds(z - sol.delta);
    double worst = std::numeric_limits<double>::infinity();
    auto eval = [&](double p) {
        worst = std::min(worst, hjb_G(sol, pp.m, pp.nu, rho_pol, p, z));
    };
    eval(pl);
    eval(p_bar);
    eval(pp.pi);
    if (full_nature_grid) {
        for (int i = 0; i <= nature_points; ++i)
            eval(pl + (p_bar - pl) * i / nature_points);
    }
    rep.min_over_nature = worst;
    return rep;
}

double closed_form_saddle_value(const EquilibriumSolution& sol, double p_bar) {
    const auto pp = sol.policy(p_bar);
    return sol.value(pp.pi, p_bar);
}

namespace {

struct StageGame {
    // rows: stop-l, stop-r, continue; payoff(a, p) = p R[a] + (1-p) L[a]
    std::array<double, 3> R, L;

    double payoff(int a, double p) const { return p * R[a] + (1.0 - p) * L[a]; }

    // maxmin over row mixtures against two belief columns
    struct Solution {
        double value;
        std::array<double, 3> x;
        double nature_p;
    };
    Solution solve(double pl, double ph) const {
        auto col = [&](int a, int j) { return payoff(a, j == 0 ? pl : ph); };
        Solution best{-std::numeric_limits<double>::infinity(), {0, 0, 0}, pl};
        for (int a = 0; a < 3; ++a) {
            const double v = std::min(col(a, 0), col(a, 1));
            if (v > best.value) {
                best.value = v;
                best.x = {0, 0, 0};
                best.x[a] = 1.0;
            }
        }
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double den = (col(a, 0) - col(a, 1)) + (col(b, 1) - col(b, 0));
                if (std::abs(den) < 1e-300) continue;
                const double t = (col(b, 1) - col(b, 0)) / den;
                if (t < 0.0 || t > 1.0) continue;
                const double v = t * col(a, 0) + (1.0 - t) * col(b, 0);
                if (v > best.value) {
                    best.value = v;
                    best.x = {0, 0, 0};
                    best.x[a] = t;
                    best.x[b] = 1.0 - t;
                }
            }
        // nature's minimizer of the mixed payoff (affine in p)
        const double slope_R = best.x[0] * R[0] + best.x[1] * R[1] + best.x[2] * R[2];
        const double slope_L = best.x[0] * L[0] + best.x[1] * L[1] + best.x[2] * L[2];
        best.nature_p = slope_R - slope_L < 0 ? ph : (slope_R - slope_L > 0 ? pl : ph);
        return best;
    }

    // minmax: nature picks p in [pl, ph] against the DM's best response
    double minmax(double pl, double ph) const {
        auto g = [&](double p) {
            return std::max({payoff(0, p), payoff(1, p), payoff(2, p)});
        };
        double v = std::min(g(pl), g(ph));
        for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b) {
                const double den = (R[a] - L[a]) - (R[b] - L[b]);
                if (std::abs(den) < 1e-300) continue;
                const double p = (L[b] - L[a]) / den;
                if (p > pl && p < ph) v = std::min(v, g(p));
            }
        return v;
    }
};

}  // namespace

DiscreteSolution discrete_saddle_solve(const PayoffSpec& spec, double delta,
                                       DiscreteGameGrid grid) {
    spec.validate();
    const EquilibriumSolution sol = solve(spec, delta);
    if (grid.z_lo == grid.z_hi) {
        grid.z_lo = sol.z1 - 0.5;
        grid.z_hi = sol.z4 + 0.5;
    }
    const double h = spec.lambda * grid.dt;
    std::size_t n = static_cast<std::size_t>(std::ceil((grid.z_hi - grid.z_lo) / h)) + 1;
    n = std::max<std::size_t>(n, 2001);

    DiscreteSolution ds;
    ds.z.resize(n);
    ds.value.resize(n);
    ds.v_R.resize(n);
    ds.v_L.resize(n);
    ds.w_stop_l.resize(n);
    ds.w_stop_r.resize(n);
    ds.w_cont.resize(n);

    const double p_bt = 1.0 - std::exp(-spec.lambda * grid.dt);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = grid.z_lo + h * static_cast<double>(i);
        ds.z[i] = z;
        const double ph = from_log_odds(z);
        const double pl = from_log_odds(z - delta);
        StageGame g;
        g.R = {spec.u_l_R, spec.u_r_R, 0.0};
        g.L = {spec.u_l_L, spec.u_r_L, 0.0};
        if (i == 0) {
            // far-left absorbing state: action-only game
            g.R[2] = -1e9;
            g.L[2] = -1e9;
        } else {
            g.R[2] = -spec.c * grid.dt + p_bt * spec.u_r_R + (1.0 - p_bt) * ds.v_R[i - 1];
            g.L[2] = -spec.c * grid.dt + ds.v_L[i - 1];
        }
        const auto s = g.solve(pl, ph);
        ds.value[i] = s.value;
        ds.w_stop_l[i] = s.x[0];
        ds.w_stop_r[i] = s.x[1];
        ds.w_cont[i] = s.x[2];
        ds.v_R[i] = s.x[0] * g.R[0] + s.x[1] * g.R[1] + s.x[2] * g.R[2];
        ds.v_L[i] = s.x[0] * g.L[0] + s.x[1] * g.L[1] + s.x[2] * g.L[2];
        ds.max_exchange_gap =
            std::max(ds.max_exchange_gap, std::abs(s.value - g.minmax(pl, ph)));
    }
    // mixing band: contiguous states strictly mixing continue with stop-l
    const double margin = 1e-9;
    for (std::size_t i = 1; i < n; ++i) {
        if (ds.w_cont[i] > margin && ds.w_cont[i] < 1.0 - margin &&
            ds.w_stop_l[i] > margin) {
            if (ds.band_empty()) ds.band_lo = ds.z[i];
            ds.band_hi = ds.z[i];
        }
    }
    return ds;
}

}  // namespace ambistop
