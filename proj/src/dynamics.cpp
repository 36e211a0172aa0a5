#include "ambistop/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "ambistop/numerics.hpp"

namespace ambistop {

namespace {

// Deterministic event timeline of the DM's own stopping behavior along the
// no-news state path z(t) = z0 - lambda t.
struct Timeline {
    bool immediate = false;
    int immediate_action = 0;  // 0 l, 1 r, 2 hedged mix
    double hedge_rho = 0.0;
    bool has_hazard = false;
    double t_h0 = 0.0, t_h1 = 0.0;     // region-3 traversal
    bool has_atom = false;
    double t_atom = 0.0, m_atom = 0.0;  // Case-2 crossing, action r
    double t_final = 0.0;               // state hits p1, action l
    std::vector<double> tg, ch;         // cumulative DM hazard knots on [t_h0, t_h1]

    double cumhaz(double t) const {
        if (!has_hazard || t <= t_h0) return 0.0;
        if (t >= t_h1) return ch.back();
        const double u = (t - t_h0) / (t_h1 - t_h0) * (static_cast<double>(tg.size()) - 1.0);
        const std::size_t i = std::min(static_cast<std::size_t>(u), tg.size() - 2);
        const double w = u - static_cast<double>(i);
        return ch[i] * (1.0 - w) + ch[i + 1] * w;
    }
    double nu_at(const EquilibriumSolution& sol, double z0, double t) const {
        if (!has_hazard || t < t_h0 || t > t_h1) return 0.0;
        return sol.nu_star(from_log_odds(z0 - sol.spec.lambda * t));
    }
};

Timeline build_timeline(const EquilibriumSolution& sol, double p_bar0) {
    const double z0 = log_odds(p_bar0);
    const double lam = sol.spec.lambda;
    Timeline tl;
    const auto pp = sol.policy_z(z0);
    if (pp.m >= 1.0 || sol.regime == CostRegime::High) {
        tl.immediate = true;
        if (pp.region == 1) tl.immediate_action = 0;
        else if (pp.region == 5) tl.immediate_action = 1;
        else {
            tl.immediate_action = 2;
            tl.hedge_rho = pp.rho.value_or(sol.hat.rho_hat);
        }
        return tl;
    }
    tl.t_final = (z0 - sol.z1) / lam;
    const bool crosses_p2 = z0 > sol.z2 - kBoundaryTolZ;
    if (!sol.region3_empty && crosses_p2 && z0 > sol.z2) {
        tl.has_hazard = true;
        tl.t_h0 = z0 > sol.z3 ? (z0 - sol.z3) / lam : 0.0;
        tl.t_h1 = (z0 - sol.z2) / lam;
        const int n = 4001;
        tl.tg.resize(n);
        tl.ch.resize(n);
        double acc = 0.0;
        double prev = tl.nu_at(sol, z0, tl.t_h0);
        tl.tg[0] = tl.t_h0;
        tl.ch[0] = 0.0;
        const double h = (tl.t_h1 - tl.t_h0) / (n - 1);
        for (int i = 1; i < n; ++i) {
            const double t = tl.t_h0 + h * i;
            const double mid = tl.nu_at(sol, z0, t - h / 2);
            const double cur = tl.nu_at(sol, z0, t);
            acc += h / 6.0 * (prev + 4.0 * mid + cur);
            tl.tg[i] = t;
            tl.ch[i] = acc;
            prev = cur;
        }
    }
    if (sol.kind == BayesCase::Case2 && sol.delta > 0.0 && crosses_p2 &&
        sol.regime != CostRegime::High) {
        tl.has_atom = true;
        tl.t_atom = std::max(0.0, (z0 - sol.z2) / lam);
        tl.m_atom = sol.m_atom_p2;
    }
    return tl;
}

// Probability the DM has stopped of her own accord by time t (no-news path).
double dm_cdf(const Timeline& tl, double t) {
    if (tl.immediate) return 1.0;
    double s = std::exp(-tl.cumhaz(t));
    if (tl.has_atom && t >= tl.t_atom) s *= 1.0 - tl.m_atom;
    if (t >= tl.t_final) s = 0.0;
    return 1.0 - s;
}

StoppingDistribution assemble(const EquilibriumSolution& sol, const Timeline& tl,
                              Conditioning cond, double theta) {
    StoppingDistribution F;
    F.conditioning = cond;
    F.theta = theta;
    if (tl.immediate) {
        F.t_knots = {0.0, 0.0};
        F.F_knots = {0.0, 1.0};
        F.atoms.push_back({0.0, 1.0, tl.immediate_action});
        return F;
    }
    const double lam_bt = cond == Conditioning::StateR ? sol.spec.lambda : 0.0;
    // master time grid: dense overall + the hazard knots + event times
    std::vector<double> ts;
    const int n0 = 2001;
    for (int i = 0; i < n0; ++i) ts.push_back(tl.t_final * i / (n0 - 1));
    for (double t : tl.tg) ts.push_back(t);
    if (tl.has_atom) ts.push_back(tl.t_atom);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

    double atom_surv = 1.0;
    bool atom_done = false;
    auto push = [&](double t, double Fv) {
        F.t_knots.push_back(t);
        F.F_knots.push_back(Fv);
    };
    for (double t : ts) {
        const double base = std::exp(-tl.cumhaz(t) - lam_bt * t);
        if (tl.has_atom && t >= tl.t_atom && !atom_done) {
            const double s_pre = std::exp(-tl.cumhaz(tl.t_atom) - lam_bt * tl.t_atom);
            push(tl.t_atom, 1.0 - s_pre);
            const double jump = s_pre * tl.m_atom;
            F.atoms.push_back({tl.t_atom, jump, 1});
            push(tl.t_atom, 1.0 - s_pre * (1.0 - tl.m_atom));
            atom_surv = 1.0 - tl.m_atom;
            atom_done = true;
            if (t == tl.t_atom) continue;
        }
        push(t, 1.0 - base * atom_surv);
    }
    // terminal atom: all remaining mass stops with action l
    const double s_end = std::exp(-tl.cumhaz(tl.t_final) - lam_bt * tl.t_final) * atom_surv;
    if (s_end > 0.0) {
        F.atoms.push_back({tl.t_final, s_end, 0});
        push(tl.t_final, 1.0);
    }
    if (tl.has_hazard) F.segments.push_back({tl.t_h0, tl.t_h1});
    return F;
}

StoppingDistribution mix(const StoppingDistribution& FR, const StoppingDistribution& FL,
                         double theta) {
    StoppingDistribution F;
    F.conditioning = Conditioning::Prior;
    F.theta = theta;
    std::vector<double> ts;
    ts.insert(ts.end(), FR.t_knots.begin(), FR.t_knots.end());
    ts.insert(ts.end(), FL.t_knots.begin(), FL.t_knots.end());
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) {
        // place both left and right limits at potential jumps
        F.t_knots.push_back(t);
        F.F_knots.push_back(theta * FR.cdf(t - 1e-13) + (1.0 - theta) * FL.cdf(t - 1e-13));
        F.t_knots.push_back(t);
        F.F_knots.push_back(theta * FR.cdf(t) + (1.0 - theta) * FL.cdf(t));
    }
    for (const auto& a : FR.atoms) F.atoms.push_back({a.t, theta * a.mass, a.action});
    for (const auto& a : FL.atoms) F.atoms.push_back({a.t, (1.0 - theta) * a.mass, a.action});
    F.segments = FR.segments;
    return F;
}

}  // namespace

double StoppingDistribution::cdf(double t) const {
    if (t_knots.empty() || t < t_knots.front()) return 0.0;
    if (t >= t_knots.back()) return F_knots.back();
    // last knot with time <= t (right-continuous at duplicated knots)
    auto it = std::upper_bound(t_knots.begin(), t_knots.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - t_knots.begin());
    const std::size_t i = j - 1;
    if (t_knots[j] <= t_knots[i]) return F_knots[i];
    const double w = (t - t_knots[i]) / (t_knots[j] - t_knots[i]);
    return F_knots[i] * (1.0 - w) + F_knots[j] * w;
}

StoppingDistribution stopping_cdf(const EquilibriumSolution& sol, double p_bar0,
                                  Conditioning cond, double theta) {
    if (!(p_bar0 > 0.0 && p_bar0 < 1.0))
        throw std::domain_error("stopping_cdf: p_bar0 must be interior");
    const Timeline tl = build_timeline(sol, p_bar0);
    if (cond == Conditioning::Prior) {
        return mix(assemble(sol, tl, Conditioning::StateR, theta),
                   assemble(sol, tl, Conditioning::StateL, theta), theta);
    }
    return assemble(sol, tl, cond, theta);
}

StoppingDistribution naive_cdf(const EquilibriumSolution& sol, double p_bar0,
                               Conditioning cond, double theta) {
    const double z0 = log_odds(p_bar0);
    Timeline tl;
    if (z0 <= sol.z1 + kBoundaryTolZ) {
        tl.immediate = true;
        tl.immediate_action = 0;
    } else if (sol.bayes.experimentation() &&
               z0 - sol.delta >= log_odds(sol.bayes.p_r_B) - kBoundaryTolZ) {
        tl.immediate = true;
        tl.immediate_action = 1;
    } else {
        // every current worst-case plan prescribes experimentation until the
        // state itself reaches p1
        tl.t_final = (z0 - sol.z1) / sol.spec.lambda;
    }
    if (cond == Conditioning::Prior) {
        return mix(assemble(sol, tl, Conditioning::StateR, theta),
                   assemble(sol, tl, Conditioning::StateL, theta), theta);
    }
    return assemble(sol, tl, cond, theta);
}

std::vector<TrajectorySample> simulate(const EquilibriumSolution& sol, double p_bar0,
                                       double theta_true, std::size_t n_paths,
                                       std::uint64_t seed) {
    if (n_paths < 1) throw ConfigError("simulate: n_paths must be >= 1");
    if (!(theta_true >= 0.0 && theta_true <= 1.0))
        throw ConfigError("simulate: theta_true must be in [0,1]");
    const Timeline tl = build_timeline(sol, p_bar0);
    std::vector<TrajectorySample> out(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) {
        Rng rng = Rng::for_path(seed, i);
        TrajectorySample s;
        s.path_index = i;
        const bool state_R = rng.bernoulli(theta_true);
        const double t_bt = state_R ? rng.exponential(sol.spec.lambda)
                                    : std::numeric_limits<double>::infinity();
        double t_dm;
        int dm_action;
        if (tl.immediate) {
            t_dm = 0.0;
            dm_action = tl.immediate_action == 2 ? (rng.bernoulli(tl.hedge_rho) ? 1 : 0)
                                                 : tl.immediate_action;
        } else {
            const double target = rng.exponential(1.0);
            const double total_haz = tl.has_hazard ? tl.ch.back() : 0.0;
            const bool atom_stop = tl.has_atom && rng.bernoulli(tl.m_atom);
            if (tl.has_hazard && target < total_haz) {
                // invert the cumulative hazard on its knot table
                auto it = std::upper_bound(tl.ch.begin(), tl.ch.end(), target);
                const std::size_t j = static_cast<std::size_t>(it - tl.ch.begin());
                const std::size_t a = j == 0 ? 0 : j - 1;
                double t = tl.tg[a];
                if (j < tl.ch.size() && tl.ch[j] > tl.ch[a])
                    t += (target - tl.ch[a]) / (tl.ch[j] - tl.ch[a]) * (tl.tg[j] - tl.tg[a]);
                t_dm = t;
                dm_action = 0;
            } else if (atom_stop) {
                t_dm = tl.t_atom;
                dm_action = 1;
            } else {
                t_dm = tl.t_final;
                dm_action = 0;
            }
        }
        if (t_bt < t_dm) {
            s.stop_time = t_bt;
            s.action = 1;
            s.breakthrough = true;
        } else {
            s.stop_time = t_dm;
            s.action = dm_action;
        }
        out[i] = s;
    }
    return out;
}

double expected_learning_time(const PayoffSpec& spec, double delta, double theta) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error("expected_learning_time: theta must be interior");
    const EquilibriumSolution sol = solve(spec, delta);
    if (spec.c > c_lower(spec) || sol.kind != BayesCase::Case1)
        throw UnsupportedRegime(
            "expected_learning_time: requires Case 1 with c <= c_lower");
    const double half = delta / 2.0;
    const double z_state0 = log_odds(theta) + half;
    if (z_state0 <= sol.z1 + kBoundaryTolZ) return 0.0;
    if (z_state0 >= sol.z4 - kBoundaryTolZ) return 0.0;
    const double lam = spec.lambda;
    auto rhs = [&](double z, double T) {
        const double th = from_log_odds(z);
        const double zs = z + half;
        double nu = 0.0;
        if (!sol.region3_empty && zs > sol.z2 && zs < sol.z3)
            nu = sol.nu_star(from_log_odds(zs));
        return (1.0 - T * (lam * th + nu)) / lam;
    };
    // integrate piecewise so the region switches land on segment ends
    std::vector<double> cuts = {sol.z1 - half};
    if (!sol.region3_empty) {
        cuts.push_back(sol.z2 - half);
        cuts.push_back(sol.z3 - half);
    }
    cuts.push_back(log_odds(theta));
    std::sort(cuts.begin(), cuts.end());
    double T = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = std::max(cuts[i], sol.z1 - half);
        const double b = std::min(cuts[i + 1], log_odds(theta));
        if (b <= a) continue;
        T = rkf45(rhs, a, T, b, 1e-11, 1e-13);
    }
    return T;
}

double knightian_learning_time(const PayoffSpec& spec, double theta) {
    if (spec.c >= c_lower(spec))
        throw UnsupportedRegime("knightian_learning_time: requires c < c_lower");
    const double nu = knightian(spec).nu;
    return theta / (spec.lambda + nu) + (1.0 - theta) / nu;
}

double ks_distance(std::vector<double> stop_times, const StoppingDistribution& F) {
    std::sort(stop_times.begin(), stop_times.end());
    const double n = static_cast<double>(stop_times.size());
    double d = 0.0;
    for (std::size_t i = 0; i < stop_times.size(); ++i) {
        const double t = stop_times[i];
        d = std::max(d, std::abs((i + 1.0) / n - F.cdf(t)));
        d = std::max(d, std::abs(i / n - F.cdf(t - 1e-12)));
    }
    return d;
}

CrossingReport single_crossing_check(const PayoffSpec& spec,
                                     const AmbiguityInterval& inner,
                                     const AmbiguityInterval& outer,
                                     int grid_n, double tol) {
    if (spec.c > c_lower(spec))
        throw UnsupportedRegime("single_crossing_check: requires c <= c_lower");
    const double zP_hi = log_odds(inner.p_bar), zP_lo = zP_hi - inner.delta;
    const double zQ_hi = log_odds(outer.p_bar), zQ_lo = zQ_hi - outer.delta;
    if (zP_hi > zQ_hi + kBoundaryTolZ || zP_lo < zQ_lo - kBoundaryTolZ)
        throw ConfigError("single_crossing_check: inner set not contained in outer");
    const auto solP = solve(spec, inner.delta);
    const auto solQ = solve(spec, outer.delta);
    if (solP.kind != BayesCase::Case1)
        throw UnsupportedRegime("single_crossing_check: requires Case 1");
    const auto FP = stopping_cdf(solP, inner.p_bar, Conditioning::StateL);
    const auto FQ = stopping_cdf(solQ, outer.p_bar, Conditioning::StateL);
    const double horizon = 1.02 * std::max(FP.horizon(), FQ.horizon()) + 1e-9;

    CrossingReport rep;
    int last_sign = 0;
    bool seen_minus = false;
    for (int i = 0; i <= grid_n; ++i) {
        const double t = horizon * i / grid_n;
        const double d = FQ.cdf(t) - FP.cdf(t);
        if (std::abs(d) <= tol) continue;
        const int s = d > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) {
            ++rep.sign_changes;
            if (rep.sign_changes == 1) rep.t_hat = t;
        }
        if (s < 0) seen_minus = true;
        if (s > 0 && seen_minus)
            rep.max_violation = std::max(rep.max_violation, d);
        last_sign = s;
    }
    // An empty "before" or "after" part is a degenerate but valid crossing:
    // require the pattern +^a -^b (a or b possibly zero), never + after -.
    if (rep.sign_changes == 0) rep.t_hat = last_sign < 0 ? 0.0 : horizon;
    rep.single_crossing = rep.sign_changes <= 1 && rep.max_violation == 0.0;
    return rep;
}

}  // namespace ambistop
