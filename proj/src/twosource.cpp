#include "ambistop/twosource.hpp"

#include <algorithm>
#include <cmath>

#include "ambistop/bayesian.hpp"
#include "ambistop/numerics.hpp"

namespace ambistop {

namespace {

enum ActionIdx { kStopL = 0, kSeekR = 1, kSplit = 2, kSeekL = 3, kStopR = 4 };

TwoSourceAction to_action(int idx) {
    switch (idx) {
        case kStopL: return TwoSourceAction::StopL;
        case kSeekR: return TwoSourceAction::SeekR;
        case kSplit: return TwoSourceAction::Split;
        case kSeekL: return TwoSourceAction::SeekL;
        default: return TwoSourceAction::StopR;
    }
}

}  // namespace

double TwoSourceBayes::value_at(double p) const {
    const double zq = log_odds(p);
    if (zq <= z.front()) return spec.delta_payoff * (1.0 - p);
    if (zq >= z.back()) return spec.delta_payoff * p;
    const double u = (zq - z.front()) / (z[1] - z[0]);
    const std::size_t i = std::min(static_cast<std::size_t>(u), z.size() - 2);
    const double w = u - static_cast<double>(i);
    return V[i] * (1.0 - w) + V[i + 1] * w;
}

TwoSourceAction TwoSourceBayes::action_at(double p) const {
    const double zq = log_odds(p);
    if (zq <= z.front()) return TwoSourceAction::StopL;
    if (zq >= z.back()) return TwoSourceAction::StopR;
    const double u = (zq - z.front()) / (z[1] - z[0]);
    const std::size_t i = std::min(static_cast<std::size_t>(std::lround(u)), z.size() - 1);
    return to_action(action[i]);
}

TwoSourceBayes bayes_two_source(const TwoSourceSpec& spec, double dt) {
    spec.validate();
    if (spec.c >= spec.c_bar2())
        throw UnsupportedRegime("bayes_two_source: c >= lambda*delta/2, immediate action");
    TwoSourceBayes b;
    b.spec = spec;
    b.dt = dt;
    const double d = spec.delta_payoff, lam = spec.lambda, c = spec.c;
    // grid wide enough to contain the action boundaries +-llr(c/(lambda d))
    const double zmax = std::abs(log_odds(c / (lam * d))) + 1.5;
    const double h = lam * dt;
    const std::size_t n = 2 * static_cast<std::size_t>(std::ceil(zmax / h)) + 1;
    b.z.resize(n);
    std::vector<double> p(n), Ul(n), Ur(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.z[i] = -zmax + h * static_cast<double>(i);
        p[i] = from_log_odds(b.z[i]);
        Ul[i] = d * (1.0 - p[i]);
        Ur[i] = d * p[i];
    }
    const double ustar = spec.u_split();
    b.V.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) b.V[i] = std::max(Ul[i], Ur[i]);
    // Gauss-Seidel sweeps: left-to-right propagates seek-R chains (state
    // drifts left), right-to-left propagates seek-L chains.
    for (int sweep = 0; sweep < 100000; ++sweep) {
        double diff = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            const double cont = -c * dt + p[i] * lam * dt * d + (1.0 - p[i] * lam * dt) * b.V[i - 1];
            const double v = std::max({b.V[i], cont, ustar});
            diff = std::max(diff, v - b.V[i]);
            b.V[i] = v;
        }
        for (std::size_t i = n - 1; i-- > 0;) {
            const double q = 1.0 - p[i];
            const double cont = -c * dt + q * lam * dt * d + (1.0 - q * lam * dt) * b.V[i + 1];
            const double v = std::max({b.V[i], cont, ustar});
            diff = std::max(diff, v - b.V[i]);
            b.V[i] = v;
        }
        if (diff < 1e-13) break;
    }
    // classify the optimal action per state
    b.action.assign(n, kSplit);
    for (std::size_t i = 0; i < n; ++i) {
        double best = Ul[i];
        int arg = kStopL;
        auto consider = [&](double v, int a) {
            if (v > best + 1e-12) {
                best = v;
                arg = a;
            }
        };
        consider(Ur[i], kStopR);
        consider(ustar, kSplit);
        if (i > 0) consider(-c * dt + p[i] * lam * dt * d + (1.0 - p[i] * lam * dt) * b.V[i - 1], kSeekR);
        if (i + 1 < n)
            consider(-c * dt + (1.0 - p[i]) * lam * dt * d + (1.0 - (1.0 - p[i]) * lam * dt) * b.V[i + 1],
                     kSeekL);
        b.action[i] = arg;
    }
    b.low_cost = spec.c < spec.c_lower_star();
    b.p_L_B = b.p_R_B = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = 1; i < n; ++i) {
        if (b.action[i - 1] == kStopL && b.action[i] != kStopL) b.p_l_B = p[i];
        if (b.action[i - 1] != kStopR && b.action[i] == kStopR) b.p_r_B = p[i - 1];
        if (b.low_cost) {
            if (b.z[i] < 0 && b.action[i - 1] == kSeekR && b.action[i] == kSeekL) b.p_L_B = p[i];
            if (b.z[i] > 0 && b.action[i - 1] == kSeekL && b.action[i] == kSeekR) b.p_R_B = p[i];
        }
    }
    return b;
}

AttentionPolicy bayes_policy_at(const TwoSourceBayes& bayes, double p) {
    AttentionPolicy ap;
    ap.pi = p;
    switch (bayes.action_at(p)) {
        case TwoSourceAction::StopL:
            ap.action = TwoSourceAction::StopL;
            ap.m = 1.0;
            ap.rho = 0.0;
            ap.alpha = 0.0;
            break;
        case TwoSourceAction::StopR:
            ap.action = TwoSourceAction::StopR;
            ap.m = 1.0;
            ap.rho = 1.0;
            ap.alpha = 1.0;
            break;
        case TwoSourceAction::SeekR:
            ap.action = TwoSourceAction::SeekR;
            ap.alpha = 1.0;
            break;
        case TwoSourceAction::SeekL:
            ap.action = TwoSourceAction::SeekL;
            ap.alpha = 0.0;
            break;
        default:
            ap.action = TwoSourceAction::Split;
            ap.alpha = 0.5;
            break;
    }
    return ap;
}

namespace {

// Vhat of the randomized-stopping band with boundary (1/2, Phi*(1/2)); the
// single-source closed form applies verbatim with p2 = 1/2.
struct BandPieces {
    double u1, u2, k, lnR;
    double vhat_z(double zq) const {
        return u1 + (u2 - u1) / (1.0 + std::exp(k * zq + lnR));
    }
};

BandPieces band_pieces(const TwoSourceSpec& spec) {
    const PayoffSpec emb = spec.embedded();
    const auto bayes = solve_bayesian(emb);
    const double phi_half = bayes.PhiStar(0.5);
    auto [u1, u2] = u_roots(emb);
    BandPieces bp;
    bp.u1 = u1;
    bp.u2 = u2;
    bp.k = (u2 - u1) / emb.delta_l();
    bp.lnR = std::log((u2 - phi_half) / (phi_half - u1));  // z2 = llr(1/2) = 0
    return bp;
}

}  // namespace

double two_source_vhat(const TwoSourceSpec& spec, double p_bar) {
    return band_pieces(spec).vhat_z(log_odds(p_bar));
}

double two_source_nu(const TwoSourceSpec& spec, double p_bar) {
    const PayoffSpec emb = spec.embedded();
    return emb.lambda * (emb.u_r_R - two_source_vhat(spec, p_bar)) / emb.delta_l();
}

double two_source_pi(const TwoSourceSpec& spec, double p_bar) {
    const PayoffSpec emb = spec.embedded();
    return (emb.u_l_L - two_source_vhat(spec, p_bar)) / emb.delta_l();
}

std::optional<std::pair<double, double>> p_plus_minus(const TwoSourceSpec& spec) {
    spec.validate();
    if (spec.c >= spec.c_bar2())
        throw UnsupportedRegime("p_plus_minus: c >= lambda*delta/2");
    const double level = std::max(spec.u_split(), spec.u_hat());
    const auto bp = band_pieces(spec);
    const double at_half = bp.vhat_z(0.0);
    if (level >= at_half - 1e-14) return std::nullopt;  // band is empty
    auto f = [&](double zq) { return bp.vhat_z(zq) - level; };
    const double z_plus = bisect(f, 1e-14, 200.0, kBoundaryTolZ);
    const double pp = from_log_odds(z_plus);
    return std::make_pair(1.0 - pp, pp);
}

AttentionPolicy two_source_equilibrium(double p_bar, double delta_amb,
                                       const TwoSourceSpec& spec) {
    spec.validate();
    if (!(delta_amb >= 0.0)) throw ConfigError("two_source_equilibrium: delta must be >= 0");
    if (spec.c >= spec.c_bar2())
        throw UnsupportedRegime("two_source_equilibrium: c >= lambda*delta/2");
    const auto bayes = bayes_two_source(spec);
    const double pl = p_lower(p_bar, delta_amb);
    if (p_bar <= 0.5 + 1e-14) {
        auto ap = bayes_policy_at(bayes, p_bar);
        ap.pi = p_bar;
        return ap;
    }
    if (pl >= 0.5 - 1e-14) {
        auto ap = bayes_policy_at(bayes, pl);
        ap.pi = pl;
        return ap;
    }
    // straddling 1/2
    const double ustar = spec.u_split(), uhat = spec.u_hat();
    auto hedge = [&] {
        AttentionPolicy ap;
        ap.pi = 0.5;
        if (ustar > uhat) {
            ap.action = TwoSourceAction::Split;
            ap.alpha = 0.5;
        } else {
            ap.action = TwoSourceAction::HedgeAction;
            ap.m = 1.0;
            ap.rho = 0.5;
            ap.alpha = 0.5;
        }
        return ap;
    };
    const PayoffSpec emb = spec.embedded();
    const bool large_amb =
        spec.c >= spec.c_lower_star() &&
        emb.U_l(from_log_odds(-delta_amb)) > solve_bayesian(emb).PhiStar(0.5) + 1e-14;
    if (!large_amb) return hedge();
    const auto band = p_plus_minus(spec);
    if (!band) return hedge();
    const auto [p_minus, p_plus] = *band;
    if (pl <= p_minus && p_bar >= p_plus) return hedge();
    AttentionPolicy ap;
    if (p_bar <= p_plus + 1e-14) {
        // randomize between action l and R-evidence seeking (Region 3 reuse)
        ap.action = TwoSourceAction::SeekR;
        ap.alpha = 1.0;
        ap.nu = two_source_nu(spec, p_bar);
        ap.rho = 0.0;
        ap.pi = two_source_pi(spec, p_bar);
        return ap;
    }
    // mirror band: randomize between action r and L-evidence seeking
    ap.action = TwoSourceAction::SeekL;
    ap.alpha = 0.0;
    ap.nu = two_source_nu(spec, 1.0 - pl);
    ap.rho = 1.0;
    ap.pi = 1.0 - two_source_pi(spec, 1.0 - pl);
    return ap;
}

std::vector<SplitSimStep> simulate_split_attention(const TwoSourceSpec& spec,
                                                   double p_lo, double p_hi,
                                                   double theta_true, double dt,
                                                   int n_steps, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const bool state_R = rng.bernoulli(theta_true);
    std::vector<SplitSimStep> out;
    out.reserve(n_steps);
    double zlo = log_odds(p_lo), zhi = log_odds(p_hi);
    for (int k = 0; k < n_steps; ++k) {
        // alpha = 1/2: evidence arrives at rate lambda/2 in either state and
        // no news is uninformative, so the interval stays put
        const bool evidence = rng.bernoulli(1.0 - std::exp(-spec.lambda / 2.0 * dt));
        if (evidence) {
            const double z_ev = state_R ? 60.0 : -60.0;
            out.push_back({from_log_odds(z_ev), from_log_odds(z_ev), true});
            break;
        }
        out.push_back({from_log_odds(zlo), from_log_odds(zhi), false});
    }
    return out;
}

}  // namespace ambistop
