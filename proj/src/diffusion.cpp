#include "ambistop/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

namespace ambistop {

double diffusion_W(double z, const DiffusionSpec& spec) {
    const double k = 2.0 * spec.c / (spec.psi() * spec.psi());
    return k * z * std::tanh(z / 2.0);
}

double diffusion_W_prime(double z, const DiffusionSpec& spec) {
    const double k = 2.0 * spec.c / (spec.psi() * spec.psi());
    const double s = 1.0 / std::cosh(z / 2.0);
    return k * (std::tanh(z / 2.0) + z / 2.0 * s * s);
}

std::pair<double, double> diffusion_phi_bvp(double y, double a, double b, double Ua,
                                            double Ub, const DiffusionSpec& spec) {
    const double Ta = std::tanh(a / 2.0), Tb = std::tanh(b / 2.0);
    const double B = (Ub - diffusion_W(b, spec) - Ua + diffusion_W(a, spec)) / (Tb - Ta);
    const double A = Ua - diffusion_W(a, spec) - B * Ta;
    const double s = 1.0 / std::cosh(y / 2.0);
    return {A + B * std::tanh(y / 2.0) + diffusion_W(y, spec),
            B * 0.5 * s * s + diffusion_W_prime(y, spec)};
}

double DiffusionBayes::PhiB(double z) const { return value0 + diffusion_W(z, spec); }
double DiffusionBayes::PhiB_prime(double z) const { return diffusion_W_prime(z, spec); }

DiffusionBayes bayes_boundaries_z(const DiffusionSpec& spec) {
    spec.validate();
    DiffusionBayes b;
    b.spec = spec;
    const double d = spec.delta_payoff;
    // smooth pasting: W'(z) = U_r'(z) = d p(z)(1-p(z)); single crossing on (0, inf)
    auto f = [&](double z) {
        const double p = from_log_odds(z);
        return diffusion_W_prime(z, spec) - d * p * (1.0 - p);
    };
    const auto brackets = scan_brackets(f, 1e-8, 60.0, 6000);
    if (brackets.empty())
        throw UnsupportedRegime("bayes_boundaries_z: no tangency, immediate action");
    b.z_r_B = bisect(f, brackets.front().first, brackets.front().second, 1e-13);
    b.value0 = d * from_log_odds(b.z_r_B) - diffusion_W(b.z_r_B, spec);
    if (b.value0 <= d / 2.0)
        throw UnsupportedRegime("bayes_boundaries_z: experimentation not worthwhile");
    return b;
}

double DiffusionSolution::vhat(double z) const { return band.value(-std::abs(z)); }
double DiffusionSolution::vhat_prime(double z) const {
    const double s = band.slope(-std::abs(z));
    return z <= 0.0 ? s : -s;
}
double DiffusionSolution::nu(double z) const {
    if (regime != DiffusionRegime::LargeDelta) return 0.0;
    const double az = -std::abs(z);
    if (az <= z_m) return 0.0;
    const double psi2 = spec.psi() * spec.psi();
    return std::max(0.0, -psi2 * band.slope(az) / spec.delta_payoff);
}
double DiffusionSolution::zeta(double z) const {
    // indifference U_r(zeta) = Vhat on the r-mixing side (z < 0); mirrored
    const double v = vhat(z);
    const double zz = log_odds(v / spec.delta_payoff);
    return z <= 0.0 ? zz : -zz;
}

double DiffusionSolution::value_small(double y, double z) const {
    const double g = y - z;
    const auto [val, _] = diffusion_phi_bvp(y, z_l + g, z_r + g, spec.U_l(z_l + g),
                                            spec.U_r(z_r + g), spec);
    return val;
}

namespace {

struct BandShot {
    HermiteTable table;  // on [z_min, 0]
    double z_min;
};

// integrate the band ODE c = psi^2 (V/delta - 1/2) V' + (psi^2/2) V'' leftward
// from (0; v0, 0); store a C^1 table
BandShot shoot_band(const DiffusionSpec& spec, double v0, double z_min) {
    const double psi2 = spec.psi() * spec.psi();
    const double h_store = 1e-3;
    const int n_store = static_cast<int>(std::ceil(-z_min / h_store)) + 1;
    std::vector<double> val(n_store), slo(n_store);
    auto rhs = [&](double /*z*/, const std::array<double, 2>& y) {
        return std::array<double, 2>{
            y[1], (spec.c - psi2 * (y[0] / spec.delta_payoff - 0.5) * y[1]) * 2.0 / psi2};
    };
    std::array<double, 2> y{v0, 0.0};
    val[n_store - 1] = v0;
    slo[n_store - 1] = 0.0;
    double z = 0.0;
    for (int i = n_store - 2; i >= 0; --i) {
        const double z_next = -h_store * (n_store - 1 - i);
        y = rk4<2>(rhs, z, y, z_next, 10);
        val[i] = y[0];
        slo[i] = y[1];
        z = z_next;
    }
    BandShot bs;
    bs.z_min = -h_store * (n_store - 1);
    bs.table = HermiteTable(bs.z_min, h_store, std::move(val), std::move(slo));
    return bs;
}

struct EdgeSystem {
    double zm = 0, zl = 0, vm = 0, sm = 0;
    double aR = 0, bR = 0, aL = 0, bL = 0;
    double theta_R = 0, theta_L = 0;
    bool ok = false;
};

// Given v0 solve: z_m from the corner condition Vhat(z_m) = U_r(z_m + D/2);
// outer V_R, V_L from value matching and flatness at z_m plus the stop values
// at z_l; z_l from smooth pasting at the right-most belief.
EdgeSystem edge_system(const DiffusionSpec& spec, double delta, const BandShot& bs,
                       bool need_theta) {
    const double d = spec.delta_payoff;
    const double k = 2.0 * spec.c / (spec.psi() * spec.psi());
    EdgeSystem es;
    auto corner = [&](double z) { return bs.table.value(z) - d * from_log_odds(z + delta / 2.0); };
    const auto br = scan_brackets(corner, -1e-9, bs.z_min + 1e-6, 4000);
    if (br.empty()) return es;
    es.zm = bisect(corner, br.front().first, br.front().second, 1e-13);
    es.vm = bs.table.value(es.zm);
    es.sm = bs.table.slope(es.zm);

    auto outer_for = [&](double zl) {
        // V_R(zl) = 0, V_R(zm) = vm ; V_L(zl) = d, V_L(zm) = vm
        const double eR = std::exp(-zl) - std::exp(-es.zm);
        const double bR = (0.0 - es.vm - k * (zl - es.zm)) / eR;
        const double aR = -bR * std::exp(-zl) - k * zl;
        const double eL = std::exp(zl) - std::exp(es.zm);
        const double bL = (d - es.vm + k * (zl - es.zm)) / eL;
        const double aL = d - bL * std::exp(zl) + k * zl;
        return std::array<double, 4>{aR, bR, aL, bL};
    };
    auto pasting = [&](double zl) {
        const auto o = outer_for(zl);
        const double VR = o[0] + o[1] * std::exp(-zl) + k * zl;
        const double VL = o[2] + o[3] * std::exp(zl) - k * zl;
        const double VRp = -o[1] * std::exp(-zl) + k;
        const double VLp = o[3] * std::exp(zl) - k;
        const double y = zl + delta / 2.0;
        const double p = from_log_odds(y);
        const double pp = p * (1.0 - p);
        // d/dz V(z + D/2, z) = U_l'(y) at the stopping state
        return pp * (VR - VL) + p * VRp + (1.0 - p) * VLp + d * pp;
    };
    const auto brl = scan_brackets(pasting, es.zm - 0.02, es.zm - 25.0, 6000);
    if (brl.empty()) return es;
    es.zl = bisect(pasting, brl.front().second, brl.front().first, 1e-13);
    const auto o = outer_for(es.zl);
    es.aR = o[0];
    es.bR = o[1];
    es.aL = o[2];
    es.bL = o[3];
    if (need_theta) {
        const double psi2 = spec.psi() * spec.psi();
        const double VRp = -es.bR * std::exp(-es.zm) + k;
        const double VLp = es.bL * std::exp(es.zm) - k;
        es.theta_R = -(psi2 / 2.0) * (es.sm - VRp) / (d - es.vm);
        es.theta_L = (psi2 / 2.0) * (es.sm - VLp) / es.vm;
    }
    es.ok = true;
    return es;
}

}  // namespace

DiffusionSolution solve_diffusion(const DiffusionSpec& spec, double delta) {
    spec.validate();
    if (!(delta >= 0.0)) throw ConfigError("solve_diffusion: delta must be >= 0");
    const auto bayes = bayes_boundaries_z(spec);
    DiffusionSolution sol;
    sol.spec = spec;
    sol.delta = delta;
    sol.z_r_B = bayes.z_r_B;
    sol.z_l_B = -bayes.z_r_B;
    const double d = spec.delta_payoff;

    // small-Delta attempt: one unknown z_r by symmetry, smooth pasting at the
    // inner-most belief of the right boundary state
    auto small_ok = [&](double zr) {
        DiffusionSolution tmp = sol;
        tmp.z_r = zr;
        tmp.z_l = -zr;
        tmp.regime = DiffusionRegime::SmallDelta;
        if (zr - delta / 2.0 <= 0.0) return false;  // inner beliefs must straddle 0
        for (int i = 0; i <= 80; ++i) {
            const double z = -zr + 2.0 * zr * i / 80.0;
            double best = std::numeric_limits<double>::infinity();
            double arg = 0.0;
            for (int j = 0; j <= 32; ++j) {
                const double g = -delta / 2.0 + delta * j / 32.0;
                const double v = tmp.value_small(z + g, z);
                if (v < best) {
                    best = v;
                    arg = g;
                }
            }
            if (best < spec.U(z + arg) - 1e-10) return false;
        }
        return true;
    };
    {
        auto F = [&](double zr) {
            const double a = -zr - delta / 2.0, b = zr - delta / 2.0;
            const auto [val, der] =
                diffusion_phi_bvp(b, a, b, spec.U_l(a), spec.U_r(b), spec);
            (void)val;
            const double p = from_log_odds(b);
            return der - d * p * (1.0 - p);
        };
        const auto br = scan_brackets(F, delta / 2.0 + 1e-7, bayes.z_r_B + delta / 2.0 + 4.0, 4000);
        if (!br.empty()) {
            const double zr = bisect(F, br.front().first, br.front().second, 1e-13);
            if (small_ok(zr)) {
                sol.regime = DiffusionRegime::SmallDelta;
                sol.z_r = zr;
                sol.z_l = -zr;
                return sol;
            }
        }
    }

    // large-Delta: nested bisection on v0 (band level at z = 0) with the
    // slope-kink consistency theta_R = theta_L at the band edge as residual
    sol.regime = DiffusionRegime::LargeDelta;
    const double z_deep = -std::max(8.0, delta);
    auto resid = [&](double v0) -> std::optional<double> {
        const BandShot bs = shoot_band(spec, v0, z_deep);
        const EdgeSystem es = edge_system(spec, delta, bs, true);
        if (!es.ok) return std::nullopt;
        return es.theta_R - es.theta_L;
    };
    const double v_lo = d / 2.0 + 1e-6;
    const double v_hi = d * from_log_odds(delta / 2.0) - 1e-9;
    double lo = -1, hi = -1, flo = 0;
    const int n_scan = 60;
    double prev_v = -1, prev_f = 0;
    bool have_prev = false;
    for (int i = 0; i <= n_scan; ++i) {
        const double v = v_lo + (v_hi - v_lo) * i / n_scan;
        const auto f = resid(v);
        if (!f) continue;
        if (have_prev && std::signbit(prev_f) != std::signbit(*f)) {
            lo = prev_v;
            hi = v;
            flo = prev_f;
            break;
        }
        prev_v = v;
        prev_f = *f;
        have_prev = true;
    }
    if (lo < 0)
        throw UnsupportedRegime("solve_diffusion: mixed-band fixed point not bracketed");
    for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto f = resid(mid);
        if (!f) throw UnsupportedRegime("solve_diffusion: band solve failed inside bracket");
        if (std::signbit(*f) == std::signbit(flo)) {
            lo = mid;
            flo = *f;
        } else {
            hi = mid;
        }
    }
    sol.v0 = 0.5 * (lo + hi);
    const BandShot bs = shoot_band(spec, sol.v0, z_deep);
    const EdgeSystem es = edge_system(spec, delta, bs, true);
    if (!es.ok) throw UnsupportedRegime("solve_diffusion: edge system failed at fixed point");
    sol.band = bs.table;
    sol.z_m = es.zm;
    sol.z_l = es.zl;
    sol.z_r = -es.zl;
    sol.theta_edge = 0.5 * (es.theta_R + es.theta_L);
    sol.aR = es.aR;
    sol.bR = es.bR;
    sol.aL = es.aL;
    sol.bL = es.bL;
    if (sol.theta_edge < 0)
        throw UnsupportedRegime("solve_diffusion: negative edge stopping intensity");
    return sol;
}

DiffusionMc simulate_diffusion(const DiffusionSolution& sol, double y0, double z0,
                               std::size_t n_paths, std::uint64_t seed, double dt,
                               int n_threads) {
    const DiffusionSpec& spec = sol.spec;
    const double psi = spec.psi();
    const double sq = psi * std::sqrt(dt);
    const double d = spec.delta_payoff;
    const bool large = sol.regime == DiffusionRegime::LargeDelta;
    const double eps = sq;  // local-time window
    const double lt_haz = large ? sol.theta_edge * psi * psi / (2.0 * eps) : 0.0;

    if (n_threads <= 0) {
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
        if (n_threads <= 0) n_threads = 1;
    }
    std::vector<double> payoff(n_paths), time_used(n_paths);
    auto run = [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            // antithetic pairs share the driving noise with flipped sign
            Rng rng = Rng::for_path(seed, i / 2);
            const bool flip = i % 2 == 1;
            const bool state_R = rng.bernoulli(from_log_odds(y0));
            const double drift = (state_R ? 1.0 : -1.0) * psi * psi / 2.0 * dt;
            double z = z0, t = 0.0;
            int action;
            for (;;) {
                if (z <= sol.z_l) {
                    action = 0;
                    break;
                }
                if (z >= sol.z_r) {
                    action = 1;
                    break;
                }
                double h = large ? sol.nu(z) : 0.0;
                if (large && (std::abs(z - sol.z_m) < eps || std::abs(z + sol.z_m) < eps))
                    h += lt_haz;
                if (h > 0.0 && rng.bernoulli(h * dt)) {
                    action = z < 0.0 ? 1 : 0;  // mix with r left of 0, l right of 0
                    break;
                }
                double dw = rng.normal();
                if (flip) dw = -dw;
                z += drift + sq * dw;
                t += dt;
            }
            const double u = state_R ? (action == 1 ? d : 0.0) : (action == 0 ? d : 0.0);
            payoff[i] = u - spec.c * t;
            time_used[i] = t;
        }
    };
    // NOTE: antithetic twins must consume identical rng streams; run pairs
    // within one worker so the flip stays aligned
    std::vector<std::thread> workers;
    const std::size_t pairs = (n_paths + 1) / 2;
    const std::size_t per = (pairs + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
        const std::size_t a = std::min<std::size_t>(2 * per * w, n_paths);
        const std::size_t b = std::min<std::size_t>(2 * per * (w + 1), n_paths);
        if (a < b) workers.emplace_back(run, a, b);
    }
    for (auto& th : workers) th.join();

    DiffusionMc mc;
    double sum = 0.0, sum2 = 0.0, sumt = 0.0;
    for (std::size_t i = 0; i < n_paths; ++i) {
        sum += payoff[i];
        sum2 += payoff[i] * payoff[i];
        sumt += time_used[i];
    }
    const double n = static_cast<double>(n_paths);
    mc.mean = sum / n;
    mc.mean_time = sumt / n;
    mc.se = std::sqrt(std::max(0.0, sum2 / n - mc.mean * mc.mean) / n);
    return mc;
}

}  // namespace ambistop
