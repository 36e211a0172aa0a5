#include "ambistop/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ambistop {

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol, int max_iter) {
    if (lo > hi) std::swap(lo, hi);
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if (std::signbit(flo) == std::signbit(fhi))
        throw std::runtime_error("bisect: no sign change in bracket");
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<std::pair<double, double>> scan_brackets(
    const std::function<double(double)>& f, double lo, double hi, int n) {
    std::vector<std::pair<double, double>> out;
    double xp = lo, fp = f(lo);
    for (int i = 1; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double fx = f(x);
        if (std::isfinite(fp) && std::isfinite(fx) &&
            std::signbit(fp) != std::signbit(fx))
            out.emplace_back(xp, x);
        xp = x;
        fp = fx;
    }
    return out;
}

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

double rkf45(const std::function<double(double, double)>& f, double x0, double y0,
             double x1, double rtol, double atol) {
    // Fehlberg coefficients
    static const double a2 = 1.0 / 4, a3 = 3.0 / 8, a4 = 12.0 / 13, a5 = 1.0, a6 = 1.0 / 2;
    static const double b21 = 1.0 / 4;
    static const double b31 = 3.0 / 32, b32 = 9.0 / 32;
    static const double b41 = 1932.0 / 2197, b42 = -7200.0 / 2197, b43 = 7296.0 / 2197;
    static const double b51 = 439.0 / 216, b52 = -8.0, b53 = 3680.0 / 513, b54 = -845.0 / 4104;
    static const double b61 = -8.0 / 27, b62 = 2.0, b63 = -3544.0 / 2565, b64 = 1859.0 / 4104,
                        b65 = -11.0 / 40;
    static const double c1 = 16.0 / 135, c3 = 6656.0 / 12825, c4 = 28561.0 / 56430,
                        c5 = -9.0 / 50, c6 = 2.0 / 55;
    static const double d1 = 25.0 / 216, d3 = 1408.0 / 2565, d4 = 2197.0 / 4104, d5 = -1.0 / 5;

    const double dir = x1 >= x0 ? 1.0 : -1.0;
    double x = x0, y = y0;
    double h = dir * std::max(1e-8, std::abs(x1 - x0) / 64.0);
    int guard = 0;
    while (dir * (x1 - x) > 0 && ++guard < 2000000) {
        if (dir * (x + h - x1) > 0) h = x1 - x;
        const double k1 = f(x, y);
        const double k2 = f(x + a2 * h, y + h * b21 * k1);
        const double k3 = f(x + a3 * h, y + h * (b31 * k1 + b32 * k2));
        const double k4 = f(x + a4 * h, y + h * (b41 * k1 + b42 * k2 + b43 * k3));
        const double k5 = f(x + a5 * h, y + h * (b51 * k1 + b52 * k2 + b53 * k3 + b54 * k4));
        const double k6 =
            f(x + a6 * h, y + h * (b61 * k1 + b62 * k2 + b63 * k3 + b64 * k4 + b65 * k5));
        const double y5 = y + h * (c1 * k1 + c3 * k3 + c4 * k4 + c5 * k5 + c6 * k6);
        const double y4 = y + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5);
        const double err = std::abs(y5 - y4);
        const double tol = atol + rtol * std::max(std::abs(y), std::abs(y5));
        if (err <= tol || std::abs(h) < 1e-14) {
            x += h;
            y = y5;
        }
        const double scale = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 2.0;
        h *= std::clamp(scale, 0.2, 2.0);
    }
    return y;
}

bool HermiteTable::contains(double x) const {
    const double lo = std::min(x_front(), x_back());
    const double hi = std::max(x_front(), x_back());
    return x >= lo - 1e-12 && x <= hi + 1e-12;
}

std::pair<std::size_t, double> HermiteTable::locate(double x) const {
    double u = (x - x0_) / dx_;
    const double last = static_cast<double>(v_.size()) - 1.0;
    u = std::clamp(u, 0.0, last);
    std::size_t i = std::min(static_cast<std::size_t>(u), v_.size() - 2);
    return {i, u - static_cast<double>(i)};
}

double HermiteTable::value(double x) const {
    const auto [i, t] = locate(x);
    const double h = dx_;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * v_[i] + (t3 - 2 * t2 + t) * h * s_[i] +
           (-2 * t3 + 3 * t2) * v_[i + 1] + (t3 - t2) * h * s_[i + 1];
}

double HermiteTable::slope(double x) const {
    const auto [i, t] = locate(x);
    const double h = dx_;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * v_[i] + (3 * t2 - 4 * t + 1) * h * s_[i] +
            (-6 * t2 + 6 * t) * v_[i + 1] + (3 * t2 - 2 * t) * h * s_[i + 1]) /
           h;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

}  // namespace ambistop
