#include "geomflow/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace geomflow {
namespace oracles {

double sphere_moment(int n, double r, double p, double t, double v0_norm) {
    if (n < 1 || !(r > 0.0)) throw InvalidInput("sphere_moment: need n >= 1, r > 0");
    return std::pow(v0_norm, p) * std::exp(p * (p - n) * t / (2.0 * r * r));
}

LangevinPath langevin_exact(double c, double gamma, double x0,
                            const std::vector<double>& increments, double dt) {
    if (!(c > 0.0)) throw InvalidInput("langevin_exact: need c > 0");
    LangevinPath path;
    const std::size_t n = increments.size();
    path.times.reserve(n + 1);
    path.points.reserve(n + 1);
    path.jacobians.reserve(n + 1);
    const double a = std::exp(-c * dt);
    const double sig = gamma * std::sqrt((1.0 - a * a) / (2.0 * c));
    const double sdt = std::sqrt(dt);
    double x = x0;
    path.times.push_back(0.0);
    path.points.push_back(x);
    path.jacobians.push_back(1.0);
    for (std::size_t k = 0; k < n; ++k) {
        x = a * x + sig * (increments[k] / sdt);  // rescale dB ~ N(0,dt) to unit normal
        path.times.push_back((k + 1) * dt);
        path.points.push_back(x);
        path.jacobians.push_back(std::exp(-c * (k + 1) * dt));
    }
    return path;
}

HyperbolicPath hyperbolic_exact(double x0, double y0, const std::vector<double>& db1,
                                const std::vector<double>& db2, double dt) {
    if (!(y0 > 0.0)) throw InvalidInput("hyperbolic_exact: need y0 > 0");
    if (db1.size() != db2.size()) throw InvalidInput("hyperbolic_exact: increment size mismatch");
    HyperbolicPath p;
    const std::size_t n = db1.size();
    p.times.reserve(n + 1);
    p.xs.reserve(n + 1);
    p.ys.reserve(n + 1);
    p.jac_y.reserve(n + 1);
    double B2 = 0.0;
    double g_prev = 1.0;  // e^{B^2_0 - 0}
    double x = x0;
    p.times.push_back(0.0);
    p.xs.push_back(x0);
    p.ys.push_back(y0);
    p.jac_y.push_back(1.0);
    for (std::size_t k = 0; k < n; ++k) {
        B2 += db2[k];
        const double t = (k + 1) * dt;
        const double g = std::exp(B2 - 0.5 * t);
        x += 0.5 * (g_prev + g) * db1[k];
        g_prev = g;
        p.times.push_back(t);
        p.xs.push_back(x);
        p.ys.push_back(y0 * g);
        p.jac_y.push_back(g);
    }
    return p;
}

double OuKernel::variance(double t) const {
    if (!(t > 0.0)) throw InvalidInput("ou_kernel: need t > 0");
    if (c == 0.0) return gamma * gamma * t;
    return gamma * gamma * (1.0 - std::exp(-2.0 * c * t)) / (2.0 * c);
}

double OuKernel::density(double x, double y, double t) const {
    const double v = variance(t);
    const double d = y - mean(x, t);
    return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * 3.14159265358979323846 * v);
}

double OuKernel::grad_log_density(double x, double y, double t) const {
    return (y - mean(x, t)) * std::exp(-c * t) / variance(t);
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double OuKernel::semigroup(const std::function<double(double)>& f, double x, double t,
                           double tol) const {
    const double mu = mean(x, t);
    const double sd = std::sqrt(variance(t));
    const double a = mu - 10.0 * sd, b = mu + 10.0 * sd;
    auto integrand = [&](double y) { return f(y) * density(x, y, t); };
    const double fa = integrand(a), fb = integrand(b), fm = integrand(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(integrand, a, b, fa, fm, fb, whole, tol, 40);
}

std::optional<double> torus_first_moment(double a, double b) {
    const double inv_sqrt2 = 0.70710678118654752440;
    if (std::abs(a - inv_sqrt2) < 1e-12 && std::abs(b - inv_sqrt2) < 1e-12) return 1.0;
    return std::nullopt;  // no reference value for other parameters
}

double brownian_interval_exit_prob(double a, double t) {
    if (!(a > 0.0) || !(t > 0.0)) throw InvalidInput("interval exit: need a, t > 0");
    // P{tau > t} = (4/pi) sum_k (-1)^k/(2k+1) exp(-(2k+1)^2 pi^2 t / (8 a^2))
    const double pi = 3.14159265358979323846;
    const double lam = pi * pi * t / (8.0 * a * a);
    double survive = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double m = 2.0 * k + 1.0;
        const double term = ((k % 2 == 0) ? 1.0 : -1.0) / m * std::exp(-m * m * lam);
        survive += term;
        if (std::abs(term) < 1e-16) break;
    }
    survive *= 4.0 / pi;
    return std::clamp(1.0 - survive, 0.0, 1.0);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    return d;
}

double ks_critical(double alpha, std::size_t n, std::size_t m) {
    const double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
    return c * std::sqrt((static_cast<double>(n) + m) / (static_cast<double>(n) * m));
}

}  // namespace oracles
}  // namespace geomflow
