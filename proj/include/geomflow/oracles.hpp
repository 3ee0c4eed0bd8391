#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "geomflow/core.hpp"
#include "geomflow/rng.hpp"

namespace geomflow {
namespace oracles {

/// E|v_t|^p = |v0|^p exp(p(p-n) t / (2 r^2)) for the gradient Brownian flow
/// on S^n(r).
double sphere_moment(int n, double r, double p, double t, double v0_norm);

struct LangevinPath {
    std::vector<double> times;
    std::vector<double> points;     // exact one-step OU transitions
    std::vector<double> jacobians;  // e^{-c t}
};

/// Exact discretized Ornstein-Uhlenbeck path driven by the supplied Brownian
/// increments: one-step transitions with mean x e^{-c dt} and variance
/// gamma^2 (1 - e^{-2 c dt}) / (2c); derivative flow e^{-c t}.
LangevinPath langevin_exact(double c, double gamma, double x0,
                            const std::vector<double>& increments, double dt);

struct HyperbolicPath {
    std::vector<double> times;
    std::vector<double> xs, ys;
    std::vector<double> jac_y;  // e^{B^2_t - t/2}; Jacobian in coordinates diag(1, jac_y)
};

/// Hyperbolic-plane flow F_t(x,y) = (x + int e^{B^2_s - s/2} dB^1_s,
/// y e^{B^2_t - t/2}) evaluated on the increment grid; the stochastic integral
/// uses the trapezoidal rule on the exact integrand values.
HyperbolicPath hyperbolic_exact(double x0, double y0, const std::vector<double>& db1,
                                const std::vector<double>& db2, double dt);

/// Hyperbolic norm |v| = sqrt(v1^2 + v2^2) / y at height y.
inline double hyperbolic_norm(double v1, double v2, double y) {
    return std::sqrt(v1 * v1 + v2 * v2) / y;
}

struct OuKernel {
    double c, gamma;
    double mean(double x, double t) const { return x * std::exp(-c * t); }
    double variance(double t) const;
    double density(double x, double y, double t) const;
    double grad_log_density(double x, double y, double t) const;  // d/dx log p_t(x,y)
    /// P_t f(x) by adaptive Simpson quadrature over the Gaussian kernel.
    double semigroup(const std::function<double(double)>& f, double x, double t,
                     double tol = 1e-10) const;
};

/// The first moment E|T_x F_t| on the torus, which the source example pins to
/// 1 only for a = b = 1/sqrt(2); other parameters have no reference value.
std::optional<double> torus_first_moment(double a, double b);

/// P{ sup_{s<=t} |W_s| >= a } for scalar Brownian motion (reflection series).
double brownian_interval_exit_prob(double a, double t);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Critical KS value c(alpha) sqrt((n+m)/(n m)); alpha = 0.01 -> c = 1.628.
double ks_critical(double alpha, std::size_t n, std::size_t m);

}  // namespace oracles
}  // namespace geomflow
