#pragma once

#include <cstdint>
#include <optional>

#include "geomflow/flows.hpp"
#include "geomflow/functions.hpp"
#include "geomflow/pool.hpp"

namespace geomflow {

struct McConfig {
    std::uint64_t seed = 42;
    std::size_t n_paths = 10000;
    int threads = 0;  // 0 -> GEOMFLOW_THREADS / 1
    FlowConfig flow;
    std::string fingerprint;

    int resolved_threads() const { return threads > 0 ? threads : default_threads(); }
};

struct MonteCarloEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::string config_fingerprint;
};

enum class MomentNorm {
    FixedVector,   // |TF_t(v0)|, the transported reference direction
    OperatorNorm,  // largest singular value of the transported frame
};

struct WindowPolicy {
    enum Kind { UpperHalf, Full, RelErrGated } kind = UpperHalf;
    double max_rel_stderr = 0.25;  // RelErrGated: keep points below this ...
    double min_ess = 100.0;        // ... with at least this effective sample size
    std::size_t min_points = 3;
};

struct MomentExponentEstimate {
    double p = 1.0;
    std::vector<double> times;
    std::vector<double> moments, moment_stderr;
    std::vector<double> log_moments, log_moment_stderr;
    std::vector<double> ess;  // (sum w)^2 / sum w^2 for w = |TF|^p per point
    std::vector<double> window;  // abscissae used by the fit
    double slope = 0.0;
    double slope_stderr = 0.0;
    double slope_ci_low = 0.0, slope_ci_high = 0.0;  // 95%, jackknife over path blocks
    bool moment_stable_candidate = false;            // upper CI < 0
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct IntertwiningReport {
    std::vector<double> epsilons;
    std::vector<MonteCarloEstimate> finite_difference;  // per epsilon, common random numbers
    MonteCarloEstimate delta_pt;
    MonteCarloEstimate bismut;
    double tolerance_scale = 10.0;  // the C in 3 sigma + C eps
    double max_gap = 0.0;
    bool pass = false;
};

/// P_t f(x) = E f(F_t(x)) chi_{t < xi}: exploded / exited / failed paths
/// contribute zero.
MonteCarloEstimate mc_semigroup(const SdeSystem& sys, const ScalarField& f, const Vec& x, double t,
                                const McConfig& cfg);

/// delta P_t phi(v) = E phi(T F_t(v)) chi_{t < xi}.
MonteCarloEstimate mc_delta_pt(const SdeSystem& sys, const OneForm& phi, const Vec& x, const Vec& v,
                               double t, const McConfig& cfg);

/// Slope of log E|TF_t|^p over the time grid. The default measures the moment
/// of the flow along a fixed reference direction (v0, or the first tangent
/// basis vector), which every closed-form reference in the catalog pins down;
/// the operator-norm variant is available for exploratory tables.
MomentExponentEstimate moment_exponent(const SdeSystem& sys, const Vec& x,
                                       const std::optional<Vec>& v0, double p,
                                       std::vector<double> grid, const McConfig& cfg,
                                       WindowPolicy window = {},
                                       MomentNorm norm = MomentNorm::FixedVector);

/// d(P_t f)(v) = (1/t) E f(x_t) M_t with the discretized martingale
/// M_t = sum_k <dB_k, Y(TF_{t_k} v)>; requires an elliptic system.
MonteCarloEstimate bismut_gradient(const SdeSystem& sys, const ScalarField& f, const Vec& x,
                                   const Vec& v, double t, const McConfig& cfg);

/// Line integral int_0^t phi o dx = sum phi(X dB) - 1/2 sum delta^h phi dt
/// along a recorded stride-1 trajectory.
double line_integral_one_form(const SdeSystem& sys, const OneForm& phi,
                              const TrajectoryRecord& trajectory);

/// P_t^{h,1} phi(v) = (1/t) E [ int phi o dx ] [ int <X dB, TF_s v> ] for
/// closed phi with codifferential.
MonteCarloEstimate bismut_one_form(const SdeSystem& sys, const OneForm& phi, const Vec& x,
                                   const Vec& v, double t, const McConfig& cfg);

/// Compares the common-random-number finite difference of mc_semigroup, the
/// 1-form semigroup on df, and the Bismut gradient; passes when all pairwise
/// gaps are within 3 combined sigma + C * (smallest epsilon).
IntertwiningReport intertwining_check(const SdeSystem& sys, const ScalarField& f, const Vec& x,
                                      const Vec& v, double t, std::vector<double> epsilons,
                                      const McConfig& cfg);

/// grad log p_t(., y)(x) for the OU process via exact Gaussian bridge
/// sampling; the Brownian increments are reconstructed from the bridge by
/// dB = (dz + c z ds) / gamma.
MonteCarloEstimate grad_log_heat_kernel_ou(double c, double gamma, double x, double y, double t,
                                           std::size_t n_paths, std::uint64_t seed, double dt,
                                           int threads = 0);

}  // namespace geomflow
