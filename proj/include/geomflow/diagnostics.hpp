#pragma once

#include "geomflow/estimators.hpp"

namespace geomflow {

/// Ambient region with a decidable membership test.
struct RegionSpec {
    enum class Kind { Ball, ComplementOfBall, Annulus, Predicate };
    Kind kind = Kind::Ball;
    std::string name;
    Vec center;
    double r0 = 0.0, r1 = 0.0;
    std::function<bool(const Vec&)> predicate;

    bool contains(const Vec& x) const;

    static RegionSpec ball(Vec center, double radius, std::string name = "ball");
    static RegionSpec complement_of_ball(Vec center, double radius,
                                         std::string name = "complement-of-ball");
    static RegionSpec annulus(Vec center, double r0, double r1, std::string name = "annulus");
    static RegionSpec of_predicate(std::function<bool(const Vec&)> pred, std::string name);

    NamedRegion as_stop_region() const {
        return {name, [*this](const Vec& x) { return contains(x); }};
    }
};

/// Exit-tail fit against the weak-uniform-cover shape P{tau < t} <= C t^2.
struct TailFit {
    std::vector<double> times;
    std::vector<double> tail;     // empirical P{tau < t}, non-decreasing
    std::vector<double> stderr_;  // binomial
    double C = 0.0;               // least-squares fit on the small-t window
    std::vector<double> window;
    double fit_residual_rms = 0.0;
    bool pass = false;  // all estimates <= C t^2 + 3 stderr
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

/// Empirical exit-time CDF from `region` with the C t^2 fit on the smallest
/// third of the grid.
TailFit exit_tail(const SdeSystem& sys, const Vec& x, const RegionSpec& region,
                  std::vector<double> tgrid, const McConfig& cfg);

struct EntranceEstimate {
    Vec start;
    double probability = 0.0;
    double stderr_ = 0.0;
};

struct C0ProbeReport {
    std::vector<EntranceEstimate> entries;
    bool monotone_trend = false;  // probabilities non-increasing along the start list
};

/// P{T_K(x_k) < t} for starts marching away from K (the C0-property probe).
C0ProbeReport c0_probe(const SdeSystem& sys, const RegionSpec& K, const std::vector<Vec>& starts,
                       double t, const McConfig& cfg);

struct ExplosionReport {
    std::vector<Vec> starts;
    std::vector<double> fraction;  // paths with status in {exploded, exited} before T
    std::vector<double> stderr_;
    double T = 0.0;
};

/// Fraction of paths reaching the trigger region (or the explosion radius)
/// before T, with binomial errors.
ExplosionReport explosion_probe(const SdeSystem& sys, const std::vector<Vec>& starts, double T,
                                const RegionSpec& trigger, const McConfig& cfg);

struct ErgodicReport {
    std::vector<double> times;
    std::vector<double> estimate;  // hat P_t(chi_K)(x)
    std::vector<double> stderr_;
    double target = 0.0;  // h-vol(K)/h-vol(M) by tensor-grid quadrature
    double quadrature_tol = 1e-6;
    bool pass = false;  // |estimate - target| <= 3 stderr + tol at the largest t
};

/// Long-time average P_t(chi_K)(x) against the h-volume ratio computed by
/// deterministic quadrature on the model's chart.
ErgodicReport ergodic_average(const SdeSystem& sys, const RegionSpec& K, const Vec& x,
                              std::vector<double> tgrid, const McConfig& cfg);

/// h-vol(K)/h-vol(M) by tensor-grid midpoint quadrature on the parametrization.
double h_volume_ratio(const ManifoldModel& model, const RegionSpec& K, int grid = 2048);

}  // namespace geomflow
