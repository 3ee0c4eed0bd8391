#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "geomflow/rng.hpp"
#include "geomflow/systems.hpp"

namespace geomflow {

enum class PathStatusKind { Completed, Exploded, Exited, RetractionFailed };

struct PathStatus {
    PathStatusKind kind = PathStatusKind::Completed;
    double time = 0.0;  // stopping time for non-completed paths, horizon otherwise
    int region = -1;    // exit-set index for Exited
};

struct NamedRegion {
    std::string name;
    std::function<bool(const Vec&)> contains;
};

enum class Scheme { StratonovichHeun, ItoEuler };

struct FlowConfig {
    double dt = 1e-3;
    double t_max = 1.0;
    double explosion_radius = 1e6;
    double retraction_tolerance = 1e-9;
    std::vector<NamedRegion> exit_sets;  // stop when contains(x) becomes true
    bool record_jacobian = false;
    int record_stride = 1;
    Scheme scheme = Scheme::StratonovichHeun;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("flow.dt must be positive");
        if (!(t_max >= dt)) throw ConfigError("flow.t_max must be >= dt");
        if (!(explosion_radius > 0.0)) throw ConfigError("flow.explosion_radius must be positive");
        if (record_stride < 1) throw ConfigError("flow.record_stride must be >= 1");
    }
    std::size_t n_steps() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<Vec> points;
    std::vector<Vec> increments;  // applied Brownian increments, one per executed step
    PathStatus status;
    // Derivative-flow frames (columns = transported basis vectors, ambient
    // coordinates) and their operator norms. Recorded only at times strictly
    // before any stopping event, so these arrays can be shorter than `times`.
    std::vector<Mat> jacobian_frames;
    std::vector<double> operator_norms;
    double dt = 0.0;
};

/// One Euler-Heun (predictor-corrector) Stratonovich step with closest-point
/// retraction, plus the exact linearization of the discrete map applied to
/// the carried derivative-flow vectors. Ito-declared systems get the
/// -1/2 sum DX^i(X^i) drift correction under the Heun scheme, or a plain
/// Euler-Maruyama step when the config selects the Ito scheme.
class Stepper {
public:
    Stepper(const SdeSystem& sys, const FlowConfig& cfg);

    /// Advances x and the tangent vectors vs in place. Returns false on
    /// retraction failure (x, vs left at the pre-step values).
    bool step(Vec& x, std::vector<Vec>& vs, const Vec& db);

    const SdeSystem& system() const { return sys_; }

private:
    void strat_drift(const Vec& x, Vec& out);
    void strat_drift_jvp(const Vec& x, const Vec& v, Vec& out);

    const SdeSystem& sys_;
    const Manifold& man_;
    double dt_;
    bool heun_;
    bool needs_correction_;
    // workspace
    Vec a0_, a1_, u0_, u1_, y_, xn_, tmp_, corr_, du0_, du1_, dy_;
};

/// Step outcome passed to observers: Live for interior states, Stopping for
/// the state at which an explosion / exit-set event was detected.
enum class StepPhase { Live, Stopping };

/// Streaming path runner. After every successful step calls
///   observer(step_index, t, x, vs, db, phase)   (1-based step_index);
/// phase == StepPhase::Stopping exactly when an explosion or exit-set event
/// was detected at this state (the run ends there). A Live-phase observer
/// returning false stops the run early with Completed status at time t.
template <class Observer>
PathStatus run_path(const SdeSystem& sys, Vec x, std::vector<Vec>& vs, const FlowConfig& cfg,
                    const BrownianDriver& driver, Observer&& observer) {
    Stepper stepper(sys, cfg);
    const std::size_t n = cfg.n_steps();
    Vec db(sys.noise_dim());
    PathStatus st;
    for (std::size_t k = 0; k < n; ++k) {
        driver.increment(static_cast<std::uint32_t>(k), db);
        const double t = (k + 1) * cfg.dt;
        if (!stepper.step(x, vs, db)) {
            st.kind = PathStatusKind::RetractionFailed;
            st.time = t;
            return st;
        }
        bool stopping = false;
        if (!x.allFinite() || x.norm() >= cfg.explosion_radius) {
            st.kind = PathStatusKind::Exploded;
            st.time = t;
            stopping = true;
        } else {
            for (std::size_t r = 0; r < cfg.exit_sets.size(); ++r) {
                if (cfg.exit_sets[r].contains(x)) {
                    st.kind = PathStatusKind::Exited;
                    st.time = t;
                    st.region = static_cast<int>(r);
                    stopping = true;
                    break;
                }
            }
        }
        const bool keep_going =
            observer(k + 1, t, x, vs, db, stopping ? StepPhase::Stopping : StepPhase::Live);
        if (stopping) return st;
        if (!keep_going) {
            st.time = t;
            return st;
        }
    }
    st.time = cfg.t_max;
    return st;
}

/// Integrates one path. The record is truncated at the stopping event
/// (horizon, explosion-radius crossing, exit-set hit or retraction failure);
/// the state at the stopping event is the last recorded point.
TrajectoryRecord integrate_path(const SdeSystem& sys, const Vec& x0, const FlowConfig& cfg,
                                const BrownianDriver& driver);

/// As integrate_path, with derivative-flow frames transported along the path
/// for the given tangent basis at x0. Operator norms are largest singular
/// values of the frame in ambient coordinates, scaled by the model's metric
/// factor ratio.
TrajectoryRecord integrate_with_jacobian(const SdeSystem& sys, const Vec& x0,
                                         const std::vector<Vec>& basis, const FlowConfig& cfg,
                                         const BrownianDriver& driver);

/// Damped parallel transport along a completed stride-1 trajectory:
///   DW/dt = -1/2 Ric(W,.)^# + Hess(h)(W,.)^#,
/// integrated with norm-true projection transport between consecutive points.
std::vector<Vec> damped_transport(const ManifoldModel& model, const TrajectoryRecord& trajectory,
                                  const Vec& v0);

struct CurveTransport {
    std::vector<double> times;
    std::vector<double> lengths;          // polyline arc length of the moved curve
    std::vector<double> jacobian_bounds;  // sum_i |TF at sigma(s_i)| ds
    PathStatus status;                    // earliest failure among sub-paths, if any
};

/// Transports a discretized curve by the solution flow: every starting point
/// is driven by the SAME Brownian increments. Lengths use the trapezoidal
/// polyline; the bound column discretizes int |T_{sigma(s)} F_t| ds.
CurveTransport transport_curve(const SdeSystem& sys, const std::vector<Vec>& curve_points,
                               const FlowConfig& cfg, const BrownianDriver& driver);

const char* status_name(PathStatusKind k);

/// Trajectory dump: header carries the config fingerprint and seed; rows are
/// "path_index, t, x_1..x_m, status".
void write_trajectory_dump(std::ostream& os, const std::vector<TrajectoryRecord>& records,
                           const std::string& config_fingerprint, std::uint64_t seed);

}  // namespace geomflow
