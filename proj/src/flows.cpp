#include "geomflow/flows.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace geomflow {

Stepper::Stepper(const SdeSystem& sys, const FlowConfig& cfg)
    : sys_(sys), man_(sys.manifold()), dt_(cfg.dt), heun_(cfg.scheme == Scheme::StratonovichHeun) {
    // The Ito scheme reads the declared drift as the Ito drift; for gradient
    // Brownian systems the two coincide (sum nabla X^i(X^i) = 0).
    needs_correction_ = heun_ && !sys.stratonovich();
    const int d = man_.ambient_dim();
    a0_.resize(d); a1_.resize(d); u0_.resize(d); u1_.resize(d);
    y_.resize(d); xn_.resize(d); tmp_.resize(d); corr_.resize(d);
    du0_.resize(d); du1_.resize(d); dy_.resize(d);
}

void Stepper::strat_drift(const Vec& x, Vec& out) {
    sys_.drift(x, out);
    if (needs_correction_) {
        sys_.strat_correction(x, corr_);
        out += corr_;
    }
}

void Stepper::strat_drift_jvp(const Vec& x, const Vec& v, Vec& out) {
    sys_.drift_jvp(x, v, out);
    if (needs_correction_) {
        sys_.strat_correction_jvp(x, v, corr_);
        out += corr_;
    }
}

bool Stepper::step(Vec& x, std::vector<Vec>& vs, const Vec& db) {
    try {
        if (!heun_) {
            // Euler-Maruyama on the Ito drift.
            sys_.diffusion(x, db, u0_);
            sys_.drift(x, a0_);
            u0_ += dt_ * a0_;
            xn_ = man_.retract(x + u0_);
            for (Vec& v : vs) {
                sys_.diffusion_jvp(x, v, db, du0_);
                sys_.drift_jvp(x, v, tmp_);
                du0_ += dt_ * tmp_;
                v = man_.retract_jvp(x + u0_, v + du0_);
                v = man_.tangent_project_raw(xn_, v);
            }
            x = xn_;
            return true;
        }
        // Predictor.
        sys_.diffusion(x, db, u0_);
        strat_drift(x, a0_);
        u0_ += dt_ * a0_;
        y_ = man_.retract(x + u0_);
        // Corrector.
        sys_.diffusion(y_, db, u1_);
        strat_drift(y_, a1_);
        u1_ += dt_ * a1_;
        xn_ = man_.retract(x + 0.5 * (u0_ + u1_));
        // Exact linearization of the two-stage map for each carried vector.
        for (Vec& v : vs) {
            sys_.diffusion_jvp(x, v, db, du0_);
            strat_drift_jvp(x, v, tmp_);
            du0_ += dt_ * tmp_;
            dy_ = man_.retract_jvp(x + u0_, v + du0_);
            sys_.diffusion_jvp(y_, dy_, db, du1_);
            strat_drift_jvp(y_, dy_, tmp_);
            du1_ += dt_ * tmp_;
            v = man_.retract_jvp(x + 0.5 * (u0_ + u1_), v + 0.5 * (du0_ + du1_));
            // normal-component cleanup, tolerance 1e-10 by construction
            v = man_.tangent_project_raw(xn_, v);
        }
        x = xn_;
        return true;
    } catch (const RetractionError&) {
        return false;
    }
}

namespace {

double frame_operator_norm(const Mat& frame, double scale_ratio) {
    Eigen::JacobiSVD<Mat> svd(frame);
    return svd.singularValues()(0) * scale_ratio;
}

TrajectoryRecord integrate_impl(const SdeSystem& sys, const Vec& x0, const std::vector<Vec>* basis,
                                const FlowConfig& cfg, const BrownianDriver& driver) {
    cfg.validate();
    require_on_manifold(sys.manifold(), x0, std::max(cfg.retraction_tolerance, kOnManifoldTol));
    TrajectoryRecord rec;
    rec.dt = cfg.dt;
    const bool with_jac = basis != nullptr;
    std::vector<Vec> vs = with_jac ? *basis : std::vector<Vec>{};
    const double scale0 = sys.manifold().metric_scale(x0);

    auto record_state = [&](double t, const Vec& x, const std::vector<Vec>& vecs, bool live) {
        rec.times.push_back(t);
        rec.points.push_back(x);
        if (with_jac && live) {
            Mat frame(x.size(), static_cast<Eigen::Index>(vecs.size()));
            for (int j = 0; j < frame.cols(); ++j) frame.col(j) = vecs[j];
            rec.jacobian_frames.push_back(frame);
            rec.operator_norms.push_back(
                frame_operator_norm(frame, sys.manifold().metric_scale(x) / scale0));
        }
    };

    record_state(0.0, x0, vs, true);
    rec.status = run_path(sys, x0, vs, cfg, driver,
                          [&](std::size_t k, double t, const Vec& xc, const std::vector<Vec>& vecs,
                              const Vec& db, StepPhase phase) {
                              rec.increments.push_back(db);
                              const bool live = phase == StepPhase::Live;
                              if (!live || k % static_cast<std::size_t>(cfg.record_stride) == 0 ||
                                  k == cfg.n_steps())
                                  record_state(t, xc, vecs, live);
                              return true;
                          });
    return rec;
}

}  // namespace

TrajectoryRecord integrate_path(const SdeSystem& sys, const Vec& x0, const FlowConfig& cfg,
                                const BrownianDriver& driver) {
    return integrate_impl(sys, x0, nullptr, cfg, driver);
}

TrajectoryRecord integrate_with_jacobian(const SdeSystem& sys, const Vec& x0,
                                         const std::vector<Vec>& basis, const FlowConfig& cfg,
                                         const BrownianDriver& driver) {
    for (const Vec& v : basis) {
        Vec normal_part = v - sys.manifold().tangent_project_raw(x0, v);
        if (normal_part.norm() > 1e-8 * std::max(1.0, v.norm()))
            throw InvalidInput("integrate_with_jacobian: basis vector is not tangent at x0");
    }
    return integrate_impl(sys, x0, &basis, cfg, driver);
}

std::vector<Vec> damped_transport(const ManifoldModel& model, const TrajectoryRecord& trajectory,
                                  const Vec& v0) {
    if (trajectory.status.kind != PathStatusKind::Completed)
        throw InvalidInput("damped_transport: trajectory did not complete");
    if (trajectory.points.size() < 2)
        throw InvalidInput("damped_transport: trajectory too short");
    const Manifold& m = model.geom();
    const double dt = trajectory.times[1] - trajectory.times[0];
    if (std::abs(dt - trajectory.dt) > 1e-12)
        throw InvalidInput("damped_transport: needs a stride-1 trajectory");

    std::vector<Vec> out;
    out.reserve(trajectory.points.size());
    Vec w = m.tangent_project_raw(trajectory.points.front(), v0);
    out.push_back(w);
    for (std::size_t k = 1; k < trajectory.points.size(); ++k) {
        const Vec& x_prev = trajectory.points[k - 1];
        const Vec& x_next = trajectory.points[k];
        // damping in the current tangent space
        Vec drift = -0.5 * ricci_operator(model, x_prev, w) + hessian_h_operator(model, x_prev, w);
        Vec w_half = w + dt * drift;
        const double target_norm = w_half.norm();
        // norm-true projection transport to the next tangent space
        Vec moved = m.tangent_project_raw(x_next, w_half);
        const double moved_norm = moved.norm();
        w = (moved_norm > 0.0 && target_norm > 0.0) ? Vec(moved * (target_norm / moved_norm))
                                                    : moved;
        out.push_back(w);
    }
    return out;
}

CurveTransport transport_curve(const SdeSystem& sys, const std::vector<Vec>& curve_points,
                               const FlowConfig& cfg, const BrownianDriver& driver) {
    if (curve_points.size() < 2) throw InvalidInput("transport_curve: need at least two points");
    cfg.validate();
    const std::size_t P = curve_points.size();
    // segment lengths of the initial polyline, used as the ds weights
    std::vector<double> ds(P, 0.0);
    for (std::size_t i = 0; i + 1 < P; ++i) {
        const double seg = (curve_points[i + 1] - curve_points[i]).norm();
        ds[i] += 0.5 * seg;
        ds[i + 1] += 0.5 * seg;
    }

    std::vector<TrajectoryRecord> recs;
    recs.reserve(P);
    CurveTransport out;
    out.status.kind = PathStatusKind::Completed;
    out.status.time = cfg.t_max;
    std::size_t n_rec = SIZE_MAX;
    for (const Vec& p : curve_points) {
        const auto basis = sys.manifold().tangent_basis(p);
        recs.push_back(integrate_with_jacobian(sys, p, basis, cfg, driver));
        const PathStatus& st = recs.back().status;
        if (st.kind != PathStatusKind::Completed &&
            (out.status.kind == PathStatusKind::Completed || st.time < out.status.time))
            out.status = st;  // empirical first sub-path failure time
        n_rec = std::min(n_rec, recs.back().operator_norms.size());
    }
    for (std::size_t k = 0; k < n_rec; ++k) {
        out.times.push_back(recs.front().times[k]);
        double len = 0.0;
        for (std::size_t i = 0; i + 1 < P; ++i)
            len += (recs[i + 1].points[k] - recs[i].points[k]).norm();
        out.lengths.push_back(len);
        double bound = 0.0;
        for (std::size_t i = 0; i < P; ++i) bound += recs[i].operator_norms[k] * ds[i];
        out.jacobian_bounds.push_back(bound);
    }
    return out;
}

const char* status_name(PathStatusKind k) {
    switch (k) {
        case PathStatusKind::Completed: return "completed";
        case PathStatusKind::Exploded: return "exploded";
        case PathStatusKind::Exited: return "exited";
        case PathStatusKind::RetractionFailed: return "retraction_failed";
    }
    return "unknown";
}

void write_trajectory_dump(std::ostream& os, const std::vector<TrajectoryRecord>& records,
                           const std::string& config_fingerprint, std::uint64_t seed) {
    os << "# fingerprint=" << config_fingerprint << " seed=" << seed << "\n";
    os << "path_index,t";
    if (!records.empty() && !records.front().points.empty())
        for (int i = 0; i < records.front().points.front().size(); ++i) os << ",x" << (i + 1);
    os << ",status\n";
    char buf[64];
    for (std::size_t p = 0; p < records.size(); ++p) {
        const auto& r = records[p];
        for (std::size_t k = 0; k < r.times.size(); ++k) {
            os << p << ',';
            std::snprintf(buf, sizeof buf, "%.17g", r.times[k]);
            os << buf;
            for (int i = 0; i < r.points[k].size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", r.points[k][i]);
                os << ',' << buf;
            }
            const bool last = (k + 1 == r.times.size());
            os << ',' << (last ? status_name(r.status.kind) : "running") << '\n';
        }
    }
}

}  // namespace geomflow
