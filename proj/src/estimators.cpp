#include "geomflow/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "geomflow/geometry_ops.hpp"

namespace geomflow {

namespace {

MonteCarloEstimate finish(std::span<const double> slots, const McConfig& cfg) {
    const MeanStderr ms = mean_stderr(slots);
    return {ms.mean, ms.stderr_, cfg.n_paths, cfg.seed, cfg.fingerprint};
}

void require_paths(const McConfig& cfg) {
    if (cfg.n_paths == 0) throw InvalidInput("estimator: n_paths must be positive");
}

void check_horizon(double t, const FlowConfig& flow) {
    if (t > flow.t_max + 1e-12) throw InvalidInput("estimator: t exceeds flow.t_max");
}

std::size_t step_of(double t, double dt) {
    const double k = t / dt;
    const auto n = static_cast<std::size_t>(std::llround(k));
    if (std::abs(k - static_cast<double>(n)) > 1e-9)
        throw InvalidInput("estimator: time is not a multiple of flow.dt");
    return n;
}

}  // namespace

MonteCarloEstimate mc_semigroup(const SdeSystem& sys, const ScalarField& f, const Vec& x, double t,
                                const McConfig& cfg) {
    require_paths(cfg);
    FlowConfig flow = cfg.flow;
    flow.t_max = t;
    flow.validate();
    check_horizon(t, cfg.flow);
    const std::size_t n_steps = flow.n_steps();
    std::vector<double> slots(cfg.n_paths, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        std::vector<Vec> no_vecs;
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            double val = 0.0;
            run_path(sys, x, no_vecs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>&, const Vec&,
                         StepPhase phase) {
                         if (phase == StepPhase::Live && k == n_steps) val = f.value(xc);
                         return true;
                     });
            slots[i] = val;  // killed paths keep the chi_{t<xi} zero
        }
    });
    return finish(slots, cfg);
}

MonteCarloEstimate mc_delta_pt(const SdeSystem& sys, const OneForm& phi, const Vec& x, const Vec& v,
                               double t, const McConfig& cfg) {
    require_paths(cfg);
    FlowConfig flow = cfg.flow;
    flow.t_max = t;
    flow.validate();
    check_horizon(t, cfg.flow);
    const std::size_t n_steps = flow.n_steps();
    const Vec v_tan = sys.manifold().tangent_project_raw(x, v);
    std::vector<double> slots(cfg.n_paths, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            std::vector<Vec> vs{v_tan};
            double val = 0.0;
            run_path(sys, x, vs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>& vecs,
                         const Vec&, StepPhase phase) {
                         if (phase == StepPhase::Live && k == n_steps)
                             val = phi.evaluate(xc, vecs[0]);
                         return true;
                     });
            slots[i] = val;
        }
    });
    return finish(slots, cfg);
}

MomentExponentEstimate moment_exponent(const SdeSystem& sys, const Vec& x,
                                       const std::optional<Vec>& v0, double p,
                                       std::vector<double> grid, const McConfig& cfg,
                                       WindowPolicy window, MomentNorm norm) {
    require_paths(cfg);
    if (grid.size() < 3) throw InvalidInput("moment_exponent: need at least 3 grid points");
    std::sort(grid.begin(), grid.end());
    FlowConfig flow = cfg.flow;
    flow.t_max = grid.back();
    flow.validate();
    const std::size_t n_grid = grid.size();
    std::vector<std::size_t> grid_steps(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j) {
        grid_steps[j] = step_of(grid[j], flow.dt);
        if (grid_steps[j] == 0) throw InvalidInput("moment_exponent: grid must start after 0");
    }

    const auto basis = sys.manifold().tangent_basis(x);
    std::vector<Vec> v_init;
    if (norm == MomentNorm::FixedVector) {
        Vec v = v0 ? sys.manifold().tangent_project_raw(x, *v0) : basis.front();
        if (v.norm() == 0.0) throw InvalidInput("moment_exponent: reference direction is zero");
        v_init = {v / v.norm()};
    } else {
        v_init = basis;
    }
    const double scale0 = sys.manifold().metric_scale(x);

    std::vector<double> slab(cfg.n_paths * n_grid, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            std::vector<Vec> vs = v_init;
            double* row = slab.data() + i * n_grid;
            std::size_t j = 0;
            run_path(sys, x, vs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>& vecs,
                         const Vec&, StepPhase phase) {
                         if (phase != StepPhase::Live) return true;
                         while (j < n_grid && grid_steps[j] == k) {
                             const double ratio = sys.manifold().metric_scale(xc) / scale0;
                             double nrm;
                             if (norm == MomentNorm::FixedVector) {
                                 nrm = vecs[0].norm() * ratio;
                             } else {
                                 Mat frame(xc.size(), static_cast<Eigen::Index>(vecs.size()));
                                 for (int col = 0; col < frame.cols(); ++col)
                                     frame.col(col) = vecs[col];
                                 nrm = frame.jacobiSvd().singularValues()(0) * ratio;
                             }
                             row[j] = std::pow(nrm, p);
                             ++j;
                         }
                         return true;
                     });
        }
    });

    MomentExponentEstimate est;
    est.p = p;
    est.times = grid;
    est.n_paths = cfg.n_paths;
    est.seed = cfg.seed;
    std::vector<double> col(cfg.n_paths);
    for (std::size_t j = 0; j < n_grid; ++j) {
        double sw = 0.0, sw2 = 0.0;
        for (std::size_t i = 0; i < cfg.n_paths; ++i) {
            col[i] = slab[i * n_grid + j];
            sw += col[i];
            sw2 += col[i] * col[i];
        }
        const MeanStderr ms = mean_stderr(col);
        est.moments.push_back(ms.mean);
        est.moment_stderr.push_back(ms.stderr_);
        est.log_moments.push_back(std::log(std::max(ms.mean, 1e-300)));
        est.log_moment_stderr.push_back(ms.mean > 0.0 ? ms.stderr_ / ms.mean : INFINITY);
        est.ess.push_back(sw2 > 0.0 ? sw * sw / sw2 : 0.0);
    }

    // Window selection (reported through est.window). The gated policy also
    // requires a minimal effective sample size: for heavy-tailed |TF|^p the
    // sampled stderr under-reports badly exactly when the mean is dominated
    // by a few paths.
    const double ess_floor = std::min(window.min_ess, 0.5 * static_cast<double>(cfg.n_paths));
    std::vector<std::size_t> idx;
    switch (window.kind) {
        case WindowPolicy::Full:
            for (std::size_t j = 0; j < n_grid; ++j) idx.push_back(j);
            break;
        case WindowPolicy::UpperHalf:
            for (std::size_t j = n_grid / 2; j < n_grid; ++j) idx.push_back(j);
            break;
        case WindowPolicy::RelErrGated:
            for (std::size_t j = 0; j < n_grid; ++j)
                if (est.log_moment_stderr[j] <= window.max_rel_stderr &&
                    est.ess[j] >= ess_floor)
                    idx.push_back(j);
            break;
    }
    if (idx.size() < std::max<std::size_t>(window.min_points, 2)) {
        idx.clear();
        for (std::size_t j = 0; j < std::min(n_grid, std::max<std::size_t>(window.min_points, 2));
             ++j)
            idx.push_back(j);
    }
    std::vector<double> wt, wy;
    for (std::size_t j : idx) {
        est.window.push_back(grid[j]);
        wt.push_back(grid[j]);
        wy.push_back(est.log_moments[j]);
    }
    est.slope = ols_fit(wt, wy).slope;

    // Jackknife over path blocks for the slope CI.
    const std::size_t n_blocks = std::min<std::size_t>(20, cfg.n_paths);
    if (n_blocks >= 2) {
        std::vector<double> block_sum(n_blocks * n_grid, 0.0);
        std::vector<std::size_t> block_count(n_blocks, 0);
        const std::size_t per = (cfg.n_paths + n_blocks - 1) / n_blocks;
        for (std::size_t i = 0; i < cfg.n_paths; ++i) {
            const std::size_t blk = i / per;
            ++block_count[blk];
            for (std::size_t j = 0; j < n_grid; ++j)
                block_sum[blk * n_grid + j] += slab[i * n_grid + j];
        }
        std::vector<double> total(n_grid, 0.0);
        for (std::size_t blk = 0; blk < n_blocks; ++blk)
            for (std::size_t j = 0; j < n_grid; ++j) total[j] += block_sum[blk * n_grid + j];
        std::vector<double> slopes;
        for (std::size_t blk = 0; blk < n_blocks; ++blk) {
            if (block_count[blk] == 0) continue;
            std::vector<double> yy;
            bool ok = true;
            for (std::size_t j : idx) {
                const double m =
                    (total[j] - block_sum[blk * n_grid + j]) /
                    static_cast<double>(cfg.n_paths - block_count[blk]);
                if (!(m > 0.0)) ok = false;
                yy.push_back(std::log(std::max(m, 1e-300)));
            }
            if (ok) slopes.push_back(ols_fit(wt, yy).slope);
        }
        if (slopes.size() >= 2) {
            const double nb = static_cast<double>(slopes.size());
            double mean = 0.0;
            for (double s : slopes) mean += s;
            mean /= nb;
            double var = 0.0;
            for (double s : slopes) var += (s - mean) * (s - mean);
            var *= (nb - 1.0) / nb;
            est.slope_stderr = std::sqrt(var);
        }
    }
    est.slope_ci_low = est.slope - 1.96 * est.slope_stderr;
    est.slope_ci_high = est.slope + 1.96 * est.slope_stderr;
    est.moment_stable_candidate = est.slope_ci_high < 0.0;
    return est;
}

MonteCarloEstimate bismut_gradient(const SdeSystem& sys, const ScalarField& f, const Vec& x,
                                   const Vec& v, double t, const McConfig& cfg) {
    require_paths(cfg);
    if (!(t > 0.0)) throw InvalidInput("bismut_gradient: t must be positive (1/t factor)");
    FlowConfig flow = cfg.flow;
    flow.t_max = t;
    flow.validate();
    check_horizon(t, cfg.flow);
    const std::size_t n_steps = flow.n_steps();
    const Vec v_tan = sys.manifold().tangent_project_raw(x, v);
    std::vector<double> slots(cfg.n_paths, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            std::vector<Vec> vs{v_tan};
            Vec x_prev = x;
            Vec v_prev = v_tan;
            double martingale = 0.0;
            double val = 0.0;
            run_path(sys, x, vs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>& vecs,
                         const Vec& db, StepPhase phase) {
                         martingale += sys.bismut_weight(x_prev, v_prev, db);
                         if (phase == StepPhase::Live && k == n_steps)
                             val = f.value(xc) * martingale / t;
                         x_prev = xc;
                         v_prev = vecs[0];
                         return true;
                     });
            slots[i] = val;
        }
    });
    return finish(slots, cfg);
}

double line_integral_one_form(const SdeSystem& sys, const OneForm& phi,
                              const TrajectoryRecord& trajectory) {
    if (!phi.codifferential)
        throw InvalidInput("line_integral_one_form: codifferential delta^h phi must be supplied "
                           "analytically (no numerical fallback)");
    if (trajectory.points.size() != trajectory.increments.size() + 1)
        throw InvalidInput("line_integral_one_form: needs a stride-1 trajectory");
    const double dt = trajectory.dt;
    Vec xdb(sys.manifold().ambient_dim());
    double out = 0.0;
    for (std::size_t k = 0; k < trajectory.increments.size(); ++k) {
        const Vec& xk = trajectory.points[k];
        sys.diffusion(xk, trajectory.increments[k], xdb);
        out += phi.evaluate(xk, xdb) - 0.5 * phi.codifferential(xk) * dt;
    }
    return out;
}

MonteCarloEstimate bismut_one_form(const SdeSystem& sys, const OneForm& phi, const Vec& x,
                                   const Vec& v, double t, const McConfig& cfg) {
    require_paths(cfg);
    if (!(t > 0.0)) throw InvalidInput("bismut_one_form: t must be positive");
    if (!phi.codifferential)
        throw InvalidInput("bismut_one_form: codifferential delta^h phi must be supplied "
                           "analytically (no numerical fallback)");
    FlowConfig flow = cfg.flow;
    flow.t_max = t;
    flow.validate();
    check_horizon(t, cfg.flow);
    const std::size_t n_steps = flow.n_steps();
    const Vec v_tan = sys.manifold().tangent_project_raw(x, v);
    std::vector<double> slots(cfg.n_paths, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        Vec xdb(sys.manifold().ambient_dim());
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            std::vector<Vec> vs{v_tan};
            Vec x_prev = x;
            Vec v_prev = v_tan;
            double martingale = 0.0;
            double line = 0.0;
            double val = 0.0;
            run_path(sys, x, vs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>& vecs,
                         const Vec& db, StepPhase phase) {
                         martingale += sys.bismut_weight(x_prev, v_prev, db);
                         sys.diffusion(x_prev, db, xdb);
                         line += phi.evaluate(x_prev, xdb) -
                                 0.5 * phi.codifferential(x_prev) * flow.dt;
                         if (phase == StepPhase::Live && k == n_steps)
                             val = line * martingale / t;
                         x_prev = xc;
                         v_prev = vecs[0];
                         return true;
                     });
            slots[i] = val;
        }
    });
    return finish(slots, cfg);
}

IntertwiningReport intertwining_check(const SdeSystem& sys, const ScalarField& f, const Vec& x,
                                      const Vec& v, double t, std::vector<double> epsilons,
                                      const McConfig& cfg) {
    if (epsilons.empty()) epsilons = {1e-2, 1e-3};
    std::sort(epsilons.rbegin(), epsilons.rend());
    require_paths(cfg);
    FlowConfig flow = cfg.flow;
    flow.t_max = t;
    flow.validate();
    const std::size_t n_steps = flow.n_steps();
    const Vec v_tan = sys.manifold().tangent_project_raw(x, v);

    IntertwiningReport rep;
    rep.epsilons = epsilons;

    // Common-random-number finite differences: the same (seed, path_index)
    // streams drive the base and the retracted perturbed start.
    auto terminal_values = [&](const Vec& x0) {
        std::vector<double> vals(cfg.n_paths, 0.0);
        parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
            std::vector<Vec> no_vecs;
            for (std::size_t i = b; i < e; ++i) {
                BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
                double val = 0.0;
                run_path(sys, x0, no_vecs, flow, driver,
                         [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>&,
                             const Vec&, StepPhase phase) {
                             if (phase == StepPhase::Live && k == n_steps) val = f.value(xc);
                             return true;
                         });
                vals[i] = val;
            }
        });
        return vals;
    };

    const std::vector<double> base = terminal_values(x);
    for (double eps : epsilons) {
        const Vec x_eps = sys.manifold().retract(x + eps * v_tan);
        const std::vector<double> pert = terminal_values(x_eps);
        std::vector<double> diff(cfg.n_paths);
        for (std::size_t i = 0; i < cfg.n_paths; ++i) diff[i] = (pert[i] - base[i]) / eps;
        rep.finite_difference.push_back(finish(diff, cfg));
    }

    rep.delta_pt = mc_delta_pt(sys, differential(f, sys.model()), x, v_tan, t, cfg);
    rep.bismut = bismut_gradient(sys, f, x, v_tan, t, cfg);

    const double eps_min = epsilons.back();
    const MonteCarloEstimate& fd = rep.finite_difference.back();
    const MonteCarloEstimate* ests[3] = {&fd, &rep.delta_pt, &rep.bismut};
    rep.pass = true;
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const double gap = std::abs(ests[a]->value - ests[b]->value);
            const double sigma = std::sqrt(ests[a]->stderr_ * ests[a]->stderr_ +
                                           ests[b]->stderr_ * ests[b]->stderr_);
            rep.max_gap = std::max(rep.max_gap, gap);
            if (gap > 3.0 * sigma + rep.tolerance_scale * eps_min) rep.pass = false;
        }
    }
    return rep;
}

MonteCarloEstimate grad_log_heat_kernel_ou(double c, double gamma, double x, double y, double t,
                                           std::size_t n_paths, std::uint64_t seed, double dt,
                                           int threads) {
    if (!(t > 0.0)) throw InvalidInput("grad_log_heat_kernel_ou: t must be positive");
    if (gamma == 0.0) throw InvalidInput("grad_log_heat_kernel_ou: gamma must be nonzero");
    if (n_paths == 0) throw InvalidInput("grad_log_heat_kernel_ou: n_paths must be positive");
    const auto n_steps = static_cast<std::size_t>(std::llround(t / dt));
    if (n_steps < 2) throw InvalidInput("grad_log_heat_kernel_ou: horizon shorter than two steps");

    auto alpha = [c](double u) { return std::exp(-c * u); };
    auto var = [c, gamma](double u) {
        if (c == 0.0) return gamma * gamma * u;
        return gamma * gamma * (1.0 - std::exp(-2.0 * c * u)) / (2.0 * c);
    };

    std::vector<double> slots(n_paths, 0.0);
    const int resolved = threads > 0 ? threads : default_threads();
    parallel_for(n_paths, resolved, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(seed, i, 1, dt, /*stream_tag=*/1);
            double z = x;
            double weight = 0.0;
            for (std::size_t k = 0; k < n_steps; ++k) {
                const double s = k * dt;
                double z_next;
                if (k + 1 == n_steps) {
                    z_next = y;  // bridge pins the endpoint
                } else {
                    const double tau = t - s - dt;
                    const double prec = 1.0 / var(dt) + alpha(tau) * alpha(tau) / var(tau);
                    const double mean =
                        (alpha(dt) * z / var(dt) + alpha(tau) * y / var(tau)) / prec;
                    z_next = mean + driver.normal(static_cast<std::uint32_t>(k), 0) /
                                        std::sqrt(prec);
                }
                const double db = (z_next - z + c * z * dt) / gamma;
                weight += std::exp(-c * s) * gamma * db;
                z = z_next;
            }
            slots[i] = weight / t;
        }
    });
    const MeanStderr ms = mean_stderr(slots);
    return {ms.mean, ms.stderr_, n_paths, seed, ""};
}

}  // namespace geomflow
