#include "geomflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace geomflow {

bool RegionSpec::contains(const Vec& x) const {
    switch (kind) {
        case Kind::Ball:
            return (x - center).norm() <= r0;
        case Kind::ComplementOfBall:
            return (x - center).norm() > r0;
        case Kind::Annulus: {
            const double d = (x - center).norm();
            return d >= r0 && d <= r1;
        }
        case Kind::Predicate:
            return predicate(x);
    }
    return false;
}

RegionSpec RegionSpec::ball(Vec center, double radius, std::string name) {
    RegionSpec r;
    r.kind = Kind::Ball;
    r.center = std::move(center);
    r.r0 = radius;
    r.name = std::move(name);
    return r;
}

RegionSpec RegionSpec::complement_of_ball(Vec center, double radius, std::string name) {
    RegionSpec r;
    r.kind = Kind::ComplementOfBall;
    r.center = std::move(center);
    r.r0 = radius;
    r.name = std::move(name);
    return r;
}

RegionSpec RegionSpec::annulus(Vec center, double r0, double r1, std::string name) {
    RegionSpec r;
    r.kind = Kind::Annulus;
    r.center = std::move(center);
    r.r0 = r0;
    r.r1 = r1;
    r.name = std::move(name);
    return r;
}

RegionSpec RegionSpec::of_predicate(std::function<bool(const Vec&)> pred, std::string name) {
    RegionSpec r;
    r.kind = Kind::Predicate;
    r.predicate = std::move(pred);
    r.name = std::move(name);
    return r;
}

namespace {

double binom_stderr(double p, std::size_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(n));
}

/// First-hit times of `stop` region per path (infinity when never hit).
std::vector<double> first_hit_times(const SdeSystem& sys, const Vec& x, const RegionSpec& stop,
                                    double horizon, const McConfig& cfg) {
    FlowConfig flow = cfg.flow;
    flow.t_max = horizon;
    flow.exit_sets = {stop.as_stop_region()};
    flow.validate();
    std::vector<double> taus(cfg.n_paths, INFINITY);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        std::vector<Vec> no_vecs;
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            const PathStatus st = run_path(
                sys, x, no_vecs, flow, driver,
                [](std::size_t, double, const Vec&, const std::vector<Vec>&, const Vec&,
                   StepPhase) { return true; });
            if (st.kind == PathStatusKind::Exited || st.kind == PathStatusKind::Exploded ||
                st.kind == PathStatusKind::RetractionFailed)
                taus[i] = st.time;
        }
    });
    return taus;
}

}  // namespace

TailFit exit_tail(const SdeSystem& sys, const Vec& x, const RegionSpec& region,
                  std::vector<double> tgrid, const McConfig& cfg) {
    if (!region.contains(x)) throw InvalidInput("exit_tail: start point is outside the region");
    std::sort(tgrid.begin(), tgrid.end());
    RegionSpec outside =
        RegionSpec::of_predicate([region](const Vec& p) { return !region.contains(p); },
                                 "outside:" + region.name);
    const auto taus = first_hit_times(sys, x, outside, tgrid.back(), cfg);

    TailFit fit;
    fit.times = tgrid;
    fit.n_paths = cfg.n_paths;
    fit.seed = cfg.seed;
    for (double t : tgrid) {
        std::size_t hits = 0;
        for (double tau : taus)
            if (tau < t) ++hits;
        const double p = static_cast<double>(hits) / static_cast<double>(cfg.n_paths);
        fit.tail.push_back(p);
        fit.stderr_.push_back(binom_stderr(p, cfg.n_paths));
    }
    // Fit C against t^2 on the smallest third of the grid (the bound is a
    // small-t statement); C = sum p t^2 / sum t^4.
    const std::size_t nw = std::max<std::size_t>(2, tgrid.size() / 3);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < nw; ++j) {
        fit.window.push_back(tgrid[j]);
        num += fit.tail[j] * tgrid[j] * tgrid[j];
        den += std::pow(tgrid[j], 4.0);
    }
    fit.C = den > 0.0 ? num / den : 0.0;
    double rss = 0.0;
    for (std::size_t j = 0; j < nw; ++j) {
        const double r = fit.tail[j] - fit.C * tgrid[j] * tgrid[j];
        rss += r * r;
    }
    fit.fit_residual_rms = std::sqrt(rss / static_cast<double>(nw));
    // The cover bound is a small-t statement: the pass check lives on the fit
    // window; the full CDF is reported alongside for inspection.
    fit.pass = true;
    for (std::size_t j = 0; j < nw; ++j)
        if (fit.tail[j] > fit.C * tgrid[j] * tgrid[j] + 3.0 * fit.stderr_[j]) fit.pass = false;
    return fit;
}

C0ProbeReport c0_probe(const SdeSystem& sys, const RegionSpec& K, const std::vector<Vec>& starts,
                       double t, const McConfig& cfg) {
    C0ProbeReport rep;
    for (const Vec& s : starts) {
        if (K.contains(s)) throw InvalidInput("c0_probe: start point lies inside K");
        const auto taus = first_hit_times(sys, s, K, t, cfg);
        std::size_t hits = 0;
        for (double tau : taus)
            if (tau <= t) ++hits;
        const double p = static_cast<double>(hits) / static_cast<double>(cfg.n_paths);
        rep.entries.push_back({s, p, binom_stderr(p, cfg.n_paths)});
    }
    rep.monotone_trend = true;
    for (std::size_t i = 1; i < rep.entries.size(); ++i)
        if (rep.entries[i].probability >
            rep.entries[i - 1].probability + 3.0 * rep.entries[i].stderr_)
            rep.monotone_trend = false;
    return rep;
}

ExplosionReport explosion_probe(const SdeSystem& sys, const std::vector<Vec>& starts, double T,
                                const RegionSpec& trigger, const McConfig& cfg) {
    ExplosionReport rep;
    rep.T = T;
    for (const Vec& s : starts) {
        const auto taus = first_hit_times(sys, s, trigger, T, cfg);
        std::size_t hits = 0;
        for (double tau : taus)
            if (tau <= T) ++hits;
        const double p = static_cast<double>(hits) / static_cast<double>(cfg.n_paths);
        rep.starts.push_back(s);
        rep.fraction.push_back(p);
        rep.stderr_.push_back(binom_stderr(p, cfg.n_paths));
    }
    return rep;
}

ErgodicReport ergodic_average(const SdeSystem& sys, const RegionSpec& K, const Vec& x,
                              std::vector<double> tgrid, const McConfig& cfg) {
    if (!sys.manifold().compact())
        throw InvalidInput("ergodic_average: needs a compact model from the catalog");
    std::sort(tgrid.begin(), tgrid.end());
    FlowConfig flow = cfg.flow;
    flow.t_max = tgrid.back();
    flow.validate();
    const std::size_t n_grid = tgrid.size();
    std::vector<std::size_t> steps(n_grid);
    for (std::size_t j = 0; j < n_grid; ++j)
        steps[j] = static_cast<std::size_t>(std::llround(tgrid[j] / flow.dt));

    std::vector<double> slab(cfg.n_paths * n_grid, 0.0);
    parallel_for(cfg.n_paths, cfg.resolved_threads(), [&](std::size_t b, std::size_t e) {
        std::vector<Vec> no_vecs;
        for (std::size_t i = b; i < e; ++i) {
            BrownianDriver driver(cfg.seed, i, sys.noise_dim(), flow.dt);
            double* row = slab.data() + i * n_grid;
            std::size_t j = 0;
            run_path(sys, x, no_vecs, flow, driver,
                     [&](std::size_t k, double, const Vec& xc, const std::vector<Vec>&, const Vec&,
                         StepPhase phase) {
                         if (phase != StepPhase::Live) return true;
                         while (j < n_grid && steps[j] == k) {
                             row[j] = K.contains(xc) ? 1.0 : 0.0;
                             ++j;
                         }
                         return true;
                     });
        }
    });

    ErgodicReport rep;
    rep.times = tgrid;
    rep.target = h_volume_ratio(sys.model(), K);
    std::vector<double> col(cfg.n_paths);
    for (std::size_t j = 0; j < n_grid; ++j) {
        for (std::size_t i = 0; i < cfg.n_paths; ++i) col[i] = slab[i * n_grid + j];
        const MeanStderr ms = mean_stderr(col);
        rep.estimate.push_back(ms.mean);
        rep.stderr_.push_back(ms.stderr_);
    }
    rep.pass = std::abs(rep.estimate.back() - rep.target) <=
               3.0 * rep.stderr_.back() + rep.quadrature_tol;
    return rep;
}

double h_volume_ratio(const ManifoldModel& model, const RegionSpec& K, int grid) {
    const auto chart = model.geom().chart();
    if (!chart) throw InvalidInput(model.geom().id() + ": no chart available for quadrature");
    const double du = (chart->u_max - chart->u_min) / grid;
    const double dv = (chart->v_max - chart->v_min) / grid;
    double num = 0.0, den = 0.0;
    for (int i = 0; i < grid; ++i) {
        const double u = chart->u_min + (i + 0.5) * du;
        for (int j = 0; j < grid; ++j) {
            const double v = chart->v_min + (j + 0.5) * dv;
            const Vec p = chart->point(u, v);
            double w = chart->area_element(u, v);
            if (model.drift_potential) w *= std::exp(2.0 * model.drift_potential->value(p));
            den += w;
            if (K.contains(p)) num += w;
        }
    }
    if (den == 0.0) throw InvalidInput("h_volume_ratio: degenerate chart measure");
    return num / den;
}

}  // namespace geomflow
