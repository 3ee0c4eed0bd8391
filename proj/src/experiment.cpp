#include "geomflow/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geomflow/oracles.hpp"

namespace geomflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::string cleaned = s;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream is(cleaned);
    double v;
    while (is >> v) out.push_back(v);
    if (!is.eof()) throw ConfigError("malformed numeric list for key '" + key + "': " + s);
    return out;
}

Vec parse_vec(const std::string& s, const std::string& key) {
    const auto nums = parse_numbers(s, key);
    Vec v(static_cast<Eigen::Index>(nums.size()));
    for (std::size_t i = 0; i < nums.size(); ++i) v[static_cast<Eigen::Index>(i)] = nums[i];
    return v;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("malformed numeric value for key '" + key + "': " + s);
    }
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_vec(const Vec& v) {
    std::string out;
    for (int i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += format_g17(v[i]);
    }
    return out;
}

}  // namespace

std::vector<std::string> estimator_catalog_ids() {
    return {"semigroup",       "delta-pt",        "moment-exponent", "bismut-gradient",
            "bismut-one-form", "grad-log-ou",     "intertwining",    "exit-tail",
            "c0-probe",        "explosion-probe", "ergodic-average", "dump-paths"};
}

RegionSpec region_by_id(const std::string& id, int ambient_dim) {
    auto parts_of = [&](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (char c : s) {
            if (c == ':') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        out.push_back(cur);
        return out;
    };
    const auto parts = parts_of(id);
    const Vec origin = Vec::Zero(ambient_dim);
    if (parts[0] == "ball" && parts.size() == 2)
        return RegionSpec::ball(origin, parse_double(parts[1], id), id);
    if (parts[0] == "cball" && parts.size() == 2)
        return RegionSpec::complement_of_ball(origin, parse_double(parts[1], id), id);
    if (parts[0] == "annulus" && parts.size() == 3)
        return RegionSpec::annulus(origin, parse_double(parts[1], id), parse_double(parts[2], id),
                                   id);
    if (parts[0] == "cap" && parts.size() == 2) {
        const int i = static_cast<int>(parse_double(parts[1], id)) - 1;
        if (i < 0 || i >= ambient_dim) throw ConfigError("cap coordinate out of range in " + id);
        return RegionSpec::of_predicate([i](const Vec& x) { return x[i] > 0.0; }, id);
    }
    if (parts[0] == "disk-edge" && parts.size() == 2) {
        const double delta = parse_double(parts[1], id);
        return RegionSpec::of_predicate([delta](const Vec& x) { return x.norm() > 1.0 - delta; },
                                        id);
    }
    throw ConfigError("unknown region '" + id +
                      "'; valid: ball:<r> cball:<r> annulus:<r0>:<r1> cap:<i> disk-edge:<delta>");
}

ExperimentSpec ExperimentSpec::parse_lines(const std::vector<std::string>& lines,
                                           const std::string& origin) {
    ExperimentSpec spec;
    int lineno = 0;
    for (const std::string& raw_line : lines) {
        ++lineno;
        std::string line = raw_line;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key=value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        spec.raw[key] = value;
    }

    for (const auto& [key, value] : spec.raw) {
        if (key == "experiment.id") spec.id = value;
        else if (key == "manifold") spec.manifold = value;
        else if (key == "drift") spec.drift = value;
        else if (key == "estimator") spec.estimator = value;
        else if (key == "function") spec.function = value;
        else if (key == "gamma") spec.gamma = parse_double(value, key);
        else if (key == "p") spec.p = parse_double(value, key);
        else if (key == "t") spec.t = parse_double(value, key);
        else if (key == "t.grid") spec.t_grid = parse_numbers(value, key);
        else if (key == "x0") spec.x0 = parse_vec(value, key);
        else if (key == "v0") spec.v0 = parse_vec(value, key);
        else if (key == "y") spec.bridge_target = parse_double(value, key);
        else if (key == "region") spec.region = value;
        else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_double(value, key));
        else if (key == "n_paths") spec.n_paths = static_cast<std::size_t>(parse_double(value, key));
        else if (key == "threads") spec.threads = static_cast<int>(parse_double(value, key));
        else if (key == "flow.dt") spec.flow.dt = parse_double(value, key);
        else if (key == "flow.t_max") spec.flow.t_max = parse_double(value, key);
        else if (key == "flow.explosion_radius")
            spec.flow.explosion_radius = parse_double(value, key);
        else if (key == "flow.retraction_tolerance")
            spec.flow.retraction_tolerance = parse_double(value, key);
        else if (key == "flow.record_stride")
            spec.flow.record_stride = static_cast<int>(parse_double(value, key));
        else if (key == "flow.scheme") {
            if (value == "stratonovich") spec.flow.scheme = Scheme::StratonovichHeun;
            else if (value == "ito") spec.flow.scheme = Scheme::ItoEuler;
            else throw ConfigError("flow.scheme must be 'stratonovich' or 'ito', got " + value);
        } else if (key == "output.dir") spec.out_dir = value;
        else if (key.rfind("manifest.", 0) == 0) continue;  // manifest metadata, ignored on replay
        else throw ConfigError(origin + ": unknown key '" + key + "'");
    }
    return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read spec file " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    ExperimentSpec spec = parse_lines(lines, path);
    if (spec.id.empty()) {
        spec.id = std::filesystem::path(path).stem().string();
        spec.raw["experiment.id"] = spec.id;
    }
    return spec;
}

void ExperimentSpec::validate() const {
    if (id.empty()) throw ConfigError("missing field experiment.id");
    bool known = false;
    for (const auto& e : estimator_catalog_ids())
        if (estimator == e) known = true;
    if (!known) {
        std::string valid;
        for (const auto& e : estimator_catalog_ids()) valid += " " + e;
        throw ConfigError("unknown estimator '" + estimator + "'; valid:" + valid);
    }
    // catalog lookups fail fast with the valid-option lists
    const auto sys = system_by_id(manifold, drift, gamma);
    if (estimator == "semigroup" || estimator == "bismut-gradient" ||
        estimator == "intertwining" || estimator == "delta-pt" || estimator == "bismut-one-form")
        scalar_field_by_id(function);
    if (!region.empty()) region_by_id(region, sys->manifold().ambient_dim());
    if (x0.size() > 0 && x0.size() != sys->manifold().ambient_dim())
        throw ConfigError("x0 has wrong dimension for manifold " + manifold);
    flow.validate();
    if (n_paths == 0) throw ConfigError("n_paths must be positive");
    const bool needs_grid = estimator == "moment-exponent" || estimator == "exit-tail" ||
                            estimator == "ergodic-average";
    if (needs_grid && t_grid.size() < 3)
        throw ConfigError("estimator '" + estimator + "' needs t.grid with at least 3 points");
    const bool needs_region = estimator == "exit-tail" || estimator == "c0-probe" ||
                              estimator == "ergodic-average";
    if (needs_region && region.empty())
        throw ConfigError("estimator '" + estimator + "' needs a region");
}

std::string ExperimentSpec::canonical_text() const {
    std::map<std::string, std::string> resolved = raw;
    resolved["experiment.id"] = id;
    resolved["manifold"] = manifold;
    resolved["drift"] = drift;
    resolved["estimator"] = estimator;
    resolved["function"] = function;
    resolved["gamma"] = format_g17(gamma);
    resolved["p"] = format_g17(p);
    resolved["t"] = format_g17(t);
    if (!t_grid.empty()) {
        std::string g;
        for (std::size_t i = 0; i < t_grid.size(); ++i)
            g += (i ? " " : "") + format_g17(t_grid[i]);
        resolved["t.grid"] = g;
    }
    if (x0.size() > 0) resolved["x0"] = format_vec(x0);
    if (v0.size() > 0) resolved["v0"] = format_vec(v0);
    resolved["y"] = format_g17(bridge_target);
    if (!region.empty()) resolved["region"] = region;
    resolved["seed"] = std::to_string(seed);
    resolved["n_paths"] = std::to_string(n_paths);
    resolved["flow.dt"] = format_g17(flow.dt);
    resolved["flow.t_max"] = format_g17(flow.t_max);
    resolved["flow.explosion_radius"] = format_g17(flow.explosion_radius);
    resolved["flow.retraction_tolerance"] = format_g17(flow.retraction_tolerance);
    resolved["flow.record_stride"] = std::to_string(flow.record_stride);
    resolved["flow.scheme"] = flow.scheme == Scheme::StratonovichHeun ? "stratonovich" : "ito";
    resolved.erase("output.dir");
    resolved.erase("threads");
    std::string out;
    for (const auto& [k, v] : resolved) {
        if (k.rfind("manifest.", 0) == 0) continue;
        out += k + "=" + v + "\n";
    }
    return out;
}

std::string ExperimentSpec::fingerprint() const {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical_text())));
    return buf;
}

namespace {

ResultRow make_row(const ExperimentSpec& spec, const std::string& estimator, double t,
                   double value, double stderr_) {
    return {spec.id, estimator, spec.manifold, t, value, stderr_, spec.n_paths, spec.seed};
}

Vec default_start(const SdeSystem& sys) {
    const Manifold& m = sys.manifold();
    const int d = m.ambient_dim();
    if (m.id().rfind("sphere", 0) == 0) {
        Vec x = Vec::Zero(d);
        x[d - 1] = dynamic_cast<const Sphere&>(m).radius();
        return x;
    }
    if (auto sor = dynamic_cast<const SurfaceOfRevolution*>(&m)) return sor->point_at(0.0, 0.0);
    if (m.id() == "hyperbolic-plane") {
        Vec x(2);
        x << 0.0, 1.0;
        return x;
    }
    return Vec::Zero(d);
}

}  // namespace

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentOutcome out;
    const auto sys = system_by_id(spec.manifold, spec.drift, spec.gamma);
    McConfig cfg;
    cfg.seed = spec.seed;
    cfg.n_paths = spec.n_paths;
    cfg.threads = spec.threads;
    cfg.flow = spec.flow;
    cfg.fingerprint = spec.fingerprint();
    const Vec x0 = spec.x0.size() > 0 ? spec.x0 : default_start(*sys);
    Vec v0 = spec.v0;
    if (v0.size() == 0) v0 = sys->manifold().tangent_basis(x0).front();

    try {
        const std::string& kind = spec.estimator;
        if (kind == "semigroup") {
            const auto f = scalar_field_by_id(spec.function);
            McConfig c = cfg;
            if (!spec.region.empty())
                c.flow.exit_sets.push_back(
                    region_by_id(spec.region, sys->manifold().ambient_dim()).as_stop_region());
            const auto est = mc_semigroup(*sys, f, x0, spec.t, c);
            out.rows.push_back(make_row(spec, kind, spec.t, est.value, est.stderr_));
        } else if (kind == "delta-pt") {
            const auto f = scalar_field_by_id(spec.function);
            const auto est = mc_delta_pt(*sys, differential(f, sys->model()), x0, v0, spec.t, cfg);
            out.rows.push_back(make_row(spec, kind, spec.t, est.value, est.stderr_));
        } else if (kind == "moment-exponent") {
            const auto est =
                moment_exponent(*sys, x0, v0, spec.p, spec.t_grid, cfg, {WindowPolicy::UpperHalf});
            for (std::size_t j = 0; j < est.times.size(); ++j)
                out.rows.push_back(make_row(spec, "moment-exponent.moment", est.times[j],
                                            est.moments[j], est.moment_stderr[j]));
            out.rows.push_back(make_row(spec, "moment-exponent.slope", est.times.back(), est.slope,
                                        est.slope_stderr));
        } else if (kind == "bismut-gradient") {
            const auto f = scalar_field_by_id(spec.function);
            const auto est = bismut_gradient(*sys, f, x0, v0, spec.t, cfg);
            out.rows.push_back(make_row(spec, kind, spec.t, est.value, est.stderr_));
        } else if (kind == "bismut-one-form") {
            const auto f = scalar_field_by_id(spec.function);
            const auto est =
                bismut_one_form(*sys, differential(f, sys->model()), x0, v0, spec.t, cfg);
            out.rows.push_back(make_row(spec, kind, spec.t, est.value, est.stderr_));
        } else if (kind == "grad-log-ou") {
            const auto lang = std::dynamic_pointer_cast<const LangevinSystem>(sys);
            if (!lang)
                throw ConfigError("grad-log-ou requires a langevin:c[:gamma[:1]] manifold id");
            const auto est =
                grad_log_heat_kernel_ou(lang->c(), lang->gamma(), x0[0], spec.bridge_target,
                                        spec.t, spec.n_paths, spec.seed, spec.flow.dt,
                                        spec.threads);
            out.rows.push_back(make_row(spec, kind, spec.t, est.value, est.stderr_));
        } else if (kind == "intertwining") {
            const auto f = scalar_field_by_id(spec.function);
            const auto rep = intertwining_check(*sys, f, x0, v0, spec.t, {1e-2, 1e-3}, cfg);
            for (std::size_t j = 0; j < rep.epsilons.size(); ++j)
                out.rows.push_back(make_row(spec, "intertwining.fd", spec.t,
                                            rep.finite_difference[j].value,
                                            rep.finite_difference[j].stderr_));
            out.rows.push_back(make_row(spec, "intertwining.delta-pt", spec.t, rep.delta_pt.value,
                                        rep.delta_pt.stderr_));
            out.rows.push_back(
                make_row(spec, "intertwining.bismut", spec.t, rep.bismut.value,
                         rep.bismut.stderr_));
            out.rows.push_back(
                make_row(spec, "intertwining.pass", spec.t, rep.pass ? 1.0 : 0.0, 0.0));
            if (!rep.pass) out.ok = false;
        } else if (kind == "exit-tail") {
            const auto region = region_by_id(spec.region, sys->manifold().ambient_dim());
            const auto fit = exit_tail(*sys, x0, region, spec.t_grid, cfg);
            for (std::size_t j = 0; j < fit.times.size(); ++j)
                out.rows.push_back(
                    make_row(spec, "exit-tail.cdf", fit.times[j], fit.tail[j], fit.stderr_[j]));
            out.rows.push_back(make_row(spec, "exit-tail.C", fit.times.back(), fit.C, 0.0));
            out.rows.push_back(
                make_row(spec, "exit-tail.pass", fit.times.back(), fit.pass ? 1.0 : 0.0, 0.0));
            if (!fit.pass) out.ok = false;
        } else if (kind == "c0-probe") {
            const auto region = region_by_id(spec.region, sys->manifold().ambient_dim());
            const auto rep = c0_probe(*sys, region, {x0}, spec.t, cfg);
            out.rows.push_back(make_row(spec, "c0-probe", spec.t, rep.entries[0].probability,
                                        rep.entries[0].stderr_));
        } else if (kind == "explosion-probe") {
            const auto region = region_by_id(spec.region.empty() ? "disk-edge:0.001" : spec.region,
                                             sys->manifold().ambient_dim());
            const auto rep = explosion_probe(*sys, {x0}, spec.t, region, cfg);
            out.rows.push_back(
                make_row(spec, "explosion-probe", spec.t, rep.fraction[0], rep.stderr_[0]));
        } else if (kind == "ergodic-average") {
            const auto region = region_by_id(spec.region, sys->manifold().ambient_dim());
            const auto rep = ergodic_average(*sys, region, x0, spec.t_grid, cfg);
            for (std::size_t j = 0; j < rep.times.size(); ++j)
                out.rows.push_back(make_row(spec, "ergodic-average", rep.times[j], rep.estimate[j],
                                            rep.stderr_[j]));
            out.rows.push_back(
                make_row(spec, "ergodic-average.target", rep.times.back(), rep.target, 0.0));
            if (!rep.pass) out.ok = false;
        } else if (kind == "dump-paths") {
            std::vector<TrajectoryRecord> recs;
            for (std::size_t i = 0; i < spec.n_paths; ++i) {
                BrownianDriver driver(spec.seed, i, sys->noise_dim(), spec.flow.dt);
                recs.push_back(integrate_path(*sys, x0, spec.flow, driver));
            }
            std::filesystem::create_directories(spec.out_dir);
            const std::string path = spec.out_dir + "/" + spec.id + ".paths.csv";
            if (std::filesystem::exists(path))
                throw ConfigError("output collision: " + path + " already exists");
            std::ofstream os(path, std::ios::binary);
            write_trajectory_dump(os, recs, spec.fingerprint(), spec.seed);
            out.rows.push_back(
                make_row(spec, kind, spec.flow.t_max, static_cast<double>(recs.size()), 0.0));
        }
    } catch (const ConfigError&) {
        throw;  // configuration problems are hard errors
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail = e.what();
        out.rows.push_back(
            make_row(spec, spec.estimator + ".failed", spec.t, std::nan(""), std::nan("")));
    }
    return out;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
    std::string out = "experiment,estimator,manifold,t,value,stderr,n_paths,seed\n";
    for (const auto& r : rows) {
        out += r.experiment + "," + r.estimator + "," + r.manifold + "," + format_g17(r.t) + "," +
               format_g17(r.value) + "," + format_g17(r.stderr_) + "," +
               std::to_string(r.n_paths) + "," + std::to_string(r.seed) + "\n";
    }
    return out;
}

std::string write_outputs(const ExperimentSpec& spec, const ExperimentOutcome& outcome,
                          double wall_seconds) {
    std::filesystem::create_directories(spec.out_dir);
    const std::string csv_path = spec.out_dir + "/" + spec.id + ".csv";
    const std::string manifest_path = spec.out_dir + "/" + spec.id + ".manifest";
    if (std::filesystem::exists(csv_path))
        throw ConfigError("output collision: " + csv_path +
                          " already exists (results are write-once per experiment id)");
    {
        std::ofstream os(csv_path, std::ios::binary);
        os << rows_to_csv(outcome.rows);
    }
    {
        std::ofstream os(manifest_path, std::ios::binary);
        os << spec.canonical_text();
        os << "manifest.fingerprint=" << spec.fingerprint() << "\n";
        os << "manifest.version=geomflow-1.0\n";
        os << "manifest.wall_seconds=" << format_g17(wall_seconds) << "\n";
        os << "manifest.status=" << (outcome.ok ? "ok" : "failed") << "\n";
    }
    return csv_path;
}

}  // namespace geomflow
