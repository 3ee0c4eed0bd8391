#pragma once

#include <map>
#include <string>
#include <vector>

#include "geomflow/diagnostics.hpp"

namespace geomflow {

/// Declarative experiment: flat key=value file with dotted keys, validated
/// against the manifold / drift / estimator / function catalogs before any
/// computation runs.
struct ExperimentSpec {
    std::string id;
    std::string manifold = "euclidean:1";
    std::string drift = "none";
    std::string estimator;
    std::string function = "coord:1";  // f or phi by catalog id
    double gamma = 1.0;
    double p = 1.0;
    double t = 1.0;
    std::vector<double> t_grid;
    Vec x0;
    Vec v0;
    double bridge_target = 0.0;  // grad-log-ou endpoint y
    std::string region;          // region spec string for probes
    std::uint64_t seed = 42;
    std::size_t n_paths = 10000;
    int threads = 0;
    FlowConfig flow;
    std::string out_dir = ".";
    bool check = false;

    std::map<std::string, std::string> raw;  // resolved key=value view

    static ExperimentSpec parse_file(const std::string& path);
    static ExperimentSpec parse_lines(const std::vector<std::string>& lines,
                                      const std::string& origin);
    void validate() const;
    std::string canonical_text() const;  // resolved, sorted key=value form
    std::string fingerprint() const;
};

struct ResultRow {
    std::string experiment;
    std::string estimator;
    std::string manifold;
    double t = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct ExperimentOutcome {
    std::vector<ResultRow> rows;
    bool ok = true;
    std::string detail;
};

/// Runs one experiment; returns rows in the CSV schema
/// "experiment,estimator,manifold,t,value,stderr,n_paths,seed".
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

std::string rows_to_csv(const std::vector<ResultRow>& rows);

/// Writes results + manifest under spec.out_dir (write-once per experiment
/// id; an existing result file is a collision error). Returns the CSV path.
std::string write_outputs(const ExperimentSpec& spec, const ExperimentOutcome& outcome,
                          double wall_seconds);

RegionSpec region_by_id(const std::string& id, int ambient_dim);

std::vector<std::string> estimator_catalog_ids();

}  // namespace geomflow
