#include <chrono>
#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "geomflow/experiment.hpp"
#include "geomflow/suites.hpp"

namespace {

int run_command(const std::string& spec_path, std::uint64_t seed, bool seed_set, int threads,
                const std::string& out_dir, bool check) {
    using namespace geomflow;
    ExperimentSpec spec = ExperimentSpec::parse_file(spec_path);
    if (seed_set) spec.seed = seed;
    if (threads > 0) spec.threads = threads;
    if (!out_dir.empty()) spec.out_dir = out_dir;
    spec.validate();

    const auto t0 = std::chrono::steady_clock::now();
    const ExperimentOutcome outcome = run_experiment(spec);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string csv_path = write_outputs(spec, outcome, wall);
    std::cout << rows_to_csv(outcome.rows);
    std::cerr << "wrote " << csv_path << " (" << wall << " s)";
    if (!outcome.ok) std::cerr << " [failed: " << outcome.detail << "]";
    std::cerr << "\n";
    if (!outcome.ok && check) return 2;
    return 0;
}

int suite_command(const std::string& name, bool quick, int threads, std::uint64_t seed) {
    using namespace geomflow;
    SuiteOptions opts;
    opts.quick = quick;
    opts.threads = threads;
    opts.seed = seed;
    const auto results = run_suite(name, opts);
    std::printf("%-52s %12s %12s %10s  %s\n", "criterion", "target", "estimate", "tolerance",
                "verdict");
    int failures = 0;
    for (const auto& r : results) {
        std::printf("%-52s %12.6g %12.6g %10.4g  %s\n", r.name.c_str(), r.target, r.estimate,
                    r.tolerance, r.pass ? "PASS" : "FAIL");
        if (!r.detail.empty()) std::printf("    %s\n", r.detail.c_str());
        if (!r.pass) ++failures;
    }
    std::printf("%zu criteria, %d failed\n", results.size(), failures);
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"geomflow: Monte Carlo estimation for stochastic flows on embedded manifolds"};
    app.require_subcommand(1);

    std::string spec_path;
    std::uint64_t seed = 42;
    int threads = 0;
    std::string out_dir;
    bool check = false;
    auto* run = app.add_subcommand("run", "run a declarative experiment spec");
    run->add_option("spec", spec_path, "key=value experiment file")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the master seed");
    run->add_option("--threads", threads, "worker threads (default GEOMFLOW_THREADS or 1)");
    run->add_option("--out", out_dir, "output directory");
    run->add_flag("--check", check, "exit nonzero when the experiment reports failure");

    std::string suite_name;
    bool quick = false;
    int suite_threads = 0;
    std::uint64_t suite_seed = 42;
    auto* suite = app.add_subcommand("suite", "run a named verification suite");
    suite->add_option("name", suite_name, "paper-examples | invariants")->required();
    suite->add_flag("--quick", quick, "n_paths / 10 and tolerances x 2");
    suite->add_option("--threads", suite_threads, "worker threads");
    suite->add_option("--seed", suite_seed, "master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return run_command(spec_path, seed, seed_opt->count() > 0, threads, out_dir, check);
        return suite_command(suite_name, quick, suite_threads, suite_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
