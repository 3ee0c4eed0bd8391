#include <cmath>

#include "doctest.h"
#include "geomflow/estimators.hpp"
#include "geomflow/oracles.hpp"

using namespace geomflow;

namespace {

Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

McConfig quick_cfg(std::size_t n, double dt, double t_max) {
    McConfig cfg;
    cfg.n_paths = n;
    cfg.flow.dt = dt;
    cfg.flow.t_max = t_max;
    return cfg;
}

}  // namespace

TEST_CASE("semigroup on the OU process matches x e^{-ct}") {
    const auto sys = system_by_id("langevin:1:1:1");
    const auto f = scalar_field_by_id("coord:1");
    const auto est = mc_semigroup(*sys, f, vec1(1.0), 1.0, quick_cfg(4000, 1e-3, 1.0));
    CHECK(std::abs(est.value - std::exp(-1.0)) < 3.0 * est.stderr_);
    CHECK(est.stderr_ < 0.02);
}

TEST_CASE("semigroup of a constant is exactly 1 on the sphere") {
    const auto sys = system_by_id("sphere:2:1");
    const auto f = scalar_field_by_id("const:1");
    const auto est = mc_semigroup(*sys, f, vec3(0, 0, 1), 0.5, quick_cfg(200, 1e-3, 0.5));
    CHECK(est.value == 1.0);
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("semigroup mass loss on the Taniguchi model") {
    const auto sys = system_by_id("taniguchi:0.5");
    McConfig cfg = quick_cfg(500, 1e-3, 10.0);
    cfg.flow.exit_sets.push_back(
        {"disk-edge", [](const Vec& x) { return x.norm() > 1.0 - 1e-3; }});
    const auto f = scalar_field_by_id("const:1");
    const auto est = mc_semigroup(*sys, f, vec2(0.5, 0.0), 10.0, cfg);
    CHECK(est.value < 1.0 - 5.0 * est.stderr_);
}

TEST_CASE("delta P_t on flat space fixes constant forms") {
    const auto sys = system_by_id("euclidean:2");
    const auto f = scalar_field_by_id("coord:1");
    const auto phi = differential(f, sys->model());
    const auto est = mc_delta_pt(*sys, phi, vec2(0.2, 0.5), vec2(0.7, -0.3), 1.0,
                                 quick_cfg(64, 1e-2, 1.0));
    CHECK(est.value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(est.stderr_ < 1e-14);
}

TEST_CASE("delta P_t on the Langevin system decays as e^{-ct}") {
    const auto sys = system_by_id("langevin:1:1:2");
    const auto f = scalar_field_by_id("coord:2");
    const auto phi = differential(f, sys->model());
    const auto est = mc_delta_pt(*sys, phi, vec2(0.2, 0.5), vec2(0.4, 1.0), 1.0,
                                 quick_cfg(64, 1e-3, 1.0));
    CHECK(std::abs(est.value - std::exp(-1.0) * 1.0) < 2e-3);
}

TEST_CASE("moment exponent: sphere slope (p - n)/2 at p = 1") {
    const auto sys = system_by_id("sphere:2:1");
    McConfig cfg = quick_cfg(2000, 1e-3, 2.0);
    const auto est = moment_exponent(*sys, vec3(0, 0, 1), std::nullopt, 1.0,
                                     {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0}, cfg,
                                     {WindowPolicy::Full});
    CHECK(std::abs(est.slope - (-0.5)) < 0.1);
    CHECK(est.moment_stable_candidate);
}

TEST_CASE("moment exponent: deterministic Langevin Jacobian") {
    const auto sys = system_by_id("langevin:1:1:1");
    McConfig cfg = quick_cfg(200, 1e-3, 1.0);
    for (double p : {1.0, 2.0}) {
        const auto est = moment_exponent(*sys, vec1(0.3), std::nullopt, p,
                                         {0.25, 0.5, 0.75, 1.0}, cfg);
        CHECK(std::abs(est.slope - (-p)) < 1e-4);
        CHECK(est.slope_ci_high - est.slope_ci_low < 1e-6);
    }
}

TEST_CASE("moment exponent: hyperbolic horizontal vector grows like e^t") {
    const auto sys = system_by_id("hyperbolic");
    McConfig cfg = quick_cfg(4000, 1e-3, 1.5);
    const auto est = moment_exponent(*sys, vec2(0.0, 1.0), vec2(1.0, 0.0), 1.0,
                                     {0.25, 0.5, 0.75, 1.0, 1.25, 1.5}, cfg,
                                     {WindowPolicy::Full});
    CHECK(std::abs(est.slope - 1.0) < 0.15);
}

TEST_CASE("Bismut gradient on the OU process") {
    const auto sys = system_by_id("langevin:1:1:1");
    const auto f = scalar_field_by_id("coord:1");
    const auto est = bismut_gradient(*sys, f, vec1(0.0), vec1(1.0), 1.0,
                                     quick_cfg(4000, 1e-3, 1.0));
    CHECK(std::abs(est.value - std::exp(-1.0)) < 3.0 * est.stderr_);
    CHECK(est.stderr_ < 0.02);
}

TEST_CASE("Bismut gradient against the Gaussian quadrature oracle on flat space") {
    const auto sys = system_by_id("euclidean:2");
    const auto f = scalar_field_by_id("sin:1");
    const Vec x0 = vec2(0.4, -0.2);
    const auto est =
        bismut_gradient(*sys, f, x0, vec2(1.0, 0.0), 1.0, quick_cfg(6000, 1e-3, 1.0));
    // d/dx P_t sin(x) for the 1-D heat kernel, by quadrature
    oracles::OuKernel flat{0.0, 1.0};
    const double h = 1e-5;
    auto pt = [&](double x) {
        return flat.semigroup([](double y) { return std::sin(y); }, x, 1.0);
    };
    const double oracle = (pt(x0[0] + h) - pt(x0[0] - h)) / (2.0 * h);
    CHECK(oracle == doctest::Approx(std::cos(0.4) * std::exp(-0.5)).epsilon(1e-7));
    CHECK(std::abs(est.value - oracle) < 3.0 * est.stderr_);
}

TEST_CASE("Bismut weight is a mean-zero martingale (constant f)") {
    const auto sys = system_by_id("sphere:2:1");
    const auto f = scalar_field_by_id("const:2");
    const auto est = bismut_gradient(*sys, f, vec3(0, 0, 1), vec3(1, 0, 0), 0.5,
                                     quick_cfg(2000, 1e-3, 0.5));
    CHECK(std::abs(est.value) < 3.0 * est.stderr_);
}

TEST_CASE("Bismut gradient rejects non-elliptic systems and t = 0") {
    const auto taniguchi = system_by_id("taniguchi:0.5");
    const auto f = scalar_field_by_id("coord:1");
    CHECK_THROWS_AS(bismut_gradient(*taniguchi, f, vec2(0.1, 0.0), vec2(1, 0), 0.5,
                                    quick_cfg(4, 1e-3, 0.5)),
                    InvalidInput);
    const auto ou = system_by_id("langevin:1:1:1");
    CHECK_THROWS_AS(bismut_gradient(*ou, f, vec1(0.0), vec1(1.0), 0.0, quick_cfg(4, 1e-3, 1.0)),
                    InvalidInput);
}

TEST_CASE("line integral of exact and constant forms") {
    const auto sys = system_by_id("euclidean:1");
    FlowConfig flow;
    flow.dt = 1e-3;
    flow.t_max = 1.0;
    const auto f = scalar_field_by_id("sin:1");
    const auto df = differential(f, sys->model());
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
        BrownianDriver d(1234, i, 1, flow.dt);
        const auto rec = integrate_path(*sys, vec1(0.2), flow, d);
        const double li = line_integral_one_form(*sys, df, rec);
        const double exact = std::sin(rec.points.back()[0]) - std::sin(0.2);
        worst = std::max(worst, std::abs(li - exact));
    }
    CHECK(worst < 0.2);  // pathwise Ito-formula error, O(sqrt(t dt)) scale

    // phi = 0
    OneForm zero;
    zero.evaluate = [](const Vec&, const Vec&) { return 0.0; };
    zero.codifferential = [](const Vec&) { return 0.0; };
    BrownianDriver d(1, 0, 1, flow.dt);
    const auto rec = integrate_path(*sys, vec1(0.0), flow, d);
    CHECK(line_integral_one_form(*sys, zero, rec) == 0.0);

    // constant form integrates the displacement exactly
    const auto sys2 = system_by_id("euclidean:2");
    FlowConfig flow2 = flow;
    BrownianDriver d2(2, 0, 2, flow2.dt);
    const auto rec2 = integrate_path(*sys2, vec2(0.3, 0.4), flow2, d2);
    const auto dx1 = constant_form(0, 2);
    CHECK(line_integral_one_form(*sys2, dx1, rec2) ==
          doctest::Approx(rec2.points.back()[0] - 0.3).epsilon(1e-12));

    // missing codifferential is rejected with a clear message
    OneForm no_codiff;
    no_codiff.evaluate = [](const Vec&, const Vec& v) { return v[0]; };
    CHECK_THROWS_WITH_AS(line_integral_one_form(*sys2, no_codiff, rec2),
                         doctest::Contains("codifferential"), InvalidInput);
}

TEST_CASE("Bismut 1-form estimator agrees with the gradient estimator on OU") {
    const auto sys = system_by_id("langevin:1:1:1");
    const auto f = scalar_field_by_id("coord:1");
    const auto df = differential(f, sys->model());
    McConfig cfg = quick_cfg(4000, 1e-3, 1.0);
    const auto a = bismut_one_form(*sys, df, vec1(0.2), vec1(1.0), 1.0, cfg);
    const auto b = bismut_gradient(*sys, f, vec1(0.2), vec1(1.0), 1.0, cfg);
    CHECK(std::abs(a.value - b.value) <
          3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_));
}

TEST_CASE("Bismut 1-form on a flat constant form returns v1") {
    const auto sys = system_by_id("euclidean:2");
    const auto dx1 = constant_form(0, 2);
    const auto est =
        bismut_one_form(*sys, dx1, vec2(0.0, 0.0), vec2(0.8, 0.6), 1.0, quick_cfg(6000, 1e-3, 1.0));
    CHECK(std::abs(est.value - 0.8) < 3.0 * est.stderr_);
}

TEST_CASE("Bismut 1-form matches delta P_t on the sphere harmonic") {
    const auto sys = system_by_id("sphere:2:1");
    const auto f = scalar_field_by_id("coord:3");
    const auto df = differential(f, sys->model());
    const Vec x0 = vec3(1, 0, 0);
    const Vec v0 = vec3(0, 0, 1);
    McConfig cfg = quick_cfg(4000, 1e-3, 0.5);
    const auto a = bismut_one_form(*sys, df, x0, v0, 0.5, cfg);
    const auto b = mc_delta_pt(*sys, df, x0, v0, 0.5, cfg);
    CHECK(std::abs(a.value - b.value) <
          3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_));
}

TEST_CASE("intertwining check passes on flat space, Langevin, and the sphere") {
    McConfig cfg = quick_cfg(3000, 1e-3, 1.0);
    {
        const auto sys = system_by_id("euclidean:2");
        const auto rep = intertwining_check(*sys, scalar_field_by_id("sin:1"), vec2(0.4, -0.2),
                                            vec2(1, 0), 1.0, {1e-2, 1e-3}, cfg);
        CHECK(rep.pass);
    }
    {
        const auto sys = system_by_id("langevin:1:1:2");
        const auto rep = intertwining_check(*sys, scalar_field_by_id("sin:1"), vec2(0.4, -0.2),
                                            vec2(1, 0), 1.0, {1e-2, 1e-3}, cfg);
        CHECK(rep.pass);
        // all three estimate e^{-ct} d f-pairing analytically
        const double target = std::exp(-1.0) * std::cos(0.4 * std::exp(-1.0));
        (void)target;
    }
    {
        const auto sys = system_by_id("sphere:2:1");
        McConfig scfg = quick_cfg(3000, 1e-3, 0.5);
        const auto rep = intertwining_check(*sys, scalar_field_by_id("coord:3"), vec3(1, 0, 0),
                                            vec3(0, 0, 1), 0.5, {1e-2, 1e-3}, scfg);
        CHECK(rep.pass);
    }
}

TEST_CASE("grad log heat kernel on OU via bridge sampling") {
    const double target = std::exp(-1.0) / ((1.0 - std::exp(-2.0)) / 2.0);
    const auto est = grad_log_heat_kernel_ou(1.0, 1.0, 0.0, 1.0, 1.0, 4000, 42, 1e-3);
    CHECK(std::abs(est.value - target) < 3.0 * est.stderr_);

    // at the kernel maximum y = x e^{-ct} the gradient vanishes
    const auto zero = grad_log_heat_kernel_ou(1.0, 1.0, 0.7, 0.7 * std::exp(-1.0), 1.0, 4000, 7,
                                              1e-3);
    CHECK(std::abs(zero.value) < 3.0 * zero.stderr_);

    // OU symmetry: the estimate flips sign with (x, y) -> (-x, -y)
    const auto plus = grad_log_heat_kernel_ou(1.0, 1.0, 0.3, 1.0, 1.0, 4000, 11, 1e-3);
    const auto minus = grad_log_heat_kernel_ou(1.0, 1.0, -0.3, -1.0, 1.0, 4000, 11, 1e-3);
    CHECK(std::abs(plus.value + minus.value) <
          3.0 * std::sqrt(plus.stderr_ * plus.stderr_ + minus.stderr_ * minus.stderr_));

    CHECK_THROWS_AS(grad_log_heat_kernel_ou(1.0, 0.0, 0.0, 1.0, 1.0, 10, 1, 1e-3), InvalidInput);
    CHECK_THROWS_AS(grad_log_heat_kernel_ou(1.0, 1.0, 0.0, 1.0, 0.0, 10, 1, 1e-3), InvalidInput);
}

TEST_CASE("stderr shrinks like 1/sqrt(n)") {
    const auto sys = system_by_id("langevin:1:1:1");
    const auto f = scalar_field_by_id("coord:1");
    const auto small = mc_semigroup(*sys, f, vec1(1.0), 0.5, quick_cfg(1000, 1e-2, 0.5));
    const auto large = mc_semigroup(*sys, f, vec1(1.0), 0.5, quick_cfg(4000, 1e-2, 0.5));
    const double ratio = small.stderr_ / large.stderr_;
    CHECK(ratio > 1.6);
    CHECK(ratio < 2.4);
}

TEST_CASE("estimates are identical across 1, 4, and 8 worker threads") {
    const auto sys = system_by_id("sphere:2:1");
    const auto f = scalar_field_by_id("coord:3");
    McConfig cfg = quick_cfg(600, 2e-3, 0.5);
    cfg.threads = 1;
    const auto one = mc_semigroup(*sys, f, vec3(0, 0, 1), 0.5, cfg);
    cfg.threads = 4;
    const auto four = mc_semigroup(*sys, f, vec3(0, 0, 1), 0.5, cfg);
    cfg.threads = 8;
    const auto eight = mc_semigroup(*sys, f, vec3(0, 0, 1), 0.5, cfg);
    CHECK(one.value == four.value);
    CHECK(one.stderr_ == four.stderr_);
    CHECK(one.value == eight.value);
    CHECK(one.stderr_ == eight.stderr_);
}

TEST_CASE("estimators reject an empty ensemble") {
    const auto sys = system_by_id("euclidean:1");
    const auto f = scalar_field_by_id("coord:1");
    CHECK_THROWS_AS(mc_semigroup(*sys, f, vec1(0.0), 1.0, quick_cfg(0, 1e-2, 1.0)), InvalidInput);
}
