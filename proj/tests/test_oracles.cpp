#include <cmath>
#include <random>

#include "doctest.h"
#include "geomflow/oracles.hpp"

using namespace geomflow;
using namespace geomflow::oracles;

TEST_CASE("sphere moment closed form") {
    CHECK(sphere_moment(2, 1.0, 2.0, 3.7, 1.3) == doctest::Approx(1.3 * 1.3));  // exponent 0
    CHECK(sphere_moment(2, 1.0, 1.0, 2.0, 1.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(sphere_moment(3, 2.0, 3.0, 5.0, 1.0) == doctest::Approx(1.0));  // p = n
}

TEST_CASE("langevin exact path") {
    // gamma = 0: deterministic decay
    std::vector<double> incs(1000, 0.123);
    auto p = langevin_exact(2.0, 0.0, 1.5, incs, 1e-3);
    CHECK(p.points.back() == doctest::Approx(1.5 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(p.jacobians.back() == doctest::Approx(std::exp(-2.0)));

    // stationary variance -> gamma^2 / (2c)
    std::mt19937 gen(1);
    std::normal_distribution<double> nd;
    const double dt = 1e-2, c = 1.0, gamma = 1.5;
    double s2 = 0.0;
    const int n_paths = 4000;
    for (int i = 0; i < n_paths; ++i) {
        std::vector<double> zs(2000);
        for (auto& z : zs) z = nd(gen) * std::sqrt(dt);
        const auto path = langevin_exact(c, gamma, 0.0, zs, dt);
        s2 += path.points.back() * path.points.back();
    }
    s2 /= n_paths;
    CHECK(s2 == doctest::Approx(gamma * gamma / (2.0 * c)).epsilon(0.1));
}

TEST_CASE("hyperbolic exact flow") {
    const double dt = 1e-3;
    const std::size_t n = 1000;
    // degenerate driver B^2 = 0: y decays as e^{-t/2}
    {
        std::vector<double> db1(n, 0.0), db2(n, 0.0);
        const auto p = hyperbolic_exact(0.0, 2.0, db1, db2, dt);
        CHECK(p.ys.back() == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));
        CHECK(p.jac_y.back() == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
    }
    // v = (0,1): hyperbolic norm ratio is 1 pathwise
    {
        std::mt19937 gen(3);
        std::normal_distribution<double> nd;
        std::vector<double> db1(n), db2(n);
        for (std::size_t k = 0; k < n; ++k) {
            db1[k] = nd(gen) * std::sqrt(dt);
            db2[k] = nd(gen) * std::sqrt(dt);
        }
        const double y0 = 1.7;
        const auto p = hyperbolic_exact(0.3, y0, db1, db2, dt);
        // |TF(0,1)|_hyp at y_t over |(0,1)|_hyp at y_0 = (jac_y / y_t) * y0
        const double ratio =
            hyperbolic_norm(0.0, p.jac_y.back(), p.ys.back()) / hyperbolic_norm(0.0, 1.0, y0);
        CHECK(ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    // v = (1,0): E |TF v|_hyp ratio = e^t (lognormal moment E e^{-B+t/2})
    {
        std::mt19937 gen(4);
        std::normal_distribution<double> nd;
        const int n_paths = 40000;
        const double t = 1.0;
        double sum = 0.0;
        for (int i = 0; i < n_paths; ++i) {
            const double B2 = nd(gen) * std::sqrt(t);
            // ratio = y0 / y_t = e^{-(B2 - t/2)}
            sum += std::exp(-(B2 - 0.5 * t));
        }
        CHECK(sum / n_paths == doctest::Approx(std::exp(t)).epsilon(0.05));
    }
}

TEST_CASE("OU kernel and quadrature") {
    OuKernel k{1.0, 1.0};
    // gradient of log density vanishes at the conditional mean
    CHECK(k.grad_log_density(0.7, 0.7 * std::exp(-1.0), 1.0) == doctest::Approx(0.0));
    const double target = std::exp(-1.0) / ((1.0 - std::exp(-2.0)) / 2.0);
    CHECK(k.grad_log_density(0.0, 1.0, 1.0) == doctest::Approx(target).epsilon(1e-12));
    // f == 1 integrates to 1
    CHECK(k.semigroup([](double) { return 1.0; }, 0.3, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    // P_t x = x e^{-ct}
    CHECK(k.semigroup([](double y) { return y; }, 1.0, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    // flat heat kernel (c = 0): P_t sin(x) = sin(x) e^{-t/2}
    OuKernel flat{0.0, 1.0};
    CHECK(flat.semigroup([](double y) { return std::sin(y); }, 0.4, 1.0) ==
          doctest::Approx(std::sin(0.4) * std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("torus first-moment oracle contract") {
    const double a = 1.0 / std::sqrt(2.0);
    auto v = torus_first_moment(a, a);
    REQUIRE(v.has_value());
    CHECK(*v == 1.0);
    CHECK_FALSE(torus_first_moment(1.0, 0.5).has_value());
}

TEST_CASE("Brownian interval exit probability") {
    // Large t: exit is almost sure; small t: super-exponentially unlikely.
    CHECK(brownian_interval_exit_prob(1.0, 10.0) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(brownian_interval_exit_prob(1.0, 0.01) < 1e-10);
    // Monte Carlo cross-check at a = 1, t = 0.5
    std::mt19937 gen(5);
    std::normal_distribution<double> nd;
    const double dt = 1e-4, t = 0.5;
    const int n_paths = 20000;
    int exits = 0;
    for (int i = 0; i < n_paths; ++i) {
        double w = 0.0;
        for (double s = 0.0; s < t; s += dt) {
            w += nd(gen) * std::sqrt(dt);
            if (std::abs(w) >= 1.0) {
                ++exits;
                break;
            }
        }
    }
    const double mc = static_cast<double>(exits) / n_paths;
    const double exact = brownian_interval_exit_prob(1.0, t);
    CHECK(mc == doctest::Approx(exact).epsilon(0.08));
}

TEST_CASE("KS statistic and critical value") {
    std::mt19937 gen(6);
    std::normal_distribution<double> nd;
    std::vector<double> a(5000), b(5000), c(5000);
    for (auto& x : a) x = nd(gen);
    for (auto& x : b) x = nd(gen);
    for (auto& x : c) x = nd(gen) + 0.5;  // shifted
    const double crit = ks_critical(0.01, a.size(), b.size());
    CHECK(ks_statistic(a, b) < crit);
    CHECK(ks_statistic(a, c) > crit);
}
