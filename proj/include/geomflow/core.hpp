#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace geomflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Rejected input: a precondition on an operation's arguments failed.
class InvalidInput : public std::runtime_error {
public:
    explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

/// A point handed to retract() lies outside the declared retraction basin.
/// Callers treat this as explosion / step rejection.
class RetractionError : public std::runtime_error {
public:
    explicit RetractionError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration or catalog-lookup failure (unknown id, bad field).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Fixed-order pairwise summation. The reduction tree depends only on the
// slot order, so results are identical for any number of worker threads.
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;  // sample standard deviation / sqrt(n)
};

// Two-pass mean and standard error over per-path slots; order-invariant.
inline MeanStderr mean_stderr(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return {};
    MeanStderr out;
    out.mean = pairwise_sum(xs) / static_cast<double>(n);
    if (n < 2) return out;
    std::vector<double> dev2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = xs[i] - out.mean;
        dev2[i] = d * d;
    }
    const double var = pairwise_sum(dev2) / static_cast<double>(n - 1);
    out.stderr_ = std::sqrt(var / static_cast<double>(n));
    return out;
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

// Ordinary least squares y ~ intercept + slope * x.
inline LineFit ols_fit(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) throw InvalidInput("ols_fit: need >= 2 matched points");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InvalidInput("ols_fit: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        rss += r * r;
    }
    f.residual_rms = std::sqrt(rss / n);
    return f;
}

// FNV-1a, used for config fingerprints.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace geomflow
