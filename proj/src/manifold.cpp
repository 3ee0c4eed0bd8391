#include "geomflow/manifold.hpp"

#include <cmath>
#include <sstream>

namespace geomflow {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse numeric field '" + s + "' in " + what);
    }
}

}  // namespace

Vec Manifold::tangent_project_raw(const Vec& x, const Vec& e) const {
    Vec out = e;
    for (const Vec& nu : unit_normal_frame(x)) out -= nu.dot(e) * nu;
    return out;
}

Vec Manifold::retract_jvp(const Vec& y, const Vec& w) const {
    const double wn = w.norm();
    if (wn == 0.0) return Vec::Zero(ambient_dim());
    const double h = 1e-7 * std::max(1.0, y.norm());
    const Vec dir = w / wn;
    return (retract(y + h * dir) - retract(y - h * dir)) * (wn / (2.0 * h));
}

// ---------------------------------------------------------------------------
// Euclidean

Vec Euclidean::normal_derivative(const Vec& x, const Vec&, int) const {
    throw InvalidInput("flat model has no normal field: " + id_ + " at dim " +
                       std::to_string(x.size()));
}

std::vector<Vec> Euclidean::tangent_basis(const Vec& x) const {
    std::vector<Vec> basis;
    basis.reserve(n_);
    for (int i = 0; i < n_; ++i) basis.push_back(Vec::Unit(n_, i));
    (void)x;
    return basis;
}

// ---------------------------------------------------------------------------
// Sphere

Sphere::Sphere(int n, double r) : n_(n), r_(r) {
    if (n < 1 || r <= 0.0) throw ConfigError("sphere requires n >= 1, r > 0");
}

std::string Sphere::id() const {
    std::ostringstream os;
    os << "sphere:" << n_ << ":" << r_;
    return os.str();
}

Vec Sphere::constraint(const Vec& x) const {
    Vec c(1);
    c[0] = x.squaredNorm() - r_ * r_;
    return c;
}

std::vector<Vec> Sphere::unit_normal_frame(const Vec& x) const {
    return {Vec(x / x.norm())};
}

Vec Sphere::normal_derivative(const Vec& x, const Vec& v, int) const {
    // nu = x/|x|: D_v nu = (v - <x^,v> x^)/|x|; v tangent => v/r.
    const double nrm = x.norm();
    const Vec xh = x / nrm;
    return (v - xh.dot(v) * xh) / nrm;
}

Vec Sphere::retract(const Vec& y) const {
    const double nrm = y.norm();
    if (nrm < 0.05 * r_) throw RetractionError("sphere retraction: point too close to the center");
    return (r_ / nrm) * y;
}

Vec Sphere::retract_jvp(const Vec& y, const Vec& w) const {
    const double nrm = y.norm();
    const Vec yh = y / nrm;
    return (r_ / nrm) * (w - yh.dot(w) * yh);
}

std::vector<Vec> Sphere::tangent_basis(const Vec& x) const {
    // Householder reflector taking e_m to the unit normal; first n columns
    // give a deterministic orthonormal tangent basis.
    const int m = n_ + 1;
    const Vec nu = x / x.norm();
    Vec u = nu;
    u[m - 1] -= (nu[m - 1] >= 0.0 ? -1.0 : 1.0);  // reflect to -sign(nu_m) e_m
    const double un2 = u.squaredNorm();
    std::vector<Vec> basis;
    basis.reserve(n_);
    for (int i = 0; i < n_; ++i) {
        Vec b = Vec::Unit(m, i);
        if (un2 > 1e-30) b -= (2.0 * u[i] / un2) * u;
        basis.push_back(b);
    }
    return basis;
}

std::optional<SurfaceChart> Sphere::chart() const {
    if (n_ != 2) return std::nullopt;
    const double r = r_;
    SurfaceChart c;
    c.u_min = 0.0;
    c.u_max = 2.0 * kPi;  // azimuth
    c.v_min = 0.0;
    c.v_max = kPi;  // polar angle
    c.point = [r](double th, double ph) {
        Vec p(3);
        p << r * std::sin(ph) * std::cos(th), r * std::sin(ph) * std::sin(th), r * std::cos(ph);
        return p;
    };
    c.area_element = [r](double, double ph) { return r * r * std::sin(ph); };
    return c;
}

// ---------------------------------------------------------------------------
// Surface of revolution

SurfaceOfRevolution::SurfaceOfRevolution(RevolutionProfile profile, std::string id)
    : profile_(std::move(profile)), id_(std::move(id)) {}

Vec SurfaceOfRevolution::point_at(double theta, double s) const {
    Vec p(3);
    const double c1 = profile_.c1(s);
    p << c1 * std::cos(theta), c1 * std::sin(theta), profile_.c2(s);
    return p;
}

void SurfaceOfRevolution::principal_curvatures(double s, double& K1, double& K2) const {
    const double c1 = profile_.c1(s), c1p = profile_.c1p(s), c1pp = profile_.c1pp(s);
    const double c2p = profile_.c2p(s), c2pp = profile_.c2pp(s);
    const double h2 = c1p * c1p + c2p * c2p;
    const double h = std::sqrt(h2);
    K1 = -c2p / (c1 * h);
    K2 = (-c1p * c2pp + c1pp * c2p) / (h2 * h);
}

Vec SurfaceOfRevolution::normal_at(double theta, double s) const {
    const double c1p = profile_.c1p(s), c2p = profile_.c2p(s);
    const double h = std::sqrt(c1p * c1p + c2p * c2p);
    Vec nu(3);
    nu << c2p * std::cos(theta) / h, c2p * std::sin(theta) / h, -c1p / h;
    return nu;
}

SurfaceOfRevolution::Params SurfaceOfRevolution::params_of(const Vec& x) const {
    // Generic inverse: theta from the axial angle, s by coarse scan plus
    // golden-section refinement of the squared distance along the profile.
    const double theta = std::atan2(x[1], x[0]);
    const double rho = std::hypot(x[0], x[1]);
    auto dist2 = [&](double s) {
        const double dr = rho - profile_.c1(s);
        const double dz = x[2] - profile_.c2(s);
        return dr * dr + dz * dz;
    };
    const int ngrid = 256;
    double best_s = profile_.s_min, best_d = dist2(best_s);
    for (int i = 1; i <= ngrid; ++i) {
        const double s = profile_.s_min + (profile_.s_max - profile_.s_min) * i / ngrid;
        const double d = dist2(s);
        if (d < best_d) {
            best_d = d;
            best_s = s;
        }
    }
    const double span = (profile_.s_max - profile_.s_min) / ngrid;
    double lo = best_s - span, hi = best_s + span;
    if (!profile_.s_periodic) {
        lo = std::max(lo, profile_.s_min);
        hi = std::min(hi, profile_.s_max);
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = dist2(x1), f2 = dist2(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = dist2(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = dist2(x2);
        }
    }
    return {theta, 0.5 * (a + b)};
}

Vec SurfaceOfRevolution::constraint(const Vec& x) const {
    const Params p = params_of(x);
    Vec c(1);
    c[0] = (x - point_at(p.theta, p.s)).norm();
    return c;
}

void SurfaceOfRevolution::principal_frame(const Vec& x, Vec& e_theta, Vec& e_s, double& K1,
                                          double& K2) const {
    const Params p = params_of(x);
    const double c1p = profile_.c1p(p.s), c2p = profile_.c2p(p.s);
    const double h = std::sqrt(c1p * c1p + c2p * c2p);
    e_theta.resize(3);
    e_theta << -std::sin(p.theta), std::cos(p.theta), 0.0;
    e_s.resize(3);
    e_s << c1p * std::cos(p.theta) / h, c1p * std::sin(p.theta) / h, c2p / h;
    principal_curvatures(p.s, K1, K2);
}

std::vector<Vec> SurfaceOfRevolution::unit_normal_frame(const Vec& x) const {
    const Params p = params_of(x);
    return {normal_at(p.theta, p.s)};
}

Vec SurfaceOfRevolution::normal_derivative(const Vec& x, const Vec& v, int) const {
    // D_v nu = -K1 <v,e_theta> e_theta - K2 <v,e_s> e_s (principal directions).
    Vec et, es;
    double K1, K2;
    principal_frame(x, et, es, K1, K2);
    return -K1 * et.dot(v) * et - K2 * es.dot(v) * es;
}

Vec SurfaceOfRevolution::retract(const Vec& y) const {
    const Params p = params_of(y);
    const Vec r = point_at(p.theta, p.s);
    if ((y - r).norm() > 0.75 * std::max(1.0, r.norm()))
        throw RetractionError(id_ + ": point outside retraction basin");
    return r;
}

std::vector<Vec> SurfaceOfRevolution::tangent_basis(const Vec& x) const {
    Vec et, es;
    double K1, K2;
    principal_frame(x, et, es, K1, K2);
    return {et, es};
}

std::optional<SurfaceChart> SurfaceOfRevolution::chart() const {
    if (!profile_.compact) return std::nullopt;
    SurfaceChart c;
    c.u_min = 0.0;
    c.u_max = 2.0 * kPi;
    c.v_min = profile_.s_min;
    c.v_max = profile_.s_max;
    c.point = [this](double th, double s) { return point_at(th, s); };
    c.area_element = [this](double, double s) {
        const double c1p = profile_.c1p(s), c2p = profile_.c2p(s);
        return std::abs(profile_.c1(s)) * std::sqrt(c1p * c1p + c2p * c2p);
    };
    return c;
}

namespace {

// Torus of revolution: profile (a + b cos s, b sin s). Closed-form tube
// retraction; fails near the axis and at the tube center ring.
class Torus final : public SurfaceOfRevolution {
public:
    Torus(double a, double b, RevolutionProfile prof, std::string id)
        : SurfaceOfRevolution(std::move(prof), std::move(id)), a_(a), b_(b) {}

    Params params_of(const Vec& x) const override {
        const double theta = std::atan2(x[1], x[0]);
        const double rho = std::hypot(x[0], x[1]);
        const double s = std::atan2(x[2] / b_, (rho - a_) / b_);
        return {theta, s};
    }

    Vec constraint(const Vec& x) const override {
        const double rho = std::hypot(x[0], x[1]);
        const double dr = rho - a_;
        Vec c(1);
        c[0] = dr * dr + x[2] * x[2] - b_ * b_;
        return c;
    }

    Vec retract(const Vec& y) const override {
        const double rho = std::hypot(y[0], y[1]);
        if (rho < 0.05 * a_) throw RetractionError("torus retraction: point too close to the axis");
        const double dr = rho - a_;
        const double dn = std::hypot(dr, y[2]);
        if (dn < 0.05 * b_) throw RetractionError("torus retraction: point too close to the core ring");
        const double scale = b_ / dn;
        const double rho_new = a_ + dr * scale;
        Vec out(3);
        out << y[0] * (rho_new / rho), y[1] * (rho_new / rho), y[2] * scale;
        return out;
    }

private:
    double a_, b_;
};

class Cylinder final : public SurfaceOfRevolution {
public:
    Cylinder(RevolutionProfile prof, std::string id)
        : SurfaceOfRevolution(std::move(prof), std::move(id)) {}

    Params params_of(const Vec& x) const override {
        return {std::atan2(x[1], x[0]), x[2]};
    }

    Vec constraint(const Vec& x) const override {
        Vec c(1);
        c[0] = x[0] * x[0] + x[1] * x[1] - 1.0;
        return c;
    }

    Vec retract(const Vec& y) const override {
        const double rho = std::hypot(y[0], y[1]);
        if (rho < 0.05) throw RetractionError("cylinder retraction: point too close to the axis");
        Vec out(3);
        out << y[0] / rho, y[1] / rho, y[2];
        return out;
    }

    Vec retract_jvp(const Vec& y, const Vec& w) const override {
        const double rho = std::hypot(y[0], y[1]);
        const double cx = y[0] / rho, cy = y[1] / rho;
        const double radial = cx * w[0] + cy * w[1];
        Vec out(3);
        out << (w[0] - radial * cx) / rho, (w[1] - radial * cy) / rho, w[2];
        return out;
    }
};

// Upper sheet of z^2 - (x^2 + y^2) = 1, profile (s, sqrt(1+s^2)), s >= 0.
class Hyperboloid final : public SurfaceOfRevolution {
public:
    Hyperboloid(RevolutionProfile prof, std::string id)
        : SurfaceOfRevolution(std::move(prof), std::move(id)) {}

    Params params_of(const Vec& x) const override {
        return {std::atan2(x[1], x[0]), std::hypot(x[0], x[1])};
    }

    Vec constraint(const Vec& x) const override {
        Vec c(1);
        c[0] = x[2] * x[2] - x[0] * x[0] - x[1] * x[1] - 1.0;
        return c;
    }

    Vec retract(const Vec& y) const override {
        // Foot-point stationarity g(s) = 0 solved by bisection to 1e-12.
        const double rho = std::hypot(y[0], y[1]);
        const double z = y[2];
        if (z < -0.5) throw RetractionError("hyperboloid retraction: wrong sheet");
        auto g = [&](double s) {
            const double zs = std::sqrt(1.0 + s * s);
            return (s - rho) + s * (zs - z) / zs;
        };
        double lo = 0.0;
        double hi = std::max({rho, std::abs(z), 1.0}) + 1.0;
        while (g(hi) < 0.0) {
            hi *= 2.0;
            if (hi > 1e12) throw RetractionError("hyperboloid retraction: no bracket");
        }
        if (g(lo) > 0.0) {
            // rho == 0 apex case: foot point is (0,0,1)
            Vec out(3);
            out << 0.0, 0.0, 1.0;
            return out;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) <= 0.0 ? lo : hi) = mid;
        }
        const double s = 0.5 * (lo + hi);
        const double theta = std::atan2(y[1], y[0]);
        return point_at(theta, s);
    }
};

// S^1(a) x S^1(b) in R^4: two unit normals, one per circle factor; the
// product structure makes retraction and the Weingarten maps blockwise radial.
class CliffordTorus final : public Manifold {
public:
    CliffordTorus(double a, double b) : a_(a), b_(b) {
        if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("clifford-torus requires a, b > 0");
    }

    std::string id() const override {
        std::ostringstream os;
        os << "clifford-torus:" << a_ << ":" << b_;
        return os.str();
    }
    int ambient_dim() const override { return 4; }
    int intrinsic_dim() const override { return 2; }

    Vec constraint(const Vec& x) const override {
        Vec c(2);
        c[0] = x[0] * x[0] + x[1] * x[1] - a_ * a_;
        c[1] = x[2] * x[2] + x[3] * x[3] - b_ * b_;
        return c;
    }

    std::vector<Vec> unit_normal_frame(const Vec& x) const override {
        Vec n1 = Vec::Zero(4), n2 = Vec::Zero(4);
        const double r1 = std::hypot(x[0], x[1]), r2 = std::hypot(x[2], x[3]);
        n1[0] = x[0] / r1;
        n1[1] = x[1] / r1;
        n2[2] = x[2] / r2;
        n2[3] = x[3] / r2;
        return {n1, n2};
    }

    Vec normal_derivative(const Vec& x, const Vec& v, int a) const override {
        Vec out = Vec::Zero(4);
        if (a == 0) {
            const double r1 = std::hypot(x[0], x[1]);
            out[0] = v[0] / r1;
            out[1] = v[1] / r1;
            // tangential part only: subtract the radial component
            const double rad = (x[0] * out[0] + x[1] * out[1]) / (r1 * r1);
            out[0] -= rad * x[0];
            out[1] -= rad * x[1];
        } else {
            const double r2 = std::hypot(x[2], x[3]);
            out[2] = v[2] / r2;
            out[3] = v[3] / r2;
            const double rad = (x[2] * out[2] + x[3] * out[3]) / (r2 * r2);
            out[2] -= rad * x[2];
            out[3] -= rad * x[3];
        }
        return out;
    }

    Vec retract(const Vec& y) const override {
        const double r1 = std::hypot(y[0], y[1]), r2 = std::hypot(y[2], y[3]);
        if (r1 < 0.05 * a_ || r2 < 0.05 * b_)
            throw RetractionError("clifford-torus retraction: point too close to a circle axis");
        Vec out(4);
        out << y[0] * (a_ / r1), y[1] * (a_ / r1), y[2] * (b_ / r2), y[3] * (b_ / r2);
        return out;
    }

    Vec retract_jvp(const Vec& y, const Vec& w) const override {
        Vec out(4);
        const double r1 = std::hypot(y[0], y[1]), r2 = std::hypot(y[2], y[3]);
        const double c1 = (y[0] * w[0] + y[1] * w[1]) / (r1 * r1);
        out[0] = (a_ / r1) * (w[0] - c1 * y[0]);
        out[1] = (a_ / r1) * (w[1] - c1 * y[1]);
        const double c2 = (y[2] * w[2] + y[3] * w[3]) / (r2 * r2);
        out[2] = (b_ / r2) * (w[2] - c2 * y[2]);
        out[3] = (b_ / r2) * (w[3] - c2 * y[3]);
        return out;
    }

    std::vector<Vec> tangent_basis(const Vec& x) const override {
        Vec e1 = Vec::Zero(4), e2 = Vec::Zero(4);
        const double r1 = std::hypot(x[0], x[1]), r2 = std::hypot(x[2], x[3]);
        e1[0] = -x[1] / r1;
        e1[1] = x[0] / r1;
        e2[2] = -x[3] / r2;
        e2[3] = x[2] / r2;
        return {e1, e2};
    }

    bool compact() const override { return true; }

    std::optional<SurfaceChart> chart() const override {
        SurfaceChart c;
        c.u_min = 0.0;
        c.u_max = 2.0 * kPi;
        c.v_min = 0.0;
        c.v_max = 2.0 * kPi;
        const double a = a_, b = b_;
        c.point = [a, b](double th, double ph) {
            Vec p(4);
            p << a * std::cos(th), a * std::sin(th), b * std::cos(ph), b * std::sin(ph);
            return p;
        };
        c.area_element = [a, b](double, double) { return a * b; };
        return c;
    }

    Vec point_at(double theta, double phi) const {
        Vec p(4);
        p << a_ * std::cos(theta), a_ * std::sin(theta), b_ * std::cos(phi), b_ * std::sin(phi);
        return p;
    }

private:
    double a_, b_;
};

std::shared_ptr<const Manifold> make_catenoid() {
    RevolutionProfile p;
    p.name = "catenoid";
    p.c1 = [](double s) { return std::cosh(s); };
    p.c1p = [](double s) { return std::sinh(s); };
    p.c1pp = [](double s) { return std::cosh(s); };
    p.c2 = [](double s) { return s; };
    p.c2p = [](double) { return 1.0; };
    p.c2pp = [](double) { return 0.0; };
    p.s_min = -1.5;
    p.s_max = 1.5;
    return std::make_shared<SurfaceOfRevolution>(std::move(p), "surface-of-revolution:catenoid");
}

}  // namespace

std::shared_ptr<const Manifold> make_torus(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("torus requires a > 0, b > 0");
    RevolutionProfile p;
    p.name = "torus";
    p.c1 = [a, b](double s) { return a + b * std::cos(s); };
    p.c1p = [b](double s) { return -b * std::sin(s); };
    p.c1pp = [b](double s) { return -b * std::cos(s); };
    p.c2 = [b](double s) { return b * std::sin(s); };
    p.c2p = [b](double s) { return b * std::cos(s); };
    p.c2pp = [b](double s) { return -b * std::sin(s); };
    p.s_min = -kPi;
    p.s_max = kPi;
    p.s_periodic = true;
    p.compact = true;
    std::ostringstream os;
    os << "torus:" << a << ":" << b;
    return std::make_shared<Torus>(a, b, std::move(p), os.str());
}

std::shared_ptr<const Manifold> make_cylinder() {
    RevolutionProfile p;
    p.name = "cylinder";
    p.c1 = [](double) { return 1.0; };
    p.c1p = [](double) { return 0.0; };
    p.c1pp = [](double) { return 0.0; };
    p.c2 = [](double s) { return s; };
    p.c2p = [](double) { return 1.0; };
    p.c2pp = [](double) { return 0.0; };
    p.s_min = -1e9;
    p.s_max = 1e9;
    return std::make_shared<Cylinder>(std::move(p), "cylinder");
}

std::shared_ptr<const Manifold> make_clifford_torus(double a, double b) {
    return std::make_shared<CliffordTorus>(a, b);
}

std::shared_ptr<const Manifold> make_hyperboloid() {
    RevolutionProfile p;
    p.name = "hyperboloid";
    p.c1 = [](double s) { return s; };
    p.c1p = [](double) { return 1.0; };
    p.c1pp = [](double) { return 0.0; };
    p.c2 = [](double s) { return std::sqrt(1.0 + s * s); };
    p.c2p = [](double s) { return s / std::sqrt(1.0 + s * s); };
    p.c2pp = [](double s) {
        const double z = 1.0 + s * s;
        return 1.0 / (z * std::sqrt(z));
    };
    p.s_min = 0.0;
    p.s_max = 1e9;
    return std::make_shared<Hyperboloid>(std::move(p), "hyperboloid");
}

// ---------------------------------------------------------------------------
// Hyperbolic plane

Vec HyperbolicPlane::normal_derivative(const Vec&, const Vec&, int) const {
    throw InvalidInput("hyperbolic-plane is a coordinate model without a normal field");
}

Vec HyperbolicPlane::retract(const Vec& y) const {
    if (y[1] <= 0.0) throw RetractionError("hyperbolic-plane: y <= 0");
    return y;
}

std::vector<Vec> HyperbolicPlane::tangent_basis(const Vec&) const {
    return {Vec::Unit(2, 0), Vec::Unit(2, 1)};
}

double HyperbolicPlane::metric_scale(const Vec& x) const {
    if (x[1] <= 0.0) throw InvalidInput("hyperbolic-plane metric undefined for y <= 0");
    return 1.0 / x[1];
}

// ---------------------------------------------------------------------------
// Catalogs

std::vector<std::string> manifold_catalog_ids() {
    return {"euclidean:<n>",    "sphere:<n>:<r>", "torus:<a>:<b>",
            "clifford-torus:<a>:<b>", "cylinder",  "hyperboloid",
            "punctured-plane",  "hyperbolic-plane", "surface-of-revolution:catenoid"};
}

std::vector<std::string> drift_catalog_ids() { return {"none", "quadratic:<c>", "gaussian:<c>"}; }

std::shared_ptr<const Manifold> manifold_by_id(const std::string& id) {
    const auto parts = split(id, ':');
    const std::string& kind = parts[0];
    if (kind == "euclidean" && parts.size() == 2) {
        const int n = static_cast<int>(parse_num(parts[1], id));
        if (n < 1) throw ConfigError("euclidean dimension must be >= 1");
        return std::make_shared<Euclidean>(n, id);
    }
    if (kind == "punctured-plane" && parts.size() == 1)
        return std::make_shared<Euclidean>(2, "punctured-plane");
    if (kind == "sphere" && parts.size() == 3)
        return std::make_shared<Sphere>(static_cast<int>(parse_num(parts[1], id)),
                                        parse_num(parts[2], id));
    if (kind == "torus" && parts.size() == 3)
        return make_torus(parse_num(parts[1], id), parse_num(parts[2], id));
    if (kind == "clifford-torus" && parts.size() == 3)
        return make_clifford_torus(parse_num(parts[1], id), parse_num(parts[2], id));
    if (kind == "cylinder" && parts.size() == 1) return make_cylinder();
    if (kind == "hyperboloid" && parts.size() == 1) return make_hyperboloid();
    if (kind == "hyperbolic-plane" && parts.size() == 1) return std::make_shared<HyperbolicPlane>();
    if (kind == "surface-of-revolution" && parts.size() == 2) {
        if (parts[1] == "catenoid") return make_catenoid();
        throw ConfigError("unknown revolution profile '" + parts[1] + "'; valid: catenoid");
    }
    std::string valid;
    for (const auto& v : manifold_catalog_ids()) valid += " " + v;
    throw ConfigError("unknown manifold id '" + id + "'; valid:" + valid);
}

std::optional<DriftPotential> drift_by_id(const std::string& id, int ambient_dim) {
    const auto parts = split(id, ':');
    if (parts[0] == "none" && parts.size() == 1) return std::nullopt;
    if ((parts[0] == "quadratic" || parts[0] == "gaussian") && parts.size() == 2) {
        const double c = parse_num(parts[1], id);
        const double scale = (parts[0] == "quadratic") ? 1.0 : 0.5;
        DriftPotential h;
        h.id = id;
        h.value = [c, scale](const Vec& x) { return -scale * c * x.squaredNorm(); };
        h.ambient_gradient = [c, scale](const Vec& x) { return Vec(-2.0 * scale * c * x); };
        h.ambient_hessian = [c, scale, ambient_dim](const Vec&) {
            return Mat(-2.0 * scale * c * Mat::Identity(ambient_dim, ambient_dim));
        };
        return h;
    }
    std::string valid;
    for (const auto& v : drift_catalog_ids()) valid += " " + v;
    throw ConfigError("unknown drift id '" + id + "'; valid:" + valid);
}

ManifoldModel model_by_id(const std::string& manifold_id, const std::string& drift_id) {
    ManifoldModel m;
    m.manifold = manifold_by_id(manifold_id);
    m.drift_potential = drift_by_id(drift_id, m.manifold->ambient_dim());
    return m;
}

}  // namespace geomflow
