#include "geomflow/systems.hpp"

#include <cmath>
#include <sstream>

namespace geomflow {

void SdeSystem::strat_correction(const Vec& x, Vec& out) const {
    const int m = noise_dim();
    const int d = manifold().ambient_dim();
    Vec ei = Vec::Zero(m);
    Vec Xi(d), dXi(d);
    out.setZero();
    for (int i = 0; i < m; ++i) {
        ei[i] = 1.0;
        diffusion(x, ei, Xi);
        diffusion_jvp(x, Xi, ei, dXi);
        out -= 0.5 * dXi;
        ei[i] = 0.0;
    }
}

double SdeSystem::bismut_weight(const Vec&, const Vec&, const Vec&) const {
    throw InvalidInput(id() + ": Bismut weights need an elliptic system (X(x) surjective)");
}

void SdeSystem::strat_correction_jvp(const Vec& x, const Vec& v, Vec& out) const {
    const double vn = v.norm();
    if (vn == 0.0) {
        out.setZero();
        return;
    }
    const double h = 1e-6 * std::max(1.0, x.norm());
    const Vec dir = v / vn;
    Vec plus(x.size()), minus(x.size());
    strat_correction(x + h * dir, plus);
    strat_correction(x - h * dir, minus);
    out = (plus - minus) * (vn / (2.0 * h));
}

// ---------------------------------------------------------------------------
// GradientBrownianSystem

GradientBrownianSystem::GradientBrownianSystem(ManifoldModel model) : model_(std::move(model)) {}

std::string GradientBrownianSystem::id() const {
    std::string s = model_.manifold->id();
    if (model_.drift_potential) s += "|h=" + model_.drift_potential->id;
    return s;
}

void GradientBrownianSystem::diffusion(const Vec& x, const Vec& db, Vec& out) const {
    out = db;
    for (const Vec& nu : model_.manifold->unit_normal_frame(x)) out -= nu.dot(db) * nu;
}

void GradientBrownianSystem::diffusion_jvp(const Vec& x, const Vec& v, const Vec& db,
                                           Vec& out) const {
    // D_v(P(.) db) = -sum_a [<nu_a,db> W_a(v) + <W_a(v),db> nu_a].
    const Manifold& m = *model_.manifold;
    out.setZero();
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a) {
        const Vec Wv = m.normal_derivative(x, v, a);
        out -= frame[a].dot(db) * Wv + Wv.dot(db) * frame[a];
    }
}

void GradientBrownianSystem::drift(const Vec& x, Vec& out) const {
    const Manifold& m = *model_.manifold;
    out.setZero();
    if (model_.drift_potential)
        out = m.tangent_project_raw(x, model_.drift_potential->ambient_gradient(x));
    if (model_.extra_drift) out += m.tangent_project_raw(x, model_.extra_drift->value(x));
}

void GradientBrownianSystem::drift_jvp(const Vec& x, const Vec& v, Vec& out) const {
    const Manifold& m = *model_.manifold;
    out.setZero();
    if (model_.drift_potential) {
        const DriftPotential& h = *model_.drift_potential;
        diffusion_jvp(x, v, h.ambient_gradient(x), out);
        out += m.tangent_project_raw(x, h.ambient_hessian(x) * v);
    }
    if (model_.extra_drift) {
        Vec tmp(out.size());
        diffusion_jvp(x, v, model_.extra_drift->value(x), tmp);
        out += tmp + m.tangent_project_raw(x, model_.extra_drift->jvp(x, v));
    }
}

// ---------------------------------------------------------------------------
// LangevinSystem

LangevinSystem::LangevinSystem(double c, double gamma, int dim, bool punctured)
    : c_(c), gamma_(gamma), dim_(dim) {
    if (dim < 1) throw ConfigError("langevin requires dim >= 1");
    model_.manifold = punctured ? manifold_by_id("punctured-plane")
                                : manifold_by_id("euclidean:" + std::to_string(dim));
    std::ostringstream os;
    os << "gaussian:" << c;
    model_.drift_potential = drift_by_id(os.str(), dim);
}

std::string LangevinSystem::id() const {
    std::ostringstream os;
    os << "langevin:" << c_ << ":" << gamma_ << ":" << dim_;
    return os.str();
}

// ---------------------------------------------------------------------------
// TaniguchiSystem

TaniguchiSystem::TaniguchiSystem(double eps) : eps_(eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw ConfigError("taniguchi requires 0 < eps < 1");
    model_.manifold = manifold_by_id("euclidean:2");
}

std::string TaniguchiSystem::id() const {
    std::ostringstream os;
    os << "taniguchi:" << eps_;
    return os.str();
}

double TaniguchiSystem::phi(const Vec& x) const {
    const double u = 1.0 - x.squaredNorm();
    return u > 0.0 ? std::pow(u, eps_) : 0.0;
}

void TaniguchiSystem::diffusion(const Vec& x, const Vec& db, Vec& out) const {
    out = phi(x) * db[0] * x;
}

void TaniguchiSystem::diffusion_jvp(const Vec& x, const Vec& v, const Vec& db, Vec& out) const {
    const double u = 1.0 - x.squaredNorm();
    const double f = phi(x);
    const double dphi_v = u > 0.0 ? -2.0 * eps_ * std::pow(u, eps_ - 1.0) * x.dot(v) : 0.0;
    out = db[0] * (f * v + dphi_v * x);
}

void TaniguchiSystem::drift(const Vec& x, Vec& out) const {
    const double f = phi(x);
    out = -0.5 * f * f * x;
}

void TaniguchiSystem::drift_jvp(const Vec& x, const Vec& v, Vec& out) const {
    const double u = 1.0 - x.squaredNorm();
    const double f = phi(x);
    const double dphi_v = u > 0.0 ? -2.0 * eps_ * std::pow(u, eps_ - 1.0) * x.dot(v) : 0.0;
    out = -0.5 * (f * f * v + 2.0 * f * dphi_v * x);
}

// ---------------------------------------------------------------------------
// HyperbolicPlaneSystem

HyperbolicPlaneSystem::HyperbolicPlaneSystem() { model_.manifold = manifold_by_id("hyperbolic-plane"); }

// ---------------------------------------------------------------------------
// Catalog

std::shared_ptr<const SdeSystem> system_by_id(const std::string& manifold_id,
                                              const std::string& drift_id, double gamma) {
    auto starts_with = [&](const char* p) { return manifold_id.rfind(p, 0) == 0; };
    if (starts_with("langevin:")) {
        std::istringstream is(manifold_id.substr(9));
        double c = 0.0, g = gamma;
        int dim = 1;
        char sep;
        if (!(is >> c)) throw ConfigError("langevin id: expected langevin:c[:gamma[:dim]]");
        if (is >> sep >> g) is >> sep >> dim;
        return std::make_shared<LangevinSystem>(c, g, dim);
    }
    if (starts_with("taniguchi:")) {
        const double eps = std::stod(manifold_id.substr(10));
        return std::make_shared<TaniguchiSystem>(eps);
    }
    if (manifold_id == "hyperbolic" || manifold_id == "hyperbolic-plane")
        return std::make_shared<HyperbolicPlaneSystem>();
    ManifoldModel model = model_by_id(manifold_id, drift_id);
    if (gamma != 1.0)
        throw ConfigError("noise scale gamma is only supported on langevin systems");
    return std::make_shared<GradientBrownianSystem>(std::move(model));
}

}  // namespace geomflow
