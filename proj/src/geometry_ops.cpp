#include "geomflow/geometry_ops.hpp"

#include <cmath>

namespace geomflow {

namespace {

void require_tangent(const Manifold& m, const Vec& x, const Vec& v, double tol = 1e-8) {
    for (const Vec& nu : m.unit_normal_frame(x)) {
        if (std::abs(nu.dot(v)) > tol * std::max(1.0, v.norm()))
            throw InvalidInput(m.id() + ": vector is not tangent at the given point");
    }
}

void require_normal(const Manifold& m, const Vec& x, const Vec& w, double tol = 1e-8) {
    const Vec t = m.tangent_project_raw(x, w);
    if (t.norm() > tol * std::max(1.0, w.norm()))
        throw InvalidInput(m.id() + ": vector is not normal at the given point");
}

}  // namespace

void require_on_manifold(const Manifold& m, const Vec& x, double tol) {
    if (x.size() != m.ambient_dim())
        throw InvalidInput(m.id() + ": ambient dimension mismatch");
    if (m.constraint_norm(x) > tol)
        throw InvalidInput(m.id() + ": point violates the manifold constraint");
}

TangentVector tangent_project(const ManifoldModel& model, const Vec& x, const Vec& e) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    return {x, m.tangent_project_raw(x, e)};
}

Vec normal_project(const ManifoldModel& model, const Vec& x, const Vec& e) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    Vec out = Vec::Zero(e.size());
    for (const Vec& nu : m.unit_normal_frame(x)) out += nu.dot(e) * nu;
    return out;
}

TangentVector shape_operator(const ManifoldModel& model, const Vec& x, const TangentVector& v,
                             const Vec& w) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    require_tangent(m, x, v.components);
    require_normal(m, x, w);
    // A(v, w) = -sum_a <nu_a, w> D_v nu_a.
    Vec out = Vec::Zero(m.ambient_dim());
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a) {
        const double wa = frame[a].dot(w);
        if (wa != 0.0) out -= wa * m.normal_derivative(x, v.components, a);
    }
    return {x, out};
}

Vec second_fundamental_form(const ManifoldModel& model, const Vec& x, const TangentVector& u,
                            const TangentVector& v) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    require_tangent(m, x, u.components);
    require_tangent(m, x, v.components);
    // alpha(u,v) = -sum_a <D_u nu_a, v> nu_a.
    Vec out = Vec::Zero(m.ambient_dim());
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a)
        out -= m.normal_derivative(x, u.components, a).dot(v.components) * frame[a];
    return out;
}

TangentVector nabla_X(const ManifoldModel& model, const Vec& x, const TangentVector& v, int i) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    require_tangent(m, x, v.components);
    if (i < 0 || i >= m.ambient_dim()) throw InvalidInput("nabla_X: component index out of range");
    Vec out = Vec::Zero(m.ambient_dim());
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a)
        out -= frame[a][i] * m.normal_derivative(x, v.components, a);
    return {x, out};
}

double ricci_from_gauss(const ManifoldModel& model, const Vec& x, const TangentVector& v) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    require_tangent(m, x, v.components);
    if (m.codim() == 0) return 0.0;
    // Ric(v,v) = <W v, v> tr W - |W v|^2 summed over the normal frame,
    // W_a = D nu_a (codimension-one form of Gauss's theorem; frames with
    // higher codimension add per-normal terms).
    double ric = 0.0;
    const auto basis = m.tangent_basis(x);
    const int na = static_cast<int>(m.unit_normal_frame(x).size());
    for (int a = 0; a < na; ++a) {
        const Vec Wv = m.normal_derivative(x, v.components, a);
        double trW = 0.0;
        for (const Vec& b : basis) trW += m.normal_derivative(x, b, a).dot(b);
        ric += Wv.dot(v.components) * trW - Wv.squaredNorm();
    }
    return ric;
}

double hessian_h(const ManifoldModel& model, const Vec& x, const TangentVector& v) {
    if (!model.drift_potential) return 0.0;
    const Manifold& m = model.geom();
    const DriftPotential& h = *model.drift_potential;
    const Vec grad = h.ambient_gradient(x);
    double out = v.components.dot(h.ambient_hessian(x) * v.components);
    // <alpha(v,v), Z grad~h> = -sum_a <W_a v, v> <nu_a, grad~h>.
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a)
        out -= m.normal_derivative(x, v.components, a).dot(v.components) * frame[a].dot(grad);
    return out;
}

Vec hessian_h_operator(const ManifoldModel& model, const Vec& x, const Vec& v) {
    const Manifold& m = model.geom();
    if (!model.drift_potential) return Vec::Zero(m.ambient_dim());
    const DriftPotential& h = *model.drift_potential;
    Vec out = m.tangent_project_raw(x, h.ambient_hessian(x) * v);
    const Vec grad = h.ambient_gradient(x);
    const auto frame = m.unit_normal_frame(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a)
        out -= frame[a].dot(grad) * m.normal_derivative(x, v, a);
    return out;
}

Vec ricci_operator(const ManifoldModel& model, const Vec& x, const Vec& v) {
    const Manifold& m = model.geom();
    Vec out = Vec::Zero(m.ambient_dim());
    if (m.codim() == 0) return out;
    const auto basis = m.tangent_basis(x);
    const int na = static_cast<int>(m.unit_normal_frame(x).size());
    for (int a = 0; a < na; ++a) {
        double trW = 0.0;
        for (const Vec& b : basis) trW += m.normal_derivative(x, b, a).dot(b);
        const Vec Wv = m.normal_derivative(x, v, a);
        out += trW * Wv - m.normal_derivative(x, Wv, a);
    }
    return out;
}

double h_quadratic_form(const ManifoldModel& model, const Vec& x, const TangentVector& v,
                        double p) {
    const Manifold& m = model.geom();
    require_on_manifold(m, x);
    require_tangent(m, x, v.components);
    const double v2 = v.components.squaredNorm();
    if (v2 == 0.0) throw InvalidInput("h_quadratic_form: zero tangent vector");
    double alpha_hs2 = 0.0;   // |alpha(v,.)|_{HS}^2
    double alpha_vv2 = 0.0;   // |alpha(v,v)|^2
    double ric = 0.0;
    const auto basis = m.tangent_basis(x);
    const int na = static_cast<int>(m.unit_normal_frame(x).size());
    for (int a = 0; a < na; ++a) {
        const Vec Wv = m.normal_derivative(x, v.components, a);
        alpha_hs2 += Wv.squaredNorm();
        const double wvv = Wv.dot(v.components);
        alpha_vv2 += wvv * wvv;
        double trW = 0.0;
        for (const Vec& b : basis) trW += m.normal_derivative(x, b, a).dot(b);
        ric += wvv * trW - Wv.squaredNorm();
    }
    return -ric + 2.0 * hessian_h(model, x, v) + alpha_hs2 + (p - 2.0) * alpha_vv2 / v2;
}

Vec retract(const ManifoldModel& model, const Vec& y, double tol) {
    const Vec x = model.geom().retract(y);
    if (model.geom().constraint_norm(x) > tol)
        throw RetractionError(model.geom().id() + ": retraction left residual above tolerance");
    return x;
}

}  // namespace geomflow
