#include "geomflow/functions.hpp"

#include <cmath>

namespace geomflow {

namespace {

/// Delta_M x_i = <e_i, trace alpha> = -sum_a tr(W_a) <e_i, nu_a>.
double laplace_coordinate(const ManifoldModel& model, const Vec& x, int i) {
    const Manifold& m = model.geom();
    if (m.codim() == 0) return 0.0;
    double out = 0.0;
    const auto frame = m.unit_normal_frame(x);
    const auto basis = m.tangent_basis(x);
    for (int a = 0; a < static_cast<int>(frame.size()); ++a) {
        double trW = 0.0;
        for (const Vec& b : basis) trW += m.normal_derivative(x, b, a).dot(b);
        out -= trW * frame[a][i];
    }
    return out;
}

double grad_sq_coordinate(const ManifoldModel& model, const Vec& x, int i) {
    return model.geom().tangent_project_raw(x, Vec::Unit(x.size(), i)).squaredNorm();
}

int parse_index(const std::string& id, const std::string& tail) {
    try {
        const int i = std::stoi(tail);
        if (i < 1) throw std::invalid_argument(tail);
        return i - 1;
    } catch (const std::exception&) {
        throw ConfigError("bad coordinate index in function id '" + id + "'");
    }
}

}  // namespace

std::vector<std::string> function_catalog_ids() { return {"coord:<i>", "sin:<i>", "const:<c>"}; }

ScalarField scalar_field_by_id(const std::string& id) {
    ScalarField f;
    f.id = id;
    if (id.rfind("coord:", 0) == 0) {
        const int i = parse_index(id, id.substr(6));
        f.value = [i](const Vec& x) { return x[i]; };
        f.ambient_gradient = [i](const Vec& x) { return Vec(Vec::Unit(x.size(), i)); };
        f.laplace_beltrami = [i](const ManifoldModel& m, const Vec& x) {
            return laplace_coordinate(m, x, i);
        };
        return f;
    }
    if (id.rfind("sin:", 0) == 0) {
        const int i = parse_index(id, id.substr(4));
        f.value = [i](const Vec& x) { return std::sin(x[i]); };
        f.ambient_gradient = [i](const Vec& x) {
            Vec g = Vec::Zero(x.size());
            g[i] = std::cos(x[i]);
            return g;
        };
        f.laplace_beltrami = [i](const ManifoldModel& m, const Vec& x) {
            return std::cos(x[i]) * laplace_coordinate(m, x, i) -
                   std::sin(x[i]) * grad_sq_coordinate(m, x, i);
        };
        return f;
    }
    if (id.rfind("const:", 0) == 0) {
        double c = 0.0;
        try {
            c = std::stod(id.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("bad constant in function id '" + id + "'");
        }
        f.value = [c](const Vec&) { return c; };
        f.ambient_gradient = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
        f.laplace_beltrami = [](const ManifoldModel&, const Vec&) { return 0.0; };
        return f;
    }
    std::string valid;
    for (const auto& v : function_catalog_ids()) valid += " " + v;
    throw ConfigError("unknown function id '" + id + "'; valid:" + valid);
}

OneForm differential(const ScalarField& f, const ManifoldModel& model) {
    OneForm phi;
    phi.id = "d(" + f.id + ")";
    phi.evaluate = [f](const Vec& x, const Vec& v) { return f.ambient_gradient(x).dot(v); };
    phi.codifferential = [f, model](const Vec& x) {
        double out = -f.laplace_beltrami(model, x);
        if (model.drift_potential) {
            const Manifold& m = model.geom();
            const Vec gh = m.tangent_project_raw(x, model.drift_potential->ambient_gradient(x));
            const Vec gf = m.tangent_project_raw(x, f.ambient_gradient(x));
            out -= 2.0 * gh.dot(gf);
        }
        return out;
    };
    return phi;
}

OneForm constant_form(int i, int ambient_dim) {
    if (i < 0 || i >= ambient_dim) throw InvalidInput("constant_form: index out of range");
    OneForm phi;
    phi.id = "dx" + std::to_string(i + 1);
    phi.evaluate = [i](const Vec&, const Vec& v) { return v[i]; };
    phi.codifferential = [](const Vec&) { return 0.0; };
    return phi;
}

}  // namespace geomflow
