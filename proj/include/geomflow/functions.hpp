#pragma once

#include <functional>
#include <string>

#include "geomflow/manifold.hpp"

namespace geomflow {

/// Test function living in ambient coordinates, with the Laplace-Beltrami
/// operator of its restriction to a given model. The built-in catalog covers
/// coordinate functions, sin of a coordinate, and constants; on an embedded
/// model the Laplacian of a composition g(x_i) is
///   g'(x_i) Delta_M x_i + g''(x_i) |P e_i|^2,   Delta_M x_i = <e_i, trace alpha>.
struct ScalarField {
    std::string id;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> ambient_gradient;
    std::function<double(const ManifoldModel&, const Vec&)> laplace_beltrami;
};

/// Differential 1-form with an optional user-supplied codifferential
/// delta^h phi (analytic; there is no numerical fallback).
struct OneForm {
    std::string id;
    std::function<double(const Vec&, const Vec&)> evaluate;  // phi_x(v), linear in v
    std::function<double(const Vec&)> codifferential;        // delta^h phi; may be empty
};

/// Function catalog ids: "coord:<i>" (1-based), "sin:<i>", "const:<c>".
ScalarField scalar_field_by_id(const std::string& id);

/// df of a catalog field on a model, with delta^h(df) = -(Delta_M f + 2<grad h, grad f>).
OneForm differential(const ScalarField& f, const ManifoldModel& model);

/// Constant coordinate form dx_i (flat models), delta dx_i = 0.
OneForm constant_form(int i, int ambient_dim);

std::vector<std::string> function_catalog_ids();

}  // namespace geomflow
