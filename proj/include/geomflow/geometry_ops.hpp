#pragma once

#include "geomflow/manifold.hpp"

namespace geomflow {

// Pointwise differential-geometric operators of a gradient Brownian system:
// X(x) is the orthogonal projection onto T_xM, Z(x) the projection onto the
// normal space, and the extrinsic data enter through the second fundamental
// form alpha and the shape operator A with <alpha(u,v),w> = <A(u,w),v>.

inline constexpr double kOnManifoldTol = 1e-8;

/// Throws InvalidInput when x does not satisfy the constraint within tol.
void require_on_manifold(const Manifold& m, const Vec& x, double tol = kOnManifoldTol);

/// X(x)(e): orthogonal projection of an ambient vector onto T_xM.
TangentVector tangent_project(const ManifoldModel& model, const Vec& x, const Vec& e);

/// Z(x)(e): orthogonal projection onto the normal space nu_x.
Vec normal_project(const ManifoldModel& model, const Vec& x, const Vec& e);

/// Shape operator A_x(v, w) for tangent v and normal w.
TangentVector shape_operator(const ManifoldModel& model, const Vec& x, const TangentVector& v,
                             const Vec& w);

/// Second fundamental form alpha_x(u, v), a normal vector.
Vec second_fundamental_form(const ManifoldModel& model, const Vec& x, const TangentVector& u,
                            const TangentVector& v);

/// nabla X^i(v) = A_x(v, Z(x) e_i), i in 0..m-1.
TangentVector nabla_X(const ManifoldModel& model, const Vec& x, const TangentVector& v, int i);

/// Ric(v,v) from Gauss's theorem: <alpha(v,v), trace alpha> - |alpha(v,.)|^2.
double ricci_from_gauss(const ManifoldModel& model, const Vec& x, const TangentVector& v);

/// Manifold Hessian of the drift potential as a quadratic form:
/// Hess(h)(v,v) = <alpha(v,v), Z grad~h> + v^T Hess~h v. Zero when no h.
double hessian_h(const ManifoldModel& model, const Vec& x, const TangentVector& v);

/// Hess(h)(v,.)^# as a tangent vector.
Vec hessian_h_operator(const ManifoldModel& model, const Vec& x, const Vec& v);

/// Ric(v,.)^# as a tangent vector (Gauss's theorem, extrinsic data).
Vec ricci_operator(const ManifoldModel& model, const Vec& x, const Vec& v);

/// H_p(v,v) for the gradient h-Brownian system:
///   -Ric(v,v) + 2 Hess(h)(v,v) + |alpha(v,.)|_{HS}^2 + (p-2)|alpha(v,v)|^2/|v|^2.
double h_quadratic_form(const ManifoldModel& model, const Vec& x, const TangentVector& v, double p);

/// Closest-point retraction with on-manifold postcondition check.
Vec retract(const ManifoldModel& model, const Vec& y, double tol = kOnManifoldTol);

}  // namespace geomflow
