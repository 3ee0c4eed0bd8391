#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geomflow/core.hpp"

namespace geomflow {

/// Tangent vector anchored at an on-manifold point, both in ambient coordinates.
struct TangentVector {
    Vec base_point;
    Vec components;
};

/// Drift potential h with ambient-space gradient and Hessian evaluators.
/// The manifold gradient/Hessian are derived from these plus the extrinsic data.
struct DriftPotential {
    std::string id;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> ambient_gradient;
    std::function<Mat(const Vec&)> ambient_hessian;
};

/// Optional additional ambient drift field with its Jacobian-vector product.
struct ExtraDrift {
    std::function<Vec(const Vec&)> value;
    std::function<Vec(const Vec&, const Vec&)> jvp;
};

/// 2-D parametrization used for deterministic surface-measure quadrature.
struct SurfaceChart {
    double u_min, u_max, v_min, v_max;
    std::function<Vec(double, double)> point;
    std::function<double(double, double)> area_element;  // sqrt(EG - F^2)
};

/// Embedded (or coordinate) manifold: constraint, normal frame, Weingarten
/// data, analytic closest-point retraction and its differential.
class Manifold {
public:
    virtual ~Manifold() = default;

    virtual std::string id() const = 0;
    virtual int ambient_dim() const = 0;
    virtual int intrinsic_dim() const = 0;
    int codim() const { return ambient_dim() - intrinsic_dim(); }

    /// Residual vector, zero on M (empty for flat coordinate models).
    virtual Vec constraint(const Vec& x) const = 0;

    /// Orthonormal basis of the normal space at an on-manifold point.
    virtual std::vector<Vec> unit_normal_frame(const Vec& x) const = 0;

    /// Ambient directional derivative D_v(nu_a) of the a-th unit normal field
    /// along tangent v; tangential for codimension one.
    virtual Vec normal_derivative(const Vec& x, const Vec& v, int a) const = 0;

    /// Closest-point projection. Throws RetractionError outside the basin.
    virtual Vec retract(const Vec& y) const = 0;

    /// Differential of retract at y applied to w. Default: central differences.
    virtual Vec retract_jvp(const Vec& y, const Vec& w) const;

    /// Orthonormal tangent basis at an on-manifold point (deterministic).
    virtual std::vector<Vec> tangent_basis(const Vec& x) const = 0;

    virtual bool compact() const { return false; }

    /// Conformal factor of the Riemannian metric relative to ambient
    /// coordinates; 1 for isometrically embedded models.
    virtual double metric_scale(const Vec&) const { return 1.0; }

    virtual std::optional<SurfaceChart> chart() const { return std::nullopt; }

    /// Tangent projection e - sum <nu_a,e> nu_a at on-manifold x.
    Vec tangent_project_raw(const Vec& x, const Vec& e) const;

    double constraint_norm(const Vec& x) const {
        const Vec c = constraint(x);
        return c.size() == 0 ? 0.0 : c.norm();
    }
};

/// Flat R^n (also backs the punctured plane, which is flat R^2 with an
/// excluded-ball exit set handled by region stops).
class Euclidean final : public Manifold {
public:
    Euclidean(int n, std::string id) : n_(n), id_(std::move(id)) {}
    std::string id() const override { return id_; }
    int ambient_dim() const override { return n_; }
    int intrinsic_dim() const override { return n_; }
    Vec constraint(const Vec&) const override { return Vec(); }
    std::vector<Vec> unit_normal_frame(const Vec&) const override { return {}; }
    Vec normal_derivative(const Vec& x, const Vec&, int) const override;
    Vec retract(const Vec& y) const override { return y; }
    Vec retract_jvp(const Vec&, const Vec& w) const override { return w; }
    std::vector<Vec> tangent_basis(const Vec& x) const override;

private:
    int n_;
    std::string id_;
};

/// Round sphere S^n(r) in R^{n+1}.
class Sphere final : public Manifold {
public:
    Sphere(int n, double r);
    std::string id() const override;
    int ambient_dim() const override { return n_ + 1; }
    int intrinsic_dim() const override { return n_; }
    Vec constraint(const Vec& x) const override;
    std::vector<Vec> unit_normal_frame(const Vec& x) const override;
    Vec normal_derivative(const Vec& x, const Vec& v, int) const override;
    Vec retract(const Vec& y) const override;
    Vec retract_jvp(const Vec& y, const Vec& w) const override;
    std::vector<Vec> tangent_basis(const Vec& x) const override;
    bool compact() const override { return true; }
    std::optional<SurfaceChart> chart() const override;
    double radius() const { return r_; }

private:
    int n_;
    double r_;
};

/// Profile data for a surface of revolution
/// (c1(s) cos theta, c1(s) sin theta, c2(s)), c1 > 0 on the declared range.
struct RevolutionProfile {
    std::string name;
    std::function<double(double)> c1, c1p, c1pp;
    std::function<double(double)> c2, c2p, c2pp;
    double s_min, s_max;
    bool s_periodic = false;
    bool compact = false;
};

/// Surface of revolution in R^3 with the first/second fundamental form data
/// and principal curvatures K1 = e/E, K2 = g/G evaluated from the profile.
class SurfaceOfRevolution : public Manifold {
public:
    explicit SurfaceOfRevolution(RevolutionProfile profile, std::string id);

    std::string id() const override { return id_; }
    int ambient_dim() const override { return 3; }
    int intrinsic_dim() const override { return 2; }
    Vec constraint(const Vec& x) const override;
    std::vector<Vec> unit_normal_frame(const Vec& x) const override;
    Vec normal_derivative(const Vec& x, const Vec& v, int) const override;
    Vec retract(const Vec& y) const override;
    std::vector<Vec> tangent_basis(const Vec& x) const override;
    bool compact() const override { return profile_.compact; }
    std::optional<SurfaceChart> chart() const override;

    struct Params { double theta, s; };
    /// Recover (theta, s) for a point on (or near) the surface.
    virtual Params params_of(const Vec& x) const;

    Vec point_at(double theta, double s) const;
    /// Principal curvatures (K1 along the theta direction, K2 along s).
    void principal_curvatures(double s, double& K1, double& K2) const;
    /// Unit normal at (theta, s): (c2' cos, c2' sin, -c1') / sqrt(c1'^2+c2'^2).
    Vec normal_at(double theta, double s) const;
    void principal_frame(const Vec& x, Vec& e_theta, Vec& e_s, double& K1, double& K2) const;

    const RevolutionProfile& profile() const { return profile_; }

protected:
    RevolutionProfile profile_;
    std::string id_;
};

/// Upper half-plane model of H^2: coordinate manifold with conformal metric
/// |v|_x = |v| / y. Not embedded; geometry operators treat it as flat.
class HyperbolicPlane final : public Manifold {
public:
    std::string id() const override { return "hyperbolic-plane"; }
    int ambient_dim() const override { return 2; }
    int intrinsic_dim() const override { return 2; }
    Vec constraint(const Vec&) const override { return Vec(); }
    std::vector<Vec> unit_normal_frame(const Vec&) const override { return {}; }
    Vec normal_derivative(const Vec& x, const Vec&, int) const override;
    Vec retract(const Vec& y) const override;
    Vec retract_jvp(const Vec&, const Vec& w) const override { return w; }
    std::vector<Vec> tangent_basis(const Vec& x) const override;
    double metric_scale(const Vec& x) const override;
};

/// Manifold description plus the optional drift data an h-Brownian system uses.
struct ManifoldModel {
    std::shared_ptr<const Manifold> manifold;
    std::optional<DriftPotential> drift_potential;
    std::optional<ExtraDrift> extra_drift;

    const Manifold& geom() const { return *manifold; }
};

std::shared_ptr<const Manifold> make_torus(double a, double b);
std::shared_ptr<const Manifold> make_cylinder();
std::shared_ptr<const Manifold> make_hyperboloid();

/// Flat product torus S^1(a) x S^1(b) in R^4 (codimension two). The gradient
/// Brownian flow on it carries the reference first moment E|TF_t(v)| = 1 for
/// circle directions v.
std::shared_ptr<const Manifold> make_clifford_torus(double a, double b);

/// Manifold catalog: "euclidean:n", "sphere:n:r", "torus:a:b", "cylinder",
/// "hyperboloid", "punctured-plane", "hyperbolic-plane",
/// "surface-of-revolution:<profile-id>".
std::shared_ptr<const Manifold> manifold_by_id(const std::string& id);

/// Drift catalog: "none", "quadratic:c" (h = -c|x|^2), "gaussian:c" (h = -c|x|^2/2).
std::optional<DriftPotential> drift_by_id(const std::string& id, int ambient_dim);

ManifoldModel model_by_id(const std::string& manifold_id, const std::string& drift_id = "none");

std::vector<std::string> manifold_catalog_ids();
std::vector<std::string> drift_catalog_ids();

}  // namespace geomflow
