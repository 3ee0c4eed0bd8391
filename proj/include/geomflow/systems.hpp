#pragma once

#include <memory>

#include "geomflow/geometry_ops.hpp"
#include "geomflow/manifold.hpp"

namespace geomflow {

/// Stochastic dynamical system dx = X(x) dB + A(x) dt with the linearizations
/// needed to advance derivative-flow vectors alongside the path.
class SdeSystem {
public:
    virtual ~SdeSystem() = default;

    virtual std::string id() const = 0;
    virtual const Manifold& manifold() const = 0;
    virtual const ManifoldModel& model() const = 0;
    virtual int noise_dim() const = 0;

    /// True when `drift` is the Stratonovich drift; false for Ito-declared
    /// systems, whose drift the stepper corrects by -1/2 sum_i DX^i(X^i).
    virtual bool stratonovich() const = 0;

    /// X(x) applied to a full increment vector.
    virtual void diffusion(const Vec& x, const Vec& db, Vec& out) const = 0;

    /// Ambient derivative D_v[x -> X(x) db] for tangent v.
    virtual void diffusion_jvp(const Vec& x, const Vec& v, const Vec& db, Vec& out) const = 0;

    virtual void drift(const Vec& x, Vec& out) const = 0;
    virtual void drift_jvp(const Vec& x, const Vec& v, Vec& out) const = 0;

    /// -1/2 sum_i D(X e_i)(X e_i), the Ito-to-Stratonovich drift correction.
    virtual void strat_correction(const Vec& x, Vec& out) const;

    /// D_v of the correction; default central differences (override on systems
    /// whose Jacobians feed quantitative tests).
    virtual void strat_correction_jvp(const Vec& x, const Vec& v, Vec& out) const;

    /// <dB, Y(x)(v)> with Y(x) a right inverse of X(x): the Bismut martingale
    /// increment. Defined only on elliptic systems; the default rejects.
    virtual double bismut_weight(const Vec& x, const Vec& v, const Vec& db) const;
};

/// Gradient Brownian system: X(x) = orthogonal projection onto T_xM from an
/// isometric embedding, drift = tangent gradient of h plus any extra field.
/// nabla X^i(v) = A_x(v, Z(x) e_i); the gradient identity makes the
/// Stratonovich and Ito drifts coincide.
class GradientBrownianSystem final : public SdeSystem {
public:
    explicit GradientBrownianSystem(ManifoldModel model);

    std::string id() const override;
    const Manifold& manifold() const override { return *model_.manifold; }
    const ManifoldModel& model() const override { return model_; }
    int noise_dim() const override { return model_.manifold->ambient_dim(); }
    bool stratonovich() const override { return true; }
    void diffusion(const Vec& x, const Vec& db, Vec& out) const override;
    void diffusion_jvp(const Vec& x, const Vec& v, const Vec& db, Vec& out) const override;
    void drift(const Vec& x, Vec& out) const override;
    void drift_jvp(const Vec& x, const Vec& v, Vec& out) const override;
    // Y is the tangent inclusion: X Y = Id on T_xM.
    double bismut_weight(const Vec&, const Vec& v, const Vec& db) const override {
        return v.dot(db);
    }

private:
    ManifoldModel model_;
};

/// Langevin equation dx = gamma dB - c x dt on flat R^n (Ito = Stratonovich;
/// the diffusion coefficient is constant). Generator (1/2)Delta^h for
/// h = -c|x|^2/2 when gamma = 1.
class LangevinSystem final : public SdeSystem {
public:
    LangevinSystem(double c, double gamma, int dim, bool punctured = false);

    std::string id() const override;
    const Manifold& manifold() const override { return *model_.manifold; }
    const ManifoldModel& model() const override { return model_; }
    int noise_dim() const override { return dim_; }
    bool stratonovich() const override { return true; }
    void diffusion(const Vec&, const Vec& db, Vec& out) const override { out = gamma_ * db; }
    void diffusion_jvp(const Vec&, const Vec&, const Vec&, Vec& out) const override {
        out.setZero();
    }
    void drift(const Vec& x, Vec& out) const override { out = -c_ * x; }
    void drift_jvp(const Vec&, const Vec& v, Vec& out) const override { out = -c_ * v; }
    double bismut_weight(const Vec&, const Vec& v, const Vec& db) const override {
        return v.dot(db) / gamma_;
    }

    double c() const { return c_; }
    double gamma() const { return gamma_; }

private:
    double c_, gamma_;
    int dim_;
    ManifoldModel model_;
};

/// Taniguchi's SDE on the open unit disk (Ito form, one driving Brownian
/// motion): dx^i = (1-|x|^2)^eps x^i dB - (1/2)(1-|x|^2)^{2 eps} x^i dt.
/// Solutions approach |x| = 1; boundary reach is the operational explosion.
class TaniguchiSystem final : public SdeSystem {
public:
    explicit TaniguchiSystem(double eps);

    std::string id() const override;
    const Manifold& manifold() const override { return *model_.manifold; }
    const ManifoldModel& model() const override { return model_; }
    int noise_dim() const override { return 1; }
    bool stratonovich() const override { return false; }
    void diffusion(const Vec& x, const Vec& db, Vec& out) const override;
    void diffusion_jvp(const Vec& x, const Vec& v, const Vec& db, Vec& out) const override;
    void drift(const Vec& x, Vec& out) const override;
    void drift_jvp(const Vec& x, const Vec& v, Vec& out) const override;

    double eps() const { return eps_; }

private:
    double phi(const Vec& x) const;  // (1-|x|^2)^eps, clamped at 0
    double eps_;
    ManifoldModel model_;
};

/// Brownian flow on the hyperbolic plane in upper-half-plane coordinates
/// (Ito form): dx = y dB^1, dy = y dB^2.
class HyperbolicPlaneSystem final : public SdeSystem {
public:
    HyperbolicPlaneSystem();

    std::string id() const override { return "hyperbolic"; }
    const Manifold& manifold() const override { return *model_.manifold; }
    const ManifoldModel& model() const override { return model_; }
    int noise_dim() const override { return 2; }
    bool stratonovich() const override { return false; }
    void diffusion(const Vec& x, const Vec& db, Vec& out) const override {
        out[0] = x[1] * db[0];
        out[1] = x[1] * db[1];
    }
    void diffusion_jvp(const Vec&, const Vec& v, const Vec& db, Vec& out) const override {
        out[0] = v[1] * db[0];
        out[1] = v[1] * db[1];
    }
    void drift(const Vec&, Vec& out) const override { out.setZero(); }
    void drift_jvp(const Vec&, const Vec&, Vec& out) const override { out.setZero(); }
    void strat_correction(const Vec& x, Vec& out) const override {
        out[0] = 0.0;
        out[1] = -0.5 * x[1];
    }
    void strat_correction_jvp(const Vec&, const Vec& v, Vec& out) const override {
        out[0] = 0.0;
        out[1] = -0.5 * v[1];
    }
    double bismut_weight(const Vec& x, const Vec& v, const Vec& db) const override {
        return v.dot(db) / x[1];
    }

private:
    ManifoldModel model_;
};

/// System catalog. Embedded manifold ids pair with a drift id to form a
/// gradient Brownian system; "langevin:c[:gamma[:dim]]", "taniguchi:eps" and
/// "hyperbolic" name the coordinate systems above.
std::shared_ptr<const SdeSystem> system_by_id(const std::string& manifold_id,
                                              const std::string& drift_id = "none",
                                              double gamma = 1.0);

}  // namespace geomflow
