#pragma once

#include "igdiv/report.hpp"
#include "igdiv/types.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace igdiv {

using MetricFn = std::function<Mat(const Vec&)>;
using GammaFn = std::function<Tensor3(const Vec&)>;  // second kind, (k,i,j) -> Gamma^k_ij

/// Convex potential backing a Hessian structure: value, gradient, Hessian
/// (= the metric) and the totally symmetric third-derivative tensor.
struct Potential {
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> grad;
    std::function<Mat(const Vec&)> hess;
    std::function<Tensor3(const Vec&)> third;  // (i,j,k) -> d_i d_j d_k phi
};

/// Immutable single-chart statistical manifold: metric, dual Christoffel
/// callbacks, open domain box with a boundary margin, optional Hessian
/// potential, and class tags used by the special-case checks. Safe to share
/// across threads; all operations are pure.
class Manifold {
  public:
    /// Raw-callback constructor (library API only). Validates metric SPD and
    /// the duality relation d_k g_ij = g(nabla_k e_i, e_j) + g(e_i, nabla*_k e_j)
    /// at 20 seeded interior points; rejects inconsistent triples at 1e-5.
    static std::shared_ptr<const Manifold> custom(std::string name, int dim,
                                                  std::vector<std::array<double, 2>> domain,
                                                  MetricFn metric, GammaFn gamma_primal,
                                                  GammaFn gamma_dual,
                                                  std::optional<Potential> potential = {});

    // Built-in zoo -----------------------------------------------------------
    static std::shared_ptr<const Manifold> euclidean(int n);
    static std::shared_ptr<const Manifold> sphere2();
    static std::shared_ptr<const Manifold> hessian_bernoulli();
    static std::shared_ptr<const Manifold> hessian_gaussian_natural();
    static std::shared_ptr<const Manifold> hessian_polynomial(
        const std::vector<double>& coeffs, const std::array<double, 2>& domain);
    static std::shared_ptr<const Manifold> alpha_gaussian(double alpha);

    // Introspection ----------------------------------------------------------
    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    const std::vector<std::array<double, 2>>& domain() const { return domain_; }
    double boundary_margin() const { return boundary_margin_; }
    bool is_self_dual() const { return self_dual_; }
    bool is_dually_flat() const { return dually_flat_; }
    bool is_symmetric_space() const { return symmetric_space_; }
    bool has_potential() const { return potential_.has_value(); }
    const Potential& potential() const;
    /// Sampling radius for verification pairs, chosen inside the empirically
    /// probed convex neighborhood of each zoo member.
    double default_pair_radius() const { return pair_radius_; }

    bool contains(const Vec& x, double margin) const;
    /// Throws PointOutOfDomain if p violates the boundary margin.
    void require_valid(const Point& p) const;

    // Chart geometry ---------------------------------------------------------
    Mat metric_at(const Point& p) const;
    /// Second-kind symbols Gamma^k_ij for the requested connection.
    Tensor3 gamma_second(const ConnectionKind& kind, const Point& p) const;
    /// Both kinds: second (k,i,j) -> Gamma^k_ij and first (i,j,k) -> g_il Gamma^l_jk.
    std::pair<Tensor3, Tensor3> christoffels_at(const ConnectionKind& kind, const Point& p) const;
    /// Curvature of the requested connection: R^l_ijk (stored (l,i,j,k)) from
    /// central differences of the symbols plus exact quadratic terms, and its
    /// lowered form R_ijkl = g_lm R^m_ijk (stored (i,j,k,l)).
    std::pair<Tensor4, Tensor4> curvature_at(const ConnectionKind& kind, const Point& p,
                                             double fd_step = 1e-4) const;

    // Pointwise structure checks ---------------------------------------------
    /// R(X,Y,Z,W) = -R*(X,Y,W,Z) componentwise.
    CheckReport check_curvature_duality(const Point& p, double tol,
                                        double fd_step = 1e-4) const;
    /// FD(d_k g_ij) against the first-kind symbol sum of the dual pair.
    CheckReport check_duality_relation(const Point& p, double h, double tol) const;

  private:
    Manifold() = default;

    std::string name_;
    int dim_ = 0;
    std::vector<std::array<double, 2>> domain_;
    double boundary_margin_ = 1e-6;
    MetricFn metric_;
    GammaFn gamma_primal_;
    GammaFn gamma_dual_;
    std::optional<Potential> potential_;
    bool self_dual_ = false;
    bool dually_flat_ = false;
    bool symmetric_space_ = false;
    double pair_radius_ = 0.3;

    void validate_construction(double tol, int samples) const;
};

using ManifoldHandle = std::shared_ptr<const Manifold>;

/// Parse the JSON manifold spec format. Unknown keys are rejected.
ManifoldHandle manifold_from_json(const std::string& json_text);
/// Inline shorthand mirror of the JSON format: "euclidean:2", "sphere2",
/// "hessian:bernoulli", "hessian:gaussian_natural", "alpha_gaussian:0.5".
ManifoldHandle manifold_from_shorthand(const std::string& text);

}  // namespace igdiv
