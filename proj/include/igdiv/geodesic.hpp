#pragma once

#include "igdiv/manifold.hpp"
#include "igdiv/types.hpp"

#include <functional>
#include <vector>

namespace igdiv {

struct CurveNode {
    double t;
    Vec x;
    Vec v;
    Vec a;  // second derivative; exact RHS value on geodesic curves
};

/// A solved path on t in [0,1] with dense quintic-Hermite evaluation of
/// position and velocity between its nodes (node accelerations are stored,
/// which keeps the interpolated geodesic-equation residual at the integrator
/// error level). Immutable and shareable.
class Curve {
  public:
    Curve(ManifoldHandle m, ConnectionKind kind, std::vector<CurveNode> nodes);

    const Manifold& manifold() const { return *manifold_; }
    ManifoldHandle manifold_handle() const { return manifold_; }
    const ConnectionKind& kind() const { return kind_; }
    const std::vector<CurveNode>& nodes() const { return nodes_; }

    Point start() const { return Point(nodes_.front().x); }
    Point end() const { return Point(nodes_.back().x); }
    Tangent velocity_start() const { return {start(), nodes_.front().v}; }
    Tangent velocity_end() const { return {end(), nodes_.back().v}; }

    Vec position(double t) const;
    Vec velocity(double t) const;
    /// Second derivative of the dense interpolant.
    Vec acceleration(double t) const;

    /// Same path traversed backward (t -> 1-t).
    Curve reversed() const;
    /// Chart arc length under g, by Gauss-Legendre quadrature of |c'(t)|_g.
    double length(int quad_order = 16) const;

    /// Sample an analytic path (position callback; velocity by the callback
    /// when given, else by central differences of the position).
    static Curve from_path(ManifoldHandle m, ConnectionKind kind,
                           const std::function<Vec(double)>& pos, int steps,
                           const std::function<Vec(double)>* vel = nullptr);

    /// Concatenation c1 then c2; requires c1(1) == c2(0) within 1e-9.
    static Curve concat(const Curve& a, const Curve& b);

  private:
    ManifoldHandle manifold_;
    ConnectionKind kind_;
    std::vector<CurveNode> nodes_;
};

struct ShootingResult {
    Tangent initial_velocity;
    int iterations = 0;
    double final_gap = 0.0;  // chart-space endpoint miss
};

/// Geodesic initial-value problem: RK4 on (x, v) with `steps` fixed steps.
/// The endpoint is the exponential map exp_p(v).
Curve shoot(ManifoldHandle m, const ConnectionKind& kind, const Point& p, const Tangent& v,
            int steps);

/// Inverse exponential map by damped-Newton shooting with a chart-difference
/// initial guess and a midpoint continuation fallback.
ShootingResult log_map(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                       const Point& q, const NumericsConfig& cfg);
/// log_map with a caller-supplied initial guess (used by warm-started
/// quadrature loops; pass nullptr for the default chart difference).
ShootingResult log_map_guess(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                             const Point& q, const NumericsConfig& cfg, const Vec* guess);

/// BVP solve returning the whole curve: shoot(p, log(p,q)).
Curve geodesic_between(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                       const Point& q, const NumericsConfig& cfg);

/// d(p,q) = |log_LC(p,q)|_g at p.
double riemannian_distance(ManifoldHandle m, const Point& p, const Point& q,
                           const NumericsConfig& cfg);

/// Max geodesic-equation residual |x'' + Gamma(x)(x',x')| sampled at probe
/// midpoints; used by shoot() to enforce the step-count contract.
double geodesic_residual(const Curve& c, int probes = 10);

}  // namespace igdiv
