#pragma once

#include "igdiv/geodesic.hpp"
#include "igdiv/manifold.hpp"
#include "igdiv/report.hpp"
#include "igdiv/types.hpp"

namespace igdiv {

/// Parallel transport of v from c(0) to c(1): solves
/// dX^k/dt + Gamma^k_ij x'^i X^j = 0 with one RK4 step per curve node interval.
Tangent transport_along(const Manifold& m, const ConnectionKind& kind, const Curve& c,
                        const Tangent& v);

/// Transport state at every node of the carrier curve (X(t_i) based at c(t_i)).
std::vector<Vec> transport_profile(const Manifold& m, const ConnectionKind& kind, const Curve& c,
                                   const Vec& v0);

/// |<P v, P* w>_{c(1)} - <v, w>_{c(0)}| : drift of the Lauritzen pairing
/// under primal/dual transport of the pair.
double dual_isometry_deviation(const Manifold& m, const Curve& c, const Tangent& v,
                               const Tangent& w);

/// Two-leg loop: out along one curve, back along the other. The legs share
/// both endpoints (the paper's loop shape: dual-geodesic out, primal back).
struct Loop {
    Curve out_leg;
    Curve return_leg;

    Loop(Curve out, Curve back);
    Point base() const { return out_leg.start(); }
};

/// Primal transport around the loop minus the identity: P_Sigma z - z.
Tangent holonomy_defect(const Manifold& m, const Loop& loop, const Tangent& z);

/// Leading-order holonomy-curvature comparison on a geodesic quadrilateral
/// spanned by (scale*x, scale*y): the defect must match scale^2 R(x,y)z and
/// the after-subtraction residual must contract at order >= ~3 under scale
/// halving. Details record both contraction ratios.
CheckReport holonomy_curvature_check(ManifoldHandle m, const Point& p, const Tangent& x,
                                     const Tangent& y, const Tangent& z, double scale,
                                     const NumericsConfig& cfg = NumericsConfig::defaults());

}  // namespace igdiv
