#pragma once

#include "igdiv/geodesic.hpp"
#include "igdiv/manifold.hpp"
#include "igdiv/types.hpp"

#include <functional>
#include <string>
#include <utility>

namespace igdiv {

/// The transported difference vectors based at q:
/// Pi  = primal transport of log_primal(p,q) along the dual geodesic p->q,
/// Pi* = dual transport of log_dual(p,q) along the primal geodesic p->q.
std::pair<Tangent, Tangent> pi_vectors(ManifoldHandle m, const Point& p, const Point& q,
                                       const NumericsConfig& cfg);

/// r(p,q) = <log_primal(p,q), log_dual(p,q)>_p. Asymmetric in general.
DivergenceValue pseudo_distance(ManifoldHandle m, const Point& p, const Point& q,
                                const NumericsConfig& cfg);

/// Pseudo-energy of an arbitrary path from p to anchor_q: the path integral
/// of <c'(t), P_t X> with X the oriented log of the endpoint and P_t the
/// transport of the same orientation along c.
DivergenceValue pseudo_energy(ManifoldHandle m, const Curve& c, Orientation orient,
                              const Point& anchor_q, const NumericsConfig& cfg);

/// The canonical divergence (Primal) and its dual (Dual): path integral of
/// the transported difference vector along the geodesic of the orientation's
/// own connection. One inner BVP solve per quadrature node, warm-started.
DivergenceValue canonical_divergence(ManifoldHandle m, const Point& p, const Point& q,
                                     Orientation orient, const NumericsConfig& cfg);

/// Phi-functions via the transport-free representation
/// phi = int_0^1 <I_p(t X*), X*>_p dt with I_p(u) = log_primal(p, exp_dual(p, u)).
DivergenceValue phi(ManifoldHandle m, const Point& p, const Point& q, Orientation orient,
                    const NumericsConfig& cfg);
/// Definition-form path integral of Pi along the conjugate geodesic (one
/// transport per node). Kept as a cross-check for the representation above.
DivergenceValue phi_direct(ManifoldHandle m, const Point& p, const Point& q, Orientation orient,
                           const NumericsConfig& cfg);

/// Bregman divergence of the Hessian structure,
/// D[p:q] = phi(theta_p) + phi*(eta_q) - theta_p . eta_q, with the Legendre
/// dual obtained by inverting the gradient map.
double bregman_divergence(ManifoldHandle m, const Point& p, const Point& q);

/// Gradient-map inversion theta(eta): safeguarded Newton (bisection fallback
/// in one dimension), tolerance 1e-12.
Vec legendre_invert(const Manifold& m, const Vec& eta);

DivergenceValue ay_amari_divergence(ManifoldHandle m, const Point& p, const Point& q,
                                    const NumericsConfig& cfg);

/// Henmi-Kobayashi work divergence. Primal: W(p||q) along the primal
/// geodesic q->p against the dual-log force field anchored at q; Dual swaps
/// the connection roles (W*).
DivergenceValue henmi_kobayashi(ManifoldHandle m, const Point& p, const Point& q,
                                Orientation orient, const NumericsConfig& cfg);

/// <log_primal(p,q), log_primal(p,q)>_p.
double standard_divergence(ManifoldHandle m, const Point& p, const Point& q,
                           const NumericsConfig& cfg);

using DivergenceFn = std::function<double(const Point&, const Point&)>;

/// Central finite differences of f(p, .) at q, index-raised with g(q)^{-1}.
Tangent grad_divergence(ManifoldHandle m, const DivergenceFn& f, const Point& p, const Point& q,
                        double h);

/// Path integral of <Pi_t + Pi*_t, gamma'(t)> along an arbitrary path from
/// gamma(0)=p; equals r(p, gamma(1)) independently of the path.
DivergenceValue pi_sum_path_integral(ManifoldHandle m, const Curve& gamma,
                                     const NumericsConfig& cfg);

// --- CLI-facing quantity selector --------------------------------------------

enum class Quantity {
    CanonicalD,
    CanonicalDstar,
    Phi,
    PhiStar,
    PseudoDistance,
    AyAmari,
    Bregman,
    HenmiW,
    HenmiWstar,
    Standard,
    Distance,
};

Quantity quantity_from_name(const std::string& name);
std::string quantity_name(Quantity q);
DivergenceValue evaluate_quantity(ManifoldHandle m, Quantity which, const Point& p,
                                  const Point& q, const NumericsConfig& cfg);

}  // namespace igdiv
