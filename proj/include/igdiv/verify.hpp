#pragma once

#include "igdiv/divergence.hpp"
#include "igdiv/manifold.hpp"
#include "igdiv/report.hpp"
#include "igdiv/rng.hpp"
#include "igdiv/types.hpp"

#include <string>
#include <vector>

namespace igdiv {

/// Deterministic sampling plan for a verification run.
struct SampleScheme {
    std::uint64_t seed = 42;
    int count = 50;
    double pair_radius = 0.0;  // 0 -> manifold default
    std::string manifold;      // spec reference, reporting only

    double radius_for(const Manifold& m) const {
        return pair_radius > 0.0 ? pair_radius : m.default_pair_radius();
    }
};

/// Seeded interior point (middle band of the domain box).
Point sample_interior(const Manifold& m, Rng& rng);
/// Seeded pair with |q - p| <= radius in chart units, both interior.
std::pair<Point, Point> sample_pair(const Manifold& m, Rng& rng, double radius);

// ---------------------------------------------------------------------------
// Theorem checks. Every report is deterministic given scheme.seed, and a
// sample-level solver failure is recorded as a failing detail (a check never
// passes vacuously). Where a check combines sub-criteria with different
// natural bounds, each detail's residual is normalized by its own bound and
// the report tolerance is 1.

/// grad_q r = Pi + Pi* (relative error, FD gradient vs transported vectors).
CheckReport check_grad_pseudo_distance(ManifoldHandle m, const SampleScheme& scheme, double h,
                                       double tol, const NumericsConfig& cfg);

/// Tangency of Pi + Pi* to the level set {q : r_p(q) = kappa}; points found
/// by radial bisection from p.
CheckReport check_level_set_orthogonality(ManifoldHandle m, const Point& p, double kappa,
                                          const SampleScheme& scheme, double tol,
                                          const NumericsConfig& cfg);

/// r = D + phi* and r = D* + phi (within 1e-7 + 5 est_error), plus the
/// orthogonal-decomposition residuals of Pi - grad D and Pi - grad phi
/// against the geodesic velocities (within tol_orth).
CheckReport check_decompositions(ManifoldHandle m, const SampleScheme& scheme, double tol_orth,
                                 const NumericsConfig& cfg);

/// Eguchi recovery: second q-derivatives of D and phi at the diagonal give
/// g_ij (tol_g); mixed third derivatives give -Gamma*_{ij,k} (and -Gamma for
/// the dual functions, tol_gamma, Richardson-extrapolated); the quartic
/// Taylor remainder of D has log-log slope 4 +- 0.3.
CheckReport check_eguchi_consistency(ManifoldHandle m, const SampleScheme& scheme, double tol_g,
                                     double tol_gamma, const NumericsConfig& cfg);

/// Class-specific equalities of Theorem 8 (self-dual / dually flat /
/// symmetric). Throws std::invalid_argument when the manifold carries no
/// class tag.
CheckReport check_special_cases(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                const NumericsConfig& cfg);

/// Pseudo-energy invariants: the L-integrand is constant along dual
/// geodesics and L(sigma*) = r (mirrored for L*), and the dual-transport
/// pairing is isometric along seeded non-geodesic curves. Sub-bounds are
/// 1e-8 / 1e-7 / 1e-8 per unit length; `tol` scales the normalized scores.
CheckReport check_energy_invariants(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                    const NumericsConfig& cfg);

/// Theorems 9/10 on a 2-d manifold: D(.,p) and phi(.,p) are constant along a
/// traced level curve of D*(p,.), and level values grow with the level.
CheckReport check_symmetry_relations(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                     const NumericsConfig& cfg);

/// Empirical condition (S): max |R(X,Y,Y,Y)| over seeded unit tangents, max
/// FD covariant-derivative norm of R, and the Prop.-7 sign condition.
CheckReport check_condition_S(ManifoldHandle m, const SampleScheme& scheme, double tol,
                              const NumericsConfig& cfg);

/// Largest chart radius around p at which seeded pairs stay log-solvable for
/// both connections (round-trip check). Convexity remains a caller
/// obligation; this is the probe the CLI `describe` surfaces.
double probe_convex_radius(ManifoldHandle m, const Point& p, const NumericsConfig& cfg);

// ---------------------------------------------------------------------------
// Suite runner (CLI backend).

/// Known suite names: grad_r, level_sets, decompositions, eguchi,
/// special_cases, energy, symmetry, condition_s, duality, curvature_duality,
/// holonomy. "all" expands to every check applicable to the manifold.
std::vector<std::string> suite_names_for(const Manifold& m, bool all_only_applicable = true);

std::vector<CheckReport> run_suite(ManifoldHandle m, const std::vector<std::string>& names,
                                   const SampleScheme& scheme, const NumericsConfig& cfg);

}  // namespace igdiv
