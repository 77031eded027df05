#include "igdiv/verify.hpp"

#include "igdiv/quadrature.hpp"
#include "igdiv/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace igdiv {

namespace {

constexpr double kFailResidual = 9e99;

double g_inner(const Mat& g, const Vec& a, const Vec& b) { return a.transpose() * g * b; }
double g_norm(const Mat& g, const Vec& a) { return std::sqrt(std::max(0.0, g_inner(g, a, a))); }

std::vector<double> coords_of(const Vec& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

SampleDetail fail_detail(int idx, const Point& p, const Point& q, const std::string& why) {
    SampleDetail d;
    d.index = idx;
    d.p = coords_of(p.coords);
    d.q = coords_of(q.coords);
    d.residual = kFailResidual;
    d.note = why;
    return d;
}

/// Seeded cubic chart path from p to q (non-geodesic test path). The cubic
/// wiggle vanishes at both ends so the endpoints are exact.
Curve seeded_cubic_path(ManifoldHandle m, const Point& p, const Point& q, Rng& rng, int steps) {
    const int n = m->dim();
    Vec a = rng.in_ball(n, 0.35 * (q.coords - p.coords).norm() + 1e-6);
    Vec b = rng.in_ball(n, 0.35 * (q.coords - p.coords).norm() + 1e-6);
    const Vec p0 = p.coords, d = q.coords - p.coords;
    const std::function<Vec(double)> pos = [p0, d, a, b](double t) -> Vec {
        return p0 + t * d + (t * (1.0 - t)) * a + (t * t * (1.0 - t)) * b;
    };
    const std::function<Vec(double)> vel = [d, a, b](double t) -> Vec {
        return d + (1.0 - 2.0 * t) * a + (2.0 * t - 3.0 * t * t) * b;
    };
    return Curve::from_path(m, ConnectionKind::LeviCivita(), pos, steps, &vel);
}

}  // namespace

Point sample_interior(const Manifold& m, Rng& rng) {
    const int n = m.dim();
    Vec x(n);
    for (int i = 0; i < n; ++i) {
        const double lo = m.domain()[i][0], hi = m.domain()[i][1];
        const double mid = 0.5 * (lo + hi), half = 0.25 * (hi - lo);
        x[i] = rng.uniform(mid - half, mid + half);
    }
    return Point(x);
}

std::pair<Point, Point> sample_pair(const Manifold& m, Rng& rng, double radius) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        const Point p = sample_interior(m, rng);
        const Vec dq = rng.in_ball(m.dim(), radius);
        const Vec q = p.coords + dq;
        if (dq.norm() < 0.05 * radius) continue;  // avoid near-degenerate pairs
        if (m.contains(q, m.boundary_margin() + 1e-3)) return {p, Point(q)};
    }
    throw Error("could not sample an interior pair on '" + m.name() + "'");
}

// ---------------------------------------------------------------------------

CheckReport check_grad_pseudo_distance(ManifoldHandle m, const SampleScheme& scheme, double h,
                                       double tol, const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "grad_r";
    rep.tolerance = tol;
    Rng rng(scheme.seed);
    const double radius = scheme.radius_for(*m);
    auto r_fn = [&](const Point& a, const Point& b) { return pseudo_distance(m, a, b, cfg).value; };
    for (int i = 0; i < scheme.count; ++i) {
        const auto [p, q] = sample_pair(*m, rng, radius);
        try {
            const Tangent grad = grad_divergence(m, r_fn, p, q, h);
            const auto [Pi, PiStar] = pi_vectors(m, p, q, cfg);
            const Vec sum = Pi.components + PiStar.components;
            const Mat g = m->metric_at(q);
            const double residual =
                g_norm(g, Vec(grad.components - sum)) / std::max(1.0, g_norm(g, sum));
            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.q = coords_of(q.coords);
            d.residual = residual;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, q, e.what()));
        }
    }
    rep.finalize(scheme.count);
    return rep;
}

CheckReport check_level_set_orthogonality(ManifoldHandle m, const Point& p, double kappa,
                                          const SampleScheme& scheme, double tol,
                                          const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "level_set_orthogonality";
    rep.tolerance = tol;
    Rng rng(scheme.seed);
    const int n = m->dim();
    auto r_fn = [&](const Point& a, const Point& b) { return pseudo_distance(m, a, b, cfg).value; };
    const Mat gp = m->metric_at(p);

    int found = 0;
    for (int i = 0; i < scheme.count; ++i) {
        const Vec dir = rng.unit_vector(n);
        try {
            // radial root finding: r_p(p + s dir) = kappa, bisection on s
            const double quad = g_inner(gp, dir, dir);
            double s_hi = 1.05 * std::sqrt(kappa / quad);
            double r_hi = 0.0;
            bool bracketed = false;
            for (int grow = 0; grow < 60; ++grow) {
                const Vec x = p.coords + s_hi * dir;
                if (!m->contains(x, m->boundary_margin() + 1e-3))
                    throw LevelSetNotFound("radial ray left the domain before reaching the level");
                r_hi = r_fn(p, Point(x));
                if (r_hi >= kappa) {
                    bracketed = true;
                    break;
                }
                s_hi *= 1.2;
            }
            if (!bracketed) throw LevelSetNotFound("could not bracket the level radially");
            double s_lo = 0.0;
            for (int it = 0; it < 100 && (s_hi - s_lo) > 1e-12; ++it) {
                const double mid = 0.5 * (s_lo + s_hi);
                if (r_fn(p, Point(Vec(p.coords + mid * dir))) < kappa)
                    s_lo = mid;
                else
                    s_hi = mid;
            }
            const Point q{Vec(p.coords + 0.5 * (s_lo + s_hi) * dir)};
            ++found;

            const Tangent normal = grad_divergence(m, r_fn, p, q, cfg.fd_step);
            const auto [Pi, PiStar] = pi_vectors(m, p, q, cfg);
            const Vec sum = Pi.components + PiStar.components;
            const Mat gq = m->metric_at(q);
            const double nn = g_inner(gq, normal.components, normal.components);
            double worst = 0.0;
            for (int b = 0; b < n; ++b) {
                Vec e = Vec::Zero(n);
                e[b] = 1.0;
                const Vec u = e - (g_inner(gq, e, normal.components) / nn) * normal.components;
                const double un = g_norm(gq, u);
                if (un < 1e-8) continue;  // basis vector parallel to the normal
                worst = std::max(worst, std::fabs(g_inner(gq, sum, u)) /
                                            (g_norm(gq, sum) * un));
            }
            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.q = coords_of(q.coords);
            d.residual = worst;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, p, e.what()));
        }
    }
    if (found == 0) throw LevelSetNotFound("no level-set point found in any sampled direction");
    rep.finalize(scheme.count);
    return rep;
}

CheckReport check_decompositions(ManifoldHandle m, const SampleScheme& scheme, double tol_orth,
                                 const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "decompositions";
    rep.tolerance = 1.0;  // residuals normalized by their own bounds
    Rng rng(scheme.seed);
    const double radius = scheme.radius_for(*m);

    for (int i = 0; i < scheme.count; ++i) {
        const auto [p, q] = sample_pair(*m, rng, radius);
        try {
            const DivergenceValue r = pseudo_distance(m, p, q, cfg);
            const DivergenceValue D = canonical_divergence(m, p, q, Orientation::Primal, cfg);
            const DivergenceValue Ds = canonical_divergence(m, p, q, Orientation::Dual, cfg);
            const DivergenceValue ph = phi(m, p, q, Orientation::Primal, cfg);
            const DivergenceValue phs = phi(m, p, q, Orientation::Dual, cfg);

            const double a1 = std::fabs(r.value - D.value - phs.value) /
                              (1e-7 + 5.0 * (D.est_error + phs.est_error));
            const double a2 = std::fabs(r.value - Ds.value - ph.value) /
                              (1e-7 + 5.0 * (Ds.est_error + ph.est_error));

            const auto [Pi, PiStar] = pi_vectors(m, p, q, cfg);
            const Curve sig = geodesic_between(m, ConnectionKind::Primal(), p, q, cfg);
            const Curve sigs = geodesic_between(m, ConnectionKind::Dual(), p, q, cfg);
            const Vec vp = sig.velocity_end().components;
            const Vec vd = sigs.velocity_end().components;
            const Mat g = m->metric_at(q);

            auto fd_grad = [&](Orientation o, bool phi_fn) {
                DivergenceFn f = [&, o, phi_fn](const Point& a, const Point& b) {
                    return phi_fn ? phi(m, a, b, o, cfg).value
                                  : canonical_divergence(m, a, b, o, cfg).value;
                };
                return grad_divergence(m, f, p, q, cfg.fd_step).components;
            };
            const Vec gD = fd_grad(Orientation::Primal, false);
            const Vec gDs = fd_grad(Orientation::Dual, false);
            const Vec gPh = fd_grad(Orientation::Primal, true);
            const Vec gPhs = fd_grad(Orientation::Dual, true);

            auto orth = [&](const Vec& a, const Vec& b) {
                return std::fabs(g_inner(g, a, b)) / std::max(1.0, g_norm(g, a) * g_norm(g, b));
            };
            const Vec X = Pi.components - gD;
            const Vec Xs = PiStar.components - gDs;
            const Vec V = Pi.components - gPh;
            const Vec Vs = PiStar.components - gPhs;

            const double score =
                std::max({a1, a2, orth(X, vp) / tol_orth, orth(gD, X) / tol_orth,
                          orth(Xs, vd) / tol_orth, orth(gDs, Xs) / tol_orth,
                          orth(V, vd) / tol_orth, orth(Vs, vp) / tol_orth});

            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.q = coords_of(q.coords);
            d.residual = score;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, q, e.what()));
        }
    }
    rep.finalize(scheme.count);
    return rep;
}

namespace {

/// Mixed second q-derivative of F(pbase, .) with the q-stencil centered at
/// `center`.
double second_q_derivative(const std::function<double(const Vec&, const Vec&)>& F,
                           const Vec& pbase, const Vec& center, int i, int j, double h) {
    if (i == j) {
        Vec qp = center, qm = center;
        qp[i] += h;
        qm[i] -= h;
        return (F(pbase, qp) - 2.0 * F(pbase, center) + F(pbase, qm)) / (h * h);
    }
    Vec qpp = center, qpm = center, qmp = center, qmm = center;
    qpp[i] += h;
    qpp[j] += h;
    qpm[i] += h;
    qpm[j] -= h;
    qmp[i] -= h;
    qmp[j] += h;
    qmm[i] -= h;
    qmm[j] -= h;
    return (F(pbase, qpp) - F(pbase, qpm) - F(pbase, qmp) + F(pbase, qmm)) / (4.0 * h * h);
}

/// d/dp_k of the mixed second q-derivative, evaluated at the diagonal.
double third_derivative(const std::function<double(const Vec&, const Vec&)>& F, const Vec& x0,
                        int i, int j, int k, double h) {
    Vec pp = x0, pm = x0;
    pp[k] += h;
    pm[k] -= h;
    return (second_q_derivative(F, pp, x0, i, j, h) -
            second_q_derivative(F, pm, x0, i, j, h)) /
           (2.0 * h);
}

double third_richardson(const std::function<double(const Vec&, const Vec&)>& F, const Vec& x0,
                        int i, int j, int k, double h) {
    const double coarse = third_derivative(F, x0, i, j, k, h);
    const double fine = third_derivative(F, x0, i, j, k, 0.5 * h);
    return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

CheckReport check_eguchi_consistency(ManifoldHandle m, const SampleScheme& scheme, double tol_g,
                                     double tol_gamma, const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "eguchi";
    rep.tolerance = 1.0;  // residuals normalized by tol_g / tol_gamma / slope window
    Rng rng(scheme.seed);
    const int n = m->dim();

    auto fn_of = [&](Orientation o, bool phi_fn) {
        return std::function<double(const Vec&, const Vec&)>(
            [m, o, phi_fn, &cfg](const Vec& a, const Vec& b) {
                return phi_fn ? phi(m, Point(a), Point(b), o, cfg).value
                              : canonical_divergence(m, Point(a), Point(b), o, cfg).value;
            });
    };

    for (int s = 0; s < scheme.count; ++s) {
        const Point x0p = sample_interior(*m, rng);
        const Vec x0 = x0p.coords;
        const Vec slope_dir = rng.unit_vector(n);
        try {
            const Mat g = m->metric_at(x0p);
            const auto [gp2, gp1] = m->christoffels_at(ConnectionKind::Primal(), x0p);
            const auto [gd2, gd1] = m->christoffels_at(ConnectionKind::Dual(), x0p);
            (void)gp2;
            (void)gd2;
            // first-kind symbols in the g(nabla_{e_i} e_j, e_k) arrangement
            auto gamma_p = [&](int i, int j, int k) { return gp1(k, i, j); };
            auto gamma_d = [&](int i, int j, int k) { return gd1(k, i, j); };

            double score = 0.0;
            std::string worst = "";

            // metric recovery from D and phi
            for (const bool use_phi : {false, true}) {
                const auto F = fn_of(Orientation::Primal, use_phi);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j) {
                        const double got = second_q_derivative(F, x0, x0, i, j, cfg.fd_step);
                        const double err = std::fabs(got - g(i, j)) / tol_g;
                        if (err > score) {
                            score = err;
                            worst = use_phi ? "metric(phi)" : "metric(D)";
                        }
                    }
            }

            // third derivatives: D and phi give -Gamma*_{ij,k}; the duals give -Gamma_{ij,k}
            struct ThirdCase {
                Orientation orient;
                bool phi_fn;
                bool expects_dual;
                const char* label;
            };
            const ThirdCase cases[] = {
                {Orientation::Primal, false, true, "third(D)"},
                {Orientation::Primal, true, true, "third(phi)"},
                {Orientation::Dual, false, false, "third(Dstar)"},
                {Orientation::Dual, true, false, "third(phistar)"},
            };
            for (const auto& c : cases) {
                const auto F = fn_of(c.orient, c.phi_fn);
                for (int i = 0; i < n; ++i)
                    for (int j = i; j < n; ++j)
                        for (int k = 0; k < n; ++k) {
                            const double got =
                                third_richardson(F, x0, i, j, k, cfg.fd_step_third);
                            const double want =
                                -(c.expects_dual ? gamma_d(i, j, k) : gamma_p(i, j, k));
                            const double err = std::fabs(got - want) / tol_gamma;
                            if (err > score) {
                                score = err;
                                worst = c.label;
                            }
                        }
            }

            // quartic Taylor remainder of D: log-log slope 4 +- 0.3
            {
                const auto F = fn_of(Orientation::Primal, false);
                std::vector<double> lx, ly;
                bool degenerate = false;
                for (int k = 0; k < 5; ++k) {
                    const double mag = 1e-2 * std::pow(10.0, k / 4.0);  // up to 1e-1
                    const Vec z = mag * slope_dir;
                    if (!m->contains(x0 + z, m->boundary_margin() + 1e-6)) continue;
                    double c2 = 0.0, c3 = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            c2 += 0.5 * g(i, j) * z[i] * z[j];
                            for (int kk = 0; kk < n; ++kk)
                                c3 += (2.0 * gamma_d(i, j, kk) + gamma_p(i, j, kk)) * z[i] *
                                      z[j] * z[kk] / 6.0;
                        }
                    const double rem = std::fabs(F(x0, x0 + z) - c2 - c3);
                    if (rem < 1e-13) {
                        degenerate = true;  // flat case: remainder at noise level
                        continue;
                    }
                    lx.push_back(std::log(mag));
                    ly.push_back(std::log(rem));
                }
                if (!degenerate && lx.size() >= 3) {
                    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
                    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
                    double num = 0.0, den = 0.0;
                    for (std::size_t t = 0; t < lx.size(); ++t) {
                        num += (lx[t] - mx) * (ly[t] - my);
                        den += (lx[t] - mx) * (lx[t] - mx);
                    }
                    const double slope = num / den;
                    const double err = std::fabs(slope - 4.0) / 0.3;
                    if (err > score) {
                        score = err;
                        worst = "taylor_slope(" + std::to_string(slope) + ")";
                    }
                }
            }

            SampleDetail d;
            d.index = s;
            d.p = coords_of(x0);
            d.residual = score;
            d.note = "";
            if (score > 1.0) d.note = "worst: " + worst;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(s, x0p, x0p, e.what()));
        }
    }
    rep.finalize(scheme.count);
    return rep;
}

CheckReport check_special_cases(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                const NumericsConfig& cfg) {
    if (!m->is_self_dual() && !m->is_dually_flat() && !m->is_symmetric_space())
        throw std::invalid_argument("manifold '" + m->name() +
                                    "' carries no special class tag; check not applicable");
    CheckReport rep;
    rep.name = "special_cases";
    rep.tolerance = tol;
    Rng rng(scheme.seed);
    const double radius = scheme.radius_for(*m);

    for (int i = 0; i < scheme.count; ++i) {
        const auto [p, q] = sample_pair(*m, rng, radius);
        try {
            double worst = 0.0;
            std::string which;
            const DivergenceValue D = canonical_divergence(m, p, q, Orientation::Primal, cfg);
            auto track = [&](double v, const char* label) {
                if (v > worst) {
                    worst = v;
                    which = label;
                }
            };
            if (m->is_self_dual()) {
                const double d = riemannian_distance(m, p, q, cfg);
                const DivergenceValue Ds =
                    canonical_divergence(m, p, q, Orientation::Dual, cfg);
                const DivergenceValue ph = phi(m, p, q, Orientation::Primal, cfg);
                const DivergenceValue r = pseudo_distance(m, p, q, cfg);
                track(std::fabs(D.value - 0.5 * d * d), "D vs d^2/2");
                track(std::fabs(ph.value - D.value), "phi vs D");
                track(std::fabs(r.value - D.value - Ds.value), "r vs D + D*");
            }
            if (m->is_dually_flat()) {
                const double breg = bregman_divergence(m, p, q);
                const DivergenceValue aa = ay_amari_divergence(m, p, q, cfg);
                const DivergenceValue Dqp =
                    canonical_divergence(m, q, p, Orientation::Primal, cfg);
                const DivergenceValue Dspq =
                    canonical_divergence(m, p, q, Orientation::Dual, cfg);
                track(std::fabs(D.value - breg), "D vs bregman");
                track(std::fabs(D.value - aa.value), "D vs ay-amari");
                track(std::fabs(Dspq.value - Dqp.value), "D*(p,q) vs D(q,p)");
            }
            if (m->is_symmetric_space()) {
                const DivergenceValue aa = ay_amari_divergence(m, p, q, cfg);
                const DivergenceValue wstar =
                    henmi_kobayashi(m, q, p, Orientation::Dual, cfg);
                track(std::fabs(D.value - aa.value), "D vs ay-amari");
                track(std::fabs(D.value - wstar.value), "D vs W*(q||p)");
            }
            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.q = coords_of(q.coords);
            d.residual = worst;
            if (worst > tol) d.note = "worst: " + which;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, q, e.what()));
        }
    }
    rep.finalize(scheme.count);
    return rep;
}

CheckReport check_energy_invariants(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                    const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "energy_invariants";
    rep.tolerance = tol;  // normalized sub-scores: constancy/1e-8, |L-r|/1e-7, isometry/1e-8
    Rng rng(scheme.seed);
    const double radius = scheme.radius_for(*m);

    for (int i = 0; i < scheme.count; ++i) {
        const auto [p, q] = sample_pair(*m, rng, radius);
        try {
            const double r = pseudo_distance(m, p, q, cfg).value;
            double score = 0.0;

            for (const Orientation o : {Orientation::Primal, Orientation::Dual}) {
                // L with orientation o is constant along the conjugate geodesic
                const ConnectionKind own = connection_of(o);
                const Curve carrier = geodesic_between(m, own.conjugate(), p, q, cfg);
                const Vec X = log_map(m, own, p, q, cfg).initial_velocity.components;
                const auto profile = transport_profile(*m, own, carrier, X);
                const auto& nodes = carrier.nodes();
                double lo = 1e300, hi = -1e300;
                for (std::size_t k = 0; k < nodes.size(); ++k) {
                    const Mat g = m->metric_at(Point(nodes[k].x));
                    const double val = g_inner(g, nodes[k].v, profile[k]);
                    lo = std::min(lo, val);
                    hi = std::max(hi, val);
                }
                score = std::max(score, (hi - lo) / 1e-8);
                const DivergenceValue L = pseudo_energy(m, carrier, o, q, cfg);
                score = std::max(score, std::fabs(L.value - r) / 1e-7);
            }

            // Lauritzen isometry along a seeded non-geodesic curve
            const Curve wiggly = seeded_cubic_path(m, p, q, rng, cfg.ode_steps);
            const int n = m->dim();
            const Tangent v{p, rng.unit_vector(n)};
            const Tangent w{p, rng.unit_vector(n)};
            const double dev = dual_isometry_deviation(*m, wiggly, v, w);
            score = std::max(score, dev / (1e-8 * std::max(1.0, wiggly.length())));

            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.q = coords_of(q.coords);
            d.residual = score;
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, q, e.what()));
        }
    }
    rep.finalize(scheme.count);
    return rep;
}

namespace {

struct LevelTrace {
    std::vector<Point> points;
    double level = 0.0;
};

/// Predictor-corrector trace of {q : F(q) = F(q0)} in a 2-d chart.
LevelTrace trace_level_curve(const Manifold& m, const std::function<double(const Point&)>& F,
                             const Point& q0, int npoints, double step, double fd_h) {
    LevelTrace trace;
    trace.level = F(q0);
    Point q = q0;
    Vec prev_tan = Vec::Zero(2);
    for (int k = 0; k < npoints; ++k) {
        trace.points.push_back(q);
        // chart gradient by central differences
        Vec grad(2);
        for (int i = 0; i < 2; ++i) {
            Vec qp = q.coords, qm = q.coords;
            qp[i] += fd_h;
            qm[i] -= fd_h;
            if (!m.contains(qp, m.boundary_margin()) || !m.contains(qm, m.boundary_margin()))
                throw LevelCurveTraceFailed("trace stencil left the domain");
            grad[i] = (F(Point(qp)) - F(Point(qm))) / (2.0 * fd_h);
        }
        const double gn = grad.norm();
        if (gn < 1e-12) throw LevelCurveTraceFailed("vanishing gradient along the level curve");
        Vec tan(2);
        tan[0] = -grad[1] / gn;
        tan[1] = grad[0] / gn;
        if (k > 0 && tan.dot(prev_tan) < 0.0) tan = -tan;
        prev_tan = tan;

        Vec next = q.coords + step * tan;
        // Newton corrector back onto the level along the gradient direction
        bool corrected = false;
        for (int c = 0; c < 8; ++c) {
            if (!m.contains(next, m.boundary_margin()))
                throw LevelCurveTraceFailed("trace left the domain");
            const double err = F(Point(next)) - trace.level;
            if (std::fabs(err) < 1e-11 * std::max(1.0, std::fabs(trace.level))) {
                corrected = true;
                break;
            }
            next -= (err / (gn * gn)) * grad;
        }
        if (!corrected) throw LevelCurveTraceFailed("corrector failed to return to the level");
        q = Point(next);
    }
    return trace;
}

}  // namespace

CheckReport check_symmetry_relations(ManifoldHandle m, const SampleScheme& scheme, double tol,
                                     const NumericsConfig& cfg) {
    if (m->dim() != 2)
        throw std::invalid_argument("symmetry-relation check requires a 2-d manifold");
    CheckReport rep;
    rep.name = "symmetry_relations";
    rep.tolerance = 1.0;  // constancy scores normalized by tol
    Rng rng(scheme.seed);
    const double radius = scheme.radius_for(*m);
    const Point p = sample_interior(*m, rng);

    auto Dstar_from_p = [&](const Point& Q) {
        return canonical_divergence(m, p, Q, Orientation::Dual, cfg).value;
    };

    try {
        const Vec dir = rng.unit_vector(2);
        const Point q1{Vec(p.coords + 0.55 * radius * dir)};
        const Point q2{Vec(p.coords + 0.8 * radius * dir)};
        m->require_valid(q1);
        m->require_valid(q2);

        const int npts = std::min(scheme.count, 32);
        const LevelTrace inner_trace =
            trace_level_curve(*m, Dstar_from_p, q1, npts, 0.02, cfg.fd_step);
        std::vector<double> Dqp, Phiqp;
        for (const Point& q : inner_trace.points) {
            Dqp.push_back(canonical_divergence(m, q, p, Orientation::Primal, cfg).value);
            Phiqp.push_back(phi(m, q, p, Orientation::Primal, cfg).value);
        }
        auto spread = [](const std::vector<double>& v) {
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi - *lo;
        };
        SampleDetail dd;
        dd.index = 0;
        dd.p = coords_of(p.coords);
        dd.residual = spread(Dqp) / tol;
        dd.note = "";
        rep.absorb(dd);
        SampleDetail dp;
        dp.index = 1;
        dp.p = coords_of(p.coords);
        dp.residual = spread(Phiqp) / tol;
        rep.absorb(dp);

        // local monotonicity: mean D(.,p) grows with the D*(p,.) level
        const LevelTrace outer_trace =
            trace_level_curve(*m, Dstar_from_p, q2, npts, 0.02, cfg.fd_step);
        double mean1 = std::accumulate(Dqp.begin(), Dqp.end(), 0.0) / Dqp.size();
        double mean2 = 0.0;
        for (const Point& q : outer_trace.points)
            mean2 += canonical_divergence(m, q, p, Orientation::Primal, cfg).value;
        mean2 /= outer_trace.points.size();
        SampleDetail mono;
        mono.index = 2;
        mono.p = {inner_trace.level, outer_trace.level, mean1, mean2};
        mono.residual = mean2 > mean1 ? 0.0 : 2.0;
        if (mono.residual > 1.0) mono.note = "level monotonicity violated";
        rep.absorb(mono);
    } catch (const Error& e) {
        rep.absorb(fail_detail(0, p, p, e.what()));
    }
    rep.finalize(3);
    return rep;
}

CheckReport check_condition_S(ManifoldHandle m, const SampleScheme& scheme, double tol,
                              const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "condition_S";
    rep.tolerance = 1.0;  // normalized: |R(X,Y,Y,Y)|/tol and |nabla R|/(10 tol)
    Rng rng(scheme.seed);
    const int n = m->dim();
    double min_rxyyy = 0.0;

    for (int i = 0; i < scheme.count; ++i) {
        const Point p = sample_interior(*m, rng);
        try {
            const Mat g = m->metric_at(p);
            const auto [up, down] = m->curvature_at(ConnectionKind::Primal(), p,
                                                    cfg.fd_step_christoffel);
            (void)up;
            Vec X = rng.unit_vector(n), Y = rng.unit_vector(n);
            X /= g_norm(g, X);
            Y /= g_norm(g, Y);
            double rxyyy = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d)
                            rxyyy += down(a, b, c, d) * X[a] * Y[b] * Y[c] * Y[d];
            min_rxyyy = std::min(min_rxyyy, rxyyy);

            // FD covariant derivative of R along a seeded direction
            const Vec dir = rng.unit_vector(n);
            const double h = 1e-3;
            if (!m->contains(p.coords + h * dir, m->boundary_margin() + 2e-3) ||
                !m->contains(p.coords - h * dir, m->boundary_margin() + 2e-3))
                throw FiniteDifferenceStencilOutOfDomain("nabla R stencil leaves domain");
            const auto [upp, Rp] = m->curvature_at(
                ConnectionKind::Primal(), Point(Vec(p.coords + h * dir)), cfg.fd_step_christoffel);
            const auto [upm, Rm] = m->curvature_at(
                ConnectionKind::Primal(), Point(Vec(p.coords - h * dir)), cfg.fd_step_christoffel);
            (void)upp;
            (void)upm;
            const Tensor3 G = m->gamma_second(ConnectionKind::Primal(), p);
            double nabla_r = 0.0;
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c)
                        for (int d = 0; d < n; ++d) {
                            double v = (Rp(a, b, c, d) - Rm(a, b, c, d)) / (2.0 * h);
                            for (int e = 0; e < n; ++e) {
                                double gdir_ae = 0.0, gdir_be = 0.0, gdir_ce = 0.0,
                                       gdir_de = 0.0;
                                for (int mm = 0; mm < n; ++mm) {
                                    gdir_ae += dir[mm] * G(e, mm, a);
                                    gdir_be += dir[mm] * G(e, mm, b);
                                    gdir_ce += dir[mm] * G(e, mm, c);
                                    gdir_de += dir[mm] * G(e, mm, d);
                                }
                                v -= gdir_ae * down(e, b, c, d) + gdir_be * down(a, e, c, d) +
                                     gdir_ce * down(a, b, e, d) + gdir_de * down(a, b, c, e);
                            }
                            nabla_r = std::max(nabla_r, std::fabs(v));
                        }

            SampleDetail d;
            d.index = i;
            d.p = coords_of(p.coords);
            d.residual = std::max(std::fabs(rxyyy) / tol, nabla_r / (10.0 * tol));
            d.note = "";
            rep.absorb(d);
        } catch (const Error& e) {
            rep.absorb(fail_detail(i, p, p, e.what()));
        }
    }
    SampleDetail sign;
    sign.index = scheme.count;
    sign.p = {min_rxyyy};
    sign.residual = 0.0;
    sign.note = min_rxyyy >= -tol ? "R(X,Y,Y,Y) >= 0 empirically (Prop. 7 sign condition)"
                                  : "R(X,Y,Y,Y) takes negative values";
    rep.absorb(sign);
    rep.finalize(scheme.count);
    return rep;
}

double probe_convex_radius(ManifoldHandle m, const Point& p, const NumericsConfig& cfg) {
    Rng rng(7);
    const int n = m->dim();
    double boundary = 1e300;
    for (int i = 0; i < n; ++i) {
        boundary = std::min(boundary, p.coords[i] - m->domain()[i][0]);
        boundary = std::min(boundary, m->domain()[i][1] - p.coords[i]);
    }
    double good = 0.0;
    double rho = 0.02 * boundary;
    while (rho < 0.95 * boundary) {
        bool ok = true;
        for (int trial = 0; trial < 6 && ok; ++trial) {
            const Vec a = p.coords + rng.in_ball(n, rho);
            const Vec b = p.coords + rng.in_ball(n, rho);
            if (!m->contains(a, m->boundary_margin()) || !m->contains(b, m->boundary_margin())) {
                ok = false;
                break;
            }
            for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::Dual()}) {
                try {
                    const ShootingResult r = log_map(m, kind, Point(a), Point(b), cfg);
                    if (r.final_gap > cfg.shooting_tol * 10.0) ok = false;
                } catch (const Error&) {
                    ok = false;
                }
                if (!ok) break;
            }
        }
        if (!ok) break;
        good = rho;
        rho *= 1.5;
    }
    return good;
}

// ---------------------------------------------------------------------------

std::vector<std::string> suite_names_for(const Manifold& m, bool all_only_applicable) {
    std::vector<std::string> names = {"duality", "curvature_duality", "grad_r", "level_sets",
                                      "decompositions", "eguchi", "energy"};
    if (!all_only_applicable) return names;
    if (m.is_self_dual() || m.is_dually_flat() || m.is_symmetric_space())
        names.push_back("special_cases");
    if (m.dim() == 2) names.push_back("symmetry");
    if (m.dim() >= 2) names.push_back("holonomy");
    // condition_s joins "all" only where (S) is expected to hold
    if (m.is_symmetric_space()) names.push_back("condition_s");
    return names;
}

std::vector<CheckReport> run_suite(ManifoldHandle m, const std::vector<std::string>& names,
                                   const SampleScheme& scheme, const NumericsConfig& cfg) {
    std::vector<CheckReport> out;
    for (const std::string& name : names) {
        Rng rng(scheme.seed);
        if (name == "grad_r") {
            out.push_back(check_grad_pseudo_distance(m, scheme, cfg.fd_step, 1e-4, cfg));
        } else if (name == "level_sets") {
            const Point p = sample_interior(*m, rng);
            const Vec dir = rng.unit_vector(m->dim());
            const double rad = 0.5 * scheme.radius_for(*m);
            const Point probe{Vec(p.coords + rad * dir)};
            const double kappa = pseudo_distance(m, p, probe, cfg).value;
            SampleScheme dirs = scheme;
            dirs.count = std::min(scheme.count, 8);
            out.push_back(check_level_set_orthogonality(m, p, kappa, dirs, 1e-3, cfg));
        } else if (name == "decompositions") {
            out.push_back(check_decompositions(m, scheme, 1e-3, cfg));
        } else if (name == "eguchi") {
            SampleScheme pts = scheme;
            pts.count = std::min(scheme.count, 2);
            out.push_back(check_eguchi_consistency(m, pts, 1e-4, 1e-3, cfg));
        } else if (name == "special_cases") {
            out.push_back(check_special_cases(m, scheme, 1e-6, cfg));
        } else if (name == "energy") {
            SampleScheme pts = scheme;
            pts.count = std::min(scheme.count, 20);
            out.push_back(check_energy_invariants(m, pts, 1.0, cfg));
        } else if (name == "symmetry") {
            out.push_back(check_symmetry_relations(m, scheme, 1e-3, cfg));
        } else if (name == "condition_s") {
            SampleScheme pts = scheme;
            pts.count = std::min(scheme.count, 10);
            out.push_back(check_condition_S(m, pts, 1e-4, cfg));
        } else if (name == "duality") {
            CheckReport rep;
            rep.name = "duality";
            rep.tolerance = 1e-7;
            for (int i = 0; i < std::min(scheme.count, 20); ++i) {
                const Point p = sample_interior(*m, rng);
                CheckReport one = m->check_duality_relation(p, 1e-5, 1e-7);
                SampleDetail d = one.details.front();
                d.index = i;
                rep.absorb(d);
            }
            rep.finalize(std::min(scheme.count, 20));
            out.push_back(rep);
        } else if (name == "curvature_duality") {
            CheckReport rep;
            rep.name = "curvature_duality";
            rep.tolerance = 1e-5;
            for (int i = 0; i < std::min(scheme.count, 10); ++i) {
                const Point p = sample_interior(*m, rng);
                CheckReport one = m->check_curvature_duality(p, 1e-5, cfg.fd_step_christoffel);
                SampleDetail d = one.details.front();
                d.index = i;
                rep.absorb(d);
            }
            rep.finalize(std::min(scheme.count, 10));
            out.push_back(rep);
        } else if (name == "holonomy") {
            const Point p = sample_interior(*m, rng);
            const int n = m->dim();
            const Tangent x{p, rng.unit_vector(n)};
            Vec ycomp = rng.unit_vector(n);
            // keep x and y well-conditioned as a 2-frame
            ycomp -= ycomp.dot(x.components) * x.components;
            const Tangent y{p, Vec(ycomp.normalized())};
            const Tangent z{p, rng.unit_vector(n)};
            out.push_back(holonomy_curvature_check(m, p, x, y, z, 0.05, cfg));
        } else {
            throw SpecError("unknown verification suite: " + name);
        }
    }
    return out;
}

}  // namespace igdiv
