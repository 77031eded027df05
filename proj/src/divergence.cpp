#include "igdiv/divergence.hpp"

#include "igdiv/quadrature.hpp"
#include "igdiv/transport.hpp"

#include <cmath>
#include <optional>

namespace igdiv {

namespace {

bool coincident(const Point& p, const Point& q) {
    return (p.coords - q.coords).norm() < 1e-12;
}

double inner(const Mat& g, const Vec& a, const Vec& b) { return a.transpose() * g * b; }

/// Evaluate a quadrature functional at the requested order and at half the
/// order; the difference is the reported error estimate. The integrand is
/// re-evaluated per rule so each pass can warm-start its own solver state.
DivergenceValue quad_with_estimate(int order,
                                   const std::function<double(const QuadRule&)>& run) {
    DivergenceValue out;
    out.quadrature_order = order;
    const double coarse = run(gauss_legendre(std::max(2, order / 2)));
    const double fine = run(gauss_legendre(order));
    out.value = fine;
    out.est_error = std::fabs(fine - coarse);
    return out;
}

/// Warm-started inner BVP: the solution of log(p, target(t)) varies smoothly
/// with the node parameter, so each solve starts from the previous solution
/// rescaled by the parameter ratio.
class WarmLog {
  public:
    WarmLog(ManifoldHandle m, ConnectionKind kind, const NumericsConfig& cfg)
        : m_(std::move(m)), kind_(kind), cfg_(cfg) {}

    Tangent solve(const Point& base, const Point& target, double t, double scale_hint) {
        std::optional<Vec> guess;
        if (have_prev_ && prev_hint_ != 0.0 && scale_hint != 0.0)
            guess = Vec(prev_v_ * (scale_hint / prev_hint_));
        ShootingResult r =
            log_map_guess(m_, kind_, base, target, cfg_, guess ? &*guess : nullptr);
        prev_v_ = r.initial_velocity.components;
        prev_hint_ = scale_hint;
        have_prev_ = true;
        (void)t;
        return r.initial_velocity;
    }

  private:
    ManifoldHandle m_;
    ConnectionKind kind_;
    NumericsConfig cfg_;
    Vec prev_v_;
    double prev_hint_ = 0.0;
    bool have_prev_ = false;
};

}  // namespace

std::pair<Tangent, Tangent> pi_vectors(ManifoldHandle m, const Point& p, const Point& q,
                                       const NumericsConfig& cfg) {
    const auto primal = ConnectionKind::Primal();
    const auto dual = ConnectionKind::Dual();
    const Tangent Xp = log_map(m, primal, p, q, cfg).initial_velocity;
    const Tangent Xs = log_map(m, dual, p, q, cfg).initial_velocity;
    if (coincident(p, q)) {
        return {Tangent{q, Vec(Vec::Zero(m->dim()))}, Tangent{q, Vec(Vec::Zero(m->dim()))}};
    }
    const Curve sigma_star = shoot(m, dual, p, Xs, cfg.ode_steps);
    const Curve sigma = shoot(m, primal, p, Xp, cfg.ode_steps);
    Tangent Pi = transport_along(*m, primal, sigma_star, Xp);
    Tangent PiStar = transport_along(*m, dual, sigma, Xs);
    Pi.base = q;
    PiStar.base = q;
    return {Pi, PiStar};
}

DivergenceValue pseudo_distance(ManifoldHandle m, const Point& p, const Point& q,
                                const NumericsConfig& cfg) {
    DivergenceValue out;
    if (coincident(p, q)) return out;
    const Tangent Xp = log_map(m, ConnectionKind::Primal(), p, q, cfg).initial_velocity;
    const Tangent Xs = log_map(m, ConnectionKind::Dual(), p, q, cfg).initial_velocity;
    out.value = inner(m->metric_at(p), Xp.components, Xs.components);
    return out;
}

DivergenceValue pseudo_energy(ManifoldHandle m, const Curve& c, Orientation orient,
                              const Point& anchor_q, const NumericsConfig& cfg) {
    const Point p = c.start();
    if ((c.end().coords - anchor_q.coords).norm() > 1e-6)
        throw CurveInvalid("pseudo_energy: curve does not end at anchor_q");
    if (coincident(p, anchor_q) && c.length() < 1e-12) return {};
    const ConnectionKind kind = connection_of(orient);
    const Vec X = log_map(m, kind, p, anchor_q, cfg).initial_velocity.components;

    // transported field P_t X at the carrier nodes, Hermite-interpolated
    const auto profile = transport_profile(*m, kind, c, X);
    const auto& nodes = c.nodes();
    auto field_at = [&](double t) -> Vec {
        std::size_t i = 0;
        while (i + 2 < nodes.size() && nodes[i + 1].t < t) ++i;
        const double h = nodes[i + 1].t - nodes[i].t;
        const double s = (t - nodes[i].t) / h;
        auto deriv = [&](std::size_t k) -> Vec {
            const Tensor3 G = m->gamma_second(kind, Point(nodes[k].x));
            const int n = G.n;
            Vec d(n);
            for (int a = 0; a < n; ++a) {
                double acc = 0.0;
                for (int b = 0; b < n; ++b)
                    for (int e = 0; e < n; ++e) acc += G(a, b, e) * nodes[k].v[b] * profile[k][e];
                d[a] = -acc;
            }
            return d;
        };
        const Vec d0 = deriv(i), d1 = deriv(i + 1);
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * profile[i] + (s3 - 2 * s2 + s) * h * d0 +
               (-2 * s3 + 3 * s2) * profile[i + 1] + (s3 - s2) * h * d1;
    };

    return quad_with_estimate(cfg.quad_order, [&](const QuadRule& rule) {
        return integrate(rule, [&](double t) {
            const Vec x = c.position(t);
            const Vec v = c.velocity(t);
            return inner(m->metric_at(Point(x)), v, field_at(t));
        });
    });
}

DivergenceValue canonical_divergence(ManifoldHandle m, const Point& p, const Point& q,
                                     Orientation orient, const NumericsConfig& cfg) {
    if (coincident(p, q)) return {0.0, 0, 0.0};
    const ConnectionKind own = connection_of(orient);
    const ConnectionKind conj = own.conjugate();

    const Curve sigma = geodesic_between(m, own, p, q, cfg);
    const Vec v0 = sigma.velocity_start().components;

    auto run = [&](const QuadRule& rule) {
        WarmLog inner_bvp(m, conj, cfg);
        double acc = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double t = rule.nodes[k];
            const Point st{sigma.position(t)};
            // the inner log along sigma's own connection is exactly t*v0
            const Vec X = t * v0;
            const Tangent w = inner_bvp.solve(p, st, t, t);
            const Curve conj_geo = shoot(m, conj, p, w, cfg.ode_steps);
            const Tangent Pi = transport_along(*m, own, conj_geo, Tangent{p, X});
            const Vec vel = sigma.velocity(t);
            acc += rule.weights[k] * inner(m->metric_at(st), Pi.components, vel);
        }
        return acc;
    };
    return quad_with_estimate(cfg.quad_order, run);
}

DivergenceValue phi(ManifoldHandle m, const Point& p, const Point& q, Orientation orient,
                    const NumericsConfig& cfg) {
    if (coincident(p, q)) return {0.0, 0, 0.0};
    const ConnectionKind own = connection_of(orient);
    const ConnectionKind conj = own.conjugate();

    const Curve sigma_conj = geodesic_between(m, conj, p, q, cfg);
    const Vec Xconj = sigma_conj.velocity_start().components;
    const Mat gp = m->metric_at(p);

    auto run = [&](const QuadRule& rule) {
        WarmLog own_log(m, own, cfg);
        double acc = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double t = rule.nodes[k];
            const Point st{sigma_conj.position(t)};
            const Tangent I = own_log.solve(p, st, t, t);
            acc += rule.weights[k] * inner(gp, I.components, Xconj);
        }
        return acc;
    };
    return quad_with_estimate(cfg.quad_order, run);
}

DivergenceValue phi_direct(ManifoldHandle m, const Point& p, const Point& q, Orientation orient,
                           const NumericsConfig& cfg) {
    if (coincident(p, q)) return {0.0, 0, 0.0};
    const ConnectionKind own = connection_of(orient);
    const ConnectionKind conj = own.conjugate();

    const Curve sigma_conj = geodesic_between(m, conj, p, q, cfg);
    const Vec Xconj = sigma_conj.velocity_start().components;

    auto run = [&](const QuadRule& rule) {
        WarmLog own_log(m, own, cfg);
        double acc = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double t = rule.nodes[k];
            const Point st{sigma_conj.position(t)};
            const Tangent u = own_log.solve(p, st, t, t);
            // sigma*_t is the reparameterized sub-geodesic exp_conj(p, s t X*)
            const Curve leg = shoot(m, conj, p, Tangent{p, Vec(t * Xconj)}, cfg.ode_steps);
            const Tangent Pi = transport_along(*m, own, leg, u);
            const Vec vel = sigma_conj.velocity(t);
            acc += rule.weights[k] * inner(m->metric_at(st), Pi.components, vel);
        }
        return acc;
    };
    return quad_with_estimate(cfg.quad_order, run);
}

Vec legendre_invert(const Manifold& m, const Vec& eta) {
    const Potential& pot = m.potential();
    const int n = m.dim();
    const auto& box = m.domain();
    const double tol = 1e-12;

    Vec theta(n);
    for (int i = 0; i < n; ++i) theta[i] = 0.5 * (box[i][0] + box[i][1]);

    if (n == 1) {
        // bisection bracket (the gradient map is strictly increasing), then
        // Newton with the bracket as a safeguard
        double lo = box[0][0] + m.boundary_margin();
        double hi = box[0][1] - m.boundary_margin();
        auto gval = [&](double x) {
            Vec v(1);
            v[0] = x;
            return pot.grad(v)[0] - eta[0];
        };
        double flo = gval(lo), fhi = gval(hi);
        if (flo > 0.0 || fhi < 0.0)
            throw GradientInversionFailed("eta outside the gradient-map range on the domain");
        double x = theta[0];
        for (int it = 0; it < 200; ++it) {
            const double f = gval(x);
            if (std::fabs(f) <= tol) {
                theta[0] = x;
                return theta;
            }
            if (f > 0.0)
                hi = x;
            else
                lo = x;
            Vec v(1);
            v[0] = x;
            const double d = pot.hess(v)(0, 0);
            double next = x - f / d;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            x = next;
        }
        throw GradientInversionFailed("1-d gradient inversion did not converge");
    }

    for (int it = 0; it < 200; ++it) {
        const Vec f = pot.grad(theta) - eta;
        if (f.cwiseAbs().maxCoeff() <= tol) return theta;
        const Mat H = pot.hess(theta);
        const Vec step = H.fullPivLu().solve(f);
        double lambda = 1.0;
        bool moved = false;
        const double f0 = f.norm();
        for (int halvings = 0; halvings < 30; ++halvings) {
            Vec trial = theta - lambda * step;
            if (m.contains(trial, m.boundary_margin())) {
                if ((pot.grad(trial) - eta).norm() < f0) {
                    theta = trial;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!moved) throw GradientInversionFailed("Newton stalled inverting the gradient map");
    }
    throw GradientInversionFailed("gradient inversion did not converge");
}

double bregman_divergence(ManifoldHandle m, const Point& p, const Point& q) {
    const Potential& pot = m->potential();  // throws NotHessianManifold
    m->require_valid(p);
    m->require_valid(q);
    if (coincident(p, q)) return 0.0;
    const Vec eta_q = pot.grad(q.coords);
    const Vec theta_eta = legendre_invert(*m, eta_q);
    const double phi_star = theta_eta.dot(eta_q) - pot.value(theta_eta);
    return pot.value(p.coords) + phi_star - p.coords.dot(eta_q);
}

DivergenceValue ay_amari_divergence(ManifoldHandle m, const Point& p, const Point& q,
                                    const NumericsConfig& cfg) {
    if (coincident(p, q)) return {0.0, 0, 0.0};
    const Curve sigma = geodesic_between(m, ConnectionKind::Primal(), p, q, cfg);
    return quad_with_estimate(cfg.quad_order, [&](const QuadRule& rule) {
        return integrate(rule, [&](double t) {
            const Vec x = sigma.position(t);
            const Vec v = sigma.velocity(t);
            return t * inner(m->metric_at(Point(x)), v, v);
        });
    });
}

DivergenceValue henmi_kobayashi(ManifoldHandle m, const Point& p, const Point& q,
                                Orientation orient, const NumericsConfig& cfg) {
    if (coincident(p, q)) return {0.0, 0, 0.0};
    const ConnectionKind own = connection_of(orient);
    const ConnectionKind conj = own.conjugate();

    // work path runs from q to p; the force field stays anchored at q
    const Curve gamma = geodesic_between(m, own, q, p, cfg);

    auto run = [&](const QuadRule& rule) {
        WarmLog force(m, conj, cfg);
        double acc = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double t = rule.nodes[k];
            const Point gt{gamma.position(t)};
            // the force magnitude grows like t: gamma(0) = q is the anchor
            const Tangent X = force.solve(gt, q, t, t);
            const Vec vel = gamma.velocity(t);
            acc += rule.weights[k] * inner(m->metric_at(gt), vel, X.components);
        }
        return -acc;
    };
    return quad_with_estimate(cfg.quad_order, run);
}

double standard_divergence(ManifoldHandle m, const Point& p, const Point& q,
                           const NumericsConfig& cfg) {
    if (coincident(p, q)) return 0.0;
    const Tangent Xp = log_map(m, ConnectionKind::Primal(), p, q, cfg).initial_velocity;
    return inner(m->metric_at(p), Xp.components, Xp.components);
}

Tangent grad_divergence(ManifoldHandle m, const DivergenceFn& f, const Point& p, const Point& q,
                        double h) {
    const int n = m->dim();
    Vec df(n);
    for (int i = 0; i < n; ++i) {
        Vec qp = q.coords, qm = q.coords;
        qp[i] += h;
        qm[i] -= h;
        if (!m->contains(qp, m->boundary_margin()) || !m->contains(qm, m->boundary_margin()))
            throw FiniteDifferenceStencilOutOfDomain("gradient stencil leaves the domain");
        df[i] = (f(p, Point(qp)) - f(p, Point(qm))) / (2.0 * h);
    }
    const Mat g = m->metric_at(q);
    return {q, Vec(g.fullPivLu().solve(df))};
}

DivergenceValue pi_sum_path_integral(ManifoldHandle m, const Curve& gamma,
                                     const NumericsConfig& cfg) {
    const Point p = gamma.start();
    const auto primal = ConnectionKind::Primal();
    const auto dual = ConnectionKind::Dual();

    auto run = [&](const QuadRule& rule) {
        WarmLog log_p(m, primal, cfg);
        WarmLog log_d(m, dual, cfg);
        double acc = 0.0;
        for (int k = 0; k < rule.order(); ++k) {
            const double t = rule.nodes[k];
            const Point gt{gamma.position(t)};
            const Tangent Xp = log_p.solve(p, gt, t, t);
            const Tangent Xd = log_d.solve(p, gt, t, t);
            const Curve geo_d = shoot(m, dual, p, Xd, cfg.ode_steps);
            const Curve geo_p = shoot(m, primal, p, Xp, cfg.ode_steps);
            const Tangent Pi = transport_along(*m, primal, geo_d, Xp);
            const Tangent PiStar = transport_along(*m, dual, geo_p, Xd);
            const Vec vel = gamma.velocity(t);
            const Mat g = m->metric_at(gt);
            acc += rule.weights[k] *
                   (inner(g, Pi.components, vel) + inner(g, PiStar.components, vel));
        }
        return acc;
    };
    return quad_with_estimate(cfg.quad_order, run);
}

// --- CLI-facing selector ------------------------------------------------------

Quantity quantity_from_name(const std::string& name) {
    if (name == "D") return Quantity::CanonicalD;
    if (name == "Dstar") return Quantity::CanonicalDstar;
    if (name == "phi") return Quantity::Phi;
    if (name == "phistar") return Quantity::PhiStar;
    if (name == "r") return Quantity::PseudoDistance;
    if (name == "ayamari") return Quantity::AyAmari;
    if (name == "bregman") return Quantity::Bregman;
    if (name == "henmiW") return Quantity::HenmiW;
    if (name == "henmiWstar") return Quantity::HenmiWstar;
    if (name == "standard") return Quantity::Standard;
    if (name == "distance") return Quantity::Distance;
    throw SpecError("unknown quantity: " + name);
}

std::string quantity_name(Quantity q) {
    switch (q) {
        case Quantity::CanonicalD: return "D";
        case Quantity::CanonicalDstar: return "Dstar";
        case Quantity::Phi: return "phi";
        case Quantity::PhiStar: return "phistar";
        case Quantity::PseudoDistance: return "r";
        case Quantity::AyAmari: return "ayamari";
        case Quantity::Bregman: return "bregman";
        case Quantity::HenmiW: return "henmiW";
        case Quantity::HenmiWstar: return "henmiWstar";
        case Quantity::Standard: return "standard";
        case Quantity::Distance: return "distance";
    }
    return "?";
}

DivergenceValue evaluate_quantity(ManifoldHandle m, Quantity which, const Point& p,
                                  const Point& q, const NumericsConfig& cfg) {
    switch (which) {
        case Quantity::CanonicalD: return canonical_divergence(m, p, q, Orientation::Primal, cfg);
        case Quantity::CanonicalDstar:
            return canonical_divergence(m, p, q, Orientation::Dual, cfg);
        case Quantity::Phi: return phi(m, p, q, Orientation::Primal, cfg);
        case Quantity::PhiStar: return phi(m, p, q, Orientation::Dual, cfg);
        case Quantity::PseudoDistance: return pseudo_distance(m, p, q, cfg);
        case Quantity::AyAmari: return ay_amari_divergence(m, p, q, cfg);
        case Quantity::Bregman: return {bregman_divergence(m, p, q), 0, 0.0};
        case Quantity::HenmiW: return henmi_kobayashi(m, p, q, Orientation::Primal, cfg);
        case Quantity::HenmiWstar: return henmi_kobayashi(m, p, q, Orientation::Dual, cfg);
        case Quantity::Standard: return {standard_divergence(m, p, q, cfg), 0, 0.0};
        case Quantity::Distance: return {riemannian_distance(m, p, q, cfg), 0, 0.0};
    }
    throw SpecError("unhandled quantity");
}

}  // namespace igdiv
