#include "igdiv/geodesic.hpp"

#include "igdiv/quadrature.hpp"

#include <cmath>
#include <optional>

namespace igdiv {

namespace {

/// Geodesic RHS acceleration a^k = -Gamma^k_ij v^i v^j.
Vec acceleration(const Tensor3& G, const Vec& v) {
    const int n = G.n;
    Vec a(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += G(k, i, j) * v[i] * v[j];
        a[k] = -s;
    }
    return a;
}

struct State {
    Vec x, v;
};

State rk4_step(const Manifold& m, const ConnectionKind& kind, const State& y, double h,
               double t_for_error) {
    auto rhs = [&](const State& s) -> State {
        if (!m.contains(s.x, m.boundary_margin()))
            throw TrajectoryLeftDomain("geodesic left the domain of '" + m.name() + "'",
                                       t_for_error);
        const Tensor3 G = m.gamma_second(kind, Point(s.x));
        return {s.v, acceleration(G, s.v)};
    };
    const State k1 = rhs(y);
    const State k2 = rhs({y.x + 0.5 * h * k1.x, y.v + 0.5 * h * k1.v});
    const State k3 = rhs({y.x + 0.5 * h * k2.x, y.v + 0.5 * h * k2.v});
    const State k4 = rhs({y.x + h * k3.x, y.v + h * k3.v});
    return {y.x + (h / 6.0) * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            y.v + (h / 6.0) * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v)};
}

int segment_of(const std::vector<CurveNode>& nodes, double t) {
    // grids are usually uniform, but concatenated curves may not be
    const int m = static_cast<int>(nodes.size()) - 1;
    int i = static_cast<int>(std::floor(t * m));
    if (i < 0) i = 0;
    if (i >= m) i = m - 1;
    if (nodes[i].t <= t && t <= nodes[i + 1].t) return i;
    int lo = 0, hi = m - 1;
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (nodes[mid + 1].t < t)
            lo = mid + 1;
        else
            hi = mid;
    }
    return lo;
}

}  // namespace

Curve::Curve(ManifoldHandle m, ConnectionKind kind, std::vector<CurveNode> nodes)
    : manifold_(std::move(m)), kind_(kind), nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw CurveInvalid("curve needs at least two nodes");
    if (std::fabs(nodes_.front().t) > 1e-12 || std::fabs(nodes_.back().t - 1.0) > 1e-12)
        throw CurveInvalid("curve parameter must span [0,1]");
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (!(nodes_[i].t > nodes_[i - 1].t)) throw CurveInvalid("curve nodes must be increasing in t");
}

namespace {

// quintic Hermite basis (values/derivatives/second derivatives at s=0,1)
struct QuinticWeights {
    double w[6];
};

QuinticWeights quintic_value(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    return {{1 - 10 * s3 + 15 * s4 - 6 * s5, s - 6 * s3 + 8 * s4 - 3 * s5,
             0.5 * (s2 - 3 * s3 + 3 * s4 - s5), 10 * s3 - 15 * s4 + 6 * s5,
             -4 * s3 + 7 * s4 - 3 * s5, 0.5 * (s3 - 2 * s4 + s5)}};
}

QuinticWeights quintic_deriv(double s) {
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    return {{-30 * s2 + 60 * s3 - 30 * s4, 1 - 18 * s2 + 32 * s3 - 15 * s4,
             0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4), 30 * s2 - 60 * s3 + 30 * s4,
             -12 * s2 + 28 * s3 - 15 * s4, 0.5 * (3 * s2 - 8 * s3 + 5 * s4)}};
}

QuinticWeights quintic_second(double s) {
    const double s2 = s * s, s3 = s2 * s;
    return {{-60 * s + 180 * s2 - 120 * s3, -36 * s + 96 * s2 - 60 * s3,
             0.5 * (2 - 18 * s + 36 * s2 - 20 * s3), 60 * s - 180 * s2 + 120 * s3,
             -24 * s + 84 * s2 - 60 * s3, 0.5 * (6 * s - 24 * s2 + 20 * s3)}};
}

Vec hermite_combine(const CurveNode& a, const CurveNode& b, double h, const QuinticWeights& w,
                    double scale) {
    return scale * (w.w[0] * a.x + (w.w[1] * h) * a.v + (w.w[2] * h * h) * a.a + w.w[3] * b.x +
                    (w.w[4] * h) * b.v + (w.w[5] * h * h) * b.a);
}

}  // namespace

Vec Curve::position(double t) const {
    if (t < -1e-12 || t > 1.0 + 1e-12) throw CurveInvalid("curve evaluated outside [0,1]");
    t = std::min(1.0, std::max(0.0, t));
    const int i = segment_of(nodes_, t);
    const CurveNode& a = nodes_[i];
    const CurveNode& b = nodes_[i + 1];
    const double h = b.t - a.t;
    return hermite_combine(a, b, h, quintic_value((t - a.t) / h), 1.0);
}

Vec Curve::velocity(double t) const {
    if (t < -1e-12 || t > 1.0 + 1e-12) throw CurveInvalid("curve evaluated outside [0,1]");
    t = std::min(1.0, std::max(0.0, t));
    const int i = segment_of(nodes_, t);
    const CurveNode& a = nodes_[i];
    const CurveNode& b = nodes_[i + 1];
    const double h = b.t - a.t;
    return hermite_combine(a, b, h, quintic_deriv((t - a.t) / h), 1.0 / h);
}

Vec Curve::acceleration(double t) const {
    if (t < -1e-12 || t > 1.0 + 1e-12) throw CurveInvalid("curve evaluated outside [0,1]");
    t = std::min(1.0, std::max(0.0, t));
    const int i = segment_of(nodes_, t);
    const CurveNode& a = nodes_[i];
    const CurveNode& b = nodes_[i + 1];
    const double h = b.t - a.t;
    return hermite_combine(a, b, h, quintic_second((t - a.t) / h), 1.0 / (h * h));
}

Curve Curve::reversed() const {
    std::vector<CurveNode> rev(nodes_.size());
    const std::size_t n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const CurveNode& src = nodes_[n - 1 - i];
        rev[i] = {1.0 - src.t, src.x, -src.v, src.a};
    }
    return Curve(manifold_, kind_, std::move(rev));
}

double Curve::length(int quad_order) const {
    const QuadRule& rule = gauss_legendre(quad_order);
    return integrate(rule, [&](double t) {
        const Vec x = position(t);
        const Vec v = velocity(t);
        const Mat g = manifold_->metric_at(Point(x));
        return std::sqrt(std::max(0.0, double(v.transpose() * g * v)));
    });
}

Curve Curve::from_path(ManifoldHandle m, ConnectionKind kind, const std::function<Vec(double)>& pos,
                       int steps, const std::function<Vec(double)>* vel) {
    std::vector<CurveNode> nodes(steps + 1);
    const double fd = 1e-5;
    auto velocity_at = [&](double t) -> Vec {
        if (vel) return (*vel)(t);
        const double tp = std::min(1.0, t + fd), tm = std::max(0.0, t - fd);
        return (pos(tp) - pos(tm)) / (tp - tm);
    };
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const double tp = std::min(1.0, t + fd), tm = std::max(0.0, t - fd);
        const Vec acc = (velocity_at(tp) - velocity_at(tm)) / (tp - tm);
        nodes[i] = {t, pos(t), velocity_at(t), acc};
        m->require_valid(Point(nodes[i].x));
    }
    return Curve(std::move(m), kind, std::move(nodes));
}

Curve Curve::concat(const Curve& a, const Curve& b) {
    if ((a.end().coords - b.start().coords).norm() > 1e-9)
        throw CurveInvalid("concat: curves do not share a junction point");
    std::vector<CurveNode> nodes;
    nodes.reserve(a.nodes_.size() + b.nodes_.size());
    for (const auto& n : a.nodes_) nodes.push_back({0.5 * n.t, n.x, 2.0 * n.v, 4.0 * n.a});
    // velocity is one-sided at the junction; keep both limits, separated by a
    // parameter sliver so no interpolation segment mixes the two legs
    for (std::size_t i = 0; i < b.nodes_.size(); ++i) {
        const double t = i == 0 ? 0.5 + 1e-9 : 0.5 + 0.5 * b.nodes_[i].t;
        nodes.push_back({t, b.nodes_[i].x, 2.0 * b.nodes_[i].v, 4.0 * b.nodes_[i].a});
    }
    return Curve(a.manifold_, a.kind_, std::move(nodes));
}

double geodesic_residual(const Curve& c, int probes) {
    const auto& nodes = c.nodes();
    const int nseg = static_cast<int>(nodes.size()) - 1;
    double worst = 0.0;
    for (int k = 0; k < probes; ++k) {
        const int seg = (k * nseg) / probes;
        const double t = 0.5 * (nodes[seg].t + nodes[seg + 1].t);
        const Vec x = c.position(t);
        const Vec v = c.velocity(t);
        const Vec acc = c.acceleration(t);
        const Tensor3 G = c.manifold().gamma_second(c.kind(), Point(x));
        worst = std::max(worst, (acc - acceleration(G, v)).norm());
    }
    return worst;
}

Curve shoot(ManifoldHandle m, const ConnectionKind& kind, const Point& p, const Tangent& v,
            int steps) {
    if (steps < 2) throw StepCountTooSmall("shoot needs at least 2 steps");
    if (v.dim() != m->dim()) throw CurveInvalid("tangent dimension mismatch");
    if ((v.base.coords - p.coords).norm() > 1e-12) throw CurveInvalid("tangent not based at p");
    m->require_valid(p);
    std::vector<CurveNode> nodes(steps + 1);
    State y{p.coords, v.components};
    auto accel_of = [&](const State& s) {
        return acceleration(m->gamma_second(kind, Point(s.x)), s.v);
    };
    nodes[0] = {0.0, y.x, y.v, accel_of(y)};
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        y = rk4_step(*m, kind, y, h, t);
        if (!m->contains(y.x, m->boundary_margin()))
            throw TrajectoryLeftDomain("geodesic left the domain of '" + m->name() + "'",
                                       t + h);
        nodes[i + 1] = {static_cast<double>(i + 1) / steps, y.x, y.v, accel_of(y)};
    }
    Curve c(std::move(m), kind, std::move(nodes));
    const double scale = std::max(1.0, v.components.squaredNorm());
    if (geodesic_residual(c) > 1e-6 * scale)
        throw StepCountTooSmall("geodesic-equation residual exceeds 1e-6; increase ode_steps");
    return c;
}

namespace {

/// Endpoint of exp_p(w), or nothing if the trajectory leaves the domain.
std::optional<Vec> try_endpoint(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                                const Vec& w, int steps) {
    try {
        return shoot(m, kind, p, Tangent{p, w}, steps).end().coords;
    } catch (const TrajectoryLeftDomain&) {
        return std::nullopt;
    }
}

ShootingResult newton_shoot(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                            const Point& q, const NumericsConfig& cfg, Vec w,
                            bool allow_continuation) {
    const int n = m->dim();
    int iters = 0;

    auto residual = [&](const Vec& trial) -> std::optional<Vec> {
        auto e = try_endpoint(m, kind, p, trial, cfg.ode_steps);
        if (!e) return std::nullopt;
        return Vec(*e - q.coords);
    };

    // scale the initial guess back until the trajectory stays in the domain
    std::optional<Vec> F = residual(w);
    for (int back = 0; !F && back < 60; ++back) {
        w *= 0.5;
        F = residual(w);
    }
    if (!F) throw ShootingDiverged("shooting could not find an in-domain initial segment");

    double gap = F->norm();
    while (gap > cfg.shooting_tol && iters < cfg.shooting_max_iters) {
        ++iters;
        // forward-difference Jacobian dF/dw
        Eigen::MatrixXd J(n, n);
        const double hj = cfg.fd_jacobian_step;
        bool jacobian_ok = true;
        for (int c = 0; c < n; ++c) {
            Vec wc = w;
            wc[c] += hj;
            auto Fc = residual(wc);
            if (!Fc) {
                wc = w;
                wc[c] -= hj;
                Fc = residual(wc);
                if (!Fc) {
                    jacobian_ok = false;
                    break;
                }
                J.col(c) = (*F - *Fc) / hj;
            } else {
                J.col(c) = (*Fc - *F) / hj;
            }
        }
        if (!jacobian_ok) break;
        const Eigen::VectorXd delta = J.partialPivLu().solve(-Eigen::VectorXd(*F));
        if (!delta.allFinite()) break;

        // damping by halving until the gap decreases
        double lambda = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 12; ++halvings) {
            const Vec trial = w + lambda * Vec(delta);
            if (auto Ft = residual(trial)) {
                if (Ft->norm() < gap) {
                    w = trial;
                    F = Ft;
                    gap = Ft->norm();
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }

    if (gap > cfg.shooting_tol) {
        if (allow_continuation) {
            // continuation fallback: solve for the chart midpoint first, then
            // re-target q from the scaled solution
            const Point mid{Vec(0.5 * (p.coords + q.coords))};
            if (m->contains(mid.coords, m->boundary_margin())) {
                ShootingResult half = newton_shoot(m, kind, p, mid, cfg,
                                                   Vec(0.5 * (q.coords - p.coords)), false);
                ShootingResult full = newton_shoot(m, kind, p, q, cfg,
                                                   Vec(2.0 * half.initial_velocity.components),
                                                   false);
                full.iterations += half.iterations + iters;
                return full;
            }
        }
        throw ShootingDiverged("shooting did not converge (gap " + std::to_string(gap) + ")");
    }
    return {Tangent{p, w}, iters, gap};
}

}  // namespace

ShootingResult log_map_guess(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                             const Point& q, const NumericsConfig& cfg, const Vec* guess) {
    m->require_valid(p);
    m->require_valid(q);
    const Vec diff = q.coords - p.coords;
    if (diff.norm() < 1e-12) {
        // degenerate input: zero tangent, no solve
        return {Tangent{p, Vec(Vec::Zero(m->dim()))}, 0, 0.0};
    }
    return newton_shoot(m, kind, p, q, cfg, guess ? *guess : diff, true);
}

ShootingResult log_map(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                       const Point& q, const NumericsConfig& cfg) {
    return log_map_guess(std::move(m), kind, p, q, cfg, nullptr);
}

Curve geodesic_between(ManifoldHandle m, const ConnectionKind& kind, const Point& p,
                       const Point& q, const NumericsConfig& cfg) {
    const ShootingResult r = log_map(m, kind, p, q, cfg);
    return shoot(std::move(m), kind, p, r.initial_velocity, cfg.ode_steps);
}

double riemannian_distance(ManifoldHandle m, const Point& p, const Point& q,
                           const NumericsConfig& cfg) {
    const ShootingResult r = log_map(m, ConnectionKind::LeviCivita(), p, q, cfg);
    const Mat g = m->metric_at(p);
    const Vec& v = r.initial_velocity.components;
    return std::sqrt(std::max(0.0, double(v.transpose() * g * v)));
}

}  // namespace igdiv
