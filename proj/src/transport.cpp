#include "igdiv/transport.hpp"

#include <cmath>

namespace igdiv {

namespace {

/// RHS of the transport ODE: X' = -Gamma(c(t)) (c'(t), X).
Vec transport_rhs(const Manifold& m, const ConnectionKind& kind, const Curve& c, double t,
                  const Vec& X) {
    const Vec x = c.position(t);
    const Vec v = c.velocity(t);
    const Tensor3 G = m.gamma_second(kind, Point(x));
    const int n = G.n;
    Vec out(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += G(k, i, j) * v[i] * X[j];
        out[k] = -s;
    }
    return out;
}

}  // namespace

std::vector<Vec> transport_profile(const Manifold& m, const ConnectionKind& kind, const Curve& c,
                                   const Vec& v0) {
    const auto& nodes = c.nodes();
    std::vector<Vec> profile;
    profile.reserve(nodes.size());
    Vec X = v0;
    profile.push_back(X);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double t0 = nodes[i].t;
        const double h = nodes[i + 1].t - t0;
        const Vec k1 = transport_rhs(m, kind, c, t0, X);
        const Vec k2 = transport_rhs(m, kind, c, t0 + 0.5 * h, Vec(X + 0.5 * h * k1));
        const Vec k3 = transport_rhs(m, kind, c, t0 + 0.5 * h, Vec(X + 0.5 * h * k2));
        const Vec k4 = transport_rhs(m, kind, c, t0 + h, Vec(X + h * k3));
        X += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        profile.push_back(X);
    }
    return profile;
}

Tangent transport_along(const Manifold& m, const ConnectionKind& kind, const Curve& c,
                        const Tangent& v) {
    if ((v.base.coords - c.start().coords).norm() > 1e-9)
        throw CurveInvalid("transported vector is not based at the curve start");
    const auto profile = transport_profile(m, kind, c, v.components);
    return {c.end(), profile.back()};
}

double dual_isometry_deviation(const Manifold& m, const Curve& c, const Tangent& v,
                               const Tangent& w) {
    const Tangent pv = transport_along(m, ConnectionKind::Primal(), c, v);
    const Tangent pw = transport_along(m, ConnectionKind::Dual(), c, w);
    const Mat g0 = m.metric_at(c.start());
    const Mat g1 = m.metric_at(c.end());
    const double before = v.components.transpose() * g0 * w.components;
    const double after = pv.components.transpose() * g1 * pw.components;
    return std::fabs(after - before);
}

Loop::Loop(Curve out, Curve back) : out_leg(std::move(out)), return_leg(std::move(back)) {
    if ((out_leg.start().coords - return_leg.start().coords).norm() > 1e-9 ||
        (out_leg.end().coords - return_leg.end().coords).norm() > 1e-9)
        throw CurveInvalid("loop legs do not share endpoints");
}

Tangent holonomy_defect(const Manifold& m, const Loop& loop, const Tangent& z) {
    const Tangent at_far = transport_along(m, ConnectionKind::Primal(), loop.out_leg, z);
    const Tangent back =
        transport_along(m, ConnectionKind::Primal(), loop.return_leg.reversed(), at_far);
    return {loop.base(), Vec(back.components - z.components)};
}

namespace {

/// Defect of primal transport around the geodesic quadrilateral spanned by
/// (s*x, s*y): out along the x-leg then the transported y-leg, back along the
/// y-leg then the transported x-leg (closed with a short geodesic stitch).
Vec quadrilateral_defect(ManifoldHandle m, const Point& p, const Vec& x, const Vec& y,
                         const Vec& z, double s, const NumericsConfig& cfg) {
    const auto kind = ConnectionKind::Primal();
    const int steps = std::max(32, cfg.ode_steps / 4);

    const Curve cx = shoot(m, kind, p, Tangent{p, Vec(s * x)}, steps);
    const Point A = cx.end();
    const Vec yA = transport_along(*m, kind, cx, Tangent{p, y}).components;
    const Curve cxy = shoot(m, kind, A, Tangent{A, Vec(s * yA)}, steps);

    const Curve cy = shoot(m, kind, p, Tangent{p, Vec(s * y)}, steps);
    const Point C = cy.end();
    const Vec xC = transport_along(*m, kind, cy, Tangent{p, x}).components;
    const Curve cyx = shoot(m, kind, C, Tangent{C, Vec(s * xC)}, steps);

    // the two corners differ by O(s^3); stitch them with a geodesic. Outbound
    // runs the y-side first so the traversal orientation matches R(x,y)z.
    const Curve stitch = geodesic_between(m, kind, cxy.end(), cyx.end(), cfg);
    const Loop loop(Curve::concat(cy, cyx), Curve::concat(Curve::concat(cx, cxy), stitch));

    return holonomy_defect(*m, loop, Tangent{p, z}).components;
}

}  // namespace

CheckReport holonomy_curvature_check(ManifoldHandle m, const Point& p, const Tangent& x,
                                     const Tangent& y, const Tangent& z, double scale,
                                     const NumericsConfig& cfg) {
    CheckReport rep;
    rep.name = "holonomy_curvature";
    rep.tolerance = 1.0;  // sub-criteria are normalized by their thresholds

    const int n = m->dim();
    const auto [Rup, Rdown] = m->curvature_at(ConnectionKind::Primal(), p,
                                              cfg.fd_step_christoffel);
    (void)Rdown;
    auto expected_at = [&](double s) {
        Vec e(n);
        for (int l = 0; l < n; ++l) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        acc += Rup(l, i, j, k) * x.components[i] * y.components[j] *
                               z.components[k];
            e[l] = s * s * acc;
        }
        return e;
    };

    auto defect_at = [&](double s) {
        return quadrilateral_defect(m, p, x.components, y.components, z.components, s, cfg);
    };

    const Vec e1 = expected_at(scale);
    const Vec d1 = defect_at(scale);
    const Vec e2 = expected_at(scale / 2.0);
    const Vec d2 = defect_at(scale / 2.0);

    auto coords_of = [&](const Vec& v) { return std::vector<double>(v.data(), v.data() + n); };

    if (e1.norm() < 1e-12 && d1.norm() < 1e-10) {
        // flat case: both sides vanish
        SampleDetail d;
        d.index = 0;
        d.p = coords_of(p.coords);
        d.residual = d1.norm() / 1e-10;
        d.note = "";
        rep.absorb(d);
        rep.finalize(1);
        return rep;
    }

    const double rel_mismatch = (d1 - e1).norm() / std::max(e1.norm(), 1e-300);
    const double defect_ratio = d1.norm() / std::max(d2.norm(), 1e-300);
    const double resid1 = (d1 - e1).norm();
    const double resid2 = (d2 - e2).norm();
    const double resid_ratio = resid1 / std::max(resid2, 1e-300);
    const double order = std::log2(std::max(resid_ratio, 1e-300));

    SampleDetail match;
    match.index = 0;
    match.p = coords_of(p.coords);
    match.residual = rel_mismatch / 0.10;
    match.note = "";
    rep.absorb(match);

    SampleDetail contraction;
    contraction.index = 1;
    contraction.p = coords_of(p.coords);
    contraction.residual = order >= 2.5 ? 0.0 : (2.5 - order) / 2.5;
    contraction.note = "";
    rep.absorb(contraction);

    SampleDetail info;
    info.index = 2;
    info.p = {defect_ratio, resid_ratio, order};
    info.residual = 0.0;
    info.note = "defect_ratio, residual_ratio, estimated_order";
    rep.absorb(info);

    rep.finalize(3);
    return rep;
}

}  // namespace igdiv
