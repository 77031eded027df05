#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "igdiv/manifold.hpp"
#include "igdiv/rng.hpp"
#include "igdiv/verify.hpp"

#include <cmath>

using namespace igdiv;

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

std::vector<ManifoldHandle> zoo() {
    return {Manifold::euclidean(2),         Manifold::sphere2(),
            Manifold::hessian_bernoulli(),  Manifold::hessian_gaussian_natural(),
            Manifold::alpha_gaussian(0.5)};
}

/// Closed-form sphere Christoffels used as an independent oracle.
Tensor3 sphere_gamma_oracle(double theta) {
    Tensor3 G(2);
    G(0, 1, 1) = -std::sin(theta) * std::cos(theta);
    G(1, 0, 1) = G(1, 1, 0) = std::cos(theta) / std::sin(theta);
    return G;
}

}  // namespace

TEST_CASE("metric closed forms") {
    auto euc = Manifold::euclidean(2);
    const Mat ge = euc->metric_at(Point::of({0.3, -0.7}));
    CHECK(ge.isApprox(Mat(Mat::Identity(2, 2)), 1e-15));

    auto sph = Manifold::sphere2();
    const Mat gs = sph->metric_at(Point::of({M_PI / 3.0, 0.0}));
    CHECK(gs(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gs(1, 1) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(gs(0, 1) == doctest::Approx(0.0).epsilon(1e-14));

    auto ber = Manifold::hessian_bernoulli();
    CHECK(ber->metric_at(Point::of({0.0}))(0, 0) == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("christoffel closed forms and kinds") {
    auto euc = Manifold::euclidean(2);
    for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::Dual(),
                            ConnectionKind::LeviCivita(), ConnectionKind::Alpha(0.3)}) {
        const auto [second, first] = euc->christoffels_at(kind, Point::of({1.0, 2.0}));
        for (int i = 0; i < 8; ++i) {
            CHECK(second.v[i] == 0.0);
            CHECK(first.v[i] == 0.0);
        }
    }

    auto ber = Manifold::hessian_bernoulli();
    const auto [bp, bp1] = ber->christoffels_at(ConnectionKind::Primal(), Point::of({0.7}));
    CHECK(bp(0, 0, 0) == 0.0);
    CHECK(bp1(0, 0, 0) == 0.0);
    // dual first-kind symbol is phi'''(theta)
    const double th = 1.0;
    const double s = sigmoid(th);
    const auto [bd, bd1] = ber->christoffels_at(ConnectionKind::Dual(), Point::of({th}));
    CHECK(bd1(0, 0, 0) == doctest::Approx(s * (1 - s) * (1 - 2 * s)).epsilon(1e-12));
    const auto [bd0, bd01] = ber->christoffels_at(ConnectionKind::Dual(), Point::of({0.0}));
    CHECK(bd01(0, 0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    (void)bd0;

    auto sph = Manifold::sphere2();
    const auto [slc, slc1] =
        sph->christoffels_at(ConnectionKind::LeviCivita(), Point::of({M_PI / 2.0, 0.3}));
    CHECK(slc(0, 1, 1) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(slc(1, 0, 1) == doctest::Approx(0.0).epsilon(1e-12));
    (void)slc1;

    const Point ps = Point::of({M_PI / 3.0, 0.2});
    const auto [got, got1] = sph->christoffels_at(ConnectionKind::Primal(), ps);
    const Tensor3 want = sphere_gamma_oracle(M_PI / 3.0);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(got(k, i, j) == doctest::Approx(want(k, i, j)).epsilon(1e-12));
    (void)got1;
}

TEST_CASE("first kind pairs with the metric") {
    for (const auto& m : zoo()) {
        Rng rng(11);
        const Point p = sample_interior(*m, rng);
        for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::Dual()}) {
            const auto [second, first] = m->christoffels_at(kind, p);
            const Mat g = m->metric_at(p);
            for (int i = 0; i < m->dim(); ++i)
                for (int j = 0; j < m->dim(); ++j)
                    for (int k = 0; k < m->dim(); ++k) {
                        double s = 0.0;
                        for (int l = 0; l < m->dim(); ++l) s += g(i, l) * second(l, j, k);
                        CHECK(first(i, j, k) == doctest::Approx(s).epsilon(1e-13));
                    }
        }
    }
}

TEST_CASE("alpha family interpolates the named kinds") {
    for (const auto& m : zoo()) {
        Rng rng(5);
        const Point p = sample_interior(*m, rng);
        const Tensor3 gp = m->gamma_second(ConnectionKind::Primal(), p);
        const Tensor3 gd = m->gamma_second(ConnectionKind::Dual(), p);
        const Tensor3 glc = m->gamma_second(ConnectionKind::LeviCivita(), p);
        const Tensor3 a1 = m->gamma_second(ConnectionKind::Alpha(1.0), p);
        const Tensor3 am1 = m->gamma_second(ConnectionKind::Alpha(-1.0), p);
        const Tensor3 a0 = m->gamma_second(ConnectionKind::Alpha(0.0), p);
        const Tensor3 ah = m->gamma_second(ConnectionKind::Alpha(0.5), p);
        const int total = m->dim() * m->dim() * m->dim();
        for (int i = 0; i < total; ++i) {
            CHECK(a1.v[i] == gp.v[i]);    // same code path, exact
            CHECK(am1.v[i] == gd.v[i]);
            CHECK(a0.v[i] == glc.v[i]);
            const double expect = 0.5 * (gp.v[i] + gd.v[i]) + 0.25 * (gp.v[i] - gd.v[i]);
            CHECK(ah.v[i] == doctest::Approx(expect).epsilon(1e-14));
        }
    }
}

TEST_CASE("cubic tensor is totally symmetric") {
    for (const auto& m : zoo()) {
        Rng rng(17);
        for (int s = 0; s < 10; ++s) {
            const Point p = sample_interior(*m, rng);
            const auto [p2, fp] = m->christoffels_at(ConnectionKind::Primal(), p);
            const auto [d2, fd] = m->christoffels_at(ConnectionKind::Dual(), p);
            (void)p2;
            (void)d2;
            const int n = m->dim();
            Tensor3 T(n);
            for (int i = 0; i < n * n * n; ++i) T.v[i] = fd.v[i] - fp.v[i];
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        CHECK(std::fabs(T(i, j, k) - T(j, i, k)) < 1e-9);
                        CHECK(std::fabs(T(i, j, k) - T(k, j, i)) < 1e-9);
                    }
        }
    }
}

TEST_CASE("metric SPD, torsion-free, duality relation across the zoo") {
    for (const auto& m : zoo()) {
        Rng rng(29);
        for (int s = 0; s < 100; ++s) {
            const Point p = sample_interior(*m, rng);
            const Mat g = m->metric_at(p);
            CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(g)};
            CHECK(es.eigenvalues().minCoeff() > 0.0);
            for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::Dual()}) {
                const Tensor3 G = m->gamma_second(kind, p);
                for (int k = 0; k < m->dim(); ++k)
                    for (int i = 0; i < m->dim(); ++i)
                        for (int j = 0; j < i; ++j)
                            CHECK(std::fabs(G(k, i, j) - G(k, j, i)) < 1e-12);
            }
            const CheckReport rep = m->check_duality_relation(p, 1e-5, 1e-7);
            CHECK(rep.passed);
        }
    }
}

TEST_CASE("curvature closed forms") {
    auto euc = Manifold::euclidean(2);
    const auto [eu, ed] = euc->curvature_at(ConnectionKind::Primal(), Point::of({0.1, 0.2}));
    for (int i = 0; i < 16; ++i) {
        CHECK(std::fabs(eu.v[i]) < 1e-12);
        CHECK(std::fabs(ed.v[i]) < 1e-12);
    }

    // unit sphere: R(e_th, e_ph, e_ph, e_th) = sin^2(theta) under the
    // R(X,Y,Z,W) = g(R(X,Y)Z, W) convention
    auto sph = Manifold::sphere2();
    const auto [su, sd] =
        sph->curvature_at(ConnectionKind::LeviCivita(), Point::of({M_PI / 3.0, 0.0}));
    (void)su;
    CHECK(sd(0, 1, 1, 0) == doctest::Approx(0.75).epsilon(1e-6));
    CHECK(sd(0, 1, 0, 1) == doctest::Approx(-0.75).epsilon(1e-6));

    auto ber = Manifold::hessian_bernoulli();
    const auto [bu, bd] = ber->curvature_at(ConnectionKind::Primal(), Point::of({0.4}));
    CHECK(std::fabs(bu.v[0]) < 1e-12);
    CHECK(std::fabs(bd.v[0]) < 1e-12);
}

TEST_CASE("curvature antisymmetry and first Bianchi identity") {
    for (const auto& m : zoo()) {
        if (m->dim() < 2) continue;
        Rng rng(31);
        const Point p = sample_interior(*m, rng);
        for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::LeviCivita()}) {
            const auto [up, down] = m->curvature_at(kind, p, 1e-4);
            (void)up;
            const int n = m->dim();
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        for (int l = 0; l < n; ++l) {
                            CHECK(std::fabs(down(i, j, k, l) + down(j, i, k, l)) < 1e-5);
                            const double bianchi = down(i, j, k, l) + down(j, k, i, l) +
                                                   down(k, i, j, l);
                            CHECK(std::fabs(bianchi) < 1e-5);
                        }
        }
    }
}

TEST_CASE("curvature duality R = -R* with last slots swapped") {
    auto euc = Manifold::euclidean(2);
    CHECK(euc->check_curvature_duality(Point::of({0.0, 0.0}), 1e-12).passed);

    auto sph = Manifold::sphere2();
    const CheckReport rs = sph->check_curvature_duality(Point::of({1.1, 0.4}), 1e-6);
    CHECK(rs.passed);

    auto ag = Manifold::alpha_gaussian(0.5);
    const CheckReport ra = ag->check_curvature_duality(Point::of({0.5, -1.2}), 1e-5);
    CHECK(ra.passed);
}

TEST_CASE("alpha-gaussian christoffels match an FD-built oracle") {
    auto ag = Manifold::alpha_gaussian(0.5);
    const Point p = Point::of({0.8, -1.1});
    const double h = 1e-5;
    const int n = 2;
    // oracle: Gamma^(a)_{ij,k} = LC_{ij,k} - (a/2) T_ijk with LC from FD of g
    // and T from FD of the metric (T_ijk = d_k g_ij for an exponential family)
    auto gat = [&](Vec x) { return ag->metric_at(Point(x)); };
    Tensor3 dg(n);  // dg(k,i,j) = d_k g_ij
    for (int k = 0; k < n; ++k) {
        Vec xp = p.coords, xm = p.coords;
        xp[k] += h;
        xm[k] -= h;
        const Mat gp = gat(xp), gm = gat(xm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg(k, i, j) = (gp(i, j) - gm(i, j)) / (2 * h);
    }
    auto lc_first = [&](int i, int j, int k) {
        // g(nabla^LC_{e_i} e_j, e_k)
        return 0.5 * (dg(i, j, k) + dg(j, i, k) - dg(k, i, j));
    };
    const auto [second, first] = ag->christoffels_at(ConnectionKind::Primal(), p);
    (void)second;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                const double T_ijk = dg(k, i, j);  // totally symmetric here
                const double want = lc_first(i, j, k) - 0.25 * T_ijk;
                // first(k,i,j) = g(nabla_{e_i} e_j, e_k)
                CHECK(first(k, i, j) == doctest::Approx(want).epsilon(1e-6));
            }
}

TEST_CASE("domain guards") {
    auto sph = Manifold::sphere2();
    CHECK_THROWS_AS(sph->metric_at(Point::of({0.0, 0.0})), PointOutOfDomain);
    CHECK_THROWS_AS(sph->metric_at(Point::of({1.0, 9.0})), PointOutOfDomain);
    auto ber = Manifold::hessian_bernoulli();
    CHECK_THROWS_AS(ber->christoffels_at(ConnectionKind::Dual(), Point::of({4.5})),
                    PointOutOfDomain);
}

TEST_CASE("custom manifolds validate the duality relation") {
    // consistent: 1-d hessian built from callbacks
    auto ok = Manifold::custom(
        "custom-ok", 1, {{{-2.0, 2.0}}},
        [](const Vec& x) {
            Mat g(1, 1);
            g(0, 0) = std::exp(x[0]);
            return g;
        },
        [](const Vec&) { return Tensor3(1); },
        [](const Vec&) {
            Tensor3 G(1);
            G(0, 0, 0) = 1.0;  // Gamma*^1_11 = g^{-1} phi''' = e^-x * e^x
            return G;
        });
    CHECK(ok->dim() == 1);

    // inconsistent triple must be rejected
    CHECK_THROWS_AS(Manifold::custom(
                        "custom-bad", 1, {{{-2.0, 2.0}}},
                        [](const Vec& x) {
                            Mat g(1, 1);
                            g(0, 0) = std::exp(x[0]);
                            return g;
                        },
                        [](const Vec&) { return Tensor3(1); },
                        [](const Vec&) { return Tensor3(1); }),
                    SpecError);
}

TEST_CASE("polynomial hessian: quadratic is euclidean, nonconvex rejected") {
    auto quad = Manifold::hessian_polynomial({0.0, 0.0, 0.5}, {-3.0, 3.0});
    CHECK(quad->metric_at(Point::of({1.0}))(0, 0) == doctest::Approx(1.0));
    CHECK(quad->is_self_dual());
    CHECK_THROWS_AS(Manifold::hessian_polynomial({0.0, 0.0, -1.0}, {-1.0, 1.0}), SpecError);
}

TEST_CASE("json specs parse and reject unknown keys") {
    CHECK(manifold_from_json(R"({"type":"euclidean","dim":3})")->dim() == 3);
    CHECK(manifold_from_json(R"({"type":"sphere2"})")->name() == "sphere2");
    CHECK(manifold_from_json(R"({"type":"hessian","potential":"bernoulli"})")->dim() == 1);
    CHECK(manifold_from_json(
              R"({"type":"hessian","potential":"polynomial","coeffs":[0,0,0.5],"domain":[[-2,2]]})")
              ->dim() == 1);
    CHECK(manifold_from_json(R"({"type":"alpha_gaussian","alpha":0.5})")->dim() == 2);
    CHECK_THROWS_AS(manifold_from_json(R"({"type":"sphere2","radius":2})"), SpecError);
    CHECK_THROWS_AS(manifold_from_json(R"({"type":"torus"})"), SpecError);
    CHECK_THROWS_AS(manifold_from_json("not json"), SpecError);

    CHECK(manifold_from_shorthand("euclidean:2")->dim() == 2);
    CHECK(manifold_from_shorthand("hessian:gaussian_natural")->dim() == 2);
    CHECK(manifold_from_shorthand("alpha_gaussian:0.5")->name() == "alpha_gaussian:0.5");
    CHECK_THROWS_AS(manifold_from_shorthand("banana"), SpecError);
}
