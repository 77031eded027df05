#include "igdiv/manifold.hpp"

#include "igdiv/rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <set>
#include <sstream>

namespace igdiv {

namespace {

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double softplus(double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); }

Tensor3 zero_gamma(int n) { return Tensor3(n); }

/// Second-kind symbols from a totally symmetric first-kind tensor:
/// Gamma^k_ij = ginv_{kl} T_lij.
Tensor3 raise_first_index(const Mat& ginv, const Tensor3& first) {
    const int n = first.n;
    Tensor3 out(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += ginv(k, l) * first(l, i, j);
                out(k, i, j) = s;
            }
    return out;
}

/// Natural-parameter log-partition of the Gaussian family,
/// psi(t1, t2) = -t1^2/(4 t2) - log(-t2)/2 on t2 < 0, with derivatives.
struct GaussNatural {
    static double value(const Vec& t) {
        return -t[0] * t[0] / (4.0 * t[1]) - 0.5 * std::log(-t[1]);
    }
    static Vec grad(const Vec& t) {
        Vec g(2);
        g[0] = -t[0] / (2.0 * t[1]);
        g[1] = t[0] * t[0] / (4.0 * t[1] * t[1]) - 1.0 / (2.0 * t[1]);
        return g;
    }
    static Mat hess(const Vec& t) {
        Mat h(2, 2);
        const double t1 = t[0], t2 = t[1];
        h(0, 0) = -1.0 / (2.0 * t2);
        h(0, 1) = h(1, 0) = t1 / (2.0 * t2 * t2);
        h(1, 1) = -t1 * t1 / (2.0 * t2 * t2 * t2) + 1.0 / (2.0 * t2 * t2);
        return h;
    }
    static Tensor3 third(const Vec& t) {
        Tensor3 T(2);
        const double t1 = t[0], t2 = t[1];
        const double d112 = 1.0 / (2.0 * t2 * t2);
        const double d122 = -t1 / (t2 * t2 * t2);
        const double d222 = 1.5 * t1 * t1 / (t2 * t2 * t2 * t2) - 1.0 / (t2 * t2 * t2);
        auto set = [&](int a, int b, int c, double val) {
            T(a, b, c) = T(a, c, b) = T(b, a, c) = T(b, c, a) = T(c, a, b) = T(c, b, a) = val;
        };
        set(0, 0, 0, 0.0);
        set(0, 0, 1, d112);
        set(0, 1, 1, d122);
        set(1, 1, 1, d222);
        return T;
    }
    static Potential potential() { return Potential{&value, &grad, &hess, &third}; }
    static std::vector<std::array<double, 2>> domain() {
        return {{-3.0, 3.0}, {-3.0, -0.2}};
    }
};

}  // namespace

const Potential& Manifold::potential() const {
    if (!potential_) throw NotHessianManifold("manifold '" + name_ + "' carries no potential");
    return *potential_;
}

bool Manifold::contains(const Vec& x, double margin) const {
    if (static_cast<int>(x.size()) != dim_) return false;
    for (int i = 0; i < dim_; ++i) {
        if (!std::isfinite(x[i])) return false;
        if (x[i] < domain_[i][0] + margin || x[i] > domain_[i][1] - margin) return false;
    }
    return true;
}

void Manifold::require_valid(const Point& p) const {
    if (!contains(p.coords, boundary_margin_)) {
        std::ostringstream os;
        os << "point outside domain of '" << name_ << "': [";
        for (int i = 0; i < p.dim(); ++i) os << (i ? "," : "") << p.coords[i];
        os << "]";
        throw PointOutOfDomain(os.str());
    }
}

Mat Manifold::metric_at(const Point& p) const {
    require_valid(p);
    return metric_(p.coords);
}

Tensor3 Manifold::gamma_second(const ConnectionKind& kind, const Point& p) const {
    require_valid(p);
    switch (kind.tag()) {
        case ConnectionKind::Tag::Primal: return gamma_primal_(p.coords);
        case ConnectionKind::Tag::Dual: return gamma_dual_(p.coords);
        case ConnectionKind::Tag::LeviCivita: {
            Tensor3 g = gamma_primal_(p.coords);
            const Tensor3 d = gamma_dual_(p.coords);
            for (int i = 0; i < g.n * g.n * g.n; ++i) g.v[i] = 0.5 * (g.v[i] + d.v[i]);
            return g;
        }
        case ConnectionKind::Tag::Alpha: {
            // Gamma^alpha = Gamma_LC + (alpha/2)(Gamma - Gamma*), the sign that
            // makes Alpha(1) the primal connection.
            const double a = kind.alpha();
            Tensor3 gp = gamma_primal_(p.coords);
            const Tensor3 gd = gamma_dual_(p.coords);
            for (int i = 0; i < gp.n * gp.n * gp.n; ++i)
                gp.v[i] = 0.5 * (gp.v[i] + gd.v[i]) + 0.5 * a * (gp.v[i] - gd.v[i]);
            return gp;
        }
    }
    throw Error("unreachable connection kind");
}

std::pair<Tensor3, Tensor3> Manifold::christoffels_at(const ConnectionKind& kind,
                                                      const Point& p) const {
    const Tensor3 second = gamma_second(kind, p);
    const Mat g = metric_(p.coords);
    Tensor3 first(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            for (int k = 0; k < dim_; ++k) {
                double s = 0.0;
                for (int l = 0; l < dim_; ++l) s += g(i, l) * second(l, j, k);
                first(i, j, k) = s;
            }
    return {second, first};
}

std::pair<Tensor4, Tensor4> Manifold::curvature_at(const ConnectionKind& kind, const Point& p,
                                                   double fd_step) const {
    require_valid(p);
    const int n = dim_;
    // dG[m](l,i,j) = d_m Gamma^l_ij by central differences.
    std::vector<Tensor3> dG(n, Tensor3(n));
    for (int m = 0; m < n; ++m) {
        Vec xp = p.coords, xm = p.coords;
        xp[m] += fd_step;
        xm[m] -= fd_step;
        if (!contains(xp, boundary_margin_) || !contains(xm, boundary_margin_))
            throw FiniteDifferenceStencilOutOfDomain(
                "curvature stencil leaves domain of '" + name_ + "'");
        const Tensor3 gp = gamma_second(kind, Point(xp));
        const Tensor3 gm = gamma_second(kind, Point(xm));
        for (int i = 0; i < n * n * n; ++i) dG[m].v[i] = (gp.v[i] - gm.v[i]) / (2.0 * fd_step);
    }
    const Tensor3 G = gamma_second(kind, p);
    Tensor4 up(n);  // (l,i,j,k) -> R^l_ijk
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = dG[i](l, j, k) - dG[j](l, i, k);
                    for (int m = 0; m < n; ++m)
                        s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    up(l, i, j, k) = s;
                }
    const Mat g = metric_(p.coords);
    Tensor4 down(n);  // (i,j,k,l) -> R_ijkl = g_lm R^m_ijk
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < n; ++m) s += g(l, m) * up(m, i, j, k);
                    down(i, j, k, l) = s;
                }
    return {up, down};
}

CheckReport Manifold::check_curvature_duality(const Point& p, double tol, double fd_step) const {
    CheckReport rep;
    rep.name = "curvature_duality";
    rep.tolerance = tol;
    const auto [up_p, Rp] = curvature_at(ConnectionKind::Primal(), p, fd_step);
    const auto [up_d, Rd] = curvature_at(ConnectionKind::Dual(), p, fd_step);
    (void)up_p;
    (void)up_d;
    const int n = dim_;
    double worst = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    worst = std::max(worst, std::fabs(Rp(i, j, k, l) + Rd(i, j, l, k)));
    SampleDetail d;
    d.index = 0;
    d.p.assign(p.coords.data(), p.coords.data() + n);
    d.residual = worst;
    rep.absorb(d);
    rep.finalize(1);
    return rep;
}

CheckReport Manifold::check_duality_relation(const Point& p, double h, double tol) const {
    CheckReport rep;
    rep.name = "duality_relation";
    rep.tolerance = tol;
    const int n = dim_;
    for (int m = 0; m < n; ++m) {
        Vec xp = p.coords, xm = p.coords;
        xp[m] += h;
        xm[m] -= h;
        if (!contains(xp, boundary_margin_) || !contains(xm, boundary_margin_))
            throw FiniteDifferenceStencilOutOfDomain("duality-relation stencil leaves domain");
    }
    const Mat g = metric_at(p);
    const Tensor3 Gp = gamma_second(ConnectionKind::Primal(), p);
    const Tensor3 Gd = gamma_second(ConnectionKind::Dual(), p);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        Vec xp = p.coords, xm = p.coords;
        xp[k] += h;
        xm[k] -= h;
        const Mat gp = metric_(xp);
        const Mat gm = metric_(xm);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double lhs = (gp(i, j) - gm(i, j)) / (2.0 * h);
                // d_k g_ij = g(nabla_{e_k} e_i, e_j) + g(e_i, nabla*_{e_k} e_j)
                double rhs = 0.0;
                for (int l = 0; l < n; ++l)
                    rhs += Gp(l, k, i) * g(l, j) + Gd(l, k, j) * g(i, l);
                worst = std::max(worst, std::fabs(lhs - rhs));
            }
    }
    SampleDetail d;
    d.index = 0;
    d.p.assign(p.coords.data(), p.coords.data() + n);
    d.residual = worst;
    rep.absorb(d);
    rep.finalize(1);
    return rep;
}

void Manifold::validate_construction(double tol, int samples) const {
    Rng rng(0x1957u ^ static_cast<std::uint64_t>(dim_));
    for (int s = 0; s < samples; ++s) {
        Vec x(dim_);
        for (int i = 0; i < dim_; ++i) {
            const double lo = domain_[i][0], hi = domain_[i][1];
            const double mid = 0.5 * (lo + hi), half = 0.25 * (hi - lo);
            x[i] = rng.uniform(mid - half, mid + half);
        }
        const Point p{x};
        const Mat g = metric_(x);
        if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw SpecError("metric callback of '" + name_ + "' is not symmetric");
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(g)};
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw SpecError("metric of '" + name_ + "' is not positive definite at a sample");
        for (const auto kind : {ConnectionKind::Primal(), ConnectionKind::Dual()}) {
            const Tensor3 G = gamma_second(kind, p);
            for (int k = 0; k < dim_; ++k)
                for (int i = 0; i < dim_; ++i)
                    for (int j = 0; j < i; ++j)
                        if (std::fabs(G(k, i, j) - G(k, j, i)) > 1e-10)
                            throw SpecError("connection of '" + name_ + "' has torsion");
        }
        const CheckReport rep = check_duality_relation(p, 1e-5, tol);
        if (!rep.passed)
            throw SpecError("(g, Gamma, Gamma*) of '" + name_ +
                            "' violates the duality relation (residual " +
                            std::to_string(rep.max_error) + ")");
    }
}

std::shared_ptr<const Manifold> Manifold::custom(std::string name, int dim,
                                                 std::vector<std::array<double, 2>> domain,
                                                 MetricFn metric, GammaFn gamma_primal,
                                                 GammaFn gamma_dual,
                                                 std::optional<Potential> potential) {
    if (dim < 1 || dim > kMaxDim) throw SpecError("dimension must be in 1.." + std::to_string(kMaxDim));
    if (static_cast<int>(domain.size()) != dim) throw SpecError("domain box rank mismatch");
    for (const auto& b : domain)
        if (!(b[0] < b[1])) throw SpecError("domain intervals must be non-empty");
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = std::move(name);
    m->dim_ = dim;
    m->domain_ = std::move(domain);
    m->metric_ = std::move(metric);
    m->gamma_primal_ = std::move(gamma_primal);
    m->gamma_dual_ = std::move(gamma_dual);
    m->potential_ = std::move(potential);
    m->validate_construction(1e-5, 20);
    return m;
}

// --- zoo --------------------------------------------------------------------

std::shared_ptr<const Manifold> Manifold::euclidean(int n) {
    if (n < 1 || n > kMaxDim) throw SpecError("euclidean dim must be in 1.." + std::to_string(kMaxDim));
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = "euclidean:" + std::to_string(n);
    m->dim_ = n;
    m->domain_.assign(n, {-10.0, 10.0});
    m->metric_ = [n](const Vec&) { return Mat(Mat::Identity(n, n)); };
    m->gamma_primal_ = [n](const Vec&) { return zero_gamma(n); };
    m->gamma_dual_ = m->gamma_primal_;
    m->potential_ = Potential{
        [](const Vec& x) { return 0.5 * x.squaredNorm(); },
        [](const Vec& x) { return x; },
        [n](const Vec&) { return Mat(Mat::Identity(n, n)); },
        [n](const Vec&) { return Tensor3(n); },
    };
    m->self_dual_ = m->dually_flat_ = m->symmetric_space_ = true;
    m->pair_radius_ = 0.3;
    m->validate_construction(1e-5, 20);
    return m;
}

std::shared_ptr<const Manifold> Manifold::sphere2() {
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = "sphere2";
    m->dim_ = 2;
    // Polar chart, theta clipped away from the coordinate singularities; the
    // phi interval is wide enough to hold a full latitude circle.
    m->domain_ = {{0.05, M_PI - 0.05}, {-7.0, 7.0}};
    m->metric_ = [](const Vec& x) {
        Mat g(2, 2);
        const double s = std::sin(x[0]);
        g << 1.0, 0.0, 0.0, s * s;
        return g;
    };
    auto lc = [](const Vec& x) {
        Tensor3 G(2);
        const double th = x[0];
        G(0, 1, 1) = -std::sin(th) * std::cos(th);
        G(1, 0, 1) = G(1, 1, 0) = std::cos(th) / std::sin(th);
        return G;
    };
    m->gamma_primal_ = lc;
    m->gamma_dual_ = lc;
    m->self_dual_ = true;
    m->symmetric_space_ = true;
    m->pair_radius_ = 0.5;
    m->validate_construction(1e-5, 20);
    return m;
}

std::shared_ptr<const Manifold> Manifold::hessian_bernoulli() {
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = "hessian:bernoulli";
    m->dim_ = 1;
    m->domain_ = {{-4.0, 4.0}};
    Potential pot;
    pot.value = [](const Vec& x) { return softplus(x[0]); };
    pot.grad = [](const Vec& x) {
        Vec g(1);
        g[0] = sigmoid(x[0]);
        return g;
    };
    pot.hess = [](const Vec& x) {
        Mat h(1, 1);
        const double s = sigmoid(x[0]);
        h(0, 0) = s * (1.0 - s);
        return h;
    };
    pot.third = [](const Vec& x) {
        Tensor3 T(1);
        const double s = sigmoid(x[0]);
        T(0, 0, 0) = s * (1.0 - s) * (1.0 - 2.0 * s);
        return T;
    };
    m->metric_ = pot.hess;
    m->gamma_primal_ = [](const Vec&) { return Tensor3(1); };
    auto hess = pot.hess;
    auto third = pot.third;
    m->gamma_dual_ = [hess, third](const Vec& x) {
        const Mat ginv = hess(x).inverse();
        return raise_first_index(ginv, third(x));
    };
    m->potential_ = std::move(pot);
    m->dually_flat_ = true;
    m->symmetric_space_ = true;  // flat connections satisfy (S) and (S)* trivially
    m->pair_radius_ = 0.3;
    m->validate_construction(1e-5, 20);
    return m;
}

std::shared_ptr<const Manifold> Manifold::hessian_gaussian_natural() {
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = "hessian:gaussian_natural";
    m->dim_ = 2;
    m->domain_ = GaussNatural::domain();
    Potential pot = GaussNatural::potential();
    m->metric_ = pot.hess;
    m->gamma_primal_ = [](const Vec&) { return Tensor3(2); };
    m->gamma_dual_ = [](const Vec& x) {
        const Mat ginv = GaussNatural::hess(x).inverse();
        return raise_first_index(ginv, GaussNatural::third(x));
    };
    m->potential_ = std::move(pot);
    m->dually_flat_ = true;
    m->symmetric_space_ = true;
    m->pair_radius_ = 0.3;
    m->validate_construction(1e-5, 20);
    return m;
}

std::shared_ptr<const Manifold> Manifold::hessian_polynomial(
    const std::vector<double>& coeffs, const std::array<double, 2>& domain) {
    if (coeffs.empty()) throw SpecError("polynomial potential needs coefficients");
    auto horner = [coeffs](double x, int deriv) {
        // derivative of order `deriv` evaluated by the falling-factorial form
        double acc = 0.0;
        for (int k = static_cast<int>(coeffs.size()) - 1; k >= deriv; --k) {
            double f = 1.0;
            for (int d = 0; d < deriv; ++d) f *= (k - d);
            acc = acc * x + coeffs[k] * f;
        }
        return acc;
    };
    auto m = std::shared_ptr<Manifold>(new Manifold());
    m->name_ = "hessian:polynomial";
    m->dim_ = 1;
    m->domain_ = {domain};
    Potential pot;
    pot.value = [horner](const Vec& x) { return horner(x[0], 0); };
    pot.grad = [horner](const Vec& x) {
        Vec g(1);
        g[0] = horner(x[0], 1);
        return g;
    };
    pot.hess = [horner](const Vec& x) {
        Mat h(1, 1);
        h(0, 0) = horner(x[0], 2);
        return h;
    };
    pot.third = [horner](const Vec& x) {
        Tensor3 T(1);
        T(0, 0, 0) = horner(x[0], 3);
        return T;
    };
    // convexity on the declared box, checked by sampling
    for (int i = 0; i <= 64; ++i) {
        const double x = domain[0] + (domain[1] - domain[0]) * i / 64.0;
        Vec v(1);
        v[0] = x;
        if (pot.hess(v)(0, 0) <= 0.0)
            throw SpecError("polynomial potential is not convex on the declared box");
    }
    m->metric_ = pot.hess;
    m->gamma_primal_ = [](const Vec&) { return Tensor3(1); };
    auto hess = pot.hess;
    auto third = pot.third;
    m->gamma_dual_ = [hess, third](const Vec& x) {
        const Mat ginv = hess(x).inverse();
        return raise_first_index(ginv, third(x));
    };
    const bool quadratic = [&] {
        for (std::size_t k = 3; k < coeffs.size(); ++k)
            if (coeffs[k] != 0.0) return false;
        return true;
    }();
    m->potential_ = std::move(pot);
    m->dually_flat_ = true;
    m->symmetric_space_ = true;
    m->self_dual_ = quadratic;
    m->pair_radius_ = 0.3;
    m->validate_construction(1e-5, 20);
    return m;
}

std::shared_ptr<const Manifold> Manifold::alpha_gaussian(double alpha) {
    auto m = std::shared_ptr<Manifold>(new Manifold());
    std::ostringstream nm;
    nm << "alpha_gaussian:" << alpha;
    m->name_ = nm.str();
    m->dim_ = 2;
    m->domain_ = GaussNatural::domain();
    m->metric_ = &GaussNatural::hess;
    // alpha-connections of the exponential family in natural coordinates:
    // first-kind symbols are ((1-alpha)/2) * d^3 psi.
    auto gamma_of = [](double a) {
        return [a](const Vec& x) {
            const Mat ginv = GaussNatural::hess(x).inverse();
            Tensor3 T = GaussNatural::third(x);
            T *= 0.5 * (1.0 - a);
            return raise_first_index(ginv, T);
        };
    };
    m->gamma_primal_ = gamma_of(alpha);
    m->gamma_dual_ = gamma_of(-alpha);
    m->self_dual_ = (alpha == 0.0);
    m->dually_flat_ = (alpha == 1.0 || alpha == -1.0);
    m->symmetric_space_ = (alpha == 0.0 || m->dually_flat_);
    if (alpha == 1.0) m->potential_ = GaussNatural::potential();
    m->pair_radius_ = 0.2;
    m->validate_construction(1e-5, 20);
    return m;
}

// --- spec parsing ------------------------------------------------------------

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw SpecError("unknown manifold spec key: " + it.key());
}

}  // namespace

ManifoldHandle manifold_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("manifold spec is not valid JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("type")) throw SpecError("manifold spec needs a type");
    const std::string type = j.at("type").get<std::string>();
    if (type == "euclidean") {
        require_keys(j, {"type", "dim"});
        if (!j.contains("dim")) throw SpecError("euclidean spec needs dim");
        return Manifold::euclidean(j.at("dim").get<int>());
    }
    if (type == "sphere2") {
        require_keys(j, {"type"});
        return Manifold::sphere2();
    }
    if (type == "hessian") {
        require_keys(j, {"type", "potential", "coeffs", "domain"});
        const std::string pot = j.at("potential").get<std::string>();
        if (pot == "bernoulli") return Manifold::hessian_bernoulli();
        if (pot == "gaussian_natural") return Manifold::hessian_gaussian_natural();
        if (pot == "polynomial") {
            if (!j.contains("coeffs") || !j.contains("domain"))
                throw SpecError("polynomial potential needs coeffs and domain");
            const auto coeffs = j.at("coeffs").get<std::vector<double>>();
            const auto dom = j.at("domain").get<std::vector<std::array<double, 2>>>();
            if (dom.size() != 1) throw SpecError("polynomial potential is one-dimensional");
            return Manifold::hessian_polynomial(coeffs, dom[0]);
        }
        throw SpecError("unknown hessian potential: " + pot);
    }
    if (type == "alpha_gaussian") {
        require_keys(j, {"type", "alpha"});
        if (!j.contains("alpha")) throw SpecError("alpha_gaussian spec needs alpha");
        return Manifold::alpha_gaussian(j.at("alpha").get<double>());
    }
    throw SpecError("unknown manifold type: " + type);
}

ManifoldHandle manifold_from_shorthand(const std::string& text) {
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    const std::string param = colon == std::string::npos ? "" : text.substr(colon + 1);
    try {
        if (head == "euclidean") {
            if (param.empty()) throw SpecError("euclidean shorthand needs a dimension");
            return Manifold::euclidean(std::stoi(param));
        }
        if (head == "sphere2") return Manifold::sphere2();
        if (head == "hessian") {
            if (param == "bernoulli") return Manifold::hessian_bernoulli();
            if (param == "gaussian_natural") return Manifold::hessian_gaussian_natural();
            throw SpecError("hessian shorthand supports bernoulli|gaussian_natural");
        }
        if (head == "alpha_gaussian") {
            if (param.empty()) throw SpecError("alpha_gaussian shorthand needs alpha");
            return Manifold::alpha_gaussian(std::stod(param));
        }
    } catch (const std::invalid_argument&) {
        throw SpecError("malformed manifold shorthand parameter: " + text);
    }
    throw SpecError("unknown manifold shorthand: " + text);
}

}  // namespace igdiv
