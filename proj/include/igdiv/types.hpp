#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace igdiv {

// Chart dimensions stay small (1..6); fixed-capacity Eigen types keep the
// ODE/shooting inner loops free of heap traffic.
constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Rank-3 array of connection symbols, indexed (k, i, j) -> Gamma^k_ij.
struct Tensor3 {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim * kMaxDim> v{};

    Tensor3() = default;
    explicit Tensor3(int dim) : n(dim) { v.fill(0.0); }

    double& operator()(int a, int b, int c) { return v[(a * n + b) * n + c]; }
    double operator()(int a, int b, int c) const { return v[(a * n + b) * n + c]; }

    Tensor3& operator+=(const Tensor3& o) {
        for (int i = 0; i < n * n * n; ++i) v[i] += o.v[i];
        return *this;
    }
    Tensor3& operator*=(double s) {
        for (int i = 0; i < n * n * n; ++i) v[i] *= s;
        return *this;
    }
};

/// Rank-4 array, indexed (i, j, k, l). Used for curvature tensors only.
struct Tensor4 {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim * kMaxDim * kMaxDim> v{};

    Tensor4() = default;
    explicit Tensor4(int dim) : n(dim) { v.fill(0.0); }

    double& operator()(int a, int b, int c, int d) { return v[((a * n + b) * n + c) * n + d]; }
    double operator()(int a, int b, int c, int d) const { return v[((a * n + b) * n + c) * n + d]; }
};

/// Chart coordinates of a manifold point.
struct Point {
    Vec coords;

    Point() = default;
    explicit Point(Vec c) : coords(std::move(c)) {}
    static Point of(std::initializer_list<double> xs) {
        Vec c(static_cast<int>(xs.size()));
        int i = 0;
        for (double x : xs) c[i++] = x;
        return Point(c);
    }
    int dim() const { return static_cast<int>(coords.size()); }
};

/// Tangent vector: base point plus chart components.
struct Tangent {
    Point base;
    Vec components;

    Tangent() = default;
    Tangent(Point b, Vec c) : base(std::move(b)), components(std::move(c)) {}
    int dim() const { return static_cast<int>(components.size()); }
};

/// Selects a connection: Primal (nabla), Dual (nabla*), their Levi-Civita
/// average, or the alpha-family interpolation between them.
class ConnectionKind {
  public:
    enum class Tag { Primal, Dual, LeviCivita, Alpha };

    static ConnectionKind Primal() { return ConnectionKind(Tag::Primal, 1.0); }
    static ConnectionKind Dual() { return ConnectionKind(Tag::Dual, -1.0); }
    static ConnectionKind LeviCivita() { return ConnectionKind(Tag::LeviCivita, 0.0); }
    static ConnectionKind Alpha(double a) {
        // Alpha(1)/Alpha(-1)/Alpha(0) collapse onto the named kinds so they
        // share a code path exactly.
        if (a == 1.0) return Primal();
        if (a == -1.0) return Dual();
        if (a == 0.0) return LeviCivita();
        return ConnectionKind(Tag::Alpha, a);
    }

    Tag tag() const { return tag_; }
    double alpha() const { return alpha_; }
    bool operator==(const ConnectionKind& o) const { return tag_ == o.tag_ && alpha_ == o.alpha_; }

    /// The connection dual to this one with respect to g.
    ConnectionKind conjugate() const { return Alpha(-alpha_); }

    std::string name() const {
        switch (tag_) {
            case Tag::Primal: return "primal";
            case Tag::Dual: return "dual";
            case Tag::LeviCivita: return "levi-civita";
            case Tag::Alpha: return "alpha(" + std::to_string(alpha_) + ")";
        }
        return "?";
    }

  private:
    ConnectionKind(Tag t, double a) : tag_(t), alpha_(a) {}
    Tag tag_;
    double alpha_;
};

/// Which member of a paired definition applies (D vs D*, phi vs phi*, ...).
enum class Orientation { Primal, Dual };

inline ConnectionKind connection_of(Orientation o) {
    return o == Orientation::Primal ? ConnectionKind::Primal() : ConnectionKind::Dual();
}
inline Orientation flip(Orientation o) {
    return o == Orientation::Primal ? Orientation::Dual : Orientation::Primal;
}

/// Solver knobs shared across modules. Defaults are the tuned desk-scale
/// values; every tolerance referenced by the acceptance suite lives here.
struct NumericsConfig {
    int ode_steps = 200;           // RK4 steps per unit curve parameter
    int quad_order = 32;           // Gauss-Legendre order (est_error uses order/2)
    double shooting_tol = 1e-10;   // endpoint gap in chart coordinates
    int shooting_max_iters = 50;
    double fd_jacobian_step = 1e-6;  // forward-difference step in shooting Jacobians
    double fd_step = 1e-5;           // central FD step, first/second derivatives
    double fd_step_third = 5e-3;     // central FD step for third derivatives (Richardson)
    double fd_step_christoffel = 1e-4;  // FD step for dGamma terms in curvature
    std::uint64_t seed = 20240101;

    static NumericsConfig defaults() { return {}; }
};

/// Scalar result of a quadrature-based functional. est_error is the
/// difference between the order-n and order-n/2 rules (0 when no quadrature
/// was involved).
struct DivergenceValue {
    double value = 0.0;
    int quadrature_order = 0;
    double est_error = 0.0;
};

// ---------------------------------------------------------------------------
// Error taxonomy. Everything derives from Error so callers can catch broadly.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PointOutOfDomain : Error {
    using Error::Error;
};
struct TrajectoryLeftDomain : Error {
    double exit_time = 0.0;
    TrajectoryLeftDomain(const std::string& msg, double t) : Error(msg), exit_time(t) {}
};
struct StepCountTooSmall : Error {
    using Error::Error;
};
struct ShootingDiverged : Error {
    using Error::Error;
};
struct FiniteDifferenceStencilOutOfDomain : Error {
    using Error::Error;
};
struct CurveInvalid : Error {
    using Error::Error;
};
struct NotHessianManifold : Error {
    using Error::Error;
};
struct GradientInversionFailed : Error {
    using Error::Error;
};
struct LevelSetNotFound : Error {
    using Error::Error;
};
struct LevelCurveTraceFailed : Error {
    using Error::Error;
};
struct SpecError : Error {
    using Error::Error;
};

}  // namespace igdiv
