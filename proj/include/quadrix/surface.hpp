#pragma once

#include <optional>

#include "quadrix/funcspec.hpp"

namespace quadrix {

/// minus: g = z^alpha - f(x);  plus: g = z^alpha + f(x).
enum class Sign { minus, plus };

/// The ambient function g(x, z) = z^alpha -+ f(x) whose level sets M_k are studied,
/// restricted to the z > 0 branch unless alpha is an odd positive integer.
///
/// Writing F = f for `minus` and F = -f for `plus`, every level set is the graph
/// z = (F(x) + k)^(1/alpha), and g = z^alpha - F(x).
class LevelFamily {
public:
    LevelFamily(FunctionSpec f, double alpha, Sign sign);

    const FunctionSpec& f() const { return f_; }
    double alpha() const { return alpha_; }
    Sign sign() const { return sign_; }
    int dimension() const { return f_.dimension(); }

    /// +1 for minus, -1 for plus: F = sign_factor * f.
    double sign_factor() const { return sign_ == Sign::minus ? 1.0 : -1.0; }

    /// True for f = sum a_i^2 x_i^2 with alpha in {1, 2}.
    bool is_quadric() const;

    /// Whether height z is inside the evaluation domain of g. Odd positive integer powers
    /// admit every z (the level set is one graph), even powers of the plus family admit
    /// z <= 0 (closed hypersurfaces); otherwise z > 0.
    bool admits_height(double z) const;

    /// g at X = (x, z). Returns NaN outside the evaluation domain.
    double g(const Vec& X) const;

    /// g(X) and <grad g(X), D>. NaN outside the domain.
    std::pair<double, double> g_directional(const Vec& X, const Vec& D) const;

    Vec grad_g(const Vec& X) const;
    Mat hess_g(const Vec& X) const;

    /// Solves z^alpha = F(x) + k: the real root for odd positive integer alpha, else z > 0.
    std::optional<double> height_on_level(double k, const Vec& x) const;

private:
    FunctionSpec f_;
    double alpha_;
    Sign sign_;
    bool even_integer_alpha_;
    bool odd_positive_alpha_;
};

/// A point p = (x, z) on M_k with its geometric frame.
struct SurfacePoint {
    Vec x;
    double z = 0.0;
    double k = 0.0;
    Vec grad_g;       // n+1
    Vec normal;       // unit, points to the convex side
    Mat frame;        // (n+1) x n orthonormal tangent basis
    int convex_up = 1;        // +1: convex side lies towards +z
    int gradient_inward = 1;  // +1: grad g points to the convex side, so I_k = (k, a)

    Vec position() const;
    double grad_norm() const { return grad_g.norm(); }
};

/// Second derivatives z_ij of the level graph z(x) from exact f_i, f_ij.
Mat graph_hessian(const LevelFamily& family, double k, const Vec& x, double z);

/// Lifts x onto M_k. Throws RangeError when no admissible z solves g = k and
/// ConvexityError when the graph Hessian is not definite at the point.
SurfacePoint point_on_level(const LevelFamily& family, double k, const Vec& x);

/// Gauss-Kronecker curvature with respect to the convex-side normal.
double gauss_kronecker(const LevelFamily& family, const SurfacePoint& p);

/// K(p) |grad g(p)|^(n+2).
double curvature_invariant(const LevelFamily& family, const SurfacePoint& p);

/// Second fundamental form in the tangent frame (positive definite on certified points).
Mat second_fundamental_form(const LevelFamily& family, const SurfacePoint& p);

/// 0.9 times the smallest normal-curvature radius at p. A local length scale for the
/// chart, not a guarantee: measures check chart validity exactly along every ray.
double graph_radius(const LevelFamily& family, const SurfacePoint& p);

/// Height w(y) of M_k above the tangent plane at p: p + sum y_i E_i + w N lies on M_k.
double local_graph(const LevelFamily& family, const SurfacePoint& p, const Vec& y);

/// The parallel-tangent point v on M_{k+h} and the distance t from p to its tangent plane.
struct TangencyResult {
    SurfacePoint v;
    double t = 0.0;
    double lambda = 0.0;  // grad g(v) = lambda grad g(p)
    double dt_dh = 0.0;
    int newton_iterations = 0;
};

/// Whether k + h lies on the convex side of M_k (h has the sign of `gradient_inward`).
bool offset_admissible(const LevelFamily& family, const SurfacePoint& p, double h);

TangencyResult parallel_tangent(const LevelFamily& family, const SurfacePoint& p, double h);

enum class OffsetMethod { automatic, numeric };

/// Level offset h(t) reached at normal distance t from p; inverse of parallel_tangent's t(h).
/// Closed form for alpha = 2 quadrics unless `numeric` is requested.
double offset_map_h(const LevelFamily& family, const SurfacePoint& p, double t,
                    OffsetMethod method = OffsetMethod::automatic);

} // namespace quadrix
