#include "quadrix/surface.hpp"

#include <cmath>
#include <limits>

#include "roots.hpp"

namespace quadrix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxNewton = 50;

Vec join(const Vec& x, double z) {
    Vec X(x.size() + 1);
    X.head(x.size()) = x;
    X[x.size()] = z;
    return X;
}

} // namespace

LevelFamily::LevelFamily(FunctionSpec f, double alpha, Sign sign)
    : f_(std::move(f)), alpha_(alpha), sign_(sign) {
    if (!(alpha != 0.0) || !std::isfinite(alpha)) {
        throw DomainError("alpha must be finite and nonzero");
    }
    double r = std::nearbyint(alpha);
    even_integer_alpha_ = (r == alpha) && std::fmod(std::fabs(r), 2.0) == 0.0;
    odd_positive_alpha_ = (r == alpha) && r > 0.0 && std::fmod(r, 2.0) == 1.0;
}

bool LevelFamily::is_quadric() const {
    return f_.quadratic_coefficients() != nullptr && (alpha_ == 1.0 || alpha_ == 2.0);
}

bool LevelFamily::admits_height(double z) const {
    if (!std::isfinite(z)) {
        return false;
    }
    return z > 0.0 || odd_positive_alpha_ || (sign_ == Sign::plus && even_integer_alpha_);
}

double LevelFamily::g(const Vec& X) const {
    const int n = dimension();
    double z = X[n];
    if (!admits_height(z)) {
        return kNaN;
    }
    try {
        return std::pow(z, alpha_) - sign_factor() * f_.value(X.head(n));
    } catch (const DomainError&) {
        return kNaN;
    }
}

std::pair<double, double> LevelFamily::g_directional(const Vec& X, const Vec& D) const {
    const int n = dimension();
    double z = X[n];
    if (!admits_height(z)) {
        return {kNaN, kNaN};
    }
    try {
        auto [fv, fd] = f_.directional(X.head(n), D.head(n));
        double s = sign_factor();
        return {std::pow(z, alpha_) - s * fv, -s * fd + alpha_ * std::pow(z, alpha_ - 1.0) * D[n]};
    } catch (const DomainError&) {
        return {kNaN, kNaN};
    }
}

Vec LevelFamily::grad_g(const Vec& X) const {
    const int n = dimension();
    double z = X[n];
    if (!admits_height(z)) {
        throw DomainError("height outside the domain of g");
    }
    Jet1 j = f_.jet1(X.head(n));
    Vec G(n + 1);
    G.head(n) = -sign_factor() * j.gradient;
    G[n] = alpha_ * std::pow(z, alpha_ - 1.0);
    return G;
}

Mat LevelFamily::hess_g(const Vec& X) const {
    const int n = dimension();
    double z = X[n];
    if (!admits_height(z)) {
        throw DomainError("height outside the domain of g");
    }
    Jet2 j = f_.jet2(X.head(n));
    Mat H = Mat::Zero(n + 1, n + 1);
    H.topLeftCorner(n, n) = -sign_factor() * j.hessian;
    // alpha = 1 would give 0 * pow(0, -1) at z = 0.
    H(n, n) = alpha_ == 1.0 ? 0.0 : alpha_ * (alpha_ - 1.0) * std::pow(z, alpha_ - 2.0);
    return H;
}

std::optional<double> LevelFamily::height_on_level(double k, const Vec& x) const {
    double c = sign_factor() * f_.value(x) + k;
    if (odd_positive_alpha_) {
        double z = alpha_ == 1.0 ? c : std::copysign(std::pow(std::fabs(c), 1.0 / alpha_), c);
        return std::isfinite(z) ? std::optional<double>(z) : std::nullopt;
    }
    if (!(c > 0.0)) {
        return std::nullopt;
    }
    double z = alpha_ == 2.0 ? std::sqrt(c) : std::pow(c, 1.0 / alpha_);
    if (!(z > 0.0) || !std::isfinite(z)) {
        return std::nullopt;
    }
    return z;
}

Vec SurfacePoint::position() const { return join(x, z); }

Mat graph_hessian(const LevelFamily& family, double /*k*/, const Vec& x, double z) {
    const double a = family.alpha();
    const double s = family.sign_factor();
    Jet2 j = family.f().jet2(x);
    Vec Fi = s * j.gradient;
    Mat Fij = s * j.hessian;
    if (a == 1.0) {
        return Fij;
    }
    double za = std::pow(z, a);
    Mat M = a * za * Fij - (a - 1.0) * Fi * Fi.transpose();
    return M / (a * a * std::pow(z, 2.0 * a - 1.0));
}

SurfacePoint point_on_level(const LevelFamily& family, double k, const Vec& x) {
    const int n = family.dimension();
    if (x.size() != n) {
        throw DomainError("point dimension mismatch");
    }
    auto z = family.height_on_level(k, x);
    if (!z) {
        throw RangeError("no admissible height z solves g(x, z) = k at this x");
    }
    const double a = family.alpha();
    const double s = family.sign_factor();

    Jet2 j = family.f().jet2(x);
    Vec Fi = s * j.gradient;
    Mat Hz = graph_hessian(family, k, x, *z);

    SurfacePoint p;
    p.x = x;
    p.z = *z;
    p.k = k;
    if (Eigen::LLT<Mat>(Hz).info() == Eigen::Success) {
        p.convex_up = 1;
    } else if (Eigen::LLT<Mat>(-Hz).info() == Eigen::Success) {
        p.convex_up = -1;
    } else {
        throw ConvexityError("level set is not strictly convex at this point (indefinite graph Hessian)");
    }

    double dz_scale = a * std::pow(*z, a - 1.0);
    Vec grad_z = Fi / dz_scale;
    p.grad_g = join(-Fi, dz_scale);

    Vec up = join(-grad_z, 1.0);
    p.normal = (static_cast<double>(p.convex_up) / up.norm()) * up;
    p.gradient_inward = p.grad_g.dot(p.normal) > 0.0 ? 1 : -1;

    Eigen::HouseholderQR<Mat> qr(p.normal);
    Mat Q = qr.householderQ() * Mat::Identity(n + 1, n + 1);
    p.frame = Q.rightCols(n);
    return p;
}

double gauss_kronecker(const LevelFamily& family, const SurfacePoint& p) {
    const int n = family.dimension();
    Mat Hz = graph_hessian(family, p.k, p.x, p.z);
    const double a = family.alpha();
    Vec Fi = family.sign_factor() * family.f().jet1(p.x).gradient;
    Vec grad_z = Fi / (a * std::pow(p.z, a - 1.0));
    double W = std::sqrt(1.0 + grad_z.squaredNorm());
    double det = (static_cast<double>(p.convex_up) * Hz).determinant();
    double K = det / std::pow(W, n + 2);
    if (!(K > 0.0)) {
        throw ConvexityError("nonpositive Gauss-Kronecker curvature");
    }
    return K;
}

double curvature_invariant(const LevelFamily& family, const SurfacePoint& p) {
    return gauss_kronecker(family, p) * std::pow(p.grad_norm(), family.dimension() + 2);
}

Mat second_fundamental_form(const LevelFamily& family, const SurfacePoint& p) {
    Mat H = family.hess_g(p.position());
    double gn = p.grad_g.dot(p.normal);
    Mat II = -(p.frame.transpose() * H * p.frame) / gn;
    return 0.5 * (II + II.transpose());
}

double graph_radius(const LevelFamily& family, const SurfacePoint& p) {
    Eigen::SelfAdjointEigenSolver<Mat> es(second_fundamental_form(family, p));
    double kmax = es.eigenvalues().maxCoeff();
    if (!(kmax > 0.0)) {
        throw ConvexityError("second fundamental form is not positive definite");
    }
    return 0.9 / kmax;
}

double local_graph(const LevelFamily& family, const SurfacePoint& p, const Vec& y) {
    const int n = family.dimension();
    if (y.size() != n) {
        throw DomainError("chart coordinate dimension mismatch");
    }
    if (y.squaredNorm() == 0.0) {
        return 0.0;
    }
    const Vec base = p.position() + p.frame * y;
    const double sigma = p.gradient_inward;
    // psi < 0 outside the convex side, > 0 inside; the graph is its first zero above w = 0.
    auto psi = [&](double w) -> std::pair<double, double> {
        auto [gv, gd] = family.g_directional(base + w * p.normal, p.normal);
        return {sigma * (gv - p.k), sigma * gd};
    };

    Mat II = second_fundamental_form(family, p);
    double w0 = 0.5 * y.dot(II * y);

    // Plain Newton from the second-order Taylor guess.
    double w = w0;
    for (int it = 0; it < kMaxNewton; ++it) {
        auto [f, df] = psi(w);
        if (!std::isfinite(f) || !(df > 0.0)) {
            break;
        }
        double step = f / df;
        w -= step;
        if (std::fabs(step) <= 1e-15 * (1.0 + std::fabs(w))) {
            auto [f2, df2] = psi(w);
            if (w >= -1e-14 && df2 > 0.0 && std::fabs(f2) <= 1e-10 * (1.0 + std::fabs(p.k))) {
                return std::max(w, 0.0);
            }
            break;
        }
    }

    // Fallback: bracket the first crossing and bisect-Newton inside it.
    double scale = std::max(w0, 1e-12);
    double hi = scale;
    bool found = false;
    for (int it = 0; it < 60; ++it) {
        double f = psi(hi).first;
        if (std::isfinite(f) && f > 0.0) {
            found = true;
            break;
        }
        hi *= 2.0;
    }
    if (!found) {
        throw RangeError("chart point outside the graph domain of M_k over the tangent plane");
    }
    auto root = detail::safeguarded_newton(psi, 0.0, hi, w0, 1e-15 * (1.0 + hi), 200, -1.0);
    if (!root) {
        throw ConvergenceError("local graph solve did not converge");
    }
    return *root;
}

bool offset_admissible(const LevelFamily& /*family*/, const SurfacePoint& p, double h) {
    return std::isfinite(h) && h * p.gradient_inward > 0.0;
}

namespace {

struct TangencySolve {
    Vec v;
    double lambda = 0.0;
    int iterations = 0;
    Mat jacobian;
};

// Newton on {g(v) = level, grad g(v) = lambda grad g(p)} from a given start.
std::optional<TangencySolve> tangency_newton(const LevelFamily& family, const Vec& Gp, double level,
                                             Vec v, double lambda) {
    const int m = static_cast<int>(v.size());
    const double gscale = Gp.norm();
    const double lscale = 1.0 + std::fabs(level);

    auto residual = [&](const Vec& vv, double lam, Vec& R) -> bool {
        double gv = family.g(vv);
        if (!std::isfinite(gv)) {
            return false;
        }
        R.resize(m + 1);
        R[0] = (gv - level) / lscale;
        try {
            R.tail(m) = (family.grad_g(vv) - lam * Gp) / gscale;
        } catch (const DomainError&) {
            return false;
        }
        return R.allFinite();
    };

    Vec R;
    if (!residual(v, lambda, R)) {
        return std::nullopt;
    }
    TangencySolve out;
    for (int it = 1; it <= kMaxNewton; ++it) {
        Mat J = Mat::Zero(m + 1, m + 1);
        J.block(0, 0, 1, m) = family.grad_g(v).transpose() / lscale;
        J.block(1, 0, m, m) = family.hess_g(v) / gscale;
        J.block(1, m, m, 1) = -Gp / gscale;
        Eigen::FullPivLU<Mat> lu(J);
        if (!lu.isInvertible()) {
            return std::nullopt;
        }
        Vec du = lu.solve(-R);

        double norm0 = R.norm();
        double step = 1.0;
        Vec Rn;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            Vec vn = v + step * du.head(m);
            double ln = lambda + step * du[m];
            if (residual(vn, ln, Rn) && (Rn.norm() < norm0 || Rn.norm() <= 1e-14)) {
                v = vn;
                lambda = ln;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            return std::nullopt;
        }
        R = Rn;
        out.iterations = it;
        double du_norm = step * du.norm();
        if (R.norm() <= 1e-14 || du_norm <= 1e-15 * (1.0 + v.norm())) {
            break;
        }
    }
    if (!(R.norm() <= 1e-10)) {
        return std::nullopt;
    }
    Mat J = Mat::Zero(m + 1, m + 1);
    J.block(0, 0, 1, m) = family.grad_g(v).transpose();
    J.block(1, 0, m, m) = family.hess_g(v);
    J.block(1, m, m, 1) = -Gp;
    out.v = v;
    out.lambda = lambda;
    out.jacobian = J;
    return out;
}

} // namespace

TangencyResult parallel_tangent(const LevelFamily& family, const SurfacePoint& p, double h) {
    const int n = family.dimension();
    if (h == 0.0) {
        return TangencyResult{p, 0.0, 1.0, 1.0 / p.grad_norm(), 0};
    }
    if (!offset_admissible(family, p, h)) {
        throw RangeError("offset h lies outside I_k (wrong side of M_k)");
    }
    const Vec P = p.position();
    const Vec& Gp = p.grad_g;
    const double G2 = Gp.squaredNorm();

    std::optional<TangencySolve> sol;
    int total_iterations = 0;
    for (int pieces = 1; pieces <= 32 && !sol; pieces *= 2) {
        Vec v = P;
        double lambda = 1.0;
        bool ok = true;
        for (int j = 1; j <= pieces; ++j) {
            double hj = h * j / pieces;
            double dh = h / pieces;
            Vec guess = v + (dh / G2) * Gp;
            auto step = tangency_newton(family, Gp, p.k + hj, guess, lambda);
            if (!step || !(step->lambda > 0.0)) {
                ok = false;
                break;
            }
            total_iterations += step->iterations;
            v = step->v;
            lambda = step->lambda;
            if (j == pieces) {
                sol = step;
            }
        }
        if (!ok) {
            sol.reset();
        }
    }
    if (!sol) {
        throw ConvergenceError("parallel tangent solve did not converge on the convex-side branch");
    }
    if (!(sol->lambda > 0.0)) {
        throw ConvergenceError("parallel tangent landed on the antipodal branch (lambda <= 0)");
    }

    TangencyResult r;
    r.v = point_on_level(family, p.k + h, sol->v.head(n));
    r.lambda = sol->lambda;
    r.newton_iterations = total_iterations;
    r.t = (r.v.position() - P).dot(p.normal);

    Vec rhs = Vec::Zero(n + 2);
    rhs[0] = 1.0;
    Vec dsol = Eigen::FullPivLU<Mat>(sol->jacobian).solve(rhs);
    r.dt_dh = dsol.head(n + 1).dot(p.normal);
    return r;
}

double offset_map_h(const LevelFamily& family, const SurfacePoint& p, double t, OffsetMethod method) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw RangeError("normal offset t must be finite and nonnegative");
    }
    if (t == 0.0) {
        return 0.0;
    }
    const double G = p.grad_norm();
    const double k = p.k;
    if (method == OffsetMethod::automatic && family.alpha() == 2.0 &&
        family.f().quadratic_coefficients() != nullptr && k > 0.0) {
        if (family.sign() == Sign::minus) {
            return G * G * t * t / (4.0 * k) + G * t;
        }
        if (t >= 2.0 * k / G) {
            throw RangeError("normal offset t exceeds the ellipsoid's admissible range");
        }
        return G * G * t * t / (4.0 * k) - G * t;
    }

    // Safeguarded Newton on s = |h| using dt/dh from the tangency Jacobian.
    const double dir = p.gradient_inward;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double s = G * t;
    for (int it = 0; it < 200; ++it) {
        std::optional<TangencyResult> r;
        try {
            r = parallel_tangent(family, p, dir * s);
        } catch (const Error&) {
            r.reset();
        }
        if (!r) {
            hi = s;
            s = 0.5 * (lo + hi);
            if (hi - lo <= 1e-15 * hi) {
                break;
            }
            continue;
        }
        double f = r->t - t;
        if (std::fabs(f) <= 1e-14 * t) {
            return dir * s;
        }
        if (f < 0.0) {
            lo = s;
        } else {
            hi = s;
        }
        double slope = dir * r->dt_dh;
        double next = slope > 0.0 ? s - f / slope : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo && next < hi)) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * s;
        }
        if (std::fabs(next - s) <= 1e-15 * s) {
            return dir * next;
        }
        s = next;
    }
    throw RangeError("normal offset t is outside the admissible range of this level set");
}

} // namespace quadrix
