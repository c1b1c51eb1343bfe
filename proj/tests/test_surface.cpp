#include <gtest/gtest.h>

#include <cmath>

#include "quadrix/error.hpp"
#include "quadrix/quadrics.hpp"
#include "quadrix/surface.hpp"
#include "support.hpp"

using namespace quadrix;
using quadrix::testing::Gen;
using quadrix::testing::rel_err;
using quadrix::testing::vec;

namespace {

// Gauss curvature of the quadric sum_i X_i^2 / A_i^2 +- Z^2 / C^2 = 1 (ellipsoid, or the
// two-sheeted hyperboloid Z^2/C^2 - sum X_i^2/A_i^2 = 1) in R^3.
double classical_quadric_curvature(const Vec& X, const Vec& A, double C, double Z) {
    double s = Z * Z / std::pow(C, 4);
    for (int i = 0; i < X.size(); ++i) {
        s += X[i] * X[i] / std::pow(A[i], 4);
    }
    return 1.0 / (A.array().square().prod() * C * C * s * s);
}

// Gauss curvature of an explicit graph z = u(x, y) from its derivatives.
double graph_curvature(double ux, double uy, double uxx, double uyy, double uxy) {
    double w = 1.0 + ux * ux + uy * uy;
    return (uxx * uyy - uxy * uxy) / (w * w);
}

} // namespace

TEST(Curvature, UnitSphereIsOne) {
    LevelFamily sphere = quadric_family(QuadricKind::ellipsoid, vec({1.0, 1.0}));
    Gen gen(1);
    for (int i = 0; i < 10; ++i) {
        Vec x = gen.box(2, 0.6);
        SurfacePoint p = point_on_level(sphere, 1.0, x);
        EXPECT_NEAR(gauss_kronecker(sphere, p), 1.0, 1e-12);
        EXPECT_NEAR(curvature_invariant(sphere, p), 16.0, 1e-11);
    }
}

TEST(Curvature, VertexValues) {
    LevelFamily paraboloid = quadric_family(QuadricKind::elliptic_paraboloid, vec({1.0, 1.0}));
    EXPECT_NEAR(gauss_kronecker(paraboloid, point_on_level(paraboloid, 1.0, vec({0.0, 0.0}))), 4.0, 1e-13);
    LevelFamily hyperbola = quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0}));
    SurfacePoint v = point_on_level(hyperbola, 1.0, vec({0.0}));
    EXPECT_NEAR(gauss_kronecker(hyperbola, v), 1.0, 1e-13);
    EXPECT_NEAR(curvature_invariant(hyperbola, v), 8.0, 1e-12);
    EXPECT_NEAR(curvature_invariant(paraboloid, point_on_level(paraboloid, 1.0, vec({0.7, -0.2}))), 4.0, 1e-11);
}

TEST(Curvature, MatchesClassicalQuadricFormulas) {
    Gen gen(2);
    for (int trial = 0; trial < 20; ++trial) {
        Vec a = gen.positive(2, 0.5, 2.0);
        double k = gen.uniform(0.3, 2.0);
        // Ellipsoid z^2 + sum a_i^2 x_i^2 = k has semi-axes sqrt(k)/a_i and sqrt(k).
        LevelFamily ell = quadric_family(QuadricKind::ellipsoid, a);
        Vec x = (gen.box(2, 0.6).array() * std::sqrt(k) / a.array()).matrix() / std::sqrt(2.0);
        SurfacePoint p = point_on_level(ell, k, x);
        Vec A = std::sqrt(k) * a.cwiseInverse();
        EXPECT_LT(rel_err(gauss_kronecker(ell, p), classical_quadric_curvature(x, A, std::sqrt(k), p.z)), 1e-11);

        LevelFamily hyp = quadric_family(QuadricKind::elliptic_hyperboloid, a);
        Vec y = gen.box(2, 2.0);
        SurfacePoint q = point_on_level(hyp, k, y);
        EXPECT_LT(rel_err(gauss_kronecker(hyp, q), classical_quadric_curvature(y, A, std::sqrt(k), q.z)), 1e-11);
    }
}

TEST(Curvature, MatchesGraphFormulaForPerturbedParaboloid) {
    // z = f + k with f = x^2 + 2.25 y^2 + 0.3 (x^4 + y^4).
    LevelFamily fam(FunctionSpec::perturbed({1.0, 1.5}, 0.3, Perturbation::quartic), 1.0, Sign::minus);
    Gen gen(3);
    for (int i = 0; i < 20; ++i) {
        Vec x = gen.box(2, 1.5);
        SurfacePoint p = point_on_level(fam, 0.5, x);
        double ux = 2 * x[0] + 1.2 * std::pow(x[0], 3);
        double uy = 4.5 * x[1] + 1.2 * std::pow(x[1], 3);
        double uxx = 2 + 3.6 * x[0] * x[0];
        double uyy = 4.5 + 3.6 * x[1] * x[1];
        EXPECT_LT(rel_err(gauss_kronecker(fam, p), graph_curvature(ux, uy, uxx, uyy, 0.0)), 1e-12);
    }
}

TEST(Curvature, CubicPowerInvariantVaries) {
    LevelFamily fam(FunctionSpec::quadratic({1.0, 1.0}), 3.0, Sign::minus);
    double c0 = curvature_invariant(fam, point_on_level(fam, 1.0, vec({0.2, 0.1})));
    double c1 = curvature_invariant(fam, point_on_level(fam, 1.0, vec({1.0, 0.5})));
    EXPECT_GT(std::fabs(c0 - c1) / c0, 1e-3);
}

TEST(SurfacePointInvariants, FrameNormalAndLevel) {
    Gen gen(4);
    std::vector<std::pair<LevelFamily, double>> cases = {
        {quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 2.0, 0.5})), 1.3},
        {quadric_family(QuadricKind::ellipsoid, vec({1.0, 2.0, 0.5})), 4.0},
        {LevelFamily(FunctionSpec::perturbed({1.0, 1.0, 1.0}, 0.2, Perturbation::cosh), 1.5, Sign::minus), 0.7},
        {LevelFamily(parse_expression("x1^2 + x2^2 + x3^2 + x1^4", 3), 2.0, Sign::plus), 3.0},
    };
    for (const auto& [fam, k] : cases) {
        for (int i = 0; i < 10; ++i) {
            SurfacePoint p = point_on_level(fam, k, gen.box(3, 0.5));
            EXPECT_LE(std::fabs(fam.g(p.position()) - k), 1e-10 * (1 + std::fabs(k)));
            EXPECT_NEAR(p.normal.norm(), 1.0, 1e-12);
            Mat gram = p.frame.transpose() * p.frame;
            EXPECT_LE((gram - Mat::Identity(3, 3)).norm(), 1e-12);
            EXPECT_LE((p.frame.transpose() * p.normal).norm(), 1e-12);
            EXPECT_NEAR(std::fabs(p.grad_g.dot(p.normal)), p.grad_norm(), 1e-12 * p.grad_norm());
            EXPECT_EQ(p.grad_g.dot(p.normal) > 0 ? 1 : -1, p.gradient_inward);
        }
    }
}

TEST(SurfacePointInvariants, OrientationConventions) {
    LevelFamily hyp = quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 1.0}));
    LevelFamily ell = quadric_family(QuadricKind::ellipsoid, vec({1.0, 1.0}));
    SurfacePoint ph = point_on_level(hyp, 1.0, vec({0.3, 0.1}));
    SurfacePoint pe = point_on_level(ell, 1.0, vec({0.3, 0.1}));
    EXPECT_EQ(ph.gradient_inward, 1);
    EXPECT_EQ(ph.convex_up, 1);
    EXPECT_EQ(pe.gradient_inward, -1);
    EXPECT_EQ(pe.convex_up, -1);
    EXPECT_TRUE(offset_admissible(hyp, ph, 0.5));
    EXPECT_FALSE(offset_admissible(hyp, ph, -0.5));
    EXPECT_TRUE(offset_admissible(ell, pe, -0.5));
    EXPECT_FALSE(offset_admissible(ell, pe, 0.5));
}

TEST(SurfacePointInvariants, Failures) {
    LevelFamily saddle(parse_expression("x1^2 - x2^2", 2), 1.0, Sign::minus);
    EXPECT_THROW(point_on_level(saddle, 1.0, vec({0.2, 0.3})), ConvexityError);
    LevelFamily ell = quadric_family(QuadricKind::ellipsoid, vec({1.0, 1.0}));
    EXPECT_THROW(point_on_level(ell, 1.0, vec({1.0, 0.5})), RangeError);
    EXPECT_THROW(point_on_level(ell, 1.0, vec({1.0})), DomainError);
}

TEST(LocalGraph, SphereAndParaboloidValues) {
    LevelFamily sphere = quadric_family(QuadricKind::ellipsoid, vec({1.0, 1.0}));
    SurfacePoint pole = point_on_level(sphere, 1.0, vec({0.0, 0.0}));
    EXPECT_NEAR(local_graph(sphere, pole, vec({0.36, 0.48})), 0.2, 1e-14);
    EXPECT_NEAR(graph_radius(sphere, pole), 0.9, 1e-13);
    EXPECT_LE((second_fundamental_form(sphere, pole) - Mat::Identity(2, 2)).norm(), 1e-13);

    LevelFamily paraboloid = quadric_family(QuadricKind::elliptic_paraboloid, vec({1.0, 1.0}));
    SurfacePoint vertex = point_on_level(paraboloid, 1.0, vec({0.0, 0.0}));
    EXPECT_NEAR(local_graph(paraboloid, vertex, vec({0.3, 0.4})), 0.25, 1e-14);
}

TEST(LocalGraph, LandsOnTheLevelSet) {
    Gen gen(5);
    std::vector<std::pair<LevelFamily, double>> cases = {
        {quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 2.0})), 1.0},
        {quadric_family(QuadricKind::ellipsoid, vec({1.0, 2.0})), 1.0},
        {LevelFamily(FunctionSpec::perturbed({1.0, 1.0}, 0.2, Perturbation::quartic), 2.0, Sign::minus), 1.0},
    };
    for (const auto& [fam, k] : cases) {
        for (int i = 0; i < 10; ++i) {
            SurfacePoint p = point_on_level(fam, k, gen.box(2, 0.3));
            double r = graph_radius(fam, p) * gen.uniform(0.05, 0.4);
            double phi = gen.uniform(0, 2 * M_PI);
            Vec y = r * vec({std::cos(phi), std::sin(phi)});
            double w = 0.0;
            try {
                w = local_graph(fam, p, y);
            } catch (const Error& e) {
                ADD_FAILURE() << e.what() << " x=" << p.x.transpose() << " y=" << y.transpose() << " k=" << k
                              << " radius=" << graph_radius(fam, p);
                continue;
            }
            EXPECT_GE(w, 0.0);
            Vec X = p.position() + p.frame * y + w * p.normal;
            EXPECT_LE(std::fabs(fam.g(X) - k), 1e-11);
            // Second-order behaviour: w ~ y^T II y / 2.
            double quad = 0.5 * y.dot(second_fundamental_form(fam, p) * y);
            EXPECT_NEAR(local_graph(fam, p, 1e-3 * y) / (1e-6 * quad), 1.0, 1e-2);
        }
    }
}

TEST(ParallelTangent, HyperboloidScalesThePoint) {
    LevelFamily hyp = quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 2.0}));
    Gen gen(6);
    for (int i = 0; i < 10; ++i) {
        double k = gen.uniform(0.5, 2.0);
        double h = gen.uniform(0.1, 2.0);
        SurfacePoint p = point_on_level(hyp, k, gen.box(2, 1.5));
        TangencyResult r = parallel_tangent(hyp, p, h);
        Vec want = std::sqrt((k + h) / k) * p.position();
        EXPECT_LE((r.v.position() - want).norm(), 1e-10 * want.norm());
        EXPECT_GT(r.lambda, 0.0);
        EXPECT_NEAR(r.t, (r.v.position() - p.position()).dot(p.normal), 1e-13);
        EXPECT_NEAR(offset_map_h(hyp, p, r.t), h, 1e-10 * h);
        EXPECT_NEAR(offset_map_h(hyp, p, r.t, OffsetMethod::numeric), h, 1e-9 * h);
    }
}

TEST(ParallelTangent, ClosedFormOffsets) {
    LevelFamily hyp = quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0}));
    SurfacePoint vertex = point_on_level(hyp, 1.0, vec({0.0}));
    EXPECT_NEAR(offset_map_h(hyp, vertex, 0.1), 0.21, 1e-15);
    LevelFamily sphere = quadric_family(QuadricKind::ellipsoid, vec({1.0, 1.0}));
    SurfacePoint p = point_on_level(sphere, 1.0, vec({0.3, -0.4}));
    EXPECT_NEAR(offset_map_h(sphere, p, 0.5), -0.75, 1e-14);
    EXPECT_NEAR(parallel_tangent(sphere, p, -0.75).t, 0.5, 1e-12);
    EXPECT_THROW(offset_map_h(sphere, p, 1.2), RangeError);
}

TEST(ParallelTangent, DerivativeMatchesFiniteDifference) {
    LevelFamily fam(FunctionSpec::perturbed({1.0, 1.5}, 0.25, Perturbation::cosh), 2.0, Sign::minus);
    Gen gen(8);
    for (int i = 0; i < 8; ++i) {
        SurfacePoint p = point_on_level(fam, 1.0, gen.box(2, 1.0));
        double h = gen.uniform(0.2, 1.0);
        double d = 1e-5;
        TangencyResult r = parallel_tangent(fam, p, h);
        double fd = (parallel_tangent(fam, p, h + d).t - parallel_tangent(fam, p, h - d).t) / (2 * d);
        EXPECT_LT(rel_err(r.dt_dh, fd), 1e-6);
        Vec gv = r.v.grad_g;
        EXPECT_LE((gv - r.lambda * p.grad_g).norm(), 1e-10 * gv.norm());
        EXPECT_NEAR(fam.g(r.v.position()), 1.0 + h, 1e-10);
    }
}
