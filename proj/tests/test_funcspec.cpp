#include <gtest/gtest.h>

#include <cmath>

#include "quadrix/error.hpp"
#include "quadrix/funcspec.hpp"
#include "support.hpp"

using namespace quadrix;
using quadrix::testing::Gen;
using quadrix::testing::vec;

namespace {

// Central differences of the value for the gradient, of the gradient for the Hessian.
Vec fd_gradient(const FunctionSpec& f, const Vec& x, double step) {
    Vec g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Vec xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        g[i] = (f.value(xp) - f.value(xm)) / (2.0 * step);
    }
    return g;
}

Mat fd_hessian(const FunctionSpec& f, const Vec& x, double step) {
    Mat H(x.size(), x.size());
    for (int j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        H.col(j) = (f.jet1(xp).gradient - f.jet1(xm).gradient) / (2.0 * step);
    }
    return H;
}

void expect_close(double got, double want, double rel, double abs_floor, const std::string& what) {
    EXPECT_LE(std::fabs(got - want), std::max(rel * std::fabs(want), abs_floor)) << what << ": " << got << " vs " << want;
}

} // namespace

TEST(Parse, SumOfSquaresEvaluates) {
    FunctionSpec f = parse_expression("x1^2 + x2^2", 2);
    EXPECT_DOUBLE_EQ(f.value(vec({1.0, 2.0})), 5.0);
}

TEST(Parse, VariableOutOfRangeIsRejected) {
    try {
        parse_expression("x1^2 + x3^2", 2);
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("x3"), std::string::npos);
        EXPECT_EQ(e.position(), 7u);
    }
}

TEST(Parse, SyntaxErrorsCarryPositions) {
    try {
        parse_expression("x1 + * x2", 2);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 5u);
    }
    EXPECT_THROW(parse_expression("(x1 + x2", 2), ParseError);
    EXPECT_THROW(parse_expression("x1 + x2)", 2), ParseError);
    EXPECT_THROW(parse_expression("tanh(x1)", 1), ParseError);
    EXPECT_THROW(parse_expression("", 1), ParseError);
    EXPECT_THROW(parse_expression("x0", 1), ParseError);
}

TEST(Parse, PowerBindsTighterThanMinusAndIsRightAssociative) {
    EXPECT_DOUBLE_EQ(parse_expression("-x1^2", 1).value(vec({3.0})), -9.0);
    EXPECT_DOUBLE_EQ(parse_expression("2^3^2", 1).value(vec({0.0})), 512.0);
    EXPECT_DOUBLE_EQ(parse_expression("1 - 2 - 3", 1).value(vec({0.0})), -4.0);
    EXPECT_DOUBLE_EQ(parse_expression("8 / 4 / 2", 1).value(vec({0.0})), 1.0);
    EXPECT_DOUBLE_EQ(parse_expression("2 * x1 + 3 * x1^2", 1).value(vec({2.0})), 16.0);
    EXPECT_DOUBLE_EQ(parse_expression("1.5e1 + .5", 1).value(vec({0.0})), 15.5);
}

TEST(Parse, CoshAtOriginHasUnitCurvature) {
    FunctionSpec f = parse_expression("cosh(x1) - 1", 1);
    Jet2 j = f.jet2(vec({0.0}));
    EXPECT_DOUBLE_EQ(j.value, 0.0);
    EXPECT_DOUBLE_EQ(j.gradient[0], 0.0);
    EXPECT_DOUBLE_EQ(j.hessian(0, 0), 1.0);
}

TEST(Builtin, QuadraticFormJet) {
    FunctionSpec f = FunctionSpec::quadratic({1.0, 2.0});
    Jet2 j = f.jet2(vec({1.0, 1.0}));
    EXPECT_DOUBLE_EQ(j.value, 5.0);
    EXPECT_DOUBLE_EQ(j.gradient[0], 2.0);
    EXPECT_DOUBLE_EQ(j.gradient[1], 8.0);
    EXPECT_DOUBLE_EQ(j.hessian(0, 0), 2.0);
    EXPECT_DOUBLE_EQ(j.hessian(1, 1), 8.0);
    EXPECT_DOUBLE_EQ(j.hessian(0, 1), 0.0);
}

TEST(Builtin, QuadraticHessianDeterminantIsConstant) {
    Gen gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        int n = gen.integer(1, 6);
        Vec a = gen.positive(n, 0.5, 2.0);
        FunctionSpec f = FunctionSpec::quadratic(quadrix::testing::stdvec(a));
        double want = std::ldexp(a.array().square().prod(), n);
        EXPECT_NEAR(f.jet2(gen.box(n, 3.0)).hessian.determinant() / want, 1.0, 1e-13);
    }
}

TEST(Builtin, PerturbedQuarticJet) {
    FunctionSpec f = FunctionSpec::perturbed({1.0, 1.0}, 0.1, Perturbation::quartic);
    Jet1 j = f.jet1(vec({1.0, 0.0}));
    EXPECT_NEAR(j.value, 1.1, 1e-15);
    EXPECT_NEAR(j.gradient[0], 2.4, 1e-15);
    EXPECT_EQ(j.gradient[1], 0.0);
}

TEST(Builtin, RejectsBadCoefficients) {
    EXPECT_THROW(FunctionSpec::quadratic({1.0, -1.0}), DomainError);
    EXPECT_THROW(FunctionSpec::quadratic({}), DomainError);
    EXPECT_THROW(FunctionSpec::perturbed({1.0}, -0.1, Perturbation::cosh), DomainError);
    EXPECT_THROW(FunctionSpec::quadratic(std::vector<double>(7, 1.0)), DomainError);
}

TEST(Builtin, ExpressionAndBuiltinAgree) {
    FunctionSpec builtin = FunctionSpec::perturbed({1.0, 2.0}, 0.3, Perturbation::cosh);
    FunctionSpec text = parse_expression("x1^2 + 4*x2^2 + 0.3*(cosh(x1) - 1 + cosh(x2) - 1)", 2);
    Gen gen(17);
    for (int i = 0; i < 25; ++i) {
        Vec x = gen.box(2, 2.0);
        Jet2 a = builtin.jet2(x);
        Jet2 b = text.jet2(x);
        EXPECT_NEAR(a.value, b.value, 1e-12 * (1 + std::fabs(a.value)));
        EXPECT_LE((a.gradient - b.gradient).norm(), 1e-12 * (1 + a.gradient.norm()));
        EXPECT_LE((a.hessian - b.hessian).norm(), 1e-12 * (1 + a.hessian.norm()));
    }
}

TEST(Derivatives, AgreeWithCentralDifferences) {
    struct Case {
        FunctionSpec f;
        double half;
    };
    std::vector<Case> cases = {
        {FunctionSpec::quadratic({1.0, 2.0, 0.5}), 2.0},
        {FunctionSpec::perturbed({1.0, 1.5}, 0.2, Perturbation::quartic), 1.5},
        {FunctionSpec::perturbed({0.7, 1.0, 1.2}, 0.5, Perturbation::cosh), 2.0},
        {parse_expression("exp(0.3*x1) + x1^2*x2^2 + sqrt(1 + x2^2) + log(2 + x1^2)", 2), 1.5},
        {parse_expression("x1^4/(1 + x2^2) + sinh(x2)*x1 - x1/x2^2", 2), 1.0},
        {parse_expression("(x1 + 2*x2 - x3)^2 + exp(x1*x3) + x2^1.5", 3), 0.8},
    };
    Gen gen(20240611);
    const double step = 1e-5;
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const FunctionSpec& f = cases[c].f;
        for (int trial = 0; trial < 10; ++trial) {
            Vec x = gen.box(f.dimension(), cases[c].half);
            if (c == 4) {
                x[1] = 0.5 + std::fabs(x[1]);
            }
            if (c == 5) {
                x[1] = 0.2 + std::fabs(x[1]);
            }
            Jet2 j = f.jet2(x);
            Vec g = fd_gradient(f, x, step);
            Mat H = fd_hessian(f, x, step);
            for (int i = 0; i < x.size(); ++i) {
                expect_close(j.gradient[i], g[i], 1e-6, 1e-9, "case " + std::to_string(c) + " grad");
                for (int k = 0; k < x.size(); ++k) {
                    expect_close(j.hessian(i, k), H(i, k), 1e-6, 1e-9, "case " + std::to_string(c) + " hess");
                }
            }
            double asym = (j.hessian - j.hessian.transpose()).norm();
            EXPECT_LE(asym, 1e-12 * std::max(1.0, j.hessian.norm()));
            auto [value, slope] = f.directional(x, Vec::Ones(x.size()));
            EXPECT_NEAR(value, j.value, 1e-13 * (1 + std::fabs(value)));
            EXPECT_NEAR(slope, j.gradient.sum(), 1e-12 * (1 + j.gradient.norm()));
        }
    }
}

TEST(Derivatives, DomainViolationsAreReported) {
    EXPECT_THROW(parse_expression("log(x1)", 1).jet2(vec({-1.0})), DomainError);
    EXPECT_THROW(parse_expression("sqrt(x1)", 1).value(vec({-0.5})), DomainError);
    EXPECT_THROW(parse_expression("1/x1", 1).value(vec({0.0})), DomainError);
    EXPECT_THROW(parse_expression("exp(1000*x1)", 1).jet2(vec({1.0})), DomainError);
}

TEST(RoundTrip, PrintedExpressionsEvaluateIdentically) {
    const char* sources[] = {
        "x1^2 + x2^2",
        "-x1^2 + 2^x2^2 - (x1 - x2) / 3",
        "exp(0.1*x1) * cosh(x2) - sqrt(1 + x1^2 + x2^2) + log(3 + sinh(x1)^2)",
        "1e-3 * x1^4 + 0.1 / (1 + x2^2) - -x1",
    };
    Gen gen(99);
    for (const char* src : sources) {
        Expression e = Expression::parse(src, 2);
        Expression again = Expression::parse(e.to_string(), 2);
        EXPECT_EQ(e.to_string(), again.to_string());
        for (int i = 0; i < 100; ++i) {
            Vec x = gen.box(2, 2.0);
            std::array<double, 2> xs{x[0], x[1]};
            double a = e.evaluate<double>(xs);
            double b = again.evaluate<double>(xs);
            EXPECT_EQ(a, b) << src;
        }
    }
}
