#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "quadrix/expression.hpp"

namespace quadrix {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int kMaxDimension = 6;

/// Value, gradient f_i and Hessian f_ij of f at a point.
struct Jet2 {
    double value = 0.0;
    Vec gradient;
    Mat hessian;
};

/// Value and gradient of f at a point.
struct Jet1 {
    double value = 0.0;
    Vec gradient;
};

enum class Perturbation { quartic, cosh };

/// f(x) = sum a_i^2 x_i^2
struct QuadraticForm {
    std::vector<double> a;
};

/// f(x) = sum a_i^2 x_i^2 + eps * sum p(x_i), p = x^4 or cosh(x) - 1
struct PerturbedQuadratic {
    std::vector<double> a;
    double epsilon = 0.0;
    Perturbation kind = Perturbation::quartic;
};

/// A candidate convex function f: R^n -> R with exact first and second derivatives.
///
/// Built-in families are differentiated in closed form; expressions go through
/// nested forward-mode dual numbers. Instances are immutable and safe to share
/// across threads.
class FunctionSpec {
public:
    static FunctionSpec quadratic(std::vector<double> a);
    static FunctionSpec perturbed(std::vector<double> a, double epsilon, Perturbation kind);
    static FunctionSpec expression(Expression e);

    int dimension() const { return n_; }

    double value(const Vec& x) const;

    /// f(x) and the directional derivative <grad f(x), dir>.
    std::pair<double, double> directional(const Vec& x, const Vec& dir) const;

    Jet1 jet1(const Vec& x) const;
    Jet2 jet2(const Vec& x) const;

    /// Coefficients a_i when f is a plain quadratic form, empty otherwise.
    const std::vector<double>* quadratic_coefficients() const;

    const std::variant<QuadraticForm, PerturbedQuadratic, Expression>& body() const { return body_; }

    /// Human readable (and, for expressions, re-parseable) description.
    std::string describe() const;

private:
    FunctionSpec(int n, std::variant<QuadraticForm, PerturbedQuadratic, Expression> body)
        : n_(n), body_(std::move(body)) {}

    int n_;
    std::variant<QuadraticForm, PerturbedQuadratic, Expression> body_;
};

/// Parses an expression over x1..xn into a FunctionSpec.
FunctionSpec parse_expression(std::string_view source, int n);

/// Convenience wrapper matching the free-function style of the rest of the API.
inline Jet2 eval_jet2(const FunctionSpec& f, const Vec& x) { return f.jet2(x); }

} // namespace quadrix
