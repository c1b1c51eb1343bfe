#include "quadrix/funcspec.hpp"

#include <cmath>
#include <cstdio>

namespace quadrix {

namespace {

void check_coefficients(const std::vector<double>& a) {
    if (a.empty() || static_cast<int>(a.size()) > kMaxDimension) {
        throw DomainError("dimension must be between 1 and " + std::to_string(kMaxDimension));
    }
    for (double ai : a) {
        if (!(ai > 0.0) || !std::isfinite(ai)) {
            throw DomainError("quadratic coefficients must be positive and finite");
        }
    }
}

void check_point(const Vec& x, int n) {
    if (x.size() != n) {
        throw DomainError("point has dimension " + std::to_string(x.size()) + ", expected " +
                          std::to_string(n));
    }
    if (!x.allFinite()) {
        throw DomainError("point has non-finite coordinates");
    }
}

void check_finite(double v) {
    if (!std::isfinite(v)) {
        throw DomainError("overflow: non-finite function value");
    }
}

template <typename Derived>
void check_finite(const Eigen::MatrixBase<Derived>& m) {
    if (!m.allFinite()) {
        throw DomainError("overflow: non-finite derivative");
    }
}

// Per-coordinate pieces of the built-in families: p(x), p'(x), p''(x).
struct Terms {
    double v, d1, d2;
};

Terms builtin_terms(const QuadraticForm& q, int i, double x) {
    double a2 = q.a[i] * q.a[i];
    return {a2 * x * x, 2.0 * a2 * x, 2.0 * a2};
}

Terms builtin_terms(const PerturbedQuadratic& q, int i, double x) {
    double a2 = q.a[i] * q.a[i];
    Terms t{a2 * x * x, 2.0 * a2 * x, 2.0 * a2};
    if (q.kind == Perturbation::quartic) {
        double x2 = x * x;
        t.v += q.epsilon * x2 * x2;
        t.d1 += 4.0 * q.epsilon * x2 * x;
        t.d2 += 12.0 * q.epsilon * x2;
    } else {
        t.v += q.epsilon * (std::cosh(x) - 1.0);
        t.d1 += q.epsilon * std::sinh(x);
        t.d2 += q.epsilon * std::cosh(x);
    }
    return t;
}

template <typename Builtin>
Jet2 separable_jet2(const Builtin& b, const Vec& x) {
    const int n = static_cast<int>(x.size());
    Jet2 j{0.0, Vec::Zero(n), Mat::Zero(n, n)};
    for (int i = 0; i < n; ++i) {
        Terms t = builtin_terms(b, i, x[i]);
        j.value += t.v;
        j.gradient[i] = t.d1;
        j.hessian(i, i) = t.d2;
    }
    return j;
}

std::string format_list(const std::vector<double>& a) {
    std::string s = "(";
    char buf[32];
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", a[i]);
        s += (i ? "," : "");
        s += buf;
    }
    return s + ")";
}

} // namespace

FunctionSpec FunctionSpec::quadratic(std::vector<double> a) {
    check_coefficients(a);
    int n = static_cast<int>(a.size());
    return FunctionSpec(n, QuadraticForm{std::move(a)});
}

FunctionSpec FunctionSpec::perturbed(std::vector<double> a, double epsilon, Perturbation kind) {
    check_coefficients(a);
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("perturbation epsilon must be finite and nonnegative");
    }
    int n = static_cast<int>(a.size());
    return FunctionSpec(n, PerturbedQuadratic{std::move(a), epsilon, kind});
}

FunctionSpec FunctionSpec::expression(Expression e) {
    int n = e.dimension();
    if (n < 1 || n > kMaxDimension) {
        throw DomainError("dimension must be between 1 and " + std::to_string(kMaxDimension));
    }
    return FunctionSpec(n, std::move(e));
}

FunctionSpec parse_expression(std::string_view source, int n) {
    if (n < 1 || n > kMaxDimension) {
        throw DomainError("dimension must be between 1 and " + std::to_string(kMaxDimension));
    }
    return FunctionSpec::expression(Expression::parse(source, n));
}

double FunctionSpec::value(const Vec& x) const {
    check_point(x, n_);
    double v = std::visit(
        [&](const auto& b) -> double {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, Expression>) {
                return b.template evaluate<double>(std::span<const double>(x.data(), x.size()));
            } else {
                double s = 0.0;
                for (int i = 0; i < n_; ++i) {
                    s += builtin_terms(b, i, x[i]).v;
                }
                return s;
            }
        },
        body_);
    check_finite(v);
    return v;
}

std::pair<double, double> FunctionSpec::directional(const Vec& x, const Vec& dir) const {
    check_point(x, n_);
    auto r = std::visit(
        [&](const auto& b) -> std::pair<double, double> {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, Expression>) {
                std::vector<Dual<double>> xs(static_cast<std::size_t>(n_));
                for (int i = 0; i < n_; ++i) {
                    xs[i] = Dual<double>(x[i], dir[i]);
                }
                Dual<double> y = b.template evaluate<Dual<double>>(std::span<const Dual<double>>(xs));
                return {y.v, y.d};
            } else {
                double v = 0.0, d = 0.0;
                for (int i = 0; i < n_; ++i) {
                    Terms t = builtin_terms(b, i, x[i]);
                    v += t.v;
                    d += t.d1 * dir[i];
                }
                return {v, d};
            }
        },
        body_);
    check_finite(r.first);
    check_finite(r.second);
    return r;
}

Jet1 FunctionSpec::jet1(const Vec& x) const {
    check_point(x, n_);
    Jet1 j{0.0, Vec::Zero(n_)};
    if (const auto* e = std::get_if<Expression>(&body_)) {
        std::vector<Dual<double>> xs(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            for (int m = 0; m < n_; ++m) {
                xs[m] = Dual<double>(x[m], m == i ? 1.0 : 0.0);
            }
            Dual<double> y = e->evaluate<Dual<double>>(std::span<const Dual<double>>(xs));
            j.value = y.v;
            j.gradient[i] = y.d;
        }
    } else {
        Jet2 full = jet2(x);
        j.value = full.value;
        j.gradient = full.gradient;
    }
    check_finite(j.value);
    check_finite(j.gradient);
    return j;
}

Jet2 FunctionSpec::jet2(const Vec& x) const {
    check_point(x, n_);
    Jet2 j = std::visit(
        [&](const auto& b) -> Jet2 {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, Expression>) {
                // Seed the outer dual along e_i and the inner one along e_j:
                // y.v.v = f, y.v.d = f_j, y.d.v = f_i, y.d.d = f_ij.
                using D2 = Dual<Dual<double>>;
                Jet2 out{0.0, Vec::Zero(n_), Mat::Zero(n_, n_)};
                std::vector<D2> xs(static_cast<std::size_t>(n_));
                for (int i = 0; i < n_; ++i) {
                    for (int jj = i; jj < n_; ++jj) {
                        for (int m = 0; m < n_; ++m) {
                            xs[m] = D2(Dual<double>(x[m], m == jj ? 1.0 : 0.0),
                                       Dual<double>(m == i ? 1.0 : 0.0, 0.0));
                        }
                        D2 y = b.template evaluate<D2>(std::span<const D2>(xs));
                        out.value = y.v.v;
                        out.gradient[jj] = y.v.d;
                        out.gradient[i] = y.d.v;
                        out.hessian(i, jj) = y.d.d;
                        out.hessian(jj, i) = y.d.d;
                    }
                }
                return out;
            } else {
                return separable_jet2(b, x);
            }
        },
        body_);
    check_finite(j.value);
    check_finite(j.gradient);
    check_finite(j.hessian);
    return j;
}

const std::vector<double>* FunctionSpec::quadratic_coefficients() const {
    if (const auto* q = std::get_if<QuadraticForm>(&body_)) {
        return &q->a;
    }
    return nullptr;
}

std::string FunctionSpec::describe() const {
    return std::visit(
        [&](const auto& b) -> std::string {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, Expression>) {
                return b.to_string();
            } else if constexpr (std::is_same_v<B, QuadraticForm>) {
                return "quadratic a=" + format_list(b.a);
            } else {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", b.epsilon);
                return std::string("perturbed a=") + format_list(b.a) + " eps=" + buf +
                       (b.kind == Perturbation::quartic ? " quartic" : " cosh");
            }
        },
        body_);
}

} // namespace quadrix
