#include "quadrix/quadrics.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "quadrix/error.hpp"
#include "quadrix/quadrature.hpp"

namespace quadrix {

namespace {

void check_coefficients(const Vec& a) {
    if (a.size() < 1 || a.size() > kMaxDimension) {
        throw DomainError("quadric dimension must be between 1 and 6");
    }
    for (int i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0)) {
            throw DomainError("quadric coefficients must be positive");
        }
    }
}

double prod(const Vec& a) { return a.prod(); }

} // namespace

std::string to_string(QuadricKind kind) {
    switch (kind) {
    case QuadricKind::elliptic_paraboloid: return "elliptic_paraboloid";
    case QuadricKind::ellipsoid: return "ellipsoid";
    case QuadricKind::elliptic_hyperboloid: return "elliptic_hyperboloid";
    }
    return "unknown";
}

QuadricKind quadric_kind_from_string(const std::string& name) {
    if (name == "elliptic_paraboloid" || name == "paraboloid") {
        return QuadricKind::elliptic_paraboloid;
    }
    if (name == "ellipsoid") {
        return QuadricKind::ellipsoid;
    }
    if (name == "elliptic_hyperboloid" || name == "hyperboloid") {
        return QuadricKind::elliptic_hyperboloid;
    }
    throw ConfigError("unknown quadric kind '" + name + "'");
}

LevelFamily quadric_family(QuadricKind kind, const Vec& a) {
    check_coefficients(a);
    FunctionSpec f = FunctionSpec::quadratic(std::vector<double>(a.data(), a.data() + a.size()));
    switch (kind) {
    case QuadricKind::elliptic_paraboloid: return LevelFamily(f, 1.0, Sign::minus);
    case QuadricKind::ellipsoid: return LevelFamily(f, 2.0, Sign::plus);
    case QuadricKind::elliptic_hyperboloid: return LevelFamily(f, 2.0, Sign::minus);
    }
    throw DomainError("unknown quadric kind");
}

double unit_ball_volume(int n) {
    if (n < 0) {
        throw DomainError("dimension must be nonnegative");
    }
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int m) { return (m + 1) * unit_ball_volume(m + 1); }

double hyperboloid_cap_volume(const Vec& a, double k, double h) {
    check_coefficients(a);
    if (!(k > 0.0) || !(h >= 0.0)) {
        throw DomainError("hyperboloid cap needs k > 0 and h >= 0");
    }
    const int n = static_cast<int>(a.size());
    if (h == 0.0) {
        return 0.0;
    }
    auto integrand = [&](double r) { return std::sqrt(r * r + k) * std::pow(r, n - 1); };
    double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::sqrt(h), 15,
                                                                             1e-14);
    // The bracket cancels to leading order; keep it positive against rounding.
    double bracket = std::sqrt(k + h) * std::pow(h, 0.5 * n) - n * I;
    return unit_ball_volume(n) / prod(a) * std::max(bracket, 0.0);
}

double hyperboloid_phi_prime(const Vec& a, double k, double h) {
    check_coefficients(a);
    if (!(k > 0.0) || !(h >= 0.0)) {
        throw DomainError("hyperboloid cap needs k > 0 and h >= 0");
    }
    const int n = static_cast<int>(a.size());
    return unit_ball_volume(n) / prod(a) * std::pow(h, 0.5 * n) / (2.0 * std::sqrt(k + h));
}

double hyperboloid_area_relation(const Vec& a, double k, double h, double grad_norm) {
    return std::sqrt((k + h) / k) * hyperboloid_phi_prime(a, k, h) * grad_norm;
}

double ellipsoid_cap_volume(const Vec& a, double k, double h) {
    check_coefficients(a);
    if (!(k > 0.0) || !(h <= 0.0) || !(h > -k)) {
        throw DomainError("ellipsoid cap needs k > 0 and -k < h <= 0");
    }
    const int n = static_cast<int>(a.size());
    if (h == 0.0) {
        return 0.0;
    }
    const double R = std::sqrt(k);
    const double c = R - std::sqrt(k + h);
    // Cap of the (n+1)-ball: (1/2) omega_{n+1} R^{n+1} I_x((n+2)/2, 1/2), x = (2Rc - c^2)/R^2.
    double x = std::min(1.0, -h / k);
    double cap = 0.5 * unit_ball_volume(n + 1) * std::pow(R, n + 1) * boost::math::ibeta(0.5 * (n + 2), 0.5, x);
    if (c > R) {
        cap = unit_ball_volume(n + 1) * std::pow(R, n + 1) - cap;
    }
    return cap / prod(a);
}

double ellipsoid_phi_prime(const Vec& a, double k, double h) {
    check_coefficients(a);
    if (!(k > 0.0) || !(h <= 0.0) || !(h > -k)) {
        throw DomainError("ellipsoid cap needs k > 0 and -k < h <= 0");
    }
    const int n = static_cast<int>(a.size());
    return -unit_ball_volume(n) / prod(a) * std::pow(-h, 0.5 * n) / (2.0 * std::sqrt(k + h));
}

double ellipsoid_area_relation(const Vec& a, double k, double h, double grad_norm) {
    return std::sqrt((k + h) / k) * std::fabs(ellipsoid_phi_prime(a, k, h)) * grad_norm;
}

double paraboloid_gamma(const Vec& a) {
    check_coefficients(a);
    const int n = static_cast<int>(a.size());
    return 2.0 * unit_sphere_area(n - 1) / (n * (n + 2) * prod(a));
}

StarredPair paraboloid_starred(const Vec& a, double h, double grad_norm) {
    if (!(h >= 0.0)) {
        throw DomainError("paraboloid offset must be nonnegative");
    }
    const int n = static_cast<int>(a.size());
    double gamma = paraboloid_gamma(a);
    return {gamma * std::pow(h, 0.5 * (n + 2)), 0.5 * (n + 2) * gamma * grad_norm * std::pow(h, 0.5 * n)};
}

StarredPair quadric_starred(QuadricKind kind, const Vec& a, double k, double h, double grad_norm) {
    switch (kind) {
    case QuadricKind::elliptic_paraboloid: return paraboloid_starred(a, h, grad_norm);
    case QuadricKind::ellipsoid:
        return {ellipsoid_cap_volume(a, k, h), ellipsoid_area_relation(a, k, h, grad_norm)};
    case QuadricKind::elliptic_hyperboloid:
        return {hyperboloid_cap_volume(a, k, h), hyperboloid_area_relation(a, k, h, grad_norm)};
    }
    throw DomainError("unknown quadric kind");
}

double invariant_constant(QuadricKind kind, const Vec& a, double k) {
    check_coefficients(a);
    const int n = static_cast<int>(a.size());
    double a2 = a.array().square().prod();
    if (kind == QuadricKind::elliptic_paraboloid) {
        return std::ldexp(a2, n);
    }
    if (!(k > 0.0)) {
        throw DomainError("level k must be positive");
    }
    return std::ldexp(a2, n + 2) * k;
}

double refutation_H(const Vec& y, const Vec& a, double k) {
    if (y.size() != a.size()) {
        throw DomainError("dimension mismatch");
    }
    if (!(k > 0.0)) {
        throw DomainError("level k must be positive");
    }
    double num = (a.array().square() + 1.0).matrix().dot(y.array().square().matrix()) + k;
    return std::sqrt(num / (y.squaredNorm() + k));
}

RefutationDomain refutation_domain(const Vec& q, double k, double h) {
    if (!(k > 0.0) || !(h > 0.0)) {
        throw DomainError("refutation domain needs k > 0 and h > 0");
    }
    const int n = static_cast<int>(q.size());
    RefutationDomain d;
    d.center = std::sqrt((k + h) / k) * q;
    double q2 = q.squaredNorm();
    d.semi_axes = Vec::Constant(n, std::sqrt(h));
    d.semi_axes[0] = std::sqrt(h * (q2 + k) / k);
    // Orthonormal basis with q-hat first.
    Mat B = Mat::Identity(n, n);
    if (q2 > 0.0) {
        Eigen::HouseholderQR<Mat> qr(q);
        B = qr.householderQ() * Mat::Identity(n, n);
    }
    d.axes = B * d.semi_axes.asDiagonal();
    d.volume = unit_ball_volume(n) * std::pow(h, 0.5 * n) * std::sqrt(q2 + k) / std::sqrt(k);
    return d;
}

bool refutation_contains(const Vec& q, double k, double h, const Vec& y) {
    double rhs = q.dot(y) + std::sqrt(k * (k + h));
    return rhs > 0.0 && (q.squaredNorm() + k) * (y.squaredNorm() + k) <= rhs * rhs;
}

double refutation_mean(const Vec& q, const Vec& a, double k, double h, int resolution, int radial_order) {
    const int n = static_cast<int>(q.size());
    RefutationDomain d = refutation_domain(q, k, h);
    SphereRule sphere = sphere_rule(n, n == 1 ? 2 : resolution);
    Rule1D radial = gauss_legendre_unit(radial_order);
    std::vector<double> terms(sphere.directions.size());
    for (std::size_t i = 0; i < sphere.directions.size(); ++i) {
        Vec Au = d.axes * sphere.directions[i];
        double s = 0.0;
        for (std::size_t j = 0; j < radial.nodes.size(); ++j) {
            double r = radial.nodes[j];
            s += radial.weights[j] * std::pow(r, n - 1) * refutation_H(d.center + r * Au, a, k);
        }
        terms[i] = sphere.weights[i] * s;
    }
    return pairwise_sum(terms) / unit_ball_volume(n);
}

double refutation_theta(double k, double h, const Vec& a) {
    return refutation_mean(Vec::Zero(a.size()), a, k, h);
}

double mean_value_ratio(const Vec& q, const Vec& a, double k, double h) {
    return refutation_mean(q, a, k, h) / refutation_H(q, a, k);
}

} // namespace quadrix
