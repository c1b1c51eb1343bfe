#pragma once

#include <string>

#include "quadrix/surface.hpp"

namespace quadrix {

/// Normal forms: paraboloid g = z - sum a_i^2 x_i^2, ellipsoid g = z^2 + sum a_i^2 x_i^2,
/// hyperboloid g = z^2 - sum a_i^2 x_i^2.
enum class QuadricKind { elliptic_paraboloid, ellipsoid, elliptic_hyperboloid };

std::string to_string(QuadricKind kind);
QuadricKind quadric_kind_from_string(const std::string& name);

LevelFamily quadric_family(QuadricKind kind, const Vec& a);

double unit_ball_volume(int n);
/// Area of the unit sphere S^{m} in R^{m+1}.
double unit_sphere_area(int m);

/// V*(k, h) of the hyperboloid family; the radial integral uses adaptive Gauss-Kronrod.
double hyperboloid_cap_volume(const Vec& a, double k, double h);
/// d/dh of hyperboloid_cap_volume: (omega_n / prod a) h^(n/2) / (2 sqrt(k + h)).
double hyperboloid_phi_prime(const Vec& a, double k, double h);
/// A*(k, h) = sqrt((k + h) / k) phi'(h) |grad g(p)|.
double hyperboloid_area_relation(const Vec& a, double k, double h, double grad_norm);

/// V*(k, h), -k < h < 0: a cap of the radius-sqrt(k) ball of height sqrt(k) - sqrt(k + h),
/// divided by prod a.
double ellipsoid_cap_volume(const Vec& a, double k, double h);
/// d/dh of ellipsoid_cap_volume (negative).
double ellipsoid_phi_prime(const Vec& a, double k, double h);
/// A*(k, h) = sqrt((k + h) / k) |phi'(h)| |grad g(p)|.
double ellipsoid_area_relation(const Vec& a, double k, double h, double grad_norm);

/// gamma_n = 2 sigma_{n-1} / (n (n + 2) prod a).
double paraboloid_gamma(const Vec& a);

struct StarredPair {
    double volume = 0.0;
    double area = 0.0;
};

/// V* = gamma_n h^((n+2)/2), A* = ((n+2)/2) gamma_n |grad g| h^(n/2).
StarredPair paraboloid_starred(const Vec& a, double h, double grad_norm);

/// Oracle (V*, A*) for any of the three kinds.
StarredPair quadric_starred(QuadricKind kind, const Vec& a, double k, double h, double grad_norm);

/// Predicted K |grad g|^(n+2) on M_k.
double invariant_constant(QuadricKind kind, const Vec& a, double k);

/// H(y) = sqrt(sum (a_i^2 + 1) y_i^2 + k) / sqrt(|y|^2 + k).
double refutation_H(const Vec& y, const Vec& a, double k);

/// The ellipsoid D_q(k, h) in the chart plane.
struct RefutationDomain {
    Vec center;
    Mat axes;        // columns: principal directions scaled by semi-axis lengths
    Vec semi_axes;   // along q-hat first, then the orthogonal complement
    double volume = 0.0;
};

RefutationDomain refutation_domain(const Vec& q, double k, double h);

/// (|q|^2 + k)(|y|^2 + k) <= (<q, y> + sqrt(k (k + h)))^2 with the right side's root positive.
bool refutation_contains(const Vec& q, double k, double h, const Vec& y);

/// Mean of H over D_q(k, h), by radial quadrature on the affinely mapped unit ball.
double refutation_mean(const Vec& q, const Vec& a, double k, double h, int resolution = 64,
                       int radial_order = 24);

/// theta_k(h): the mean of H over the ball of radius sqrt(h).
double refutation_theta(double k, double h, const Vec& a);

/// r(q) = mean of H over D_q / H(q).
double mean_value_ratio(const Vec& q, const Vec& a, double k, double h);

} // namespace quadrix
