#pragma once

#include <cstdint>
#include <string>

#include "quadrix/quadrature.hpp"
#include "quadrix/surface.hpp"

namespace quadrix {

enum class MeasureMethod { radial_quadrature, monte_carlo };

std::string to_string(MeasureMethod m);

struct MeasureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    MeasureMethod method = MeasureMethod::radial_quadrature;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

struct QuadratureSettings {
    int directions = 0;               // 0: default for the dimension
    int radial_order = 16;
    double target_relative_error = 0; // 0: 1e-4 for n <= 3, 1e-3 above
    int max_refinements = 2;
    int jobs = 1;
    std::uint64_t seed = 0;           // recorded only; the radial rule is deterministic
};

struct MonteCarloSettings {
    std::int64_t samples = 200000;
    std::uint64_t seed = 0;
    int jobs = 1;
};

int default_direction_count(int n);
double default_target_error(int n);

/// The chart-plane section {y : w(y) < t} at p, described by its radius function.
class StarRegion {
public:
    StarRegion(const LevelFamily& family, const SurfacePoint& p, double t);

    /// rho(u) with w(rho(u) u) = t. Throws RangeError if the section boundary in
    /// direction u leaves the graph chart.
    double radius(const Vec& u) const;

    /// w(r u) for r < rho(u), by safeguarded Newton on [0, t].
    double height(const Vec& u, double r, double guess) const;

    /// sqrt(1 + |grad w|^2) at chart point y on the surface at height w.
    double area_element(const Vec& y, double w) const;

    /// Whether chart point y at height s lies on the convex side of M_k.
    bool inside(const Vec& y, double s) const;

    double t() const { return t_; }
    const SurfacePoint& point() const { return p_; }
    const LevelFamily& family() const { return family_; }
    double normal_curvature(const Vec& u) const { return u.dot(shape_ * u); }

private:
    const LevelFamily& family_;
    const SurfacePoint& p_;
    double t_;
    Vec base_;   // p + t N
    Mat shape_;  // second fundamental form
};

/// A_p(t), V_p(t), S_p(t) at one point.
struct ChartMeasures {
    MeasureResult area;
    MeasureResult volume;
    MeasureResult lateral;
};

ChartMeasures chart_measures(const LevelFamily& family, const SurfacePoint& p, double t,
                             const QuadratureSettings& settings = {}, bool with_lateral = true);

MeasureResult section_area(const LevelFamily& family, const SurfacePoint& p, double t,
                           const QuadratureSettings& settings = {});
MeasureResult cap_volume(const LevelFamily& family, const SurfacePoint& p, double t,
                         const QuadratureSettings& settings = {});
MeasureResult lateral_area(const LevelFamily& family, const SurfacePoint& p, double t,
                           const QuadratureSettings& settings = {});

/// Seeded rejection Monte Carlo estimate of the same three measures.
ChartMeasures monte_carlo_measures(const LevelFamily& family, const SurfacePoint& p, double t,
                                   const MonteCarloSettings& settings = {});

/// A*, V*, S* at (k, h): the chart measures at the parallel-tangent distance t(h).
struct StarredMeasures {
    MeasureResult area;
    MeasureResult volume;
    MeasureResult lateral;
    double t = 0.0;
    TangencyResult tangency;
};

StarredMeasures starred_measures(const LevelFamily& family, const SurfacePoint& p, double h,
                                 const QuadratureSettings& settings = {});

/// |(V(t+d) - V(t-d)) / 2d - A(t)| / A(t).
double derivative_check(const LevelFamily& family, const SurfacePoint& p, double t, double delta,
                        const QuadratureSettings& settings = {});

} // namespace quadrix
