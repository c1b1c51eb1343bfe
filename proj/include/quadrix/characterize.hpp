#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quadrix/measure.hpp"
#include "quadrix/quadrics.hpp"

namespace quadrix {

enum class Condition { Vstar, Astar, Sstar, curvature_invariant, det_hessian };
enum class Verdict { constant, non_constant, inconclusive };

std::string to_string(Condition c);
std::string to_string(Verdict v);
Condition condition_from_string(const std::string& name);

/// Axis-aligned sampling box for base points x.
struct SampleBox {
    Vec lo;
    Vec hi;
    static SampleBox cube(int n, double half_width);
};

struct SampleResult {
    std::vector<SurfacePoint> points;
    std::vector<Vec> skipped;
    std::vector<std::string> skip_reasons;
    int convexity_failures = 0;
};

/// Seeded scrambled-Halton points in the box, lifted onto M_k. Points without a
/// z > 0 solution or without a convexity certificate are skipped and reported.
/// Throws RangeError when fewer than two points survive.
SampleResult sample_points(const LevelFamily& family, double k, int count, std::uint64_t seed,
                           const SampleBox& box);

struct CellFailure {
    int point = 0;
    int offset = 0;
    std::string message;
};

/// Values of one quantity over a point set (rows) and offset grid (columns).
/// Invariant-type conditions have a single column with no offset.
struct ConstancyReport {
    Condition condition = Condition::Vstar;
    double k = 0.0;
    std::vector<double> offsets;
    std::vector<Vec> points;
    std::vector<std::vector<double>> values;  // NaN for failed cells
    std::vector<std::vector<double>> errors;
    std::vector<CellFailure> failures;
    std::vector<double> means;
    std::vector<double> spreads;
    std::vector<double> thresholds;
    double base_threshold = 1e-3;
    Verdict verdict = Verdict::inconclusive;
    std::string reason;

    double max_spread() const;
};

struct ConstancyOptions {
    double threshold = 1e-3;
    QuadratureSettings quadrature;
    int jobs = 1;
};

/// Starred measure over points x offsets. Vstar is raw, Astar and Sstar are divided by |grad g(p)|.
ConstancyReport check_condition(const LevelFamily& family, double k, Condition condition,
                                const std::vector<double>& offsets, const std::vector<SurfacePoint>& points,
                                const ConstancyOptions& options = {});

/// Several starred conditions from one pass over the cells.
std::vector<ConstancyReport> check_conditions(const LevelFamily& family, double k,
                                              const std::vector<Condition>& conditions,
                                              const std::vector<double>& offsets,
                                              const std::vector<SurfacePoint>& points,
                                              const ConstancyOptions& options = {});

ConstancyReport check_invariant_constancy(const LevelFamily& family, double k,
                                          const std::vector<SurfacePoint>& points, double threshold = 1e-3);

ConstancyReport check_det_hessian(const FunctionSpec& f, const std::vector<Vec>& sample_x,
                                  double threshold = 1e-3);

/// |lhs - rhs| / |rhs| for det(alpha z^alpha F_ij - (alpha - 1) F_i F_j) = s^n alpha^(n-2) c z^(alpha n - 2 alpha + 2),
/// with F = +-f as in LevelFamily and s the convex-side orientation of the graph.
double determinant_identity_residual(const LevelFamily& family, const SurfacePoint& p, double c);

/// Default offset grid inside I_k for the family at the given points.
std::vector<double> default_offsets(const LevelFamily& family, double k, const std::vector<SurfacePoint>& points);

/// Default levels: {0.5, 1, 2} for alpha = 2, {1} otherwise.
std::vector<double> default_levels(const LevelFamily& family);

enum class FamilyVerdict { elliptic_paraboloid, ellipsoid, elliptic_hyperboloid, not_characterized };
std::string to_string(FamilyVerdict v);

struct ClassifyOptions {
    int point_count = 6;
    std::uint64_t seed = 0;
    std::optional<SampleBox> box;       // default [-2, 2]^n
    std::vector<double> offsets;        // empty: default_offsets per level
    ConstancyOptions constancy;
};

struct Classification {
    FamilyVerdict verdict = FamilyVerdict::not_characterized;
    std::vector<ConstancyReport> evidence;
    std::vector<double> levels;
    std::vector<double> matched_constants;  // c(k) per level when the invariant is constant
    std::string reason;
    bool due_to_errors = false;
    std::uint64_t seed = 0;
};

Classification classify(const LevelFamily& family, const std::vector<double>& levels, const ClassifyOptions& options);

/// Small-t behaviour at a point: ratios A(t)/t^(n/2) and V(t)/t^((n+2)/2) and their limits.
struct SmallTLimits {
    std::vector<double> t;
    std::vector<double> area_ratio;
    std::vector<double> volume_ratio;
    double area_limit = 0.0;
    double volume_limit = 0.0;
    double area_rel_error = 0.0;    // at the smallest t
    double volume_rel_error = 0.0;
};

/// Evaluates the ratios at t = 2^-j for j in [j_min, j_max].
SmallTLimits small_t_limits(const LevelFamily& family, const SurfacePoint& p, int j_min, int j_max,
                            const QuadratureSettings& settings = {});

/// Least-squares line log y = slope log x + log intercept.
struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace quadrix
