#include "quadrix/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "quadrix/error.hpp"

namespace quadrix {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base);
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Fills means, spreads, thresholds and the verdict from values and errors.
void summarize(ConstancyReport& r) {
    const std::size_t columns = r.values.empty() ? 0 : r.values.front().size();
    r.means.assign(columns, kNaN);
    r.spreads.assign(columns, kNaN);
    r.thresholds.assign(columns, r.base_threshold);
    bool all_constant = columns > 0;
    bool any_varying = false;
    std::string why;
    for (std::size_t c = 0; c < columns; ++c) {
        std::vector<double> vals;
        std::vector<double> errs;
        for (std::size_t p = 0; p < r.values.size(); ++p) {
            if (std::isfinite(r.values[p][c])) {
                vals.push_back(r.values[p][c]);
                errs.push_back(r.errors[p][c]);
            }
        }
        if (vals.size() < 2) {
            all_constant = false;
            if (why.empty()) {
                why = "fewer than two points survived in column " + std::to_string(c);
            }
            continue;
        }
        double mean = 0.0;
        for (double v : vals) {
            mean += v;
        }
        mean /= static_cast<double>(vals.size());
        auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        double spread = (*hi - *lo) / std::fabs(mean);
        double thr = std::max(r.base_threshold, 5.0 * median(errs) / std::fabs(mean));
        r.means[c] = mean;
        r.spreads[c] = spread;
        r.thresholds[c] = thr;
        if (spread > 3.0 * thr) {
            any_varying = true;
        }
        if (!(spread <= thr)) {
            all_constant = false;
            if (why.empty() && spread <= 3.0 * thr) {
                why = "spread between threshold and three times threshold in column " + std::to_string(c);
            }
        }
    }
    if (any_varying) {
        r.verdict = Verdict::non_constant;
        r.reason = "relative spread exceeds three times the threshold";
    } else if (all_constant) {
        r.verdict = Verdict::constant;
        r.reason = "every relative spread is within the threshold";
    } else {
        r.verdict = Verdict::inconclusive;
        r.reason = why.empty() ? "no columns" : why;
    }
}

} // namespace

std::string to_string(Condition c) {
    switch (c) {
    case Condition::Vstar: return "Vstar";
    case Condition::Astar: return "Astar";
    case Condition::Sstar: return "Sstar";
    case Condition::curvature_invariant: return "curvature_invariant";
    case Condition::det_hessian: return "det_hessian";
    }
    return "unknown";
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::constant: return "constant";
    case Verdict::non_constant: return "non_constant";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "unknown";
}

Condition condition_from_string(const std::string& name) {
    for (Condition c : {Condition::Vstar, Condition::Astar, Condition::Sstar, Condition::curvature_invariant,
                        Condition::det_hessian}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw ConfigError("unknown condition '" + name + "'");
}

std::string to_string(FamilyVerdict v) {
    switch (v) {
    case FamilyVerdict::elliptic_paraboloid: return "elliptic_paraboloid";
    case FamilyVerdict::ellipsoid: return "ellipsoid";
    case FamilyVerdict::elliptic_hyperboloid: return "elliptic_hyperboloid";
    case FamilyVerdict::not_characterized: return "not_characterized";
    }
    return "unknown";
}

double ConstancyReport::max_spread() const {
    double m = 0.0;
    for (double s : spreads) {
        if (std::isfinite(s)) {
            m = std::max(m, s);
        }
    }
    return m;
}

SampleBox SampleBox::cube(int n, double half_width) {
    return {Vec::Constant(n, -half_width), Vec::Constant(n, half_width)};
}

SampleResult sample_points(const LevelFamily& family, double k, int count, std::uint64_t seed,
                           const SampleBox& box) {
    const int n = family.dimension();
    if (count < 2) {
        throw DomainError("need at least two sample points");
    }
    if (box.lo.size() != n || box.hi.size() != n || !((box.hi - box.lo).minCoeff() > 0.0)) {
        throw DomainError("sample box must match the dimension and have positive width");
    }
    static constexpr std::uint64_t kPrimes[kMaxDimension] = {2, 3, 5, 7, 11, 13};
    Vec shift(n);
    for (int d = 0; d < n; ++d) {
        shift[d] = static_cast<double>(splitmix64(seed * 0x100000001B3ULL + d) >> 11) * 0x1.0p-53;
    }
    SampleResult out;
    const int max_draws = 64 * count;
    for (int i = 1; i <= max_draws && static_cast<int>(out.points.size()) < count; ++i) {
        Vec x(n);
        for (int d = 0; d < n; ++d) {
            double u = radical_inverse(static_cast<std::uint64_t>(i), kPrimes[d]) + shift[d];
            u -= std::floor(u);
            x[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * u;
        }
        try {
            out.points.push_back(point_on_level(family, k, x));
        } catch (const ConvexityError& e) {
            ++out.convexity_failures;
            out.skipped.push_back(x);
            out.skip_reasons.emplace_back(e.what());
        } catch (const Error& e) {
            out.skipped.push_back(x);
            out.skip_reasons.emplace_back(e.what());
        }
    }
    if (out.points.size() < 2) {
        throw RangeError("fewer than two admissible sample points on the level set");
    }
    return out;
}

std::vector<ConstancyReport> check_conditions(const LevelFamily& family, double k,
                                              const std::vector<Condition>& conditions,
                                              const std::vector<double>& offsets,
                                              const std::vector<SurfacePoint>& points,
                                              const ConstancyOptions& options) {
    for (Condition c : conditions) {
        if (c != Condition::Vstar && c != Condition::Astar && c != Condition::Sstar) {
            throw DomainError("check_condition handles the starred conditions only");
        }
    }
    if (offsets.empty()) {
        throw ConfigError("offset grid is empty");
    }
    const std::size_t P = points.size();
    const std::size_t H = offsets.size();
    const bool want_lateral = std::find(conditions.begin(), conditions.end(), Condition::Sstar) != conditions.end();

    struct Cell {
        double v[3] = {kNaN, kNaN, kNaN};
        double e[3] = {kNaN, kNaN, kNaN};
        std::string failure;
    };
    std::vector<Cell> cells(P * H);
    QuadratureSettings qs = options.quadrature;
    qs.jobs = 1;
    parallel_chunks(cells.size(), resolve_jobs(options.jobs), [&](std::size_t idx) {
        const SurfacePoint& p = points[idx / H];
        double h = offsets[idx % H];
        Cell& cell = cells[idx];
        try {
            if (!offset_admissible(family, p, h)) {
                throw RangeError("offset h is not on the convex side of M_k");
            }
            TangencyResult tan = parallel_tangent(family, p, h);
            ChartMeasures m = chart_measures(family, p, tan.t, qs, want_lateral);
            double G = p.grad_norm();
            cell.v[0] = m.volume.value;
            cell.e[0] = m.volume.error_estimate;
            cell.v[1] = m.area.value / G;
            cell.e[1] = m.area.error_estimate / G;
            cell.v[2] = m.lateral.value / G;
            cell.e[2] = m.lateral.error_estimate / G;
        } catch (const Error& e) {
            cell.failure = e.what();
        }
    });

    std::vector<ConstancyReport> reports;
    for (Condition c : conditions) {
        int slot = c == Condition::Vstar ? 0 : c == Condition::Astar ? 1 : 2;
        ConstancyReport r;
        r.condition = c;
        r.k = k;
        r.offsets = offsets;
        r.base_threshold = options.threshold;
        r.values.assign(P, std::vector<double>(H, kNaN));
        r.errors.assign(P, std::vector<double>(H, kNaN));
        for (std::size_t p = 0; p < P; ++p) {
            r.points.push_back(points[p].x);
            for (std::size_t h = 0; h < H; ++h) {
                const Cell& cell = cells[p * H + h];
                if (!cell.failure.empty()) {
                    r.failures.push_back({static_cast<int>(p), static_cast<int>(h), cell.failure});
                    continue;
                }
                r.values[p][h] = cell.v[slot];
                r.errors[p][h] = cell.e[slot];
            }
        }
        summarize(r);
        reports.push_back(std::move(r));
    }
    return reports;
}

ConstancyReport check_condition(const LevelFamily& family, double k, Condition condition,
                                const std::vector<double>& offsets, const std::vector<SurfacePoint>& points,
                                const ConstancyOptions& options) {
    return check_conditions(family, k, {condition}, offsets, points, options).front();
}

ConstancyReport check_invariant_constancy(const LevelFamily& family, double k,
                                          const std::vector<SurfacePoint>& points, double threshold) {
    ConstancyReport r;
    r.condition = Condition::curvature_invariant;
    r.k = k;
    r.base_threshold = threshold;
    for (std::size_t i = 0; i < points.size(); ++i) {
        r.points.push_back(points[i].x);
        double v = kNaN;
        try {
            v = curvature_invariant(family, points[i]);
        } catch (const Error& e) {
            r.failures.push_back({static_cast<int>(i), 0, e.what()});
        }
        r.values.push_back({v});
        r.errors.push_back({0.0});
    }
    summarize(r);
    return r;
}

ConstancyReport check_det_hessian(const FunctionSpec& f, const std::vector<Vec>& sample_x, double threshold) {
    ConstancyReport r;
    r.condition = Condition::det_hessian;
    r.k = kNaN;
    r.base_threshold = threshold;
    for (std::size_t i = 0; i < sample_x.size(); ++i) {
        r.points.push_back(sample_x[i]);
        double v = kNaN;
        try {
            v = f.jet2(sample_x[i]).hessian.determinant();
        } catch (const Error& e) {
            r.failures.push_back({static_cast<int>(i), 0, e.what()});
        }
        r.values.push_back({v});
        r.errors.push_back({0.0});
    }
    summarize(r);
    return r;
}

double determinant_identity_residual(const LevelFamily& family, const SurfacePoint& p, double c) {
    const int n = family.dimension();
    const double a = family.alpha();
    const double s = family.sign_factor();
    Jet2 j = family.f().jet2(p.x);
    Vec Fi = s * j.gradient;
    Mat M = a * std::pow(p.z, a) * s * j.hessian - (a - 1.0) * Fi * Fi.transpose();
    double lhs = M.determinant();
    double orient = (n % 2 == 1 && p.convex_up < 0) ? -1.0 : 1.0;
    double rhs = orient * std::pow(a, n - 2) * c * std::pow(p.z, a * n - 2.0 * a + 2.0);
    return std::fabs(lhs - rhs) / std::fabs(rhs);
}

std::vector<double> default_offsets(const LevelFamily& family, double k, const std::vector<SurfacePoint>& points) {
    int dir = points.empty() ? 1 : points.front().gradient_inward;
    double scale = std::fabs(k) > 0.0 ? std::fabs(k) : 1.0;
    if (family.alpha() == 1.0 && dir > 0) {
        scale = 1.0;
    }
    return {dir * 0.25 * scale, dir * 0.5 * scale};
}

std::vector<double> default_levels(const LevelFamily& family) {
    if (family.alpha() == 2.0) {
        return {0.5, 1.0, 2.0};
    }
    return {1.0};
}

Classification classify(const LevelFamily& family, const std::vector<double>& levels, const ClassifyOptions& options) {
    if (levels.empty()) {
        throw ConfigError("classification needs at least one level");
    }
    const int n = family.dimension();
    Classification out;
    out.levels = levels;
    out.seed = options.seed;
    SampleBox box = options.box ? *options.box : SampleBox::cube(n, 2.0);

    bool det_done = false;
    for (std::size_t li = 0; li < levels.size(); ++li) {
        double k = levels[li];
        SampleResult sample;
        try {
            sample = sample_points(family, k, options.point_count, splitmix64(options.seed + li), box);
        } catch (const Error& e) {
            out.due_to_errors = true;
            out.reason = "level k=" + std::to_string(k) + ": " + e.what();
            out.matched_constants.push_back(kNaN);
            continue;
        }
        if (!det_done) {
            std::vector<Vec> xs;
            for (const auto& p : sample.points) {
                xs.push_back(p.x);
            }
            out.evidence.push_back(check_det_hessian(family.f(), xs, options.constancy.threshold));
            det_done = true;
        }
        ConstancyReport inv = check_invariant_constancy(family, k, sample.points, options.constancy.threshold);
        out.matched_constants.push_back(inv.verdict == Verdict::constant ? inv.means[0] : kNaN);
        out.evidence.push_back(std::move(inv));
        std::vector<double> offsets =
            options.offsets.empty() ? default_offsets(family, k, sample.points) : options.offsets;
        for (auto& r : check_conditions(family, k, {Condition::Vstar, Condition::Astar}, offsets, sample.points,
                                        options.constancy)) {
            out.evidence.push_back(std::move(r));
        }
    }

    const ConstancyReport* varying = nullptr;
    const ConstancyReport* unsure = nullptr;
    for (const auto& r : out.evidence) {
        if (r.verdict == Verdict::non_constant && !varying) {
            varying = &r;
        }
        if (r.verdict == Verdict::inconclusive && !unsure) {
            unsure = &r;
        }
    }
    auto at_level = [](const ConstancyReport& r) {
        return std::isfinite(r.k) ? " at k=" + std::to_string(r.k) : std::string();
    };
    if (varying) {
        out.verdict = FamilyVerdict::not_characterized;
        out.reason = to_string(varying->condition) + " is non_constant" + at_level(*varying);
        out.due_to_errors = false;
        return out;
    }
    if (out.due_to_errors) {
        out.verdict = FamilyVerdict::not_characterized;
        return out;
    }
    if (unsure) {
        out.verdict = FamilyVerdict::not_characterized;
        out.reason = to_string(unsure->condition) + " is inconclusive" + at_level(*unsure) + ": " + unsure->reason;
        out.due_to_errors = true;
        return out;
    }
    const double a = family.alpha();
    if (a == 1.0 && family.sign() == Sign::minus) {
        out.verdict = FamilyVerdict::elliptic_paraboloid;
    } else if (a == 2.0 && family.sign() == Sign::plus) {
        out.verdict = FamilyVerdict::ellipsoid;
    } else if (a == 2.0 && family.sign() == Sign::minus) {
        out.verdict = FamilyVerdict::elliptic_hyperboloid;
    } else {
        out.verdict = FamilyVerdict::not_characterized;
        out.reason = "all sampled quantities are constant but no normal form has this alpha and sign";
        return out;
    }
    out.reason = "curvature invariant, Vstar and Astar are constant on every sampled level (empirical)";
    return out;
}

SmallTLimits small_t_limits(const LevelFamily& family, const SurfacePoint& p, int j_min, int j_max,
                            const QuadratureSettings& settings) {
    if (j_min > j_max) {
        throw DomainError("empty t sequence");
    }
    const int n = family.dimension();
    const double K = gauss_kronecker(family, p);
    SmallTLimits out;
    out.area_limit = std::pow(std::numbers::sqrt2, n) * unit_ball_volume(n) / std::sqrt(K);
    out.volume_limit = std::pow(std::numbers::sqrt2, n + 2) * unit_ball_volume(n) / ((n + 2) * std::sqrt(K));
    for (int j = j_min; j <= j_max; ++j) {
        double t = std::ldexp(1.0, -j);
        ChartMeasures m = chart_measures(family, p, t, settings, false);
        out.t.push_back(t);
        out.area_ratio.push_back(m.area.value / std::pow(t, 0.5 * n));
        out.volume_ratio.push_back(m.volume.value / std::pow(t, 0.5 * (n + 2)));
    }
    out.area_rel_error = std::fabs(out.area_ratio.back() - out.area_limit) / out.area_limit;
    out.volume_rel_error = std::fabs(out.volume_ratio.back() - out.volume_limit) / out.volume_limit;
    return out;
}

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("log-log fit needs at least two matching samples");
    }
    const double m = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
            throw DomainError("log-log fit needs positive samples");
        }
        double lx = std::log(x[i]);
        double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return {slope, std::exp((sy - slope * sx) / m)};
}

} // namespace quadrix
