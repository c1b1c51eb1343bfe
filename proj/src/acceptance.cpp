#include "quadrix/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "quadrix/characterize.hpp"
#include "quadrix/commands.hpp"
#include "quadrix/config.hpp"
#include "quadrix/error.hpp"

namespace quadrix {

namespace {

using Clock = std::chrono::steady_clock;

Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box in which every point lies strictly inside the ellipsoid's shadow, f(x) <= fill * k.
SampleBox ellipsoid_box(const Vec& a, double k, double fill) {
    const int n = static_cast<int>(a.size());
    Vec half = (std::sqrt(fill * k / n) * a.cwiseInverse());
    return {-half, half};
}

struct Outcome {
    bool passed;
    std::string measured;
};

Outcome curvature_closed_forms(int jobs) {
    (void)jobs;
    const Vec a = vec({1.0, 2.0});
    double worst = 0.0;
    int count = 0;
    for (QuadricKind kind : {QuadricKind::elliptic_hyperboloid, QuadricKind::ellipsoid,
                             QuadricKind::elliptic_paraboloid}) {
        LevelFamily fam = quadric_family(kind, a);
        for (double k : {0.5, 1.0, 2.0}) {
            SampleBox box = kind == QuadricKind::ellipsoid ? ellipsoid_box(a, k, 0.9) : SampleBox::cube(2, 1.5);
            SampleResult s = sample_points(fam, k, 20, 11 + static_cast<std::uint64_t>(4 * k), box);
            double c = invariant_constant(kind, a, k);
            for (const auto& p : s.points) {
                worst = std::max(worst, std::fabs(curvature_invariant(fam, p) - c) / c);
                ++count;
            }
        }
    }
    return {count == 180 && worst <= 1e-8,
            std::to_string(count) + " points, max relative error " + fmt("%.3g", worst) + " (tol 1e-8)"};
}

Outcome starred_oracles(int jobs) {
    struct Fixture {
        QuadricKind kind;
        Vec a;
        double k;
        double h;
        Vec x;
    };
    std::vector<Fixture> fixtures;
    std::mt19937_64 rng(20240611);
    const double ks[5] = {0.5, 1.0, 2.0, 1.0, 1.5};
    const double hs[5] = {0.2, 0.5, 1.0, 0.35, 0.8};
    const Vec all_a = vec({1.0, 2.0, 1.5});
    for (int n = 1; n <= 3; ++n) {
        Vec a = all_a.head(n);
        for (QuadricKind kind : {QuadricKind::elliptic_hyperboloid, QuadricKind::ellipsoid,
                                 QuadricKind::elliptic_paraboloid}) {
            for (int i = 0; i < 5; ++i) {
                double k = ks[i];
                // Offsets stay where the cap is a graph over the tangent plane; the paraboloid's
                // level only translates it, so its offsets do not scale with k.
                double h = hs[i] * k;
                SampleBox box = SampleBox::cube(n, 1.0);
                if (kind == QuadricKind::ellipsoid) {
                    h = -0.4 * hs[i] * k;
                    box = ellipsoid_box(a, k, 0.4);
                } else if (kind == QuadricKind::elliptic_paraboloid) {
                    h = 0.5 * hs[i];
                    box = SampleBox::cube(n, 0.5);
                }
                Vec x(n);
                for (int d = 0; d < n; ++d) {
                    x[d] = uniform(rng, box.lo[d], box.hi[d]);
                }
                fixtures.push_back({kind, a, k, h, x});
            }
        }
    }
    std::vector<double> rel(fixtures.size(), 0.0);
    std::vector<int> ok(fixtures.size(), 0);
    std::vector<std::string> errors(fixtures.size());
    parallel_chunks(fixtures.size(), jobs, [&](std::size_t i) {
        const Fixture& f = fixtures[i];
        try {
            LevelFamily fam = quadric_family(f.kind, f.a);
            SurfacePoint p = point_on_level(fam, f.k, f.x);
            StarredMeasures m = starred_measures(fam, p, f.h);
            StarredPair o = quadric_starred(f.kind, f.a, f.k, f.h, p.grad_norm());
            double ev = std::fabs(m.volume.value - o.volume);
            double ea = std::fabs(m.area.value - o.area);
            bool vol_ok = ev <= std::max(3.0 * m.volume.error_estimate, 0.01 * o.volume);
            bool area_ok = ea <= std::max(3.0 * m.area.error_estimate, 0.01 * o.area);
            ok[i] = vol_ok && area_ok;
            rel[i] = std::max(ev / o.volume, ea / o.area);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    int passed = 0;
    double worst = 0.0;
    std::string first_error;
    for (std::size_t i = 0; i < fixtures.size(); ++i) {
        passed += ok[i];
        worst = std::max(worst, rel[i]);
        if (first_error.empty() && !errors[i].empty()) {
            first_error = "; error: " + errors[i];
        }
    }
    return {passed == static_cast<int>(fixtures.size()) && passed >= 45,
            std::to_string(passed) + "/" + std::to_string(fixtures.size()) +
                " fixtures within max(3 sigma, 1%), max relative deviation " + fmt("%.3g", worst) + first_error};
}

struct ConstancyFixture {
    QuadricKind kind;
    SampleBox box;
    std::vector<double> offsets;
};

ConstancyOptions constancy_options(int jobs) {
    ConstancyOptions opt;
    opt.threshold = 1e-3;
    opt.jobs = jobs;
    return opt;
}

Outcome quadric_constancy(int jobs) {
    const Vec a = vec({1.0, 2.0});
    const double k = 1.0;
    std::vector<ConstancyFixture> fixtures = {
        {QuadricKind::elliptic_hyperboloid, SampleBox::cube(2, 2.0), {0.5, 1.0}},
        {QuadricKind::ellipsoid, ellipsoid_box(a, k, 0.5), {-0.25, -0.5}},
        {QuadricKind::elliptic_paraboloid, SampleBox::cube(2, 2.0), {0.25, 0.5}},
    };
    bool all = true;
    std::ostringstream msg;
    for (const auto& fx : fixtures) {
        LevelFamily fam = quadric_family(fx.kind, a);
        SampleResult s = sample_points(fam, k, 6, 5, fx.box);
        auto reports = check_conditions(fam, k, {Condition::Vstar, Condition::Astar}, fx.offsets, s.points,
                                        constancy_options(jobs));
        for (const auto& r : reports) {
            bool ok = r.verdict == Verdict::constant && r.max_spread() <= 1e-3 && r.failures.empty() &&
                      s.points.size() == 6;
            all = all && ok;
            msg << to_string(fx.kind) << "/" << to_string(r.condition) << " spread " << fmt("%.2g", r.max_spread())
                << (ok ? "" : " [" + to_string(r.verdict) + "]") << "; ";
        }
    }
    return {all, msg.str() + "tol 1e-3"};
}

Outcome perturbed_quartic(int jobs) {
    const double k = 1.0;
    const std::vector<double> offsets = {0.5, 1.0};
    LevelFamily quartic(FunctionSpec::perturbed({1.0, 1.0}, 0.2, Perturbation::quartic), 2.0, Sign::minus);
    LevelFamily baseline = quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 1.0}));
    SampleBox box = SampleBox::cube(2, 1.5);
    SampleResult sq = sample_points(quartic, k, 6, 9, box);
    SampleResult sb = sample_points(baseline, k, 6, 9, box);
    ConstancyReport rq = check_condition(quartic, k, Condition::Vstar, offsets, sq.points, constancy_options(jobs));
    ConstancyReport rb = check_condition(baseline, k, Condition::Vstar, offsets, sb.points, constancy_options(jobs));
    double ratio = rq.max_spread() / std::max(rb.max_spread(), 1e-300);
    bool ok = rq.verdict == Verdict::non_constant && rq.max_spread() >= 10.0 * rb.max_spread();
    return {ok, "quartic spread " + fmt("%.3g", rq.max_spread()) + " [" + to_string(rq.verdict) +
                    "], quadric baseline " + fmt("%.3g", rb.max_spread()) + ", ratio " + fmt("%.3g", ratio) +
                    " (need non_constant and >= 10)"};
}

Outcome refutation(int jobs) {
    const Vec a = vec({2.0, 1.0});
    LevelFamily fam = quadric_family(QuadricKind::elliptic_hyperboloid, a);
    std::vector<SurfacePoint> points;
    for (const Vec& x : {vec({0.0, 0.0}), vec({1.5, 0.0}), vec({0.0, 1.5}), vec({1.0, 1.0}), vec({-0.5, 0.8}),
                         vec({0.7, -1.2})}) {
        points.push_back(point_on_level(fam, 1.0, x));
    }
    ConstancyReport s = check_condition(fam, 1.0, Condition::Sstar, {0.5}, points, constancy_options(jobs));
    bool spread_ok = s.max_spread() >= 0.05 && s.failures.empty();

    double theta_min = std::numeric_limits<double>::infinity();
    for (double k : {0.5, 1.0}) {
        for (double h : {0.25, 1.0}) {
            theta_min = std::min(theta_min, refutation_theta(k, h, a));
        }
    }
    double r0 = mean_value_ratio(vec({0.0, 0.0}), a, 1.0, 0.25);
    double r10 = mean_value_ratio(vec({10.0, 0.0}), a, 1.0, 0.25);
    double rdiff = std::fabs(r0 - r10) / std::min(r0, r10);
    bool ok = spread_ok && theta_min > 1.0 && rdiff >= 0.05;
    return {ok, "Sstar spread " + fmt("%.3g", s.max_spread()) + " (need >= 0.05), min theta " + fmt("%.6f", theta_min) +
                    " (need > 1), r(0)=" + fmt("%.5f", r0) + " r(10,0)=" + fmt("%.5f", r10) + " differ by " +
                    fmt("%.3g", rdiff) + " (need >= 0.05)"};
}

Outcome small_t(int jobs) {
    QuadratureSettings qs;
    qs.jobs = jobs;
    bool ok = true;
    std::ostringstream msg;
    for (QuadricKind kind : {QuadricKind::elliptic_paraboloid, QuadricKind::elliptic_hyperboloid}) {
        Vec a = kind == QuadricKind::elliptic_paraboloid ? vec({1.0, 1.0}) : vec({1.0, 2.0});
        LevelFamily fam = quadric_family(kind, a);
        SurfacePoint p = point_on_level(fam, 1.0, Vec::Zero(2));
        SmallTLimits lim = small_t_limits(fam, p, 4, 10, qs);
        ok = ok && lim.area_rel_error <= 0.02 && lim.volume_rel_error <= 0.02;
        msg << to_string(kind) << " vertex: area ratio " << fmt("%.6f", lim.area_ratio.back()) << " vs "
            << fmt("%.6f", lim.area_limit) << " (err " << fmt("%.2g", lim.area_rel_error) << "), volume ratio "
            << fmt("%.6f", lim.volume_ratio.back()) << " vs " << fmt("%.6f", lim.volume_limit) << " (err "
            << fmt("%.2g", lim.volume_rel_error) << "); ";
    }
    return {ok, msg.str() + "tol 0.02 at t=2^-10"};
}

Outcome derivative_suite(int jobs) {
    std::vector<LevelFamily> families = {
        quadric_family(QuadricKind::elliptic_hyperboloid, vec({1.0, 2.0})),
        quadric_family(QuadricKind::ellipsoid, vec({1.0, 2.0})),
        quadric_family(QuadricKind::elliptic_paraboloid, vec({1.0, 2.0})),
        LevelFamily(FunctionSpec::perturbed({1.0, 1.0}, 0.2, Perturbation::quartic), 2.0, Sign::minus),
        LevelFamily(FunctionSpec::perturbed({1.0, 1.5}, 0.3, Perturbation::cosh), 1.0, Sign::minus),
    };
    std::mt19937_64 rng(7);
    struct Triple {
        std::size_t family;
        Vec x;
        double t;
    };
    std::vector<Triple> triples;
    for (int i = 0; i < 10; ++i) {
        std::size_t f = static_cast<std::size_t>(i) % families.size();
        double half = f == 1 ? 0.3 : 1.0;
        Vec x = vec({uniform(rng, -half, half), uniform(rng, -half, half)});
        triples.push_back({f, x, uniform(rng, 0.05, 0.3)});
    }
    std::vector<double> ratio(triples.size(), std::numeric_limits<double>::infinity());
    std::vector<std::string> errors(triples.size());
    parallel_chunks(triples.size(), jobs, [&](std::size_t i) {
        try {
            const LevelFamily& fam = families[triples[i].family];
            SurfacePoint p = point_on_level(fam, 1.0, triples[i].x);
            ratio[i] = derivative_check(fam, p, triples[i].t, 1e-3);
        } catch (const Error& e) {
            errors[i] = e.what();
        }
    });
    double worst = 0.0;
    std::string err;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        worst = std::max(worst, ratio[i]);
        if (err.empty() && !errors[i].empty()) {
            err = "; error: " + errors[i];
        }
    }
    return {worst <= 1e-3, "10 triples, max |dV/dt - A| / A = " + fmt("%.3g", worst) + " (tol 1e-3)" + err};
}

Outcome paraboloid_slope(int jobs) {
    const Vec a = vec({1.0, 1.0});
    LevelFamily fam = quadric_family(QuadricKind::elliptic_paraboloid, a);
    SurfacePoint p = point_on_level(fam, 1.0, vec({0.3, -0.2}));
    std::vector<double> hs;
    for (int i = 0; i <= 10; ++i) {
        hs.push_back(std::pow(2.0, -6.0 + 0.5 * i));
    }
    std::vector<double> vs(hs.size());
    QuadratureSettings qs;
    qs.jobs = 1;
    parallel_chunks(hs.size(), jobs, [&](std::size_t i) { vs[i] = starred_measures(fam, p, hs[i], qs).volume.value; });
    LogLogFit fit = loglog_fit(hs, vs);
    double gamma = std::numbers::pi / 2.0;
    double ierr = std::fabs(fit.intercept - gamma) / gamma;
    bool ok = std::fabs(fit.slope - 2.0) <= 0.01 && ierr <= 0.01;
    return {ok, "slope " + fmt("%.6f", fit.slope) + " (2 +- 0.01), intercept " + fmt("%.6f", fit.intercept) +
                    " vs pi/2 (rel err " + fmt("%.2g", ierr) + ", tol 0.01)"};
}

Outcome determinant_identity(int jobs) {
    (void)jobs;
    const Vec a = vec({1.0, 2.0});
    const double k = 1.0;
    double worst = 0.0;
    int count = 0;
    for (QuadricKind kind : {QuadricKind::elliptic_hyperboloid, QuadricKind::ellipsoid}) {
        LevelFamily fam = quadric_family(kind, a);
        SampleBox box = kind == QuadricKind::ellipsoid ? ellipsoid_box(a, k, 0.9) : SampleBox::cube(2, 2.0);
        SampleResult s = sample_points(fam, k, 20, 3, box);
        double c = invariant_constant(kind, a, k);
        for (const auto& p : s.points) {
            worst = std::max(worst, determinant_identity_residual(fam, p, c));
            ++count;
        }
    }
    return {count == 40 && worst <= 1e-10,
            std::to_string(count) + " points, max relative residual " + fmt("%.3g", worst) + " (tol 1e-10)"};
}

Outcome reproducibility(int jobs) {
    nlohmann::json doc = {{"alpha", 2},          {"sign", "minus"},  {"function", "quadratic"},
                          {"a", {1.0, 2.0}},     {"levels", {1.0}},  {"offsets", {0.5, 1.0}},
                          {"point_count", 4},    {"seed", 42},       {"monte_carlo_samples", 4096}};
    std::string runs[2];
    int codes[2];
    int job_counts[2] = {1, std::max(2, jobs)};
    for (int i = 0; i < 2; ++i) {
        RunConfig c = parse_config(doc);
        apply_overrides(c, std::nullopt, job_counts[i], std::nullopt);
        std::ostringstream out;
        std::ostringstream log;
        codes[i] = cmd_measures(c, out, log);
        runs[i] = out.str();
    }
    bool same = runs[0] == runs[1] && !runs[0].empty();
    bool ok = same && codes[0] == 0 && codes[1] == 0;
    return {ok, std::string(same ? "identical" : "different") + " CSV (" + std::to_string(runs[0].size()) +
                    " bytes) with jobs=1 and jobs=" + std::to_string(job_counts[1])};
}

struct Entry {
    const char* name;
    double limit;
    Outcome (*fn)(int);
};

const Entry kEntries[] = {
    {"curvature_invariant", 1.0, curvature_closed_forms},
    {"starred_oracles", 300.0, starred_oracles},
    {"quadric_constancy", 180.0, quadric_constancy},
    {"perturbed_quartic", 120.0, perturbed_quartic},
    {"refutation", 180.0, refutation},
    {"small_t_limits", 120.0, small_t},
    {"derivative", 60.0, derivative_suite},
    {"paraboloid_slope", 60.0, paraboloid_slope},
    {"determinant_identity", 1.0, determinant_identity},
    {"reproducibility", 60.0, reproducibility},
};

} // namespace

const std::vector<std::string>& acceptance_suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& e : kEntries) {
            v.emplace_back(e.name);
        }
        return v;
    }();
    return names;
}

CriterionResult run_criterion(int id, int jobs) {
    if (id < 1 || id > static_cast<int>(std::size(kEntries))) {
        throw DomainError("no acceptance criterion " + std::to_string(id));
    }
    const Entry& e = kEntries[id - 1];
    CriterionResult r;
    r.id = id;
    r.name = e.name;
    r.time_limit = e.limit;
    auto start = Clock::now();
    try {
        Outcome o = e.fn(std::max(1, jobs));
        r.passed = o.passed;
        r.measured = o.measured;
    } catch (const std::exception& ex) {
        r.passed = false;
        r.measured = std::string("error: ") + ex.what();
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (r.seconds > r.time_limit) {
        r.passed = false;
        r.measured += "; over the time limit";
    }
    return r;
}

std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& suites, int jobs,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    const auto& names = acceptance_suite_names();
    for (const auto& s : suites) {
        if (std::find(names.begin(), names.end(), s) == names.end()) {
            throw ConfigError("unknown verify suite '" + s + "'");
        }
    }
    std::vector<CriterionResult> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!suites.empty() && std::find(suites.begin(), suites.end(), names[i]) == suites.end()) {
            continue;
        }
        out.push_back(run_criterion(static_cast<int>(i) + 1, jobs));
        if (on_result) {
            on_result(out.back());
        }
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    char tail[96];
    std::snprintf(tail, sizeof tail, " (%.2fs, limit %.0fs)", r.seconds, r.time_limit);
    return std::string(r.passed ? "PASS" : "FAIL") + " " + std::to_string(r.id) + " " + r.name + ": " + r.measured +
           tail;
}

} // namespace quadrix
