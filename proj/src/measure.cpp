#include "quadrix/measure.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

#include "quadrix/error.hpp"
#include "roots.hpp"

namespace quadrix {

std::string to_string(MeasureMethod m) {
    return m == MeasureMethod::radial_quadrature ? "radial_quadrature" : "monte_carlo";
}

int default_direction_count(int n) {
    switch (n) {
    case 1: return 2;
    case 2: return 1 << 8;
    case 3: return 1 << 10;
    case 4: return 1 << 12;
    case 5: return 1 << 13;
    default: return 1 << 14;
    }
}

double default_target_error(int n) { return n <= 3 ? 1e-4 : 1e-3; }

StarRegion::StarRegion(const LevelFamily& family, const SurfacePoint& p, double t)
    : family_(family), p_(p), t_(t) {
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw DomainError("normal distance t must be positive and finite");
    }
    base_ = p.position() + t * p.normal;
    shape_ = second_fundamental_form(family, p);
}

bool StarRegion::inside(const Vec& y, double s) const {
    double gv = family_.g(p_.position() + p_.frame * y + s * p_.normal);
    return std::isfinite(gv) && p_.gradient_inward * (gv - p_.k) > 0.0;
}

double StarRegion::radius(const Vec& u) const {
    const double sigma = p_.gradient_inward;
    const Vec Eu = p_.frame * u;
    // phi > 0 strictly inside the section; the root is where it turns negative.
    auto fn = [&](double r) -> std::pair<double, double> {
        auto [gv, gd] = family_.g_directional(base_ + r * Eu, Eu);
        return {-sigma * (gv - p_.k), -sigma * gd};
    };
    if (!(fn(0.0).first < 0.0)) {
        throw RangeError("plane at distance t does not cut into the convex side");
    }
    double kappa = std::max(normal_curvature(u), 1e-300);
    double hi = std::sqrt(2.0 * t_ / kappa);
    double lo = 0.0;
    bool found = false;
    for (int it = 0; it < 200; ++it) {
        double f = fn(hi).first;
        if (!std::isfinite(f) || f > 0.0) {
            found = true;
            break;
        }
        lo = hi;
        hi *= 2.0;
    }
    if (!found) {
        throw RangeError("section is unbounded in some direction");
    }
    // Pull hi back onto the exit when g is undefined past the boundary.
    auto rho = detail::safeguarded_newton(fn, lo, hi, 0.5 * (lo + hi), 1e-15 * hi, 300);
    if (!rho) {
        throw ConvergenceError("section radius solve did not converge");
    }
    Vec q = base_ + *rho * Eu;
    auto [gv, gn] = family_.g_directional(q, p_.normal);
    if (!std::isfinite(gv) || !(sigma * gn > 0.0)) {
        throw RangeError("section boundary leaves the graph chart over the tangent plane");
    }
    return *rho;
}

double StarRegion::height(const Vec& u, double r, double guess) const {
    const double sigma = p_.gradient_inward;
    const Vec base = p_.position() + r * (p_.frame * u);
    auto psi = [&](double w) -> std::pair<double, double> {
        auto [gv, gd] = family_.g_directional(base + w * p_.normal, p_.normal);
        return {sigma * (gv - p_.k), sigma * gd};
    };
    auto w = detail::safeguarded_newton(psi, 0.0, t_, guess, 1e-14 * t_, 200);
    if (!w) {
        throw ConvergenceError("chart height solve did not converge");
    }
    return *w;
}

double StarRegion::area_element(const Vec& y, double w) const {
    Vec G = family_.grad_g(p_.position() + p_.frame * y + w * p_.normal);
    return G.norm() / std::fabs(G.dot(p_.normal));
}

namespace {

// Integrals along one ray of the section, at two radial orders.
struct RayTerms {
    double area = 0.0;
    std::array<double, 2> volume{};
    std::array<double, 2> lateral{};
};

RayTerms integrate_ray(const StarRegion& region, const Vec& u, const std::array<Rule1D, 2>& rules,
                       bool with_lateral) {
    const int n = static_cast<int>(u.size());
    const double t = region.t();
    const double rho = region.radius(u);
    RayTerms out;
    out.area = std::pow(rho, n) / n;
    const double kappa = region.normal_curvature(u);
    const Vec Eu = region.point().frame * u;
    for (int which = 0; which < 2; ++which) {
        const Rule1D& rule = rules[which];
        double vol = 0.0;
        double lat = 0.0;
        double w_prev = 0.0;
        double r_prev = 0.0;
        double slope = 0.0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            double r = rho * rule.nodes[i];
            double guess = i == 0 ? std::min(0.5 * kappa * r * r, 0.5 * t) : w_prev + slope * (r - r_prev);
            double w = region.height(u, r, guess);
            double rn1 = std::pow(r, n - 1);
            vol += rule.weights[i] * (t - w) * rn1;
            Vec y = r * u;
            Vec G = region.family().grad_g(region.point().position() + region.point().frame * y +
                                           w * region.point().normal);
            double gn = G.dot(region.point().normal);
            if (with_lateral) {
                lat += rule.weights[i] * (G.norm() / std::fabs(gn)) * rn1;
            }
            slope = -G.dot(Eu) / gn;
            w_prev = w;
            r_prev = r;
        }
        out.volume[which] = rho * vol;
        out.lateral[which] = rho * lat;
    }
    return out;
}

struct RuleSums {
    double area = 0.0;
    std::array<double, 2> volume{};
    std::array<double, 2> lateral{};
};

RuleSums integrate_rule(const StarRegion& region, const SphereRule& sphere, const std::array<Rule1D, 2>& rules,
                        bool with_lateral, int jobs) {
    const std::size_t m = sphere.directions.size();
    std::vector<RayTerms> terms(m);
    constexpr std::size_t kBlock = 32;
    const std::size_t chunks = (m + kBlock - 1) / kBlock;
    parallel_chunks(chunks, jobs, [&](std::size_t c) {
        std::size_t end = std::min(m, (c + 1) * kBlock);
        for (std::size_t i = c * kBlock; i < end; ++i) {
            terms[i] = integrate_ray(region, sphere.directions[i], rules, with_lateral);
        }
    });
    std::vector<double> buf(m);
    RuleSums s;
    auto total = [&](auto pick) {
        for (std::size_t i = 0; i < m; ++i) {
            buf[i] = sphere.weights[i] * pick(terms[i]);
        }
        return pairwise_sum(buf);
    };
    s.area = total([](const RayTerms& r) { return r.area; });
    for (int j = 0; j < 2; ++j) {
        s.volume[j] = total([j](const RayTerms& r) { return r.volume[j]; });
        s.lateral[j] = total([j](const RayTerms& r) { return r.lateral[j]; });
    }
    return s;
}

MeasureResult make_result(double fine, double coarse_directions, double coarse_radial, std::int64_t samples,
                          std::uint64_t seed) {
    MeasureResult r;
    r.value = fine;
    r.error_estimate = std::fabs(fine - coarse_directions) + std::fabs(fine - coarse_radial) +
                       8.0 * std::numeric_limits<double>::epsilon() * std::fabs(fine);
    r.method = MeasureMethod::radial_quadrature;
    r.samples = samples;
    r.seed = seed;
    return r;
}

} // namespace

ChartMeasures chart_measures(const LevelFamily& family, const SurfacePoint& p, double t,
                             const QuadratureSettings& settings, bool with_lateral) {
    const int n = family.dimension();
    StarRegion region(family, p, t);
    const int jobs = resolve_jobs(settings.jobs);
    const double target = settings.target_relative_error > 0.0 ? settings.target_relative_error
                                                               : default_target_error(n);
    int count = settings.directions > 0 ? settings.directions : default_direction_count(n);
    int resolution = n == 1 ? 2 : resolution_for_count(n, count);
    int order = std::max(4, settings.radial_order);

    ChartMeasures out;
    for (int pass = 0;; ++pass) {
        std::array<Rule1D, 2> rules{gauss_legendre_unit(order), gauss_legendre_unit(order / 2)};
        SphereRule fine = sphere_rule(n, resolution);
        RuleSums f = integrate_rule(region, fine, rules, with_lateral, jobs);
        RuleSums c = f;
        if (n >= 2) {
            std::array<Rule1D, 2> coarse_rules{rules[0], rules[0]};
            c = integrate_rule(region, sphere_rule(n, std::max(4, resolution / 2)), coarse_rules,
                               with_lateral, jobs);
        }
        auto samples = static_cast<std::int64_t>(fine.directions.size()) * order;
        out.area = make_result(f.area, c.area, f.area, samples, settings.seed);
        out.volume = make_result(f.volume[0], c.volume[0], f.volume[1], samples, settings.seed);
        out.lateral = make_result(f.lateral[0], c.lateral[0], f.lateral[1], samples, settings.seed);

        auto ok = [&](const MeasureResult& r) { return r.error_estimate <= target * std::fabs(r.value); };
        bool converged = ok(out.area) && ok(out.volume) && (!with_lateral || ok(out.lateral));
        if (converged || pass >= settings.max_refinements) {
            break;
        }
        if (n >= 2) {
            resolution *= 2;
        }
        order = std::min(2 * order, 128);
    }
    if (!with_lateral) {
        out.lateral = MeasureResult{};
    }
    return out;
}

MeasureResult section_area(const LevelFamily& family, const SurfacePoint& p, double t,
                           const QuadratureSettings& settings) {
    return chart_measures(family, p, t, settings, false).area;
}

MeasureResult cap_volume(const LevelFamily& family, const SurfacePoint& p, double t,
                         const QuadratureSettings& settings) {
    return chart_measures(family, p, t, settings, false).volume;
}

MeasureResult lateral_area(const LevelFamily& family, const SurfacePoint& p, double t,
                           const QuadratureSettings& settings) {
    return chart_measures(family, p, t, settings, true).lateral;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Boundary of the section along u by bisection on the membership test alone.
double bisect_radius(const StarRegion& region, const Vec& u) {
    double lo = 0.0;
    double hi = std::sqrt(2.0 * region.t() / std::max(region.normal_curvature(u), 1e-300));
    for (int it = 0; it < 200 && region.inside(hi * u, region.t()); ++it) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        (region.inside(mid * u, region.t()) ? lo : hi) = mid;
    }
    return hi;
}

double bounding_radius(const StarRegion& region, int n) {
    SphereRule coarse = sphere_rule(n, n == 1 ? 2 : resolution_for_count(n, 1 << (n + 4)));
    Vec best = coarse.directions[0];
    double best_r = 0.0;
    for (const Vec& u : coarse.directions) {
        double r = bisect_radius(region, u);
        if (r > best_r) {
            best_r = r;
            best = u;
        }
    }
    if (n >= 2) {
        for (double step = 0.25; step > 1e-6; step *= 0.5) {
            bool improved = true;
            while (improved) {
                improved = false;
                for (int j = 0; j < n; ++j) {
                    for (double sgn : {1.0, -1.0}) {
                        Vec u = best;
                        u[j] += sgn * step;
                        u.normalize();
                        double r = bisect_radius(region, u);
                        if (r > best_r) {
                            best_r = r;
                            best = u;
                            improved = true;
                        }
                    }
                }
            }
        }
    }
    return best_r;
}

struct McChunk {
    std::int64_t in_section = 0;
    std::int64_t in_cap = 0;
    double jac_sum = 0.0;
    double jac_sq = 0.0;
};

} // namespace

ChartMeasures monte_carlo_measures(const LevelFamily& family, const SurfacePoint& p, double t,
                                   const MonteCarloSettings& settings) {
    const int n = family.dimension();
    if (settings.samples < 1) {
        throw DomainError("Monte Carlo needs at least one sample");
    }
    StarRegion region(family, p, t);
    const double R = 1.02 * bounding_radius(region, n);
    const double box = std::pow(2.0 * R, n);

    constexpr std::int64_t kChunk = 4096;
    const std::int64_t chunks = (settings.samples + kChunk - 1) / kChunk;
    std::vector<McChunk> parts(static_cast<std::size_t>(chunks));
    parallel_chunks(static_cast<std::size_t>(chunks), resolve_jobs(settings.jobs), [&](std::size_t c) {
        std::mt19937_64 rng(splitmix64(settings.seed ^ splitmix64(c + 1)));
        std::int64_t count = std::min(kChunk, settings.samples - static_cast<std::int64_t>(c) * kChunk);
        McChunk acc;
        Vec y(n);
        for (std::int64_t s = 0; s < count; ++s) {
            for (int i = 0; i < n; ++i) {
                y[i] = R * (2.0 * unit_uniform(rng) - 1.0);
            }
            double height = t * unit_uniform(rng);
            if (region.inside(y, height)) {
                ++acc.in_cap;
            }
            if (region.inside(y, t)) {
                ++acc.in_section;
                double lo = 0.0;
                double hi = t;
                for (int it = 0; it < 60; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (region.inside(y, mid) ? hi : lo) = mid;
                }
                double j = region.area_element(y, 0.5 * (lo + hi));
                acc.jac_sum += j;
                acc.jac_sq += j * j;
            }
        }
        parts[c] = acc;
    });

    std::int64_t in_section = 0;
    std::int64_t in_cap = 0;
    std::vector<double> js(parts.size());
    std::vector<double> jq(parts.size());
    for (std::size_t c = 0; c < parts.size(); ++c) {
        in_section += parts[c].in_section;
        in_cap += parts[c].in_cap;
        js[c] = parts[c].jac_sum;
        jq[c] = parts[c].jac_sq;
    }
    const double N = static_cast<double>(settings.samples);
    auto result = [&](double mean, double var, double scale) {
        MeasureResult r;
        r.value = scale * mean;
        r.error_estimate = scale * std::sqrt(std::max(var, 0.0) / N);
        r.method = MeasureMethod::monte_carlo;
        r.samples = settings.samples;
        r.seed = settings.seed;
        return r;
    };
    double pa = in_section / N;
    double pv = in_cap / N;
    double mj = pairwise_sum(js) / N;
    double mj2 = pairwise_sum(jq) / N;

    ChartMeasures out;
    out.area = result(pa, pa * (1.0 - pa), box);
    out.volume = result(pv, pv * (1.0 - pv), box * t);
    out.lateral = result(mj, mj2 - mj * mj, box);
    return out;
}

StarredMeasures starred_measures(const LevelFamily& family, const SurfacePoint& p, double h,
                                 const QuadratureSettings& settings) {
    StarredMeasures out;
    out.tangency = parallel_tangent(family, p, h);
    out.t = out.tangency.t;
    ChartMeasures m = chart_measures(family, p, out.t, settings, true);
    out.area = m.area;
    out.volume = m.volume;
    out.lateral = m.lateral;
    return out;
}

double derivative_check(const LevelFamily& family, const SurfacePoint& p, double t, double delta,
                        const QuadratureSettings& settings) {
    if (!(delta > 0.0) || !(delta < t)) {
        throw DomainError("derivative check needs 0 < delta < t");
    }
    QuadratureSettings fixed = settings;
    fixed.max_refinements = 0;
    double vp = cap_volume(family, p, t + delta, fixed).value;
    double vm = cap_volume(family, p, t - delta, fixed).value;
    double a = section_area(family, p, t, fixed).value;
    return std::fabs((vp - vm) / (2.0 * delta) - a) / a;
}

} // namespace quadrix
