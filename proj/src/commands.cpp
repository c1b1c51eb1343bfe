#include "quadrix/commands.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "quadrix/acceptance.hpp"
#include "quadrix/error.hpp"

namespace quadrix {

using nlohmann::json;

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::uint64_t mix(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? std::string("\"\"") : std::string(1, c == '\n' ? ' ' : c);
    }
    return q + "\"";
}

void write_preamble(std::ostream& out, const RunConfig& config, const char* command) {
    out << "# quadrix " << kToolVersion << " command=" << command << " config_hash=" << config.hash()
        << " seed=" << config.seed << "\n";
    out << "# family: " << config.family.f().describe() << " alpha=" << format_number(config.family.alpha())
        << " sign=" << (config.family.sign() == Sign::minus ? "minus" : "plus") << "\n";
}

std::string point_columns(int n) {
    std::string s;
    for (int i = 1; i <= n; ++i) {
        s += ",x" + std::to_string(i);
    }
    return s;
}

std::string point_values(const Vec& x) {
    std::string s;
    for (int i = 0; i < x.size(); ++i) {
        s += "," + format_number(x[i]);
    }
    return s;
}

struct LevelPoints {
    std::vector<SurfacePoint> points;
    std::vector<std::string> notes;
    int convexity_failures = 0;
};

// Explicit points when configured, else the seeded sample for this level.
LevelPoints level_points(const RunConfig& config, double k, std::size_t level_index) {
    LevelPoints lp;
    auto describe = [](const Vec& x) {
        std::string s = "x=(";
        for (int i = 0; i < x.size(); ++i) {
            s += (i ? " " : "") + format_number(x[i]);
        }
        return s + ")";
    };
    if (!config.points.empty()) {
        for (const Vec& x : config.points) {
            try {
                lp.points.push_back(point_on_level(config.family, k, x));
            } catch (const ConvexityError& e) {
                ++lp.convexity_failures;
                lp.notes.push_back("skipped " + describe(x) + ": " + e.what());
            } catch (const Error& e) {
                lp.notes.push_back("skipped " + describe(x) + ": " + e.what());
            }
        }
    } else {
        SampleResult s = sample_points(config.family, k, config.point_count, mix(config.seed, level_index), config.box);
        lp.points = std::move(s.points);
        lp.convexity_failures = s.convexity_failures;
        for (std::size_t i = 0; i < s.skipped.size(); ++i) {
            lp.notes.push_back("skipped " + describe(s.skipped[i]) + ": " + s.skip_reasons[i]);
        }
    }
    for (const auto& p : lp.points) {
        if (config.family.f().value(p.x) < 0.0) {
            lp.notes.push_back("warning: f is negative at " + describe(p.x) +
                               "; the characterizations assume a nonnegative f");
        }
    }
    return lp;
}

void emit_notes(const LevelPoints& lp, double k, std::ostream& out, std::ostream& log) {
    for (const auto& note : lp.notes) {
        out << "# k=" << format_number(k) << " " << note << "\n";
        log << "k=" << format_number(k) << " " << note << "\n";
    }
}

struct StarredRow {
    double k = 0.0;
    double h = 0.0;
    Vec x;
    double grad_norm = 0.0;
    StarredMeasures m;
    ChartMeasures mc;
    bool has_mc = false;
    double oracle_v = std::numeric_limits<double>::quiet_NaN();
    double oracle_a = std::numeric_limits<double>::quiet_NaN();
    std::string error;
};

void fill_rows(const RunConfig& config, std::vector<StarredRow>& rows, bool lateral, std::int64_t mc_samples,
               bool oracle) {
    QuadratureSettings qs = config.quadrature;
    qs.jobs = 1;
    parallel_chunks(rows.size(), resolve_jobs(config.jobs), [&](std::size_t i) {
        StarredRow& r = rows[i];
        try {
            SurfacePoint p = point_on_level(config.family, r.k, r.x);
            r.grad_norm = p.grad_norm();
            if (!offset_admissible(config.family, p, r.h)) {
                throw RangeError("offset h is not on the convex side of M_k");
            }
            r.m.tangency = parallel_tangent(config.family, p, r.h);
            r.m.t = r.m.tangency.t;
            ChartMeasures cm = chart_measures(config.family, p, r.m.t, qs, lateral);
            r.m.volume = cm.volume;
            r.m.area = cm.area;
            r.m.lateral = cm.lateral;
            if (mc_samples > 0) {
                r.mc = monte_carlo_measures(config.family, p, r.m.t, {mc_samples, mix(config.seed, 1000003 + i), 1});
                r.has_mc = true;
            }
            if (oracle && config.quadric) {
                Vec a = Eigen::Map<const Vec>(config.family.f().quadratic_coefficients()->data(),
                                              config.family.dimension());
                StarredPair o = quadric_starred(*config.quadric, a, r.k, r.h, r.grad_norm);
                r.oracle_v = o.volume;
                r.oracle_a = o.area;
            }
        } catch (const Error& e) {
            r.error = e.what();
        }
    });
}

} // namespace

int cmd_curvature(const RunConfig& config, std::ostream& out, std::ostream& log) {
    const int n = config.family.dimension();
    write_preamble(out, config, "curvature");
    out << "k" << point_columns(n) << ",z,K,grad_norm,invariant\n";
    int failures = 0;
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        double k = config.levels[li];
        LevelPoints lp = level_points(config, k, li);
        emit_notes(lp, k, out, log);
        failures += lp.convexity_failures;
        for (const auto& p : lp.points) {
            double K = gauss_kronecker(config.family, p);
            out << format_number(k) << point_values(p.x) << "," << format_number(p.z) << "," << format_number(K)
                << "," << format_number(p.grad_norm()) << ","
                << format_number(K * std::pow(p.grad_norm(), n + 2)) << "\n";
        }
    }
    if (failures > 0) {
        log << failures << " point(s) failed the convexity certificate\n";
        return exit_convexity;
    }
    return exit_ok;
}

int cmd_measures(const RunConfig& config, std::ostream& out, std::ostream& log) {
    if (config.offsets.empty()) {
        throw ConfigError("measures needs a nonempty 'offsets' grid");
    }
    const int n = config.family.dimension();
    std::vector<StarredRow> rows;
    std::vector<LevelPoints> per_level;
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        double k = config.levels[li];
        per_level.push_back(level_points(config, k, li));
        for (double h : config.offsets) {
            for (const auto& p : per_level.back().points) {
                StarredRow r;
                r.k = k;
                r.h = h;
                r.x = p.x;
                rows.push_back(std::move(r));
            }
        }
    }
    fill_rows(config, rows, true, config.monte_carlo_samples, false);

    write_preamble(out, config, "measures");
    for (std::size_t li = 0; li < per_level.size(); ++li) {
        emit_notes(per_level[li], config.levels[li], out, log);
    }
    const bool mc = config.monte_carlo_samples > 0;
    out << "k,h" << point_columns(n) << ",t,Vstar,Vstar_err,Astar,Astar_err,Sstar,Sstar_err,grad_norm,seed";
    if (mc) {
        out << ",Vstar_mc,Vstar_mc_err,Astar_mc,Astar_mc_err,Sstar_mc,Sstar_mc_err";
    }
    out << ",error\n";
    std::size_t failed = 0;
    for (const auto& r : rows) {
        out << format_number(r.k) << "," << format_number(r.h) << point_values(r.x);
        if (r.error.empty()) {
            out << "," << format_number(r.m.t) << "," << format_number(r.m.volume.value) << ","
                << format_number(r.m.volume.error_estimate) << "," << format_number(r.m.area.value) << ","
                << format_number(r.m.area.error_estimate) << "," << format_number(r.m.lateral.value) << ","
                << format_number(r.m.lateral.error_estimate) << "," << format_number(r.grad_norm) << ","
                << config.seed;
            if (mc) {
                out << "," << format_number(r.mc.volume.value) << "," << format_number(r.mc.volume.error_estimate)
                    << "," << format_number(r.mc.area.value) << "," << format_number(r.mc.area.error_estimate)
                    << "," << format_number(r.mc.lateral.value) << ","
                    << format_number(r.mc.lateral.error_estimate);
            }
            out << ",\n";
        } else {
            ++failed;
            out << ",,,,,,,,," << config.seed << (mc ? ",,,,,," : "") << "," << csv_escape(r.error) << "\n";
            log << "row k=" << format_number(r.k) << " h=" << format_number(r.h) << ": " << r.error << "\n";
        }
    }
    if (!rows.empty() && failed == rows.size()) {
        log << "every row failed\n";
        return exit_all_rows_failed;
    }
    return exit_ok;
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& log) {
    std::vector<double> grid;
    if (config.sweep) {
        const SweepGrid& g = *config.sweep;
        for (int i = 0; i < g.steps; ++i) {
            double s = g.steps == 1 ? 0.0 : static_cast<double>(i) / (g.steps - 1);
            grid.push_back(g.logarithmic ? g.h_min * std::pow(g.h_max / g.h_min, s) : g.h_min + s * (g.h_max - g.h_min));
        }
    } else {
        grid = config.offsets;
    }
    if (grid.empty()) {
        throw ConfigError("sweep needs a nonempty h grid ('offsets' or sweep_h_min/sweep_h_max/sweep_steps)");
    }
    const int n = config.family.dimension();
    std::vector<StarredRow> rows;
    std::vector<LevelPoints> per_level;
    for (std::size_t li = 0; li < config.levels.size(); ++li) {
        double k = config.levels[li];
        per_level.push_back(level_points(config, k, li));
        if (per_level.back().points.empty()) {
            continue;
        }
        for (double h : grid) {
            StarredRow r;
            r.k = k;
            r.h = h;
            r.x = per_level.back().points.front().x;
            rows.push_back(std::move(r));
        }
    }
    fill_rows(config, rows, false, 0, true);

    write_preamble(out, config, "sweep");
    for (std::size_t li = 0; li < per_level.size(); ++li) {
        emit_notes(per_level[li], config.levels[li], out, log);
    }
    out << "k,h" << point_columns(n) << ",t,Vstar,Vstar_err,Astar,Astar_err,Vstar_oracle,Astar_oracle,grad_norm,seed,error\n";
    std::size_t failed = 0;
    for (const auto& r : rows) {
        out << format_number(r.k) << "," << format_number(r.h) << point_values(r.x);
        if (r.error.empty()) {
            out << "," << format_number(r.m.t) << "," << format_number(r.m.volume.value) << ","
                << format_number(r.m.volume.error_estimate) << "," << format_number(r.m.area.value) << ","
                << format_number(r.m.area.error_estimate) << "," << format_number(r.oracle_v) << ","
                << format_number(r.oracle_a) << "," << format_number(r.grad_norm) << "," << config.seed << ",\n";
        } else {
            ++failed;
            out << ",,,,,,,,," << config.seed << "," << csv_escape(r.error) << "\n";
            log << "row k=" << format_number(r.k) << " h=" << format_number(r.h) << ": " << r.error << "\n";
        }
    }
    if (rows.empty() || failed == rows.size()) {
        log << "every row failed\n";
        return exit_all_rows_failed;
    }
    return exit_ok;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) {
        a.push_back(number_or_null(x));
    }
    return a;
}

json vec_json(const Vec& x) {
    json a = json::array();
    for (int i = 0; i < x.size(); ++i) {
        a.push_back(x[i]);
    }
    return a;
}

json report_json(const ConstancyReport& r) {
    json j;
    j["condition"] = to_string(r.condition);
    j["k"] = number_or_null(r.k);
    j["offsets"] = numbers(r.offsets);
    j["points"] = json::array();
    for (const auto& p : r.points) {
        j["points"].push_back(vec_json(p));
    }
    j["values"] = json::array();
    j["errors"] = json::array();
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        j["values"].push_back(numbers(r.values[i]));
        j["errors"].push_back(numbers(r.errors[i]));
    }
    j["means"] = numbers(r.means);
    j["spreads"] = numbers(r.spreads);
    j["thresholds"] = numbers(r.thresholds);
    j["base_threshold"] = r.base_threshold;
    j["verdict"] = to_string(r.verdict);
    j["reason"] = r.reason;
    j["failures"] = json::array();
    for (const auto& f : r.failures) {
        j["failures"].push_back({{"point", f.point}, {"offset", f.offset}, {"message", f.message}});
    }
    return j;
}

} // namespace

int cmd_classify(const RunConfig& config, std::ostream& out, std::ostream& log) {
    ClassifyOptions opt;
    opt.point_count = config.point_count;
    opt.seed = config.seed;
    opt.box = config.box;
    opt.offsets = config.offsets;
    opt.constancy.threshold = config.threshold;
    opt.constancy.quadrature = config.quadrature;
    opt.constancy.jobs = config.jobs;
    Classification c = classify(config.family, config.levels, opt);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config.hash();
    j["seed"] = config.seed;
    j["empirical"] = true;
    j["family"] = {{"f", config.family.f().describe()},
                   {"alpha", config.family.alpha()},
                   {"sign", config.family.sign() == Sign::minus ? "minus" : "plus"},
                   {"n", config.family.dimension()}};
    j["verdict"] = to_string(c.verdict);
    j["reason"] = c.reason;
    j["due_to_errors"] = c.due_to_errors;
    j["levels"] = numbers(c.levels);
    j["matched_constants"] = numbers(c.matched_constants);
    j["threshold"] = config.threshold;
    j["reports"] = json::array();
    for (const auto& r : c.evidence) {
        j["reports"].push_back(report_json(r));
    }
    out << j.dump(2) << "\n";
    log << "verdict: " << to_string(c.verdict) << (c.reason.empty() ? "" : " (" + c.reason + ")") << "\n";
    return c.verdict == FamilyVerdict::not_characterized && c.due_to_errors ? exit_inconclusive : exit_ok;
}

int cmd_verify(const RunConfig& config, std::ostream& out, std::ostream& log) {
    out << "# quadrix " << kToolVersion << " command=verify config_hash=" << config.hash() << " seed=" << config.seed
        << "\n";
    auto results = run_acceptance(config.suites, resolve_jobs(config.jobs), [&](const CriterionResult& r) {
        out << format_result(r) << "\n";
        out.flush();
    });
    int failed = 0;
    for (const auto& r : results) {
        failed += r.passed ? 0 : 1;
    }
    log << results.size() - failed << "/" << results.size() << " suites passed\n";
    return failed ? exit_failure : exit_ok;
}

} // namespace quadrix
