#include "quadrix/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "quadrix/error.hpp"

namespace quadrix {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "schema",   "alpha",         "sign",           "function",        "a",          "epsilon",
    "perturbation", "expression", "n",             "levels",          "offsets",    "sweep_h_min",
    "sweep_h_max", "sweep_steps", "sweep_spacing", "point_count",     "box_half_width", "box_lo",
    "box_hi",   "points",        "directions",     "radial_order",    "target_tolerance", "max_refinements",
    "threshold", "monte_carlo_samples", "seed",    "output",          "jobs",       "suites"};

template <typename T>
T get(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key)) {
        return fallback;
    }
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::vector<double> number_list(const json& doc, const char* key) {
    return get<std::vector<double>>(doc, key, {});
}

Vec to_vec(const std::vector<double>& v) { return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())); }

FunctionSpec parse_function(const json& doc) {
    std::string kind = get<std::string>(doc, "function", "");
    if (kind == "quadratic") {
        return FunctionSpec::quadratic(number_list(doc, "a"));
    }
    if (kind == "perturbed") {
        std::string p = get<std::string>(doc, "perturbation", "quartic");
        Perturbation pk;
        if (p == "quartic") {
            pk = Perturbation::quartic;
        } else if (p == "cosh") {
            pk = Perturbation::cosh;
        } else {
            throw ConfigError("perturbation must be 'quartic' or 'cosh'");
        }
        return FunctionSpec::perturbed(number_list(doc, "a"), get<double>(doc, "epsilon", 0.0), pk);
    }
    if (kind == "expression") {
        if (!doc.contains("n")) {
            throw ConfigError("expression functions need the dimension 'n'");
        }
        return parse_expression(get<std::string>(doc, "expression", ""), get<int>(doc, "n", 0));
    }
    throw ConfigError("'function' must be one of quadratic, perturbed, expression");
}

} // namespace

std::optional<QuadricKind> detect_quadric(const LevelFamily& family) {
    if (family.f().quadratic_coefficients() == nullptr) {
        return std::nullopt;
    }
    if (family.alpha() == 1.0 && family.sign() == Sign::minus) {
        return QuadricKind::elliptic_paraboloid;
    }
    if (family.alpha() == 2.0) {
        return family.sign() == Sign::plus ? QuadricKind::ellipsoid : QuadricKind::elliptic_hyperboloid;
    }
    return std::nullopt;
}

std::string RunConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : document.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

RunConfig parse_config(const json& document) {
    if (!document.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    for (const auto& item : document.items()) {
        if (!kKnownKeys.count(item.key())) {
            throw ConfigError("unknown config key '" + item.key() + "'");
        }
    }
    if (get<int>(document, "schema", kSchemaVersion) != kSchemaVersion) {
        throw ConfigError("unsupported config schema version");
    }
    std::string sign = get<std::string>(document, "sign", "minus");
    if (sign != "minus" && sign != "plus") {
        throw ConfigError("'sign' must be 'minus' or 'plus'");
    }
    if (!document.contains("alpha")) {
        throw ConfigError("missing 'alpha'");
    }
    double alpha = get<double>(document, "alpha", 0.0);
    RunConfig c(LevelFamily(parse_function(document), alpha, sign == "plus" ? Sign::plus : Sign::minus));
    const int n = c.family.dimension();
    c.quadric = detect_quadric(c.family);

    c.levels = number_list(document, "levels");
    if (c.levels.empty()) {
        c.levels = default_levels(c.family);
    }
    c.offsets = number_list(document, "offsets");
    if (document.contains("sweep_h_min") || document.contains("sweep_h_max") || document.contains("sweep_steps")) {
        SweepGrid g;
        g.h_min = get<double>(document, "sweep_h_min", 0.0);
        g.h_max = get<double>(document, "sweep_h_max", 0.0);
        g.steps = get<int>(document, "sweep_steps", 0);
        std::string spacing = get<std::string>(document, "sweep_spacing", "log");
        if (spacing != "log" && spacing != "linear") {
            throw ConfigError("'sweep_spacing' must be 'log' or 'linear'");
        }
        g.logarithmic = spacing == "log";
        if (g.steps < 1 || g.h_min == 0.0 || g.h_max == 0.0 || (g.h_min > 0) != (g.h_max > 0)) {
            throw ConfigError("sweep needs sweep_steps >= 1 and nonzero h bounds of one sign");
        }
        c.sweep = g;
    }

    c.point_count = get<int>(document, "point_count", 6);
    double half = get<double>(document, "box_half_width", 2.0);
    c.box = SampleBox::cube(n, half);
    if (document.contains("box_lo") || document.contains("box_hi")) {
        c.box.lo = to_vec(number_list(document, "box_lo"));
        c.box.hi = to_vec(number_list(document, "box_hi"));
        if (c.box.lo.size() != n || c.box.hi.size() != n) {
            throw ConfigError("box_lo and box_hi need one entry per dimension");
        }
    }
    for (const auto& p : get<std::vector<std::vector<double>>>(document, "points", {})) {
        if (static_cast<int>(p.size()) != n) {
            throw ConfigError("every explicit point needs one coordinate per dimension");
        }
        c.points.push_back(to_vec(p));
    }

    c.quadrature.directions = get<int>(document, "directions", 0);
    c.quadrature.radial_order = get<int>(document, "radial_order", 16);
    c.quadrature.target_relative_error = get<double>(document, "target_tolerance", 0.0);
    c.quadrature.max_refinements = get<int>(document, "max_refinements", 2);
    if (c.quadrature.radial_order < 4 || c.quadrature.max_refinements < 0 || c.quadrature.directions < 0) {
        throw ConfigError("quadrature settings out of range");
    }
    c.threshold = get<double>(document, "threshold", 1e-3);
    c.monte_carlo_samples = get<std::int64_t>(document, "monte_carlo_samples", 0);
    c.seed = get<std::uint64_t>(document, "seed", 0);
    c.output = get<std::string>(document, "output", "");
    c.jobs = get<int>(document, "jobs", 0);
    c.suites = get<std::vector<std::string>>(document, "suites", {});
    c.quadrature.seed = c.seed;
    c.quadrature.jobs = c.jobs;
    c.document = document;
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed, std::optional<int> jobs,
                     std::optional<std::string> out) {
    if (seed) {
        config.seed = *seed;
        config.quadrature.seed = *seed;
        config.document["seed"] = *seed;
    }
    if (jobs) {
        config.jobs = *jobs;
        config.quadrature.jobs = *jobs;
    }
    if (out) {
        config.output = *out;
    }
}

} // namespace quadrix
