#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "quadrix/characterize.hpp"

namespace quadrix {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Geometric h grid for sweeps: `steps` values from h_min to h_max.
struct SweepGrid {
    double h_min = 0.0;
    double h_max = 0.0;
    int steps = 0;
    bool logarithmic = true;
};

/// Everything a subcommand needs, parsed from one flat JSON document (see docs/config.md).
struct RunConfig {
    explicit RunConfig(LevelFamily f) : family(std::move(f)) {}

    LevelFamily family;
    std::optional<QuadricKind> quadric;  // set when f, alpha and sign form a normal form
    std::vector<double> levels;
    std::vector<double> offsets;
    std::optional<SweepGrid> sweep;
    int point_count = 6;
    SampleBox box;
    std::vector<Vec> points;             // explicit base points; sampling is skipped when present
    QuadratureSettings quadrature;
    double threshold = 1e-3;
    std::int64_t monte_carlo_samples = 0;  // 0: no Monte Carlo cross-check columns
    std::uint64_t seed = 0;
    std::string output;
    int jobs = 0;
    std::vector<std::string> suites;     // verify: empty means all
    nlohmann::json document;             // canonical form, after overrides

    /// FNV-1a of the canonical document, as 16 hex digits.
    std::string hash() const;
};

RunConfig parse_config(const nlohmann::json& document);
RunConfig load_config(const std::string& path);

/// Applies --seed / --jobs / --out overrides and refreshes the canonical document.
void apply_overrides(RunConfig& config, std::optional<std::uint64_t> seed, std::optional<int> jobs,
                     std::optional<std::string> out);

/// The normal form matching f, alpha and sign, if any.
std::optional<QuadricKind> detect_quadric(const LevelFamily& family);

} // namespace quadrix
