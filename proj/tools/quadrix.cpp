#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "quadrix/commands.hpp"
#include "quadrix/error.hpp"

namespace {

using Command = int (*)(const quadrix::RunConfig&, std::ostream&, std::ostream&);

int run(Command cmd, const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<int> jobs,
        std::optional<std::string> out_path) {
    try {
        quadrix::RunConfig config = quadrix::load_config(config_path);
        quadrix::apply_overrides(config, seed, jobs, out_path);
        if (config.output.empty()) {
            return cmd(config, std::cout, std::cerr);
        }
        std::ofstream out(config.output, std::ios::binary);
        if (!out) {
            throw quadrix::ConfigError("cannot write output file '" + config.output + "'");
        }
        int code = cmd(config, out, std::cerr);
        out.close();
        if (!out) {
            throw quadrix::ConfigError("failed writing output file '" + config.output + "'");
        }
        return code;
    } catch (const quadrix::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return quadrix::exit_failure;
    } catch (const quadrix::ParseError& e) {
        std::cerr << "config error: expression: " << e.what() << "\n";
        return quadrix::exit_failure;
    } catch (const quadrix::ConvexityError& e) {
        std::cerr << "convexity error: " << e.what() << "\n";
        return quadrix::exit_convexity;
    } catch (const quadrix::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return quadrix::exit_failure;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Level-set geometry of z^alpha -+ f(x): curvature, cap measures and quadric characterization"};
    app.set_version_flag("--version", std::string("quadrix ") + quadrix::kToolVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    std::optional<std::string> out_path;

    struct Sub {
        const char* name;
        const char* help;
        Command cmd;
    };
    const Sub subs[] = {
        {"curvature", "Gauss-Kronecker curvature and the invariant K |grad g|^(n+2) per point (CSV)",
         quadrix::cmd_curvature},
        {"measures", "Starred volume, section area and lateral area per (k, h, point) (CSV)", quadrix::cmd_measures},
        {"classify", "Constancy reports and the family verdict (JSON)", quadrix::cmd_classify},
        {"verify", "Run the acceptance suites and print pass/fail per criterion", quadrix::cmd_verify},
        {"sweep", "Starred measures along an h grid for plotting (CSV)", quadrix::cmd_sweep},
    };
    Command chosen = nullptr;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--seed", seed, "Override the configured seed");
        sub->add_option("--out", out_path, "Output file (default: configured path or stdout)");
        sub->add_option("--jobs", jobs, "Worker threads (default: QUADRIX_JOBS, else 1)")->check(CLI::PositiveNumber);
        Command cmd = s.cmd;
        sub->callback([&chosen, cmd] { chosen = cmd; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : quadrix::exit_failure;
    }
    return run(chosen, config_path, seed, jobs, out_path);
}
