#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int exit_code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("quadrix_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string config(const std::string& name, const std::string& body) {
        fs::path p = dir_ / name;
        std::ofstream(p) << body;
        return p.string();
    }

    Outcome run(const std::string& args, const std::string& env = "") {
        fs::path out = dir_ / "stdout.txt";
        fs::path err = dir_ / "stderr.txt";
        std::string cmd = env + " " + QUADRIX_CLI_PATH + " " + args + " >" + out.string() + " 2>" + err.string();
        int status = std::system(cmd.c_str());
        Outcome r;
        r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = slurp(out);
        r.err = slurp(err);
        return r;
    }

    static std::string slurp(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
};

std::vector<std::string> data_rows(const std::string& csv) {
    std::vector<std::string> rows;
    std::istringstream in(csv);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        rows.push_back(line);
    }
    return rows;
}

std::string header(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') {
            return line;
        }
    }
    return "";
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.push_back("");
    }
    return cells;
}

double column(const std::string& csv, const std::string& row, const std::string& name) {
    auto names = split(header(csv));
    auto cells = split(row);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return std::stod(cells.at(i));
        }
    }
    ADD_FAILURE() << "no column " << name;
    return NAN;
}

const char* kSphere = R"({"alpha": 2, "sign": "plus", "function": "quadratic", "a": [1, 1],
  "levels": [1], "offsets": [-0.75], "box_half_width": 0.6, "point_count": 5, "seed": 7})";

} // namespace

TEST_F(Cli, SphereCurvatureRowsAreSixteen) {
    Outcome r = run("curvature --config " + config("s.json", kSphere));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("# quadrix ", 0), 0u);
    EXPECT_NE(r.out.find("command=curvature"), std::string::npos);
    EXPECT_NE(r.out.find("seed=7"), std::string::npos);
    auto rows = data_rows(r.out);
    ASSERT_EQ(rows.size(), 5u);
    for (const auto& row : rows) {
        EXPECT_NEAR(column(r.out, row, "invariant"), 16.0, 1e-10);
        EXPECT_NEAR(column(r.out, row, "K"), 1.0, 1e-12);
    }
}

TEST_F(Cli, ParaboloidAndAlphaThreeCurvature) {
    Outcome p = run("curvature --config " +
                config("p.json", R"({"alpha": 1, "function": "quadratic", "a": [1, 1],
                  "levels": [0.5, 2], "points": [[0, 0], [0.7, -0.4]]})"));
    ASSERT_EQ(p.exit_code, 0) << p.err;
    auto rows = data_rows(p.out);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) {
        EXPECT_NEAR(column(p.out, row, "invariant"), 4.0, 1e-10);
    }

    // Reporting a varying invariant is not a failure.
    Outcome c = run("curvature --config " +
                config("c.json", R"({"alpha": 3, "function": "quadratic", "a": [1, 1],
                  "levels": [1], "points": [[0.2, 0.1], [1.2, -0.7]]})"));
    ASSERT_EQ(c.exit_code, 0) << c.err;
    auto crow = data_rows(c.out);
    ASSERT_EQ(crow.size(), 2u);
    double i0 = column(c.out, crow[0], "invariant");
    double i1 = column(c.out, crow[1], "invariant");
    EXPECT_GT(std::fabs(i0 - i1) / i1, 0.1);
}

TEST_F(Cli, MeasuresMatchWorkedValues) {
    struct Case {
        const char* body;
        double vstar;
    };
    // Hyperboloid n=1 (sqrt(2) - asinh(1)), unit-sphere cap of height 1/2, paraboloid (pi/2) 0.3^2.
    std::vector<Case> cases = {
        {R"({"alpha": 2, "function": "quadratic", "a": [1], "levels": [1], "offsets": [1],
            "points": [[0.0], [0.4], [-0.9]]})",
         std::sqrt(2.0) - std::asinh(1.0)},
        {kSphere, std::numbers::pi * 0.25 * 2.5 / 3.0},
        {R"({"alpha": 1, "function": "quadratic", "a": [1, 1], "levels": [1], "offsets": [0.3],
            "points": [[0, 0], [0.2, -0.1], [0.3, 0.3]]})",
         std::numbers::pi / 2.0 * 0.09},
    };
    int i = 0;
    for (const auto& c : cases) {
        Outcome r = run("measures --config " + config("m" + std::to_string(i++) + ".json", c.body));
        ASSERT_EQ(r.exit_code, 0) << r.err;
        auto rows = data_rows(r.out);
        ASSERT_FALSE(rows.empty());
        for (const auto& row : rows) {
            EXPECT_NEAR(column(r.out, row, "Vstar"), c.vstar, 1e-4 * c.vstar) << row;
        }
    }
}

TEST_F(Cli, OutputIsByteIdenticalAcrossRunsAndJobs) {
    std::string cfg = config("q.json", R"({"alpha": 2, "function": "perturbed", "a": [1, 2], "epsilon": 0.1,
      "levels": [1], "offsets": [0.4, 0.8], "point_count": 5, "seed": 13})");
    Outcome a = run("measures --config " + cfg + " --jobs 1");
    Outcome b = run("measures --config " + cfg + " --jobs 4");
    Outcome c = run("measures --config " + cfg, "QUADRIX_JOBS=3");
    ASSERT_EQ(a.exit_code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, c.out);

    Outcome k1 = run("classify --config " + cfg + " --jobs 1");
    Outcome k2 = run("classify --config " + cfg + " --jobs 4");
    EXPECT_EQ(k1.out, k2.out);

    fs::path file = dir_ / "rows.csv";
    Outcome f = run("measures --config " + cfg + " --out " + file.string());
    ASSERT_EQ(f.exit_code, 0) << f.err;
    EXPECT_EQ(slurp(file), a.out);
}

TEST_F(Cli, SeedOverrideIsRecorded) {
    std::string cfg = config("s.json", kSphere);
    Outcome a = run("curvature --config " + cfg + " --seed 8");
    ASSERT_EQ(a.exit_code, 0) << a.err;
    EXPECT_NE(a.out.find("seed=8"), std::string::npos);
    Outcome b = run("curvature --config " + cfg);
    EXPECT_NE(data_rows(a.out), data_rows(b.out));
}

TEST_F(Cli, ClassifyJson) {
    Outcome r = run("classify --config " +
                config("h.json", R"({"alpha": 2, "function": "quadratic", "a": [1, 2], "levels": [1], "seed": 3})"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto doc = nlohmann::json::parse(r.out);
    EXPECT_EQ(doc["verdict"], "elliptic_hyperboloid");
    EXPECT_EQ(doc["empirical"], true);
    EXPECT_EQ(doc["due_to_errors"], false);
    EXPECT_NEAR(doc["matched_constants"][0].template get<double>(), 64.0, 1e-8);
    EXPECT_TRUE(doc.contains("config_hash"));
    EXPECT_TRUE(doc.contains("schema_version"));

    Outcome q = run("classify --config " +
                config("q.json", R"({"alpha": 2, "function": "perturbed", "a": [1, 1], "epsilon": 0.2,
                  "levels": [1], "seed": 5})"));
    ASSERT_EQ(q.exit_code, 0) << q.err;
    EXPECT_EQ(nlohmann::json::parse(q.out)["verdict"], "not_characterized");
}

TEST_F(Cli, ExitCodes) {
    // Unknown key, unreadable file, malformed JSON, empty grids.
    EXPECT_EQ(run("curvature --config " + config("a.json", R"({"alpha": 2, "function": "quadratic", "a": [1],
      "bogus": 1})")).exit_code, 1);
    EXPECT_EQ(run("curvature --config " + (dir_ / "missing.json").string()).exit_code, 1);
    EXPECT_EQ(run("curvature --config " + config("b.json", "{ not json")).exit_code, 1);
    EXPECT_EQ(run("sweep --config " + config("c.json", R"({"alpha": 2, "function": "quadratic", "a": [1],
      "sweep_steps": 0, "sweep_h_min": 0.1, "sweep_h_max": 1})")).exit_code, 1);
    EXPECT_EQ(run("sweep --config " + config("d.json", R"({"alpha": 2, "function": "quadratic", "a": [1]})")).exit_code,
              1);
    EXPECT_EQ(run("measures --config " + config("e.json", R"({"alpha": 2, "function": "quadratic", "a": [1]})"))
                  .exit_code,
              1);

    // A saddle is never convex.
    Outcome saddle = run("curvature --config " +
                     config("f.json", R"({"alpha": 2, "function": "expression", "n": 2,
                       "expression": "x1^2 - x2^2", "levels": [1], "points": [[0.5, 0.1]]})"));
    EXPECT_EQ(saddle.exit_code, 2);
    EXPECT_NE(saddle.err.find("convexity"), std::string::npos);

    // No sampled point lies under the ellipsoid.
    Outcome none = run("classify --config " +
                   config("g.json", R"({"alpha": 2, "sign": "plus", "function": "quadratic", "a": [1, 1],
                     "levels": [1], "box_lo": [1.5, 1.5], "box_hi": [2, 2]})"));
    EXPECT_EQ(none.exit_code, 3);
    EXPECT_EQ(nlohmann::json::parse(none.out)["due_to_errors"], true);

    // Every offset is below -k.
    Outcome rows = run("measures --config " +
                   config("h.json", R"({"alpha": 2, "sign": "plus", "function": "quadratic", "a": [1, 1],
                     "levels": [1], "offsets": [-1.5], "points": [[0.1, 0.1]]})"));
    EXPECT_EQ(rows.exit_code, 4);
    ASSERT_EQ(data_rows(rows.out).size(), 1u);
    EXPECT_FALSE(split(data_rows(rows.out)[0]).back().empty());
}

TEST_F(Cli, SweepAgainstOracleColumns) {
    Outcome r = run("sweep --config " +
                config("s.json", R"({"alpha": 1, "function": "quadratic", "a": [1, 1], "levels": [1],
                  "points": [[0.1, 0.2]], "sweep_h_min": 0.01, "sweep_h_max": 0.5, "sweep_steps": 8})"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    auto rows = data_rows(r.out);
    ASSERT_EQ(rows.size(), 8u);
    std::vector<double> lh;
    std::vector<double> lv;
    for (const auto& row : rows) {
        double v = column(r.out, row, "Vstar");
        EXPECT_NEAR(v, column(r.out, row, "Vstar_oracle"), 1e-6 * v);
        lh.push_back(std::log(column(r.out, row, "h")));
        lv.push_back(std::log(v));
    }
    double slope = (lv.back() - lv.front()) / (lh.back() - lh.front());
    EXPECT_NEAR(slope, 2.0, 0.01);

    Outcome hyp = run("sweep --config " +
                  config("h.json", R"({"alpha": 2, "function": "quadratic", "a": [1, 1], "levels": [1],
                    "points": [[0.3, 0.1]], "sweep_h_min": 0.1, "sweep_h_max": 2, "sweep_steps": 6,
                    "sweep_spacing": "linear"})"));
    ASSERT_EQ(hyp.exit_code, 0) << hyp.err;
    auto hrows = data_rows(hyp.out);
    ASSERT_EQ(hrows.size(), 6u);
    // Increasing and convex on an even grid.
    for (std::size_t i = 1; i + 1 < hrows.size(); ++i) {
        double a = column(hyp.out, hrows[i - 1], "Vstar");
        double b = column(hyp.out, hrows[i], "Vstar");
        double c = column(hyp.out, hrows[i + 1], "Vstar");
        EXPECT_LT(a, b);
        EXPECT_GT(a + c - 2.0 * b, 0.0);
    }
}

TEST_F(Cli, VerifyRunsNamedSuites) {
    Outcome r = run("verify --config " + config("v.json", R"({"alpha": 1, "function": "quadratic", "a": [1, 1],
      "suites": ["refutation", "derivative"]})"));
    ASSERT_EQ(r.exit_code, 0) << r.err;
    EXPECT_NE(r.out.find("PASS 5 refutation"), std::string::npos);
    EXPECT_NE(r.out.find("PASS 7 derivative"), std::string::npos);
    Outcome bad = run("verify --config " + config("w.json", R"({"alpha": 1, "function": "quadratic", "a": [1, 1],
      "suites": ["no_such_suite"]})"));
    EXPECT_EQ(bad.exit_code, 1);
}
