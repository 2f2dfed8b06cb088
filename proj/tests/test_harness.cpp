#include "discotex/errors.hpp"
#include "discotex/harness.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace discotex;
using namespace discotex::harness;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("discotex_test_" + name)).string();
}

RunConfig short_sweep() {
    RunConfig cfg;
    cfg.orders = {2, 4};
    cfg.factor = "dt";
    cfg.values = {0.08, 0.04};
    cfg.jumps = 12;
    cfg.tau_end = -0.5;
    return cfg;
}

}  // namespace

TEST(Config, FileParsingWithComments) {
    const auto path = temp_path("cfg.txt");
    {
        std::ofstream out(path);
        out << "# comment\n\norder = 4, 6\n dt=0.01  # trailing\nnodes = 30\n";
    }
    const Entries e = read_config_file(path);
    EXPECT_EQ(e.at("order"), "4, 6");
    EXPECT_EQ(e.at("dt"), "0.01");
    EXPECT_EQ(e.size(), 3u);
    {
        std::ofstream out(path);
        out << "order 4\n";
    }
    EXPECT_THROW((void)read_config_file(path), ValidationError);
    EXPECT_THROW((void)read_config_file(temp_path("missing/none.txt")), IoError);
}

TEST(Config, FlagsOverrideFileOverrideDefaults) {
    const RunConfig defaults = resolve_config({}, {});
    EXPECT_EQ(defaults.nodes, 45);
    EXPECT_EQ(defaults.jumps, 19);
    EXPECT_DOUBLE_EQ(defaults.dt, 0.00666667);
    const RunConfig cfg = resolve_config({{"nodes", "30"}, {"dt", "0.01"}}, {{"dt", "0.02"}, {"order", "2,4"}});
    EXPECT_EQ(cfg.nodes, 30);
    EXPECT_DOUBLE_EQ(cfg.dt, 0.02);
    EXPECT_EQ(cfg.orders, (std::vector<int>{2, 4}));
}

TEST(Config, RejectsUnknownAndMalformed) {
    EXPECT_THROW((void)resolve_config({{"colour", "red"}}, {}), ValidationError);
    EXPECT_THROW((void)resolve_config({}, {{"nodes", "4x"}}), ValidationError);
    EXPECT_THROW((void)resolve_config({}, {{"dt", "fast"}}), ValidationError);
}

TEST(Config, CheckReportsEveryViolation) {
    RunConfig cfg;
    cfg.orders = {3, 14};
    cfg.threads = 0;
    EXPECT_EQ(check(cfg, "evolve").size(), 3u);
    RunConfig sweep;
    sweep.factor = "colour";
    sweep.values = {};
    EXPECT_EQ(check(sweep, "sweep").size(), 2u);
    EXPECT_TRUE(check(RunConfig{}, "evolve").empty());
    RunConfig quad;
    quad.steps = {};
    EXPECT_FALSE(check(quad, "quad").empty());
}

TEST(Slope, PowerLawRecovered) {
    EXPECT_NEAR(fit_slope({0.1, 0.05, 0.025}, {3e-4, 3e-4 / 64, 3e-4 / 4096}), 6.0, 1e-12);
    EXPECT_THROW((void)fit_slope({1.0}, {1.0}), ValidationError);
}

TEST(Quad, TableRowsAndSlope) {
    RunConfig cfg;
    cfg.orders = {4};
    cfg.steps = {8, 16, 32, 64};
    const QuadTable t = run_quad(cfg);
    EXPECT_EQ(t.rows.size(), 8u);
    EXPECT_NEAR(t.slopes.at(4), 4.0, 0.5);
    for (const auto& r : t.rows) {
        if (r.smooth) {
            EXPECT_GT(r.abs_error, 1e-4);
        }
    }
    const std::string text = format_quad(cfg, t);
    EXPECT_EQ(text.rfind("# discotex quad", 0), 0u);
    EXPECT_NE(text.find("# slope order 4"), std::string::npos);
}

TEST(Sweep, DeterministicAcrossThreadCounts) {
    RunConfig a = short_sweep();
    RunConfig b = short_sweep();
    b.threads = 3;
    const SweepTable ta = run_sweep(a);
    const SweepTable tb = run_sweep(b);
    ASSERT_EQ(ta.rows.size(), 4u);
    for (std::size_t i = 0; i < ta.rows.size(); ++i) {
        EXPECT_EQ(ta.rows[i].order, tb.rows[i].order);
        EXPECT_EQ(ta.rows[i].value, tb.rows[i].value);
        EXPECT_EQ(ta.rows[i].eta_final, tb.rows[i].eta_final);
    }
    EXPECT_EQ(ta.rows[0].order, 2);
    EXPECT_LT(ta.rows[0].value, ta.rows[1].value);
    EXPECT_EQ(ta.slopes.size(), 2u);
}

TEST(Sweep, WorkerErrorsPropagate) {
    RunConfig cfg = short_sweep();
    cfg.threads = 2;
    cfg.factor = "jumps";
    cfg.values = {1};
    EXPECT_THROW((void)run_sweep(cfg), ValidationError);
}

TEST(Selftest, PassesAndDetectsInjectedFault) {
    const auto checks = run_selftest({});
    for (const auto& c : checks) EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
    const auto faulty = run_selftest({20240607, true});
    int failed = 0;
    for (const auto& c : faulty) {
        if (!c.pass) {
            ++failed;
            EXPECT_NE(c.name.find("H6"), std::string::npos);
        }
    }
    EXPECT_EQ(failed, 1);
}

TEST(Selftest, SameSeedSameReport) {
    EXPECT_EQ(format_selftest(run_selftest({7, false})), format_selftest(run_selftest({7, false})));
}

TEST(Output, EvolveFilesCarryHeaders) {
    RunConfig cfg;
    cfg.orders = {4};
    cfg.jumps = 12;
    cfg.dt = 0.05;
    cfg.tau_end = -1.0;
    cfg.snapshot_tau = -1.2;
    const RunArtifacts run = evolve(stepper_config(cfg, 4));
    const auto files = format_evolve(cfg, run, 4);
    ASSERT_EQ(files.size(), 4u);
    EXPECT_NE(files.at("snapshot.dat").find("# sigma re_psi im_psi re_pi im_pi"), std::string::npos);
    for (const auto& [name, text] : files) {
        EXPECT_EQ(text.rfind("# discotex evolve\n# order = 4\n", 0), 0u) << name;
    }
}

TEST(Output, WriteFailureNamesPath) {
    try {
        write_text("/proc/discotex/none.dat", "x");
        FAIL() << "expected IoError";
    } catch (const IoError& e) {
        EXPECT_NE(std::string(e.what()).find("/proc/discotex/none.dat"), std::string::npos);
    }
    const auto ok = temp_path("out/a.dat");
    write_text(ok, "hello\n");
    std::ifstream in(ok);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "hello");
}
