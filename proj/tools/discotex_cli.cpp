#include "discotex/errors.hpp"
#include "discotex/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace h = discotex::harness;

const std::vector<std::string> kFlagKeys{"order",    "steps",   "nodes",   "jumps",  "dt",
                                         "tau-start", "tau-end", "velocity", "out",   "threads",
                                         "seed",     "factor",  "values",  "snapshot-tau", "repeats"};

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        h::write_text(path, text);
    }
}

h::RunConfig load(const CLI::App& sub, const std::map<std::string, std::string>& raw, const std::string& command) {
    h::Entries file;
    if (const auto* opt = sub.get_option_no_throw("--config"); opt && opt->count() > 0) {
        file = h::read_config_file(opt->as<std::string>());
        file.erase("config");
    }
    h::Entries flags;
    for (const auto& key : kFlagKeys) {
        const auto* opt = sub.get_option_no_throw("--" + key);
        if (opt && opt->count() > 0) flags[key] = raw.at(key);
    }
    h::RunConfig cfg = h::resolve_config(file, flags);
    const auto errs = h::check(cfg, command);
    if (!errs.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw discotex::ValidationError(msg);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discotex: discontinuous time-symmetric integration of a point-source wave equation"};
    app.require_subcommand(1);

    std::map<std::string, std::string> raw;
    std::string config_path;
    bool corrupt_h6 = false;

    auto add_common = [&](CLI::App* sub) {
        for (const auto& key : kFlagKeys) sub->add_option("--" + key, raw[key]);
        sub->add_option("--config", config_path, "key = value file; flags override it");
    };

    auto* quad = app.add_subcommand("quad", "Legendre jump-quadrature benchmark");
    auto* evolve = app.add_subcommand("evolve", "Full evolution with snapshot, waveform, phase and eta files");
    auto* sweep = app.add_subcommand("sweep", "Control-factor sweep over nodes, jumps or dt");
    auto* bench = app.add_subcommand("bench", "Wall-clock table per order");
    auto* selftest = app.add_subcommand("selftest", "Oracle-equivalence checks");
    for (auto* sub : {quad, evolve, sweep, bench, selftest}) add_common(sub);
    selftest->add_flag("--corrupt-h6", corrupt_h6, "debug hook: perturb one order-6 jump coefficient")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (quad->parsed()) {
            const auto cfg = load(*quad, raw, "quad");
            emit(cfg.out, h::format_quad(cfg, h::run_quad(cfg)));
        } else if (evolve->parsed()) {
            const auto cfg = load(*evolve, raw, "evolve");
            const std::string dir = cfg.out.empty() ? "discotex_evolve" : cfg.out;
            for (int order : cfg.orders) {
                const auto run = discotex::evolve(h::stepper_config(cfg, order));
                const std::string sub = cfg.orders.size() > 1 ? fmt::format("{}/H{}", dir, order) : dir;
                for (const auto& [name, text] : h::format_evolve(cfg, run, order)) h::write_text(sub + "/" + name, text);
                fmt::print("H{} steps {} eta_final {:.6e} wall_seconds {:.3f} -> {}\n", order, run.steps,
                           run.eta_final(), run.wall_seconds, sub);
            }
        } else if (sweep->parsed()) {
            const auto cfg = load(*sweep, raw, "sweep");
            emit(cfg.out, h::format_sweep(cfg, h::run_sweep(cfg)));
        } else if (bench->parsed()) {
            auto cfg = load(*bench, raw, "bench");
            emit(cfg.out, h::format_bench(cfg, h::run_bench(cfg)));
        } else if (selftest->parsed()) {
            const auto cfg = load(*selftest, raw, "selftest");
            const auto checks = h::run_selftest({cfg.seed, corrupt_h6});
            emit(cfg.out, h::format_selftest(checks));
            for (const auto& c : checks) {
                if (!c.pass) return 2;
            }
        }
    } catch (const discotex::ValidationError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    } catch (const discotex::NumericalError& e) {
        fmt::print(stderr, "numerical failure: {}\n", e.what());
        return 2;
    } catch (const discotex::IoError& e) {
        fmt::print(stderr, "i/o error: {}\n", e.what());
        return 3;
    }
    return 0;
}
