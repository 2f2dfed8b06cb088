#pragma once

#include "discotex/discotex_stepper.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace discotex::harness {

/// Raw key/value entries from a config file or from explicitly set flags.
using Entries = std::map<std::string, std::string>;

struct RunConfig {
    std::vector<int> orders{6};
    std::vector<int> steps{2, 4, 8, 16, 32, 64};
    int nodes = 45;
    int jumps = 19;
    double dt = 0.00666667;
    double tau_start = -1.52;
    double tau_end = 4.50;
    double velocity = 0.25;
    std::string out;
    int threads = 1;
    std::uint64_t seed = 20240607;
    /// sweep axis: nodes, jumps or dt
    std::string factor = "dt";
    std::vector<double> values;
    std::optional<double> snapshot_tau;
    int repeats = 3;
};

/// Parses `key = value` lines; `#` starts a comment. Throws IoError when unreadable.
[[nodiscard]] Entries read_config_file(const std::string& path);

/// Defaults, then `file`, then `flags`. Unknown keys and malformed values throw ValidationError.
[[nodiscard]] RunConfig resolve_config(const Entries& file, const Entries& flags);

/// Every violated constraint for the given command.
[[nodiscard]] std::vector<std::string> check(const RunConfig& cfg, const std::string& command);

/// Stepper settings for one order.
[[nodiscard]] StepperConfig stepper_config(const RunConfig& cfg, int order);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

struct QuadRow {
    int order = 0;
    int steps = 0;
    double dt = 0.0;
    double value = 0.0;
    double abs_error = 0.0;
    double wall_seconds = 0.0;
    bool smooth = false;
};

struct QuadTable {
    std::vector<QuadRow> rows;
    std::map<int, double> slopes;
};

[[nodiscard]] QuadTable run_quad(const RunConfig& cfg);

struct SweepRow {
    double value = 0.0;
    int order = 0;
    int steps = 0;
    double dt_effective = 0.0;
    double eta_final = 0.0;
    double wall_seconds = 0.0;
};

struct SweepTable {
    std::string factor;
    std::vector<SweepRow> rows;
    /// dt sweeps only
    std::map<int, double> slopes;
};

/// Cells run on up to cfg.threads workers; rows come back sorted by (order, value).
[[nodiscard]] SweepTable run_sweep(const RunConfig& cfg);

struct BenchRow {
    int order = 0;
    int steps = 0;
    double eta_final = 0.0;
    double wall_seconds = 0.0;
};

/// Sequential runs per order; wall time is the minimum over cfg.repeats.
[[nodiscard]] std::vector<BenchRow> run_bench(const RunConfig& cfg);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SelftestOptions {
    std::uint64_t seed = 20240607;
    /// Debug hook: perturbs one coefficient of the order-6 jump table before comparison.
    bool corrupt_h6 = false;
};

[[nodiscard]] std::vector<Check> run_selftest(const SelftestOptions& options);

/// `#`-prefixed header lines encoding the full config.
[[nodiscard]] std::string config_header(const RunConfig& cfg, const std::string& command);

[[nodiscard]] std::string format_quad(const RunConfig& cfg, const QuadTable& table);
[[nodiscard]] std::string format_sweep(const RunConfig& cfg, const SweepTable& table);
[[nodiscard]] std::string format_bench(const RunConfig& cfg, const std::vector<BenchRow>& rows);
[[nodiscard]] std::string format_selftest(const std::vector<Check>& checks);

/// Evolution artifacts as file name -> contents: snapshot, waveform, phase portrait, eta series.
[[nodiscard]] std::map<std::string, std::string> format_evolve(const RunConfig& cfg, const RunArtifacts& run,
                                                               int order);

/// Writes text to path, creating parent directories. Throws IoError naming the path.
void write_text(const std::string& path, const std::string& text);

}  // namespace discotex::harness
