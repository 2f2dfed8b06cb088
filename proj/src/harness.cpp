#include "discotex/harness.hpp"

#include "discotex/errors.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace discotex::harness {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("{}: expected a number, got '{}'", key, text));
    }
}

long long parse_int(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ValidationError(fmt::format("{}: expected an integer, got '{}'", key, text));
    }
}

template <class T, class F>
std::vector<T> parse_list(const std::string& key, const std::string& text, F parse) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) out.push_back(static_cast<T>(parse(key, item)));
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Runs body(i) for i in [0, count) on up to `threads` workers.
template <class F>
void parallel_for(int count, int threads, F body) {
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(i)] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt::format("{}", v[i]);
    return s;
}

}  // namespace

Entries read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(fmt::format("cannot read config file '{}'", path));
    Entries entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError(fmt::format("{}:{}: expected 'key = value'", path, lineno));
        }
        entries[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return entries;
}

RunConfig resolve_config(const Entries& file, const Entries& flags) {
    Entries merged = file;
    for (const auto& [k, v] : flags) merged[k] = v;

    RunConfig cfg;
    for (const auto& [key, value] : merged) {
        if (key == "order") {
            cfg.orders = parse_list<int>(key, value, parse_int);
        } else if (key == "steps") {
            cfg.steps = parse_list<int>(key, value, parse_int);
        } else if (key == "nodes") {
            cfg.nodes = static_cast<int>(parse_int(key, value));
        } else if (key == "jumps") {
            cfg.jumps = static_cast<int>(parse_int(key, value));
        } else if (key == "dt") {
            cfg.dt = parse_double(key, value);
        } else if (key == "tau-start") {
            cfg.tau_start = parse_double(key, value);
        } else if (key == "tau-end") {
            cfg.tau_end = parse_double(key, value);
        } else if (key == "velocity") {
            cfg.velocity = parse_double(key, value);
        } else if (key == "out") {
            cfg.out = value;
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_int(key, value));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
        } else if (key == "factor") {
            cfg.factor = value;
        } else if (key == "values") {
            cfg.values = parse_list<double>(key, value, parse_double);
        } else if (key == "snapshot-tau") {
            cfg.snapshot_tau = parse_double(key, value);
        } else if (key == "repeats") {
            cfg.repeats = static_cast<int>(parse_int(key, value));
        } else {
            throw ValidationError(fmt::format("unknown config key '{}'", key));
        }
    }
    return cfg;
}

std::vector<std::string> check(const RunConfig& cfg, const std::string& command) {
    std::vector<std::string> errs;
    if (cfg.orders.empty()) errs.push_back("order list is empty");
    for (int o : cfg.orders) {
        if (o < 2 || o > 12 || o % 2 != 0) errs.push_back(fmt::format("order {} is not even in [2, 12]", o));
    }
    if (cfg.threads < 1) errs.push_back(fmt::format("threads must be >= 1 (got {})", cfg.threads));
    if (command == "quad") {
        if (cfg.steps.empty()) errs.push_back("steps list is empty");
        for (int s : cfg.steps) {
            if (s < 1) errs.push_back(fmt::format("step count {} must be positive", s));
        }
        return errs;
    }
    if (command == "sweep") {
        if (cfg.factor != "nodes" && cfg.factor != "jumps" && cfg.factor != "dt") {
            errs.push_back(fmt::format("factor must be nodes, jumps or dt (got '{}')", cfg.factor));
        }
        if (cfg.values.empty()) errs.push_back("values list is empty");
    }
    if (command == "bench" && cfg.repeats < 1) errs.push_back("repeats must be >= 1");
    std::vector<int> usable;
    for (int o : cfg.orders) {
        if (o >= 2 && o <= 12 && o % 2 == 0) usable.push_back(o);
    }
    /// still check the remaining fields when no order is usable
    if (usable.empty()) usable.push_back(2);
    for (int o : usable) {
        StepperConfig sc = stepper_config(cfg, o);
        if (command == "sweep") {
            for (double v : cfg.values) {
                StepperConfig cell = sc;
                if (cfg.factor == "nodes") cell.n = static_cast<int>(v);
                if (cfg.factor == "jumps") cell.m_jumps = static_cast<int>(v);
                if (cfg.factor == "dt") cell.dt = v;
                for (auto& e : validate(cell)) errs.push_back(fmt::format("{} = {}: {}", cfg.factor, v, e));
            }
        } else {
            for (auto& e : validate(sc)) errs.push_back(e);
        }
    }
    std::sort(errs.begin(), errs.end());
    errs.erase(std::unique(errs.begin(), errs.end()), errs.end());
    return errs;
}

StepperConfig stepper_config(const RunConfig& cfg, int order) {
    StepperConfig sc;
    sc.order = order;
    sc.n = cfg.nodes;
    sc.m_jumps = cfg.jumps;
    sc.dt = cfg.dt;
    sc.tau_start = cfg.tau_start;
    sc.tau_end = cfg.tau_end;
    sc.velocity = cfg.velocity;
    sc.snapshot_tau = cfg.snapshot_tau;
    return sc;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit_slope: need at least two points");
    double mx = 0.0, my = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

QuadTable run_quad(const RunConfig& cfg) {
    QuadTable table;
    for (int order : cfg.orders) {
        (void)jump_quadrature(order);
        std::vector<double> hs, errs;
        for (bool smooth : {false, true}) {
            for (int steps : cfg.steps) {
                const auto t0 = std::chrono::steady_clock::now();
                const QuadResult r = legendre_benchmark(order, steps, !smooth);
                const double wall = seconds_since(t0);
                /// error column from the Extended run so slopes survive below double round-off
                const double err = static_cast<double>(legendre_benchmark_extended(order, steps, !smooth).error);
                QuadRow row{order, steps, 1.0 / steps, r.value, err, wall, smooth};
                if (!smooth && err > 1e-40) {
                    hs.push_back(row.dt);
                    errs.push_back(err);
                }
                table.rows.push_back(row);
            }
        }
        if (hs.size() >= 2) table.slopes[order] = fit_slope(hs, errs);
    }
    return table;
}

SweepTable run_sweep(const RunConfig& cfg) {
    struct Cell {
        int order;
        double value;
    };
    std::vector<Cell> cells;
    for (int o : cfg.orders) {
        for (double v : cfg.values) cells.push_back({o, v});
    }
    std::vector<SweepRow> rows(cells.size());
    parallel_for(static_cast<int>(cells.size()), cfg.threads, [&](int i) {
        const Cell& c = cells[static_cast<std::size_t>(i)];
        StepperConfig sc = stepper_config(cfg, c.order);
        sc.snapshot_tau.reset();
        if (cfg.factor == "nodes") sc.n = static_cast<int>(c.value);
        if (cfg.factor == "jumps") sc.m_jumps = static_cast<int>(c.value);
        if (cfg.factor == "dt") sc.dt = c.value;
        const RunArtifacts run = evolve(sc);
        rows[static_cast<std::size_t>(i)] = {c.value, c.order, run.steps, run.dt_effective, run.eta_final(),
                                             run.wall_seconds};
    });
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        return a.order != b.order ? a.order < b.order : a.value < b.value;
    });
    SweepTable table{cfg.factor, rows, {}};
    if (cfg.factor == "dt") {
        for (int o : cfg.orders) {
            std::vector<double> x, y;
            for (const auto& r : rows) {
                if (r.order == o) {
                    x.push_back(r.dt_effective);
                    y.push_back(r.eta_final);
                }
            }
            if (x.size() >= 2) table.slopes[o] = fit_slope(x, y);
        }
    }
    return table;
}

std::vector<BenchRow> run_bench(const RunConfig& cfg) {
    std::vector<BenchRow> rows;
    for (int o : cfg.orders) {
        BenchRow row{o, 0, 0.0, INFINITY};
        for (int r = 0; r < cfg.repeats; ++r) {
            StepperConfig sc = stepper_config(cfg, o);
            sc.snapshot_tau.reset();
            const RunArtifacts run = evolve(sc);
            row.steps = run.steps;
            row.eta_final = run.eta_final();
            row.wall_seconds = std::min(row.wall_seconds, run.wall_seconds);
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<Check> run_selftest(const SelftestOptions& options) {
    std::vector<Check> checks;
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int order : {2, 4, 6, 8}) {
        JumpQuadrature printed = transcribed_jump_quadrature(order);
        if (order == 6 && options.corrupt_h6) printed.coeffs[2].add_term(0, 3, Rational(1, 1000));
        const JumpQuadrature& oracle = jump_quadrature(order);
        int mismatched = 0;
        for (int d = 0; d < order; ++d) {
            if (!(printed.coeffs[static_cast<std::size_t>(d)] == oracle.coeffs[static_cast<std::size_t>(d)])) {
                ++mismatched;
            }
        }
        checks.push_back({fmt::format("jump table H{} equals oracle", order), mismatched == 0,
                          fmt::format("{} mismatched coefficients", mismatched)});
    }

    /// Piecewise polynomials of degree 2k-1 with a random break inside one step.
    for (int order : {10, 12}) {
        const int deg = order - 1;
        std::vector<double> left(static_cast<std::size_t>(deg + 1)), right(left.size());
        for (auto& c : left) c = 2.0 * unit(rng) - 1.0;
        for (auto& c : right) c = 2.0 * unit(rng) - 1.0;
        const double brk = 0.1 + 0.8 * unit(rng);
        auto stack = [&](const std::vector<double>& p, double t, int count) {
            std::vector<cplx> out;
            for (int d = 0; d < count; ++d) {
                double acc = 0.0;
                for (int k = deg; k >= d; --k) acc = acc * t + p[static_cast<std::size_t>(k)] * factorial(k) / factorial(k - d);
                out.emplace_back(acc);
            }
            return out;
        };
        auto antider = [&](const std::vector<double>& p, double t) {
            double acc = 0.0;
            for (int k = deg; k >= 0; --k) acc = acc * t + p[static_cast<std::size_t>(k)] / (k + 1);
            return acc * t;
        };
        const double exact = antider(left, brk) - antider(left, 0.0) + antider(right, 1.0) - antider(right, brk);
        const StackProvider f = [&](double t, int count) { return stack(t < brk ? left : right, t, count); };
        const StackProvider jumps = [&](double t, int count) {
            auto a = stack(right, t, count);
            const auto b = stack(left, t, count);
            for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
            return a;
        };
        const double br[1] = {brk};
        const double got = integrate_discontinuous(f, jumps, 0.0, 1.0, br, 1, order).real();
        const double err = std::abs(got - exact);
        checks.push_back({fmt::format("jump table H{} exact on piecewise degree {}", order, deg), err <= 1e-13,
                          fmt::format("error {:.3e}", err)});
    }

    for (int order = 2; order <= 12; order += 2) {
        double worst = 0.0, unit_dev = 0.0;
        for (int k = 0; k < 16; ++k) {
            const cplx z{-2.0 * unit(rng), 4.0 * unit(rng) - 2.0};
            worst = std::max(worst, std::abs(scalar_step_map(order, z) - pade_exp(order / 2, z)) /
                                        std::abs(pade_exp(order / 2, z)));
            const cplx iy{0.0, 20.0 * unit(rng) - 10.0};
            unit_dev = std::max(unit_dev, std::abs(std::abs(scalar_step_map(order, iy)) - 1.0));
        }
        checks.push_back({fmt::format("H{} step map is the diagonal Pade approximant", order), worst <= 1e-13,
                          fmt::format("max rel deviation {:.3e}", worst)});
        checks.push_back({fmt::format("H{} step map unimodular on imaginary axis", order), unit_dev <= 1e-13,
                          fmt::format("max deviation {:.3e}", unit_dev)});
    }

    {
        double worst = 0.0;
        for (int k = 0; k < 32; ++k) {
            const double s = 0.02 + 0.96 * unit(rng);
            const double g = coefficients::gamma(0, s);
            worst = std::max({worst, std::abs(coefficients::epsilon(0, s) / g - coefficients::epsilon_t(0, s)),
                              std::abs(coefficients::rho(0, s) / g - coefficients::rho_t(0, s)),
                              std::abs(coefficients::chi(0, s) / g - coefficients::chi_t(0, s)),
                              std::abs(coefficients::iota(0, s) / g - coefficients::iota_t(0, s))});
        }
        checks.push_back({"tilde coefficients equal ratios to Gamma", worst <= 1e-12,
                          fmt::format("max deviation {:.3e}", worst)});
    }

    {
        const Trajectory traj(0.25);
        const auto& table = printed_time_jump_table();
        int field_bad = 0;
        for (int d = 0; d < 12; ++d) {
            if (!(table.field[static_cast<std::size_t>(d)] == time_jump_rational(d + 1, Rational(1, 4)))) ++field_bad;
        }
        checks.push_back({"printed field time jumps equal exact jumps", field_bad == 0,
                          fmt::format("{} of 12 differ", field_bad)});

        double worst = 0.0;
        for (int k = 0; k < 4; ++k) {
            const double tau = -1.4 + 5.6 * unit(rng);
            const JumpData data = assemble_jump_data(traj, tau, 19, 4);
            const double t = data.tau_c.value().real();
            const cplx bb0 = data.psi.entries[0].derivative(1) - data.xi.derivative(1) * data.psi.entries[1].value();
            worst = std::max({worst, std::abs(bb0 - time_jump(1, 0.25).evaluate(t)),
                              std::abs(pi_row_jump(data, 0) - time_jump(2, 0.25).evaluate(t))});
        }
        checks.push_back({"recurrence reproduces the first time jumps", worst <= 1e-12,
                          fmt::format("max deviation {:.3e}", worst)});
    }

    {
        /// P - Q must equal A TEX(A) with the coefficients built from the weights.
        const HermiteRule rule = hermite_rule(10);
        const auto tex = tex_coefficients(10);
        const bool ok = tex.size() == 3 && tex[0] == 1 && tex[1] == Rational(1, 36) && tex[2] == Rational(1, 15120) &&
                        rule.weights[4] == Rational(1, 30240);
        checks.push_back({"TEX H10 coefficients 1, 1/36, 1/15120", ok, ok ? "exact" : "mismatch"});
    }
    return checks;
}

std::string config_header(const RunConfig& cfg, const std::string& command) {
    std::string h = fmt::format("# discotex {}\n", command);
    h += fmt::format("# order = {}\n# steps = {}\n# nodes = {}\n# jumps = {}\n", join_ints(cfg.orders),
                     join_ints(cfg.steps), cfg.nodes, cfg.jumps);
    h += fmt::format("# dt = {}\n# tau-start = {}\n# tau-end = {}\n# velocity = {}\n", cfg.dt, cfg.tau_start,
                     cfg.tau_end, cfg.velocity);
    h += fmt::format("# threads = {}\n# seed = {}\n# factor = {}\n# values = {}\n# repeats = {}\n", cfg.threads,
                     cfg.seed, cfg.factor, join_doubles(cfg.values), cfg.repeats);
    if (cfg.snapshot_tau) h += fmt::format("# snapshot-tau = {}\n", *cfg.snapshot_tau);
    return h;
}

std::string format_quad(const RunConfig& cfg, const QuadTable& table) {
    std::string s = config_header(cfg, "quad");
    s += "# variant order steps dt value abs_error wall_seconds\n";
    for (const auto& r : table.rows) {
        s += fmt::format("{:<6} {:>3} {:>6} {:.6e} {:.17e} {:.6e} {:.6e}\n", r.smooth ? "smooth" : "disco", r.order,
                         r.steps, r.dt, r.value, r.abs_error, r.wall_seconds);
    }
    for (const auto& [o, slope] : table.slopes) s += fmt::format("# slope order {} = {:.3f}\n", o, slope);
    return s;
}

std::string format_sweep(const RunConfig& cfg, const SweepTable& table) {
    std::string s = config_header(cfg, "sweep");
    s += fmt::format("# {} order steps dt_effective eta_final wall_seconds\n", table.factor);
    for (const auto& r : table.rows) {
        s += fmt::format("{:<12g} {:>3} {:>6} {:.8e} {:.6e} {:.6e}\n", r.value, r.order, r.steps, r.dt_effective,
                         r.eta_final, r.wall_seconds);
    }
    for (const auto& [o, slope] : table.slopes) s += fmt::format("# slope order {} = {:.3f}\n", o, slope);
    return s;
}

std::string format_bench(const RunConfig& cfg, const std::vector<BenchRow>& rows) {
    std::string s = config_header(cfg, "bench");
    s += "# order steps eta_final wall_seconds_min\n";
    for (const auto& r : rows) s += fmt::format("{:>3} {:>6} {:.6e} {:.6e}\n", r.order, r.steps, r.eta_final, r.wall_seconds);
    return s;
}

std::string format_selftest(const std::vector<Check>& checks) {
    std::string s = "# discotex selftest\n# verdict check detail\n";
    for (const auto& c : checks) s += fmt::format("{} {}: {}\n", c.pass ? "PASS" : "FAIL", c.name, c.detail);
    return s;
}

std::map<std::string, std::string> format_evolve(const RunConfig& cfg, const RunArtifacts& run, int order) {
    RunConfig used = cfg;
    used.orders = {order};
    const std::string head = config_header(used, "evolve");
    std::map<std::string, std::string> files;

    std::string wave = head + "# tau re_psi im_psi re_pi im_pi\n";
    std::string phase = head + "# re_psi re_pi\n";
    std::string eta = head + "# tau eta\n";
    for (std::size_t k = 0; k < run.tau.size(); ++k) {
        wave += fmt::format("{:.10f} {:.17e} {:.17e} {:.17e} {:.17e}\n", run.tau[k], run.psi_f[k].real(),
                            run.psi_f[k].imag(), run.pi_f[k].real(), run.pi_f[k].imag());
        phase += fmt::format("{:.17e} {:.17e}\n", run.psi_f[k].real(), run.pi_f[k].real());
        eta += fmt::format("{:.10f} {:.6e}\n", run.tau[k], run.eta[k]);
    }
    files["waveform.dat"] = wave;
    files["phase.dat"] = phase;
    files["eta.dat"] = eta;

    if (run.snapshot) {
        const CollocationGrid grid = build_grid(cfg.nodes);
        const int n = grid.size();
        std::string snap = head + fmt::format("# snapshot at tau = {:.10f}\n", run.snapshot->tau);
        snap += "# sigma re_psi im_psi re_pi im_pi\n";
        for (int i = 0; i < n; ++i) {
            const cplx p = run.snapshot->u(i);
            const cplx q = run.snapshot->u(n + i);
            snap += fmt::format("{:.17e} {:.17e} {:.17e} {:.17e} {:.17e}\n", grid.nodes[static_cast<std::size_t>(i)],
                                p.real(), p.imag(), q.real(), q.imag());
        }
        files["snapshot.dat"] = snap;
    }
    return files;
}

void write_text(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create directory for '{}': {}", path, ec.message()));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
    out << text;
    out.flush();
    if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

}  // namespace discotex::harness
