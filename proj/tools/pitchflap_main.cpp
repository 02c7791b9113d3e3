// Command-line front end: stability boundaries, CTCR crossings and delay
// intervals, complex-plane root hunts, DDE simulation, and gain/delay
// optimization, with CSV/JSON emission and provenance sidecars.

#include "pitchflap/csv.hpp"
#include "pitchflap/pitchflap.hpp"
#include "pitchflap/serialize.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pitchflap;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct RunConfig {
    RotorParams params;
    ControlGains gains{6.75e-4, 0.6e-4};
    double tau = 0.2296;
    std::string format = "csv";
    std::string out_dir = ".";

    double tau_max = 2.0 * std::numbers::pi;
    double sigma_min = 0.0, sigma_max = 0.08;
    double omega_min = 1.05, omega_max = 2.14;
    int n_points = 41;
    Region region{-2.0, 1.5, 0.0, 5.0};
    double grid_step = 0.01;
    bool dump_curves = false;
    std::vector<double> x0{0.0, 0.01, 0.0, 0.0};
    double psi_end = 25.0;
    double step = 1e-3;
    std::string history = "x0";
    double a_min = 5e-4, a_max = 9e-4;
    double b_min = 0.0, b_max = 2e-4;
    int n_a = 41, n_b = 41;
    std::optional<double> interval_lo, interval_hi;
    int budget = 400;
};

const std::vector<std::string> kKnownKeys = {
    "r_g", "c_h", "gamma", "lambda1", "sigma", "nu1_sq", "act_gain",
    "a", "b", "tau", "format", "out", "tau_max",
    "sigma_min", "sigma_max", "omega_min", "omega_max", "n_points",
    "re_min", "re_max", "im_min", "im_max", "grid_step", "dump_curves",
    "x0", "psi_end", "step", "history",
    "a_min", "a_max", "b_min", "b_max", "n_a", "n_b",
    "interval_lo", "interval_hi", "budget"};

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    in >> j;
    if (!j.is_object()) throw std::runtime_error("config root must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
            throw std::runtime_error("unknown config key: " + key);
        if (key == "r_g") cfg.params.r_g = value;
        else if (key == "c_h") cfg.params.c_h = value;
        else if (key == "gamma") cfg.params.gamma = value;
        else if (key == "lambda1") cfg.params.lambda1 = value;
        else if (key == "sigma") cfg.params.sigma = value;
        else if (key == "nu1_sq") cfg.params.nu1_sq = value;
        else if (key == "act_gain") cfg.params.act_gain = value;
        else if (key == "a") cfg.gains.a = value;
        else if (key == "b") cfg.gains.b = value;
        else if (key == "tau") cfg.tau = value;
        else if (key == "format") cfg.format = value;
        else if (key == "out") cfg.out_dir = value;
        else if (key == "tau_max") cfg.tau_max = value;
        else if (key == "sigma_min") cfg.sigma_min = value;
        else if (key == "sigma_max") cfg.sigma_max = value;
        else if (key == "omega_min") cfg.omega_min = value;
        else if (key == "omega_max") cfg.omega_max = value;
        else if (key == "n_points") cfg.n_points = value;
        else if (key == "re_min") cfg.region.re_min = value;
        else if (key == "re_max") cfg.region.re_max = value;
        else if (key == "im_min") cfg.region.im_min = value;
        else if (key == "im_max") cfg.region.im_max = value;
        else if (key == "grid_step") cfg.grid_step = value;
        else if (key == "dump_curves") cfg.dump_curves = value;
        else if (key == "x0") cfg.x0 = value.get<std::vector<double>>();
        else if (key == "psi_end") cfg.psi_end = value;
        else if (key == "step") cfg.step = value;
        else if (key == "history") cfg.history = value;
        else if (key == "a_min") cfg.a_min = value;
        else if (key == "a_max") cfg.a_max = value;
        else if (key == "b_min") cfg.b_min = value;
        else if (key == "b_max") cfg.b_max = value;
        else if (key == "n_a") cfg.n_a = value;
        else if (key == "n_b") cfg.n_b = value;
        else if (key == "interval_lo") cfg.interval_lo = double(value);
        else if (key == "interval_hi") cfg.interval_hi = double(value);
        else if (key == "budget") cfg.budget = value;
    }
    if (cfg.x0.size() != 4) throw std::runtime_error("x0 must have 4 entries");
}

/// Atomic file emission: write to a temp name, then rename into place.
void write_file(const fs::path& dir, const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path tmp = dir / (".tmp." + name);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, dir / name);
}

json provenance_base(const std::string& command, const RunConfig& cfg) {
    json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["parameters"] = cfg.params;
    j["gains"] = cfg.gains;
    j["tau"] = cfg.tau;
    j["format"] = cfg.format;
    j["seeds"] = "none";
    j["tolerances"] = {{"eigen_dead_band", kMarginalBand},
                       {"newton_residual", 1e-12},
                       {"crossing_residual_rel", 1e-8},
                       {"eta_positivity", 1e-9},
                       {"root_dedup", 1e-6}};
    return j;
}

void emit(const RunConfig& cfg, const std::string& name, const std::string& content,
          json& prov) {
    write_file(cfg.out_dir, name, content);
    prov["outputs"].push_back(name);
    json sidecar = prov;
    sidecar.erase("outputs");
    write_file(cfg.out_dir, name + ".provenance.json", sidecar.dump(2) + "\n");
}

int finish(const json& prov) {
    std::cout << prov.dump(2) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_boundaries(const RunConfig& cfg) {
    const BoundaryChart chart = boundary_chart(cfg.sigma_min, cfg.sigma_max, cfg.omega_min,
                                               cfg.omega_max, cfg.n_points, cfg.params);
    json prov = provenance_base("boundaries", cfg);
    prov["sigma_range"] = {cfg.sigma_min, cfg.sigma_max};
    prov["omega_range"] = {cfg.omega_min, cfg.omega_max};
    prov["n_points"] = cfg.n_points;
    if (cfg.format == "json") {
        json jd = json::array(), jf = json::array();
        for (const auto& r : chart.divergence) jd.push_back({{"sigma", r.sigma}, {"nu1_sq", r.nu1_sq}});
        for (const auto& r : chart.flutter)
            jf.push_back({{"omega_f", r.omega_f}, {"nu1_sq", r.nu1_sq}, {"sigma", r.sigma}});
        emit(cfg, "boundaries_divergence.json", json(jd).dump(2) + "\n", prov);
        emit(cfg, "boundaries_flutter.json", json(jf).dump(2) + "\n", prov);
    } else {
        csv::Writer d;
        d.header({"sigma", "nu1_sq"});
        for (const auto& r : chart.divergence) d.row({csv::num(r.sigma), csv::num(r.nu1_sq)});
        csv::Writer f;
        f.header({"omega_f", "nu1_sq", "sigma"});
        for (const auto& r : chart.flutter)
            f.row({csv::num(r.omega_f), csv::num(r.nu1_sq), csv::num(r.sigma)});
        emit(cfg, "boundaries_divergence.csv", d.body, prov);
        emit(cfg, "boundaries_flutter.csv", f.body, prov);
    }
    return finish(prov);
}

int cmd_classify(const RunConfig& cfg) {
    const Classification c = classify_uncontrolled(cfg.params);
    json prov = provenance_base("classify", cfg);
    prov["result"] = c;
    if (cfg.format == "json") {
        emit(cfg, "classify.json", json(c).dump(2) + "\n", prov);
    } else {
        csv::Writer w;
        w.header({"label", "real_unstable", "pairs_unstable", "marginal"});
        w.row({to_string(c.label), std::to_string(c.real_unstable),
               std::to_string(c.pairs_unstable), c.marginal ? "1" : "0"});
        emit(cfg, "classify.csv", w.body, prov);
    }
    return finish(prov);
}

int cmd_crossings(const RunConfig& cfg, bool intervals_only) {
    const DelaySystem sys = build_delay_system(cfg.params, cfg.gains, cfg.tau);
    const StabilityTable table = stability_table(sys, cfg.tau_max);
    const QuasiPolynomial qp = extract_pq(sys);

    json prov = provenance_base(intervals_only ? "intervals" : "crossings", cfg);
    prov["tau_max"] = cfg.tau_max;
    prov["quasipolynomial"] = qp;
    prov["nu_zero"] = table.nu_zero;
    prov["certified"] = table.certified;
    prov["flags"] = table.flags;

    if (intervals_only) {
        if (cfg.format == "json") {
            emit(cfg, "intervals.json", json(table).dump(2) + "\n", prov);
        } else {
            csv::Writer w;
            w.header({"tau_lo", "tau_hi", "nu"});
            for (const auto& iv : table.intervals)
                w.row({csv::num(iv.lo), csv::num(iv.hi), std::to_string(iv.nu)});
            emit(cfg, "intervals.csv", w.body, prov);
        }
    } else {
        if (cfg.format == "json") {
            emit(cfg, "crossings.json", json(table).dump(2) + "\n", prov);
        } else {
            csv::Writer w;
            w.header({"omega_c", "tau", "k", "rt", "nu_after"});
            for (const auto& bp : table.breakpoints)
                w.row({csv::num(bp.omega_c), csv::num(bp.tau), std::to_string(bp.k),
                       std::to_string(bp.rt), std::to_string(bp.nu_after)});
            emit(cfg, "crossings.csv", w.body, prov);
        }
    }
    const int status = finish(prov);
    return table.certified ? status : kExitNumeric;
}

int cmd_roots(const RunConfig& cfg) {
    const DelaySystem sys = build_delay_system(cfg.params, cfg.gains, cfg.tau);
    const QuasiPolynomial qp = extract_pq(sys);
    const RootSet rs = find_roots(qp, cfg.region, cfg.grid_step);

    json prov = provenance_base("roots", cfg);
    prov["quasipolynomial"] = qp;
    prov["region"] = cfg.region;
    prov["grid_step"] = cfg.grid_step;
    prov["certified"] = rs.certified;
    prov["certified_count"] = rs.certified_count;
    prov["warnings"] = rs.warnings;

    if (cfg.format == "json") {
        emit(cfg, "roots.json", json(rs).dump(2) + "\n", prov);
    } else {
        csv::Writer w;
        w.header({"re", "im", "residual"});
        for (const auto& r : rs.roots)
            w.row({csv::num(r.s.real()), csv::num(r.s.imag()), csv::num(r.residual)});
        emit(cfg, "roots.csv", w.body, prov);
    }
    if (cfg.dump_curves) {
        const ZeroCurves zc = zero_curves(qp, cfg.region, cfg.grid_step);
        csv::Writer w;
        w.header({"curve", "re", "im"});
        for (const auto& [x, y] : zc.re_curve) w.row({"re", csv::num(x), csv::num(y)});
        for (const auto& [x, y] : zc.im_curve) w.row({"im", csv::num(x), csv::num(y)});
        emit(cfg, "zero_curves.csv", w.body, prov);
    }
    const int status = finish(prov);
    return rs.certified ? status : kExitNumeric;
}

int cmd_simulate(const RunConfig& cfg) {
    const DelaySystem sys = build_delay_system(cfg.params, cfg.gains, cfg.tau);
    const Eigen::Vector4d x0(cfg.x0[0], cfg.x0[1], cfg.x0[2], cfg.x0[3]);
    const HistoryKind history =
        cfg.history == "zero" ? HistoryKind::Zero : HistoryKind::ConstantX0;
    const TimeSeries ts = simulate(sys, x0, cfg.psi_end, cfg.step, history);

    json prov = provenance_base("simulate", cfg);
    prov["x0"] = cfg.x0;
    prov["psi_end"] = cfg.psi_end;
    prov["step_requested"] = cfg.step;
    prov["step_adjusted"] = ts.step;
    prov["history"] = cfg.history;
    prov["diverged"] = ts.diverged;

    if (cfg.format == "json") {
        json rows = json::array();
        for (std::size_t i = 0; i < ts.psi.size(); ++i)
            rows.push_back({ts.psi[i], ts.states[i](0), ts.states[i](1), ts.states[i](2),
                            ts.states[i](3)});
        json j = {{"step", ts.step}, {"tau", ts.tau}, {"diverged", ts.diverged},
                  {"columns", {"psi", "theta", "beta", "theta_dot", "beta_dot"}},
                  {"rows", rows}};
        emit(cfg, "simulate.json", j.dump() + "\n", prov);
    } else {
        csv::Writer w;
        w.header({"psi", "theta", "beta", "theta_dot", "beta_dot"});
        for (std::size_t i = 0; i < ts.psi.size(); ++i)
            w.row({csv::num(ts.psi[i]), csv::num(ts.states[i](0)), csv::num(ts.states[i](1)),
                   csv::num(ts.states[i](2)), csv::num(ts.states[i](3))});
        emit(cfg, "simulate.csv", w.body, prov);
    }
    return finish(prov);
}

int cmd_sweep_gains(const RunConfig& cfg) {
    const SweepGrid grid = sweep_gain_surface(cfg.params, cfg.tau, cfg.a_min, cfg.a_max,
                                              cfg.n_a, cfg.b_min, cfg.b_max, cfg.n_b);
    json prov = provenance_base("sweep-gains", cfg);
    prov["a_range"] = {cfg.a_min, cfg.a_max, cfg.n_a};
    prov["b_range"] = {cfg.b_min, cfg.b_max, cfg.n_b};

    bool any_flagged = false;
    csv::Writer w;
    std::vector<std::string> head{""};
    for (double b : grid.b_values) head.push_back(csv::num(b));
    w.header(head);
    for (std::size_t i = 0; i < grid.a_values.size(); ++i) {
        std::vector<std::string> row{csv::num(grid.a_values[i])};
        for (std::size_t j = 0; j < grid.b_values.size(); ++j) {
            if (grid.flagged[i][j]) {
                row.push_back("nan");
                any_flagged = true;
            } else {
                row.push_back(csv::num(grid.abscissa[i][j]));
            }
        }
        w.row(row);
    }

    json summary = {{"tau", grid.tau},
                    {"min_abscissa", grid.min_value},
                    {"argmin_a", grid.min_a},
                    {"argmin_b", grid.min_b},
                    {"flagged_cells", any_flagged}};
    prov["summary"] = summary;
    emit(cfg, "sweep.csv", w.body, prov);
    emit(cfg, "sweep_summary.json", summary.dump(2) + "\n", prov);
    const int status = finish(prov);
    return any_flagged ? kExitNumeric : status;
}

int cmd_optimize_delay(const RunConfig& cfg) {
    double lo, hi;
    json prov = provenance_base("optimize-delay", cfg);
    if (cfg.interval_lo && cfg.interval_hi) {
        lo = *cfg.interval_lo;
        hi = *cfg.interval_hi;
    } else {
        const DelaySystem sys = build_delay_system(cfg.params, cfg.gains, cfg.tau);
        const StabilityTable table = stability_table(sys, cfg.tau_max);
        if (table.stable_intervals.empty()) {
            prov["error"] = "no stable delay interval up to tau_max";
            std::cout << prov.dump(2) << "\n";
            return kExitNumeric;
        }
        lo = table.stable_intervals.front().lo;
        hi = table.stable_intervals.front().hi;
    }
    const DelayOptimum opt = optimal_delay(cfg.params, cfg.gains, lo, hi);
    prov["interval"] = {lo, hi};
    prov["result"] = opt;

    if (cfg.format == "json") {
        emit(cfg, "optimize_delay.json", json(opt).dump(2) + "\n", prov);
    } else {
        csv::Writer w;
        w.header({"tau_star", "abscissa", "interval_lo", "interval_hi"});
        w.row({csv::num(opt.tau_star), csv::num(opt.abscissa), csv::num(lo), csv::num(hi)});
        emit(cfg, "optimize_delay.csv", w.body, prov);
    }
    return finish(prov);
}

int cmd_optimize(const RunConfig& cfg) {
    const JointOptimum opt = optimize_joint(cfg.params, cfg.gains, cfg.tau, cfg.budget);
    json prov = provenance_base("optimize", cfg);
    prov["budget"] = cfg.budget;
    prov["result"] = opt;
    if (cfg.format == "json") {
        emit(cfg, "optimize.json", json(opt).dump(2) + "\n", prov);
    } else {
        csv::Writer w;
        w.header({"a", "b", "tau", "abscissa", "converged", "evaluations"});
        w.row({csv::num(opt.gains.a), csv::num(opt.gains.b), csv::num(opt.tau),
               csv::num(opt.abscissa), opt.converged ? "1" : "0",
               std::to_string(opt.evaluations)});
        emit(cfg, "optimize.csv", w.body, prov);
    }
    const int status = finish(prov);
    return opt.converged ? status : kExitNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delayed-feedback stability analysis of rotor pitch-flap dynamics"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand name

    RunConfig cfg;
    std::string config_path;

    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--out", cfg.out_dir, "output directory");
    app.add_option("--format", cfg.format, "output format: csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--r-g", cfg.params.r_g, "span-wise c.g. location [m]");
    app.add_option("--c-h", cfg.params.c_h, "chord [m]");
    app.add_option("--gamma", cfg.params.gamma, "Lock number");
    app.add_option("--lambda1", cfg.params.lambda1, "first flap natural frequency");
    app.add_option("--sigma", cfg.params.sigma, "c.g. offset, chord fraction");
    app.add_option("--nu1-sq", cfg.params.nu1_sq, "squared torsional natural frequency");
    app.add_option("--act-gain", cfg.params.act_gain, "actuation constant");
    app.add_option("--a", cfg.gains.a, "position feedback gain");
    app.add_option("--b", cfg.gains.b, "rate feedback gain");
    app.add_option("--tau", cfg.tau, "feedback delay [rad azimuth]");

    auto* boundaries = app.add_subcommand("boundaries", "tabulate uncontrolled stability boundaries");
    boundaries->add_option("--sigma-min", cfg.sigma_min);
    boundaries->add_option("--sigma-max", cfg.sigma_max);
    boundaries->add_option("--omega-min", cfg.omega_min);
    boundaries->add_option("--omega-max", cfg.omega_max);
    boundaries->add_option("--n-points", cfg.n_points);

    app.add_subcommand("classify", "classify the uncontrolled operating point");

    auto* crossings = app.add_subcommand("crossings", "CTCR crossing table");
    crossings->add_option("--tau-max", cfg.tau_max);
    auto* intervals = app.add_subcommand("intervals", "delay intervals with their NU count");
    intervals->add_option("--tau-max", cfg.tau_max);

    auto* roots = app.add_subcommand("roots", "characteristic roots in a rectangle");
    roots->add_option("--re-min", cfg.region.re_min);
    roots->add_option("--re-max", cfg.region.re_max);
    roots->add_option("--im-min", cfg.region.im_min);
    roots->add_option("--im-max", cfg.region.im_max);
    roots->add_option("--grid-step", cfg.grid_step);
    roots->add_flag("--dump-curves", cfg.dump_curves, "also dump the zero level curves");

    auto* simulate_cmd = app.add_subcommand("simulate", "integrate the delayed closed loop");
    simulate_cmd->add_option("--x0", cfg.x0, "initial state, 4 values")->expected(4);
    simulate_cmd->add_option("--psi-end", cfg.psi_end);
    simulate_cmd->add_option("--step", cfg.step);
    simulate_cmd->add_option("--history", cfg.history)->check(CLI::IsMember({"x0", "zero"}));

    auto* sweep = app.add_subcommand("sweep-gains", "spectral abscissa over a gain grid");
    sweep->add_option("--a-min", cfg.a_min);
    sweep->add_option("--a-max", cfg.a_max);
    sweep->add_option("--b-min", cfg.b_min);
    sweep->add_option("--b-max", cfg.b_max);
    sweep->add_option("--n-a", cfg.n_a);
    sweep->add_option("--n-b", cfg.n_b);

    auto* opt_delay = app.add_subcommand("optimize-delay", "best delay inside a stable interval");
    opt_delay->add_option("--tau-max", cfg.tau_max);
    double ilo = 0.0, ihi = 0.0;
    auto* ilo_opt = opt_delay->add_option("--interval-lo", ilo);
    auto* ihi_opt = opt_delay->add_option("--interval-hi", ihi);

    auto* optimize = app.add_subcommand("optimize", "joint (a, b, tau) descent");
    optimize->add_option("--budget", cfg.budget);

    // The config file loads before parsing so explicit flags override its
    // values; argv is scanned up front just to find the file path.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            apply_config_file(cfg, config_path);
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (ilo_opt->count() > 0) cfg.interval_lo = ilo;
        if (ihi_opt->count() > 0) cfg.interval_hi = ihi;
        cfg.params.validate();
        cfg.gains.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (app.got_subcommand("boundaries")) return cmd_boundaries(cfg);
        if (app.got_subcommand("classify")) return cmd_classify(cfg);
        if (app.got_subcommand("crossings")) return cmd_crossings(cfg, false);
        if (app.got_subcommand("intervals")) return cmd_crossings(cfg, true);
        if (app.got_subcommand("roots")) return cmd_roots(cfg);
        if (app.got_subcommand("simulate")) return cmd_simulate(cfg);
        if (app.got_subcommand("sweep-gains")) return cmd_sweep_gains(cfg);
        if (app.got_subcommand("optimize-delay")) return cmd_optimize_delay(cfg);
        if (app.got_subcommand("optimize")) return cmd_optimize(cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return kExitConfig;
}
