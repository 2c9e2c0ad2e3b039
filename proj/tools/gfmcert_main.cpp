/**
 * Command-line front end: scenario ingestion, analysis dispatch, and report
 * emission.  Commands: certify, passivity, analyze, simulate, region.
 * Exit codes: 0 analysis passed, 2 analysis ran but certified a failure,
 * 1 usage or runtime error.
 */

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include <Eigen/Core>

#include "CLI11.hpp"

#include "gfmcert/certificates.hpp"
#include "gfmcert/closedloop.hpp"
#include "gfmcert/passivity.hpp"
#include "gfmcert/reports.hpp"
#include "gfmcert/scenario.hpp"

namespace {

using namespace gfmcert;

struct CommonOpts {
    std::string scenario;  // bundled name or path
    std::string level;
    int grid_points = 0;
    double omega_min = 0.0;
    double omega_max = 0.0;
    std::string out;
    std::string format;
    double tol = 1e-9;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_scenario = true) {
    if (with_scenario)
        cmd->add_option("scenario", o.scenario, "Bundled scenario name or path to a .scn file")
            ->required();
    cmd->add_option("--level", o.level, "Network model level")
        ->check(CLI::IsMember({"full", "dynamic", "level1", "level2"}));
    cmd->add_option("--grid-points", o.grid_points, "Frequency sweep point count");
    cmd->add_option("--omega-min", o.omega_min, "Sweep lower bound (rad/s)");
    cmd->add_option("--omega-max", o.omega_max, "Sweep upper bound (rad/s)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--format", o.format, "Artifact format")
        ->check(CLI::IsMember({"csv", "json", "svg"}));
    cmd->add_option("--tol", o.tol, "Numeric tolerance for passivity verdicts");
}

Scenario load(const CommonOpts& o) {
    Scenario sc = o.scenario.find('/') != std::string::npos ||
                          o.scenario.size() > 4 &&
                              o.scenario.substr(o.scenario.size() - 4) == ".scn"
                      ? parse_scenario(o.scenario)
                      : load_bundled(o.scenario);
    if (!o.level.empty()) sc.level = level_from_string(o.level);
    if (o.grid_points > 0) sc.grid.points = o.grid_points;
    if (o.omega_min > 0.0) sc.grid.omega_min = o.omega_min;
    if (o.omega_max > 0.0) sc.grid.omega_max = o.omega_max;
    if (!o.out.empty()) sc.output.directory = o.out;
    if (!o.format.empty()) sc.output.format = o.format;
    return sc;
}

FrequencyGrid sweep_grid(const Scenario& sc) {
    if (sc.grid.points > 0 || sc.grid.omega_min > 0.0 || sc.grid.omega_max > 0.0) {
        const int n = sc.grid.points > 0 ? sc.grid.points : 400;
        const double lo = sc.grid.omega_min > 0.0 ? sc.grid.omega_min : 1e-3;
        const double hi = sc.grid.omega_max > 0.0 ? sc.grid.omega_max : 1e5;
        return FrequencyGrid::log_spaced(lo, hi, n);
    }
    return default_passivity_grid(build_N_transformed(sc.network), sc.network.omega0);
}

std::string out_path(const Scenario& sc, const std::string& suffix) {
    return sc.output.directory + "/" + sc.name + suffix;
}

bool level_certified(const CertificateReport& rep, NetworkLevel level) {
    switch (level) {
        case NetworkLevel::Full:
        case NetworkLevel::Dynamic: return rep.dynamic_pass;
        case NetworkLevel::Level1: return rep.level1_pass;
        case NetworkLevel::Level2: return rep.level2_pass;
    }
    return false;
}

int cmd_certify(const CommonOpts& o) {
    const Scenario sc = load(o);
    const auto rep = evaluate_certificates(sc.network, sc.converters);
    write_file(out_path(sc, "_certify.json"), certificate_report_json(rep));
    std::cout << certificate_report_table(rep);
    return level_certified(rep, sc.level) ? 0 : 2;
}

int cmd_passivity(const CommonOpts& o) {
    const Scenario sc = load(o);
    const auto trace = certificate_trace(sc.network, sc.converters, sweep_grid(sc), o.tol);
    write_file(out_path(sc, "_trace.json"), trace_json(trace));
    for (const auto& s : trace.steps)
        std::cout << (s.pass ? "pass" : "FAIL") << (s.deferred ? " (deferred)" : "") << "  "
                  << s.name << (s.detail.empty() ? "" : ": " + s.detail) << "\n";
    std::cout << "overall: " << (trace.overall ? "pass" : "FAIL") << "\n";
    return trace.overall ? 0 : 2;
}

int cmd_analyze(const CommonOpts& o) {
    const Scenario sc = load(o);
    const auto cl = assemble(sc.network, sc.level, sc.converters);
    const auto v = closed_loop_verdict(cl);
    write_file(out_path(sc, "_poles.csv"), poles_csv(v));
    write_file(out_path(sc, "_verdict.json"), verdict_json(v));
    std::cout << "level=" << level_to_string(sc.level) << " stable=" << (v.stable ? 1 : 0)
              << " inconclusive=" << (v.inconclusive ? 1 : 0)
              << " margin=" << format_sig(v.margin) << " structural=" << v.n_structural
              << "\n";
    return v.stable ? 0 : 2;
}

int cmd_simulate(const CommonOpts& o) {
    const Scenario sc = load(o);
    const auto cl = assemble(sc.network, sc.level, sc.converters);
    const auto& labels = cl.assembled.input_labels;
    const auto it = std::find(labels.begin(), labels.end(), sc.simulation.channel);
    if (it == labels.end())
        throw IllPosed("unknown disturbance channel: " + sc.simulation.channel);
    const int channel = static_cast<int>(it - labels.begin());
    const double dt = sc.simulation.dt > 0.0 ? sc.simulation.dt : default_sim_dt(sc.level);
    const auto res = simulate_step(cl, channel, sc.simulation.magnitude,
                                   sc.simulation.t_start, sc.simulation.horizon, dt);
    write_file(out_path(sc, "_sim.csv"), sim_csv(res));
    write_file(out_path(sc, "_sim_meta.json"), sim_metadata_json(res));
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "samples=" << res.time.size() << " signals=" << res.names.size() << "\n";
    return 0;
}

int cmd_region(CLI::App* cmd, const CommonOpts& o, double rho, double vmax,
               const std::string& kind, double alpha_max, double tau_max, int resolution) {
    Scenario sc;
    bool have_scenario = !o.scenario.empty();
    if (have_scenario) {
        sc = load(o);
        if (!cmd->count("--rho")) rho = sc.network.rho;
        if (!cmd->count("--vmax")) vmax = sc.network.vmax;
    } else {
        sc.name = "region";
        if (!o.out.empty()) sc.output.directory = o.out;
        if (!o.format.empty()) sc.output.format = o.format;
    }
    const RegionKind rk = kind == "reactive" ? RegionKind::Reactive : RegionKind::Active;
    const auto grid = sample_region(rho, vmax, 0.0, alpha_max, 0.0, tau_max, resolution, rk);
    const std::string stem =
        (have_scenario ? sc.name + "_" : std::string()) + "region_" + kind;
    if (sc.output.format == "svg") {
        write_file(sc.output.directory + "/" + stem + ".svg",
                   region_svg(grid, kind + " feasibility, rho = " + format_sig(rho)));
    } else {
        write_file(sc.output.directory + "/" + stem + ".csv", region_csv(grid));
    }
    std::cout << "region grid " << grid.taus.size() << "x" << grid.alphas.size() << " written\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (const char* threads = std::getenv("GFMCERT_THREADS")) {
        const int n = std::atoi(threads);
        if (n > 0) Eigen::setNbThreads(n);
    }

    CLI::App app{"Small-signal stability certification for multi-converter power networks"};
    app.require_subcommand(1);

    CommonOpts certify_o, passivity_o, analyze_o, simulate_o, region_o;
    auto* certify = app.add_subcommand("certify", "Evaluate the parametric certificates");
    add_common(certify, certify_o);
    auto* passivity =
        app.add_subcommand("passivity", "Run the loop-shifting passivity proof trace");
    add_common(passivity, passivity_o);
    auto* analyze = app.add_subcommand("analyze", "Closed-loop pole analysis");
    add_common(analyze, analyze_o);
    auto* simulate = app.add_subcommand("simulate", "Linear step-disturbance simulation");
    add_common(simulate, simulate_o);

    double rho = 0.05, vmax = 1.1, alpha_max = 0.5, tau_max = 60.0;
    int resolution = 80;
    std::string kind = "active";
    auto* region = app.add_subcommand("region", "Sample the certificate feasibility region");
    region->add_option("scenario", region_o.scenario,
                       "Optional scenario supplying rho and vmax");
    add_common(region, region_o, /*with_scenario=*/false);
    region->add_option("--rho", rho, "Resistance-inductance ratio");
    region->add_option("--vmax", vmax, "Voltage upper bound (pu)");
    region->add_option("--kind", kind, "Condition family")
        ->check(CLI::IsMember({"active", "reactive"}));
    region->add_option("--alpha-max", alpha_max, "Coupling-strength axis upper bound");
    region->add_option("--tau-max", tau_max, "Filter-constant axis upper bound (rad)");
    region->add_option("--resolution", resolution, "Grid resolution per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        if (certify->parsed()) return cmd_certify(certify_o);
        if (passivity->parsed()) return cmd_passivity(passivity_o);
        if (analyze->parsed()) return cmd_analyze(analyze_o);
        if (simulate->parsed()) return cmd_simulate(simulate_o);
        if (region->parsed())
            return cmd_region(region, region_o, rho, vmax, kind, alpha_max, tau_max, resolution);
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid scenario:\n";
        for (const auto& v : e.violations) std::cerr << "  - " << v << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
