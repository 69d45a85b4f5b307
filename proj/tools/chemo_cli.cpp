// Scenario runner for the two-species chemotaxis simulator.
//
//   chemo run <config.json>
//   chemo sweep <config.json> --axis1 model.p=0,0.5,0.9 [--axis2 model.mu=0.5,1,2]
//   chemo verify --p 0.5 --delta 0.1,0.01 [--umax 1e8] [--samples 20000] [--out dir]
//
// Exit codes: 0 completed, 10 blow-up, 11 positivity failure, 12 solver failure,
// 2 configuration error. CHEMO_OUTPUT_ROOT, when set, prefixes every output directory.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "chemo/scenario.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) {
            throw chemo::ConfigError("delta", "cannot parse '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

int cmd_run(const std::string& config_path) {
    const chemo::ScenarioConfig cfg = chemo::load_config(config_path);
    const chemo::ScenarioOutcome out = chemo::run_scenario(cfg);
    for (const auto& w : out.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    std::cout << chemo::to_string(out.result.reason) << " t=" << out.result.final_state.t
              << " steps=" << out.result.steps << " peak_linf_u=" << out.result.peak_linf_u
              << " peak_energy_y=" << out.result.peak_energy << " -> " << out.output_dir.string()
              << '\n';
    if (!out.result.message.empty()) {
        std::cerr << out.result.message << '\n';
    }
    return out.exit_code;
}

int cmd_sweep(const std::string& config_path, const std::string& axis1,
              const std::string& axis2, unsigned threads) {
    const auto base = chemo::load_config_json(config_path);
    std::optional<chemo::SweepAxis> second;
    if (!axis2.empty()) {
        second = chemo::parse_axis(axis2);
    }
    const auto cells = chemo::run_sweep(base, chemo::parse_axis(axis1), second, threads);
    for (const auto& c : cells) {
        std::cout << "cell " << c.i << ',' << c.j << ": " << chemo::to_string(c.reason)
                  << " peak_linf_u=" << c.peak_linf_u << '\n';
    }
    return chemo::exit_code::completed;
}

int cmd_verify(double p, const std::string& deltas, double u_max, int samples,
               const std::string& out) {
    const auto rep = chemo::verify_command(p, parse_list(deltas), u_max, samples,
                                           chemo::resolve_output_dir(out));
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        std::cout << "delta=" << r.delta << " C=" << r.c_delta << " argmax=" << r.argmax_u
                  << (r.holds && rep.recertified[k] && r.phi_bound_holds ? " pass" : " FAIL")
                  << '\n';
    }
    return rep.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-species chemotaxis simulator with sub-logistic damping"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run = app.add_subcommand("run", "Run one scenario");
    run->add_option("config", run_config, "Scenario config (JSON)")->required();

    std::string sweep_config;
    std::string axis1;
    std::string axis2;
    unsigned threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Run a one- or two-axis parameter sweep");
    sweep->add_option("config", sweep_config, "Base scenario config (JSON)")->required();
    sweep->add_option("--axis1", axis1, "key=v1,v2,...")->required();
    sweep->add_option("--axis2", axis2, "key=v1,v2,...");
    sweep->add_option("--threads", threads, "Concurrent cells (0 = hardware concurrency)");

    double p = 0.0;
    std::string deltas;
    double u_max = 1e8;
    int samples = 20000;
    std::string out_dir = "verify";
    auto* verify = app.add_subcommand("verify", "Brute-force the pointwise inequalities");
    verify->add_option("--p", p, "Exponent p in [0, 1)")->required();
    verify->add_option("--delta", deltas, "Comma-separated delta values")->required();
    verify->add_option("--umax", u_max, "Upper end of the u scan");
    verify->add_option("--samples", samples, "Scan size");
    verify->add_option("--out", out_dir, "Directory for inequalities.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : chemo::exit_code::config_error;
    }

    try {
        if (*run) {
            return cmd_run(run_config);
        }
        if (*sweep) {
            return cmd_sweep(sweep_config, axis1, axis2, threads);
        }
        return cmd_verify(p, deltas, u_max, samples, out_dir);
    } catch (const chemo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return chemo::exit_code::config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return chemo::exit_code::config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return chemo::exit_code::solver;
    }
}
