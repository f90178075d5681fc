// pagecurve: command line front end.
//
//   pagecurve run <preset|scenario-file> [--M 25,50 --g 0.5 --out DIR ...]
//   pagecurve oracle-check [--max-L 14]
//   pagecurve analytic <tau-grid> [--out FILE]
//   pagecurve presets

#include "pagecurve/oracle.hpp"
#include "pagecurve/rlm.hpp"
#include "pagecurve/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

using namespace pagecurve;

namespace {

Scenario resolve_target(const std::string& target) {
    for (const auto& name : preset_names())
        if (name == target) return preset(target);
    if (std::filesystem::exists(target)) return load_scenario_file(target);
    throw std::invalid_argument("'" + target + "' is neither a preset nor a scenario file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Page-curve entanglement dynamics of a free-fermion chain emptying into an environment"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "Run a preset or scenario file and write CSV + JSON");
    std::string target;
    std::string out_dir = "results";
    std::optional<std::string> M_list, N_list, g_list, renyi_list;
    std::optional<double> t_sys, t_env, t_max, dt;
    std::optional<unsigned> threads;
    bool analytic = false;
    run->add_option("target", target, "Preset name or scenario file")->required();
    run->add_option("--M", M_list, "System sizes, comma separated");
    run->add_option("--N", N_list, "Environment sizes, comma separated");
    run->add_option("--g", g_list, "Couplings, comma separated");
    run->add_option("--t-sys", t_sys, "System hopping");
    run->add_option("--t-env", t_env, "Environment hopping");
    run->add_option("--t-max", t_max, "Final time");
    run->add_option("--dt", dt, "Time step of the output grid");
    run->add_option("--renyi", renyi_list, "Renyi orders, e.g. 2,3,inf (enables the Renyi columns)");
    run->add_option("--threads", threads, "Worker threads");
    run->add_option("--out", out_dir, "Output directory");
    run->add_flag("--analytic", analytic, "Also write the weak-coupling universal curve");

    // oracle-check
    auto* check = app.add_subcommand("oracle-check", "Compare the Gaussian method with exact sector evolution");
    oracle::CheckOptions check_options;
    bool corrupt = false;
    check->add_option("--max-L", check_options.max_sites, "Largest M + N")->check(CLI::Range(2, 14));
    check->add_option("--times", check_options.times, "Time points per instance")->check(CLI::PositiveNumber);
    check->add_flag("--corrupt-sign", corrupt, "Flip the hopping sign in the oracle (negative control)");

    // analytic
    auto* analytic_cmd = app.add_subcommand("analytic", "Tabulate the weak-coupling universal curves");
    std::string tau_spec;
    std::string analytic_out;
    std::string analytic_renyi = "2";
    std::string convention = "chain";
    analytic_cmd->add_option("tau-grid", tau_spec, "lo:hi:count, log:lo:hi:count or a,b,c")->required();
    analytic_cmd->add_option("--out", analytic_out, "Output CSV (default stdout)");
    analytic_cmd->add_option("--renyi", analytic_renyi, "Renyi orders for extra columns");
    analytic_cmd->add_option("--convention", convention, "Level energies for the variance: halved|chain")
        ->check(CLI::IsMember({"halved", "chain"}));

    auto* presets = app.add_subcommand("presets", "List the built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            Scenario scenario = resolve_target(target);
            if (M_list) apply_setting(scenario, "M", *M_list);
            if (N_list) apply_setting(scenario, "N", *N_list);
            if (g_list) apply_setting(scenario, "g", *g_list);
            if (t_sys) scenario.t_sys = *t_sys;
            if (t_env) scenario.t_env = *t_env;
            if (t_max) {
                scenario.t_max = *t_max;
                scenario.times.clear();
            }
            if (dt) {
                scenario.dt = *dt;
                scenario.times.clear();
            }
            if (renyi_list) {
                apply_setting(scenario, "renyi", *renyi_list);
                scenario.observables.renyi = true;
            }
            if (threads) scenario.threads = *threads;
            if (analytic) scenario.analytic = true;
            const RunOutputs outputs = run_scenario(scenario, out_dir);
            for (const auto& p : outputs.csv) std::cout << p.string() << '\n';
            if (outputs.analytic) std::cout << outputs.analytic->string() << '\n';
            std::cout << outputs.metadata.string() << '\n';
            return 0;
        }
        if (*check) {
            if (corrupt) check_options.hopping_sign = -1.0;
            const oracle::CheckReport report = oracle::run_oracle_check(check_options);
            std::cout << "instances " << report.instances << ", samples " << report.samples << ", tolerance "
                      << report.tolerance << '\n';
            for (const auto& d : report.deviations) {
                std::cout << (d.max_abs <= report.tolerance ? "PASS " : "FAIL ") << std::left << std::setw(16)
                          << d.observable << std::scientific << std::setprecision(3) << d.max_abs
                          << std::defaultfloat;
                if (d.max_abs > report.tolerance) std::cout << "  worst at " << d.worst_instance;
                std::cout << '\n';
            }
            return report.passed() ? 0 : 1;
        }
        if (*analytic_cmd) {
            Scenario parsed;
            apply_setting(parsed, "renyi", analytic_renyi);
            const auto tau = parse_tau_grid(tau_spec);
            const auto curve = rlm::parametric_page_curve(
                tau, parsed.renyi_orders, convention == "halved" ? LevelConvention::Halved : LevelConvention::Chain);
            if (analytic_out.empty()) {
                write_analytic_csv(std::cout, curve);
            } else {
                std::ofstream out(analytic_out);
                if (!out) throw std::runtime_error("cannot write " + analytic_out);
                write_analytic_csv(out, curve);
            }
            return 0;
        }
        if (*presets) {
            for (const auto& name : preset_names()) std::cout << name << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
