#pragma once

// Scenario-driven experiment runner: named presets for the figures, a flat key = value
// scenario file format, CSV time series per (M, N, g) and a JSON metadata file per run.

#include "pagecurve/model.hpp"
#include "pagecurve/observables.hpp"
#include "pagecurve/rlm.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pagecurve {

struct ObservableSet {
    bool m = true;
    bool current = false;
    bool entropy = true;
    bool renyi = false;
    bool variance = false;
    bool bound = false;
};

struct Scenario {
    std::string name = "custom";
    std::vector<Index> M = {50};
    std::vector<Index> N = {10000};
    std::vector<double> g = {0.5};
    double t_sys = 1.0;
    double t_env = 4.0;
    double t_max = 100.0;
    double dt = 0.5;
    std::vector<double> times;  // explicit grid; overrides t_max / dt when non-empty
    ObservableSet observables;
    std::vector<double> renyi_orders = {2.0, kRenyiInfinity};
    bool analytic = false;
    double tau_max = 40.0;
    int tau_points = 801;
    unsigned threads = 1;

    // Throws std::invalid_argument naming the key at fault.
    void validate() const;
    std::vector<double> time_grid() const;
    std::vector<ModelParams> sweep() const;  // cartesian M x N x g
};

std::vector<std::string> preset_names();
// Throws std::invalid_argument for an unknown name.
Scenario preset(std::string_view name);

// Flat `key = value` text: '#' starts a comment, lists are comma separated, keys are the
// Scenario field names. Unknown keys are errors.
Scenario parse_scenario(std::istream& in, Scenario base = {});
Scenario load_scenario_file(const std::filesystem::path& path);
void apply_setting(Scenario& s, std::string_view key, std::string_view value);

// 12 significant digits, '.' decimal separator.
std::string format_number(double v);

struct TimeSeries {
    ModelParams params;
    std::vector<ObservableRecord> records;
    std::vector<double> current;  // dm/dt, empty with fewer than 3 samples or a non-uniform grid
};

TimeSeries compute_series(const ModelParams& params, std::span<const double> times,
                          std::span<const double> renyi_orders, bool with_variance, unsigned threads = 1);

void write_series_csv(std::ostream& out, const TimeSeries& series, const ObservableSet& columns,
                      std::span<const double> renyi_orders);

void write_analytic_csv(std::ostream& out, const rlm::UniversalCurve& curve);

// "lo:hi:count" (linear), "log:lo:hi:count" (log-spaced, lo > 0) or "a,b,c".
std::vector<double> parse_tau_grid(std::string_view spec);

struct RunOutputs {
    std::vector<std::filesystem::path> csv;
    std::filesystem::path metadata;
    std::optional<std::filesystem::path> analytic;
};

// Writes into out_dir/<scenario name>/.
RunOutputs run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

std::string series_file_stem(const Scenario& scenario, const ModelParams& params);

}  // namespace pagecurve
