#include "pagecurve/scenario.hpp"

#include "pagecurve/evolve.hpp"
#include "pagecurve/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace pagecurve {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(std::string_view value) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto piece = trim(value.substr(start, comma == std::string_view::npos ? value.npos : comma - start));
        if (!piece.empty()) items.emplace_back(piece);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return items;
}

double parse_double(std::string_view key, const std::string& text) {
    if (text == "inf" || text == "infinity") return kRenyiInfinity;
    std::size_t used = 0;
    double v;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string(key) + ": not a number: '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument(std::string(key) + ": not a number: '" + text + "'");
    return v;
}

Index parse_count(std::string_view key, const std::string& text) {
    const double v = parse_double(key, text);
    if (v != std::floor(v) || v < 0 || v > 1e9)
        throw std::invalid_argument(std::string(key) + ": not a non-negative integer: '" + text + "'");
    return static_cast<Index>(v);
}

bool parse_bool(std::string_view key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument(std::string(key) + ": expected true/false, got '" + text + "'");
}

std::string order_label(double q) {
    if (std::isinf(q)) return "min";
    return "q" + format_number(q);
}

bool uniform_grid(std::span<const double> times, double& dt) {
    if (times.size() < 3) return false;
    dt = times[1] - times[0];
    if (!(dt > 0)) return false;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs((times[i] - times[i - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(times[i]))) return false;
    return true;
}

}  // namespace

std::string format_number(double v) {
    if (v == 0) return "0";  // folds -0 as well
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void Scenario::validate() const {
    if (name.empty() || name.find_first_of("/\\ ") != std::string::npos)
        throw std::invalid_argument("name: must be non-empty without spaces or slashes");
    if (M.empty()) throw std::invalid_argument("M: empty sweep");
    if (N.empty()) throw std::invalid_argument("N: empty sweep");
    if (g.empty()) throw std::invalid_argument("g: empty sweep");
    for (const auto& p : sweep()) p.validate();
    if (times.empty()) {
        if (!(t_max >= 0)) throw std::invalid_argument("t_max: must be >= 0");
        if (!(dt > 0)) throw std::invalid_argument("dt: must be > 0");
    } else if (!std::is_sorted(times.begin(), times.end())) {
        throw std::invalid_argument("times: must be ascending");
    }
    for (double q : renyi_orders)
        if (!(q > 0)) throw std::invalid_argument("renyi: orders must be > 0");
    if (analytic && (!(tau_max > 0) || tau_points < 2))
        throw std::invalid_argument("tau_max/tau_points: need tau_max > 0 and at least 2 points");
    if (threads < 1) throw std::invalid_argument("threads: must be >= 1");
}

std::vector<double> Scenario::time_grid() const {
    if (!times.empty()) return times;
    const auto steps = static_cast<Index>(std::floor(t_max / dt + 1e-9));
    std::vector<double> grid(static_cast<std::size_t>(steps + 1));
    for (Index i = 0; i <= steps; ++i) grid[static_cast<std::size_t>(i)] = static_cast<double>(i) * dt;
    return grid;
}

std::vector<ModelParams> Scenario::sweep() const {
    std::vector<ModelParams> out;
    for (Index m : M)
        for (Index n : N)
            for (double coupling : g) out.push_back(ModelParams{m, n, t_sys, t_env, coupling});
    return out;
}

std::vector<std::string> preset_names() {
    return {"fig3_m_decay",         "fig4_svn_vs_emitted",      "fig5_renyi2_vs_emitted",
            "fig6_min_vs_emitted",  "fig7_variance_vs_emitted", "fig9_finite_size",
            "homogeneous_log_growth"};
}

Scenario preset(std::string_view name) {
    Scenario s;
    s.name = std::string(name);
    s.t_sys = 1.0;
    s.t_env = 4.0;
    s.N = {10000};
    s.dt = 0.5;
    s.t_max = 2400.0;  // below the reflection estimate N / t_env = 2500
    const std::vector<double> couplings = {0.35, 0.5, 0.65, 0.8};
    if (name == "fig3_m_decay") {
        s.M = {25, 50, 75};
        s.g = {0.5};
        s.observables = {.m = true, .current = true, .entropy = true, .bound = true};
    } else if (name == "fig4_svn_vs_emitted") {
        s.M = {50};
        s.g = couplings;
        s.observables = {.m = true, .entropy = true};
        s.analytic = true;
    } else if (name == "fig5_renyi2_vs_emitted") {
        s.M = {50};
        s.g = couplings;
        s.observables = {.m = true, .renyi = true};
        s.renyi_orders = {2.0};
        s.analytic = true;
    } else if (name == "fig6_min_vs_emitted") {
        s.M = {50};
        s.g = couplings;
        s.observables = {.m = true, .renyi = true};
        s.renyi_orders = {kRenyiInfinity};
        s.analytic = true;
    } else if (name == "fig7_variance_vs_emitted") {
        s.M = {50};
        s.g = couplings;
        s.observables = {.m = true, .variance = true};
        s.analytic = true;
    } else if (name == "fig9_finite_size") {
        s.M = {50};
        s.N = {75, 100, 200, 400, 1000, 10000};
        s.g = {0.65};
        s.t_env = 1.0;
        s.t_max = 500.0;
        s.observables = {.m = true, .entropy = true};
    } else if (name == "homogeneous_log_growth") {
        s.M = {50};
        s.g = {1.0};
        s.t_env = 1.0;
        s.t_max = 400.0;
        s.observables = {.m = true, .entropy = true};
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw std::invalid_argument("unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    return s;
}

void apply_setting(Scenario& s, std::string_view key, std::string_view raw) {
    const std::string value(trim(raw));
    const auto items = split_list(value);
    auto single = [&]() -> const std::string& {
        if (items.size() != 1) throw std::invalid_argument(std::string(key) + ": expected a single value");
        return items.front();
    };
    if (key == "name") {
        s.name = value;
    } else if (key == "M" || key == "N") {
        std::vector<Index> list;
        for (const auto& it : items) list.push_back(parse_count(key, it));
        (key == "M" ? s.M : s.N) = list;
    } else if (key == "g") {
        s.g.clear();
        for (const auto& it : items) s.g.push_back(parse_double(key, it));
    } else if (key == "t_sys") {
        s.t_sys = parse_double(key, single());
    } else if (key == "t_env") {
        s.t_env = parse_double(key, single());
    } else if (key == "t_max") {
        s.t_max = parse_double(key, single());
    } else if (key == "dt") {
        s.dt = parse_double(key, single());
    } else if (key == "times") {
        s.times.clear();
        for (const auto& it : items) s.times.push_back(parse_double(key, it));
    } else if (key == "observables") {
        s.observables = {.m = false, .current = false, .entropy = false, .renyi = false, .variance = false,
                         .bound = false};
        for (const auto& it : items) {
            if (it == "m") s.observables.m = true;
            else if (it == "current") s.observables.current = true;
            else if (it == "entropy") s.observables.entropy = true;
            else if (it == "renyi") s.observables.renyi = true;
            else if (it == "variance") s.observables.variance = true;
            else if (it == "bound") s.observables.bound = true;
            else throw std::invalid_argument("observables: unknown observable '" + it + "'");
        }
    } else if (key == "renyi") {
        s.renyi_orders.clear();
        for (const auto& it : items) s.renyi_orders.push_back(parse_double(key, it));
    } else if (key == "analytic") {
        s.analytic = parse_bool(key, single());
    } else if (key == "tau_max") {
        s.tau_max = parse_double(key, single());
    } else if (key == "tau_points") {
        s.tau_points = static_cast<int>(parse_count(key, single()));
    } else if (key == "threads") {
        s.threads = static_cast<unsigned>(parse_count(key, single()));
    } else {
        throw std::invalid_argument("unknown key '" + std::string(key) + "'");
    }
}

Scenario parse_scenario(std::istream& in, Scenario base) {
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(number) + ": expected 'key = value'");
        const auto key = trim(view.substr(0, eq));
        if (key == "preset") {
            base = preset(trim(view.substr(eq + 1)));
            continue;
        }
        try {
            apply_setting(base, key, view.substr(eq + 1));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("line " + std::to_string(number) + ": " + e.what());
        }
    }
    return base;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
    return parse_scenario(in);
}

TimeSeries compute_series(const ModelParams& params, std::span<const double> times,
                          std::span<const double> renyi_orders, bool with_variance, unsigned threads) {
    const Propagator propagator(params);
    TimeSeries series;
    series.params = params;
    series.records.resize(times.size());
    parallel_for(times.size(), threads, [&](std::size_t i) {
        series.records[i] = measure(propagator.at(times[i]), propagator.hamiltonian(), propagator.occupation(),
                                    renyi_orders, with_variance);
    });
    double dt = 0;
    if (uniform_grid(times, dt)) {
        std::vector<double> m(times.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = series.records[i].m;
        series.current = boundary_current(m, dt);
    }
    return series;
}

void write_series_csv(std::ostream& out, const TimeSeries& series, const ObservableSet& columns,
                      std::span<const double> renyi_orders) {
    const double M = static_cast<double>(series.params.M);
    const bool current = columns.current && !series.current.empty();
    std::vector<std::string> header = {"time"};
    if (columns.m) header.insert(header.end(), {"m", "m/M", "emitted"});
    if (current) header.push_back("current");
    if (columns.entropy) header.insert(header.end(), {"S_vN", "S_vN/M"});
    if (columns.renyi) {
        for (double q : renyi_orders) {
            header.push_back("S_" + order_label(q));
            header.push_back("S_" + order_label(q) + "/M");
        }
    }
    if (columns.variance) header.insert(header.end(), {"Henv_mean", "dHenv2", "dHenv2/M"});
    if (columns.bound) header.push_back("bound");
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';

    for (std::size_t i = 0; i < series.records.size(); ++i) {
        const ObservableRecord& r = series.records[i];
        std::vector<double> row = {r.time};
        if (columns.m) row.insert(row.end(), {r.m, r.m / M, 1.0 - r.m / M});
        if (current) row.push_back(series.current[i]);
        if (columns.entropy) row.insert(row.end(), {r.S_vN, r.S_vN / M});
        if (columns.renyi) {
            for (double q : renyi_orders) {
                const auto it = std::find_if(r.S_q.begin(), r.S_q.end(), [q](const auto& p) { return p.first == q; });
                const double v = it != r.S_q.end() ? it->second : std::numeric_limits<double>::quiet_NaN();
                row.push_back(v);
                row.push_back(v / M);
            }
        }
        if (columns.variance) row.insert(row.end(), {r.Henv_mean, r.dHenv2, r.dHenv2 / M});
        if (columns.bound) row.push_back(r.bound);
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
        out << '\n';
    }
}

void write_analytic_csv(std::ostream& out, const rlm::UniversalCurve& curve) {
    // The min-entropy always has its own column, so an infinite order is not repeated.
    out << "tau,m_frac,emitted_frac,S_frac";
    for (const auto& [q, values] : curve.Sq_frac)
        if (!std::isinf(q)) out << ",S_" << order_label(q) << "_frac";
    out << ",S_min_frac,var_frac\n";
    for (std::size_t i = 0; i < curve.tau.size(); ++i) {
        out << format_number(curve.tau[i]) << ',' << format_number(curve.m_frac[i]) << ','
            << format_number(curve.emitted_frac[i]) << ',' << format_number(curve.S_frac[i]);
        for (const auto& [q, values] : curve.Sq_frac)
            if (!std::isinf(q)) out << ',' << format_number(values[i]);
        out << ',' << format_number(curve.S_min_frac[i]) << ',' << format_number(curve.var_frac[i]) << '\n';
    }
}

std::vector<double> parse_tau_grid(std::string_view spec) {
    const std::string text(trim(spec));
    std::vector<std::string> parts;
    {
        std::stringstream ss(text);
        std::string piece;
        while (std::getline(ss, piece, ':')) parts.push_back(std::string(trim(piece)));
    }
    std::vector<double> grid;
    if (parts.size() == 1) {
        for (const auto& it : split_list(text)) grid.push_back(parse_double("tau", it));
    } else {
        const bool log = parts.front() == "log";
        if (parts.size() != (log ? 4u : 3u))
            throw std::invalid_argument("tau grid: expected lo:hi:count or log:lo:hi:count");
        const std::size_t off = log ? 1 : 0;
        const double lo = parse_double("tau", parts[off]);
        const double hi = parse_double("tau", parts[off + 1]);
        const Index count = parse_count("tau", parts[off + 2]);
        if (count < 2 || !(hi > lo) || (log && !(lo > 0)))
            throw std::invalid_argument("tau grid: need count >= 2, hi > lo, and lo > 0 for log grids");
        for (Index i = 0; i < count; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(count - 1);
            grid.push_back(log ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
        }
    }
    if (grid.empty()) throw std::invalid_argument("tau grid: empty");
    for (double tau : grid)
        if (!(tau >= 0)) throw std::invalid_argument("tau grid: values must be >= 0");
    return grid;
}

std::string series_file_stem(const Scenario& scenario, const ModelParams& params) {
    return scenario.name + "_M" + std::to_string(params.M) + "_N" + std::to_string(params.N) + "_g" +
           format_number(params.g);
}

RunOutputs run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
    scenario.validate();
    const auto started = std::chrono::steady_clock::now();
    const std::filesystem::path dir = out_dir / scenario.name;
    std::filesystem::create_directories(dir);
    const std::vector<double> times = scenario.time_grid();
    const double t_max = times.empty() ? 0.0 : times.back();

    std::vector<double> orders;
    if (scenario.observables.renyi) orders = scenario.renyi_orders;

    using nlohmann::ordered_json;
    ordered_json meta;
    meta["tool"] = "pagecurve";
    meta["version"] = PAGECURVE_VERSION;
    meta["scenario"] = {
        {"name", scenario.name},
        {"M", scenario.M},
        {"N", scenario.N},
        {"g", scenario.g},
        {"t_sys", scenario.t_sys},
        {"t_env", scenario.t_env},
        {"t_max", scenario.t_max},
        {"dt", scenario.dt},
        {"times", scenario.times},
        {"observables",
         {{"m", scenario.observables.m},
          {"current", scenario.observables.current},
          {"entropy", scenario.observables.entropy},
          {"renyi", scenario.observables.renyi},
          {"variance", scenario.observables.variance},
          {"bound", scenario.observables.bound}}},
        {"renyi", [&] {
             std::vector<std::string> labels;
             for (double q : scenario.renyi_orders) labels.push_back(std::isinf(q) ? "inf" : format_number(q));
             return labels;
         }()},
        {"analytic", scenario.analytic},
        {"tau_max", scenario.tau_max},
        {"tau_points", scenario.tau_points},
        {"threads", scenario.threads},
    };
    meta["samples"] = times.size();
    meta["runs"] = ordered_json::array();

    RunOutputs outputs;
    for (const ModelParams& params : scenario.sweep()) {
        const std::string stem = series_file_stem(scenario, params);
        try {
            const TimeSeries series =
                compute_series(params, times, orders, scenario.observables.variance, scenario.threads);
            const auto path = dir / (stem + ".csv");
            std::ofstream csv(path);
            if (!csv) throw std::runtime_error("cannot write " + path.string());
            write_series_csv(csv, series, scenario.observables, orders);
            if (!csv) throw std::runtime_error("write failed for " + path.string());
            outputs.csv.push_back(path);

            const ScenarioDiagnostics diag = validate_scenario(params, t_max);
            const rlm::DisjointnessReport disjoint = rlm::disjointness_report(params);
            meta["runs"].push_back({
                {"csv", path.filename().string()},
                {"M", params.M},
                {"N", params.N},
                {"g", params.g},
                {"t_sys", params.t_sys},
                {"t_env", params.t_env},
                {"total_energy_variance", total_energy_variance_t0(params)},
                {"diagnostics",
                 {{"return_time", diag.return_time},
                  {"before_return", diag.before_return},
                  {"N_over_M2", diag.env_over_m2},
                  {"weak_coupling", diag.weak_coupling},
                  {"warnings", diag.warnings}}},
                {"disjointness",
                 {{"threshold", disjoint.threshold},
                  {"violating_fraction", disjoint.violating_fraction},
                  {"min_ratio", disjoint.min_ratio},
                  {"band_edge_estimate", disjoint.band_edge_estimate}}},
            });
        } catch (const std::exception& e) {
            throw std::runtime_error("scenario " + scenario.name + " (M=" + std::to_string(params.M) +
                                     ", N=" + std::to_string(params.N) + ", g=" + format_number(params.g) +
                                     "): " + e.what());
        }
    }

    if (scenario.analytic) {
        std::vector<double> tau(static_cast<std::size_t>(scenario.tau_points));
        for (std::size_t i = 0; i < tau.size(); ++i)
            tau[i] = scenario.tau_max * static_cast<double>(i) / static_cast<double>(tau.size() - 1);
        const std::vector<double> analytic_orders = {2.0};
        // The exact chain spectrum 2 t_sys cos k sets the variance scale of the numerics.
        const auto curve = rlm::parametric_page_curve(tau, analytic_orders, LevelConvention::Chain);
        const auto path = dir / (scenario.name + "_analytic.csv");
        std::ofstream csv(path);
        if (!csv) throw std::runtime_error("cannot write " + path.string());
        write_analytic_csv(csv, curve);
        outputs.analytic = path;
        meta["analytic_csv"] = path.filename().string();
        meta["analytic_variance_levels"] = "2 t_sys cos k";
        const auto peak = rlm::locate_peak(rlm::entropy_frac);
        meta["analytic_peak"] = {{"tau", peak.tau}, {"S_frac", peak.value}, {"emitted_frac", peak.emitted_frac}};
    }

    meta["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    outputs.metadata = dir / (scenario.name + ".json");
    std::ofstream json(outputs.metadata);
    if (!json) throw std::runtime_error("cannot write " + outputs.metadata.string());
    json << meta.dump(2) << '\n';
    return outputs;
}

}  // namespace pagecurve
