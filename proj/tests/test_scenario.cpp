#include "pagecurve/scenario.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace pagecurve;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("pagecurve_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Scenario small_scenario() {
    std::istringstream text(R"(
# small smoke scenario
name = smoke
M = 4, 6
N = 40
g = 0.5
t_env = 2
t_max = 10
dt = 0.5
observables = m, current, entropy, renyi, variance, bound
renyi = 2, inf
analytic = true
tau_points = 11
tau_max = 5
)");
    return parse_scenario(text);
}

}  // namespace

TEST_CASE("presets") {
    const auto names = preset_names();
    CHECK(names.size() == 7);
    for (const auto& n : names) {
        const Scenario s = preset(n);
        CHECK(s.name == n);
        CHECK_NOTHROW(s.validate());
        // Only the finite-size preset is meant to run past the reflection return.
        if (n == "fig9_finite_size") continue;
        for (const auto& p : s.sweep()) CHECK(s.t_max < p.N / p.t_env);
    }
    const Scenario fig3 = preset("fig3_m_decay");
    CHECK(fig3.M == std::vector<Index>{25, 50, 75});
    CHECK(fig3.g == std::vector<double>{0.5});
    CHECK(fig3.N == std::vector<Index>{10000});
    CHECK(fig3.t_env == 4.0);
    const Scenario fig9 = preset("fig9_finite_size");
    CHECK(fig9.sweep().size() == 6);
    CHECK(fig9.g == std::vector<double>{0.65});
    CHECK(fig9.t_env == 1.0);
    CHECK(preset("fig4_svn_vs_emitted").analytic);
    CHECK_THROWS_AS(preset("fig99"), std::invalid_argument);
}

TEST_CASE("scenario parsing") {
    const Scenario s = small_scenario();
    CHECK(s.name == "smoke");
    CHECK(s.M == std::vector<Index>{4, 6});
    CHECK(s.sweep().size() == 2);
    CHECK(s.time_grid().size() == 21);
    CHECK(s.time_grid().back() == 10.0);
    CHECK(s.renyi_orders.size() == 2);
    CHECK(std::isinf(s.renyi_orders[1]));
    CHECK(s.observables.variance);

    std::istringstream from_preset("preset = fig9_finite_size\nN = 75\n");
    const Scenario p = parse_scenario(from_preset);
    CHECK(p.name == "fig9_finite_size");
    CHECK(p.N == std::vector<Index>{75});
    CHECK(p.g == std::vector<double>{0.65});

    std::istringstream explicit_times("times = 0, 1, 4\n");
    CHECK(parse_scenario(explicit_times).time_grid() == std::vector<double>{0, 1, 4});

    for (const char* bad : {"bogus = 1\n", "M = -3\n", "g = abc\n", "just text\n", "observables = spin\n",
                            "t_max = 1, 2\n"}) {
        std::istringstream in(bad);
        CHECK_THROWS_AS(parse_scenario(in), std::invalid_argument);
    }
    Scenario invalid;
    invalid.dt = 0;
    CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
    invalid = Scenario{};
    invalid.g = {};
    CHECK_THROWS_AS(invalid.validate(), std::invalid_argument);
}

TEST_CASE("number formatting and tau grids") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(0.5) == "0.5");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(2400) == "2400");

    CHECK(parse_tau_grid("0:1:5") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
    CHECK(parse_tau_grid("0.5,2,8") == std::vector<double>{0.5, 2, 8});
    const auto lg = parse_tau_grid("log:0.01:100:5");
    REQUIRE(lg.size() == 5);
    CHECK(lg[2] == doctest::Approx(1.0));
    CHECK(lg[4] == doctest::Approx(100.0));
    CHECK_THROWS_AS(parse_tau_grid("log:0:1:3"), std::invalid_argument);
    CHECK_THROWS_AS(parse_tau_grid("1:2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_tau_grid("-1,2"), std::invalid_argument);
}

TEST_CASE("series CSV columns") {
    const ModelParams params{4, 40, 1.0, 2.0, 0.5};
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(0.5 * i);
    const std::vector<double> orders{2.0, kRenyiInfinity};
    const TimeSeries series = compute_series(params, times, orders, true);
    CHECK(series.current.size() == times.size());

    std::ostringstream out;
    ObservableSet all{.m = true, .current = true, .entropy = true, .renyi = true, .variance = true, .bound = true};
    write_series_csv(out, series, all, orders);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "time,m,m/M,emitted,current,S_vN,S_vN/M,S_q2,S_q2/M,S_min,S_min/M,Henv_mean,dHenv2,dHenv2/M,bound");
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    CHECK(rows == 11);

    std::ostringstream minimal;
    write_series_csv(minimal, series, ObservableSet{.m = true, .entropy = false}, {});
    CHECK(minimal.str().substr(0, minimal.str().find('\n')) == "time,m,m/M,emitted");

    const std::vector<double> tau{0.0, 1.0};
    const std::vector<double> both{2.0, kRenyiInfinity};
    std::ostringstream analytic;
    write_analytic_csv(analytic, rlm::parametric_page_curve(tau, both));
    CHECK(analytic.str().substr(0, analytic.str().find('\n')) ==
          "tau,m_frac,emitted_frac,S_frac,S_q2_frac,S_min_frac,var_frac");

    const std::vector<double> uneven{0, 1, 3};
    CHECK(compute_series(params, uneven, {}, false).current.empty());
}

TEST_CASE("run_scenario writes CSV and metadata deterministically") {
    const Scenario s = small_scenario();
    const fs::path a = scratch_dir("a"), b = scratch_dir("b");
    const RunOutputs first = run_scenario(s, a);
    const RunOutputs second = run_scenario(s, b);
    REQUIRE(first.csv.size() == 2);
    REQUIRE(second.csv.size() == 2);
    CHECK(first.csv[0].filename() == "smoke_M4_N40_g0.5.csv");
    for (std::size_t i = 0; i < first.csv.size(); ++i) CHECK(slurp(first.csv[i]) == slurp(second.csv[i]));
    REQUIRE(first.analytic);
    CHECK(slurp(*first.analytic) == slurp(*second.analytic));
    CHECK(slurp(*first.analytic).rfind("tau,m_frac,emitted_frac,S_frac,S_q2_frac,S_min_frac,var_frac\n", 0) == 0);

    const auto meta = nlohmann::json::parse(slurp(first.metadata));
    CHECK(meta["scenario"]["name"] == "smoke");
    CHECK(meta["runs"].size() == 2);
    CHECK(meta["runs"][0]["total_energy_variance"].get<double>() == doctest::Approx(0.25));
    CHECK(meta["runs"][0]["diagnostics"]["before_return"] == true);
    CHECK(meta.contains("version"));

    Scenario threaded = s;
    threaded.threads = 3;
    const fs::path c = scratch_dir("c");
    const RunOutputs third = run_scenario(threaded, c);
    for (std::size_t i = 0; i < first.csv.size(); ++i) CHECK(slurp(first.csv[i]) == slurp(third.csv[i]));

    for (const auto& dir : {a, b, c}) fs::remove_all(dir);
}

TEST_CASE("run_scenario reports the failing coordinates") {
    Scenario s;
    s.name = "broken";
    s.M = {3};
    s.N = {5};
    s.g = {0.5};
    s.t_sys = -1.0;
    s.t_max = 1;
    const fs::path dir = scratch_dir("broken");
    CHECK_THROWS_AS(run_scenario(s, dir), std::exception);
    fs::remove_all(dir);
}
