#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "fctl/heavy_traffic.hpp"
#include "fctl/json_io.hpp"
#include "fctl/reproduce.hpp"
#include "fctl/table.hpp"

using namespace fctl;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd =
        std::string(FCTL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string scratch_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("fctl_cli_test_" + name))
        .string();
}

std::string write_temp(const std::string& name, const std::string& body) {
    const std::string path = scratch_path(name);
    std::ofstream out(path);
    out << body;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const auto j = json::parse(R"({
        "cycle": 100, "lost_time": 5,
        "lanes": [
            {"arrival": {"kind": "poisson", "mean": 0.4}, "green": 46.87},
            {"arrival": {"kind": "geometric", "mean": 0.4}, "weight": 2}
        ]})");
    const auto cfg = parse_config(j);
    CHECK(cfg.spec.cycle == 100.0);
    CHECK(cfg.spec.lost_time == 5.0);
    REQUIRE(cfg.spec.lanes.size() == 2);
    CHECK(cfg.spec.lanes[0].arrival.kind() == ArrivalKind::poisson);
    CHECK(cfg.spec.lanes[1].weight == 2.0);
    REQUIRE(cfg.greens[0].has_value());
    CHECK(cfg.greens[0]->floor_slots == 46);
    CHECK(cfg.greens[0]->p_floor == doctest::Approx(0.13).epsilon(1e-12));
    CHECK(!cfg.greens[1].has_value());
}

TEST_CASE("config schema violations are rejected") {
    CHECK_THROWS_AS(parse_config(json::parse(
                        R"({"cycle": 10, "lanes": [], "junk": 1})")),
                    config_error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"lanes": [
        {"arrival": {"kind": "poisson", "mean": 0.3}}]})")),
                    config_error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"cycle": 10, "lanes": [
        {"arrival": {"kind": "poisson", "mean": 0.3}, "color": "red"}]})")),
                    config_error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"cycle": 10, "lanes": [
        {"arrival": {"kind": "uniform", "mean": 0.3}}]})")),
                    config_error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"cycle": 10, "lanes": [
        {"arrival": {"kind": "poisson", "mean": 0.3, "variance": 1}}]})")),
                    config_error);
    // bad mixture object
    CHECK_THROWS_AS(parse_config(json::parse(R"({"cycle": 10, "lanes": [
        {"arrival": {"kind": "poisson", "mean": 0.3},
         "green": {"floor": 4, "ceil": 6, "p": 0.5}}]})")),
                    config_error);
}

TEST_CASE("value formatting is fixed to six significant digits") {
    CHECK(format_value(13.935034) == "13.935");
    CHECK(format_value(0.000123456789) == "0.000123457");
    CHECK(format_value(100.0) == "100");
    CHECK(format_value(-2.0) == "-2");
}

TEST_CASE("table rendering") {
    Table t;
    t.columns = {"a", "b"};
    t.push_row({"1", "2"});
    CHECK(to_csv(t) == "a,b\n1,2\n");
    CHECK(to_markdown(t) == "| a | b |\n| --- | --- |\n| 1 | 2 |\n");
}

TEST_CASE("reproduction output is byte-stable across runs") {
    for (int id : {1, 3, 5}) {
        const std::string a = to_csv(reproduce_table(id));
        const std::string b = to_csv(reproduce_table(id));
        CHECK(a == b);
        CHECK(!a.empty());
    }
}

TEST_CASE("cli eval reports the reference metrics end to end") {
    // single Poisson(0.3) queue at beta = 1, g = 30 (cycle from the scaling rule)
    const double c = cycle_for_green(1.0, 30, ArrivalModel::poisson(0.3));
    char body[256];
    std::snprintf(body, sizeof body,
                  R"({"cycle": %.12f, "lanes": [{"arrival": )"
                  R"({"kind": "poisson", "mean": 0.3}, "green": 30}]})",
                  c);
    const std::string cfg = write_temp("eval_row.json", body);
    REQUIRE(run_cli("eval --config " + cfg + " --out " + scratch_path("eval.csv")) == 0);
    const std::string csv = slurp(scratch_path("eval.csv"));

    auto metric = [&](const std::string& name) {
        const auto pos = csv.find("\n" + name + ",");
        REQUIRE(pos != std::string::npos);
        return std::stod(csv.substr(pos + name.size() + 2));
    };
    CHECK(metric("p0_transform") == doctest::Approx(0.8253).epsilon(1e-3));
    CHECK(metric("p0_approx") == doctest::Approx(0.8005).epsilon(1e-3));
    CHECK(metric("mean_transform") == doctest::Approx(0.6960).epsilon(1e-3));
    CHECK(metric("mean_first_order") == doctest::Approx(0.6319).epsilon(1e-3));
    CHECK(metric("mean_refined") == doctest::Approx(0.7225).epsilon(1e-3));
}

TEST_CASE("cli end to end: exit codes and file output") {
    const std::string good = write_temp("good.json", R"({
        "cycle": 30,
        "lanes": [{"arrival": {"kind": "poisson", "mean": 0.3}, "green": 10}]})");
    CHECK(run_cli("eval --config " + good) == 0);
    CHECK(run_cli("eval --config " + good + " --metrics beta,mean_oracle") == 0);
    CHECK(run_cli("eval --config " + good + " --metrics no_such_metric") == 2);
    CHECK(run_cli("eval --config does_not_exist.json") == 2);

    const std::string bad_schema =
        write_temp("bad.json", R"({"cycle": 30, "wat": 1, "lanes": []})");
    CHECK(run_cli("eval --config " + bad_schema) == 2);

    const std::string unstable = write_temp("unstable.json", R"({
        "cycle": 40,
        "lanes": [{"arrival": {"kind": "poisson", "mean": 0.3}, "green": 10}]})");
    CHECK(run_cli("eval --config " + unstable) == 3);

    const std::string alloc = write_temp("alloc.json", R"({
        "cycle": 100, "lost_time": 5,
        "lanes": [{"arrival": {"kind": "poisson", "mean": 0.4}},
                  {"arrival": {"kind": "geometric", "mean": 0.4}}]})");
    CHECK(run_cli("allocate --config " + alloc + " --method first-order") == 0);
    CHECK(run_cli("allocate --config " + alloc +
                  " --method weighted-numerical --exact") == 0);
    CHECK(run_cli("allocate --config " + alloc + " --method no-such") == 2);

    const std::string infeasible_alloc = write_temp("infeasible.json", R"({
        "cycle": 20, "lost_time": 15,
        "lanes": [{"arrival": {"kind": "poisson", "mean": 0.4}},
                  {"arrival": {"kind": "geometric", "mean": 0.4}}]})");
    CHECK(run_cli("allocate --config " + infeasible_alloc) == 3);

    CHECK(run_cli("reproduce --table 1 --out " + scratch_path("table1.csv")) == 0);
    const std::string csv = slurp(scratch_path("table1.csv"));
    CHECK(csv.rfind("g,c,p0_exact", 0) == 0);
    CHECK(run_cli("reproduce --table 0") == 2);
    CHECK(run_cli("reproduce --table 1 --format md") == 0);
}

TEST_CASE("quadrature cap environment variable turns starvation into exit 4") {
    const std::string cfg = write_temp("cap.json", R"({
        "cycle": 98.190848,
        "lanes": [{"arrival": {"kind": "poisson", "mean": 0.3}, "green": 30}]})");
    const std::string cmd = std::string("FCTL_QUADRATURE_MAX=256 ") +
                            FCTL_CLI_PATH + " eval --config " + cfg +
                            " >/dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 4);
    CHECK(run_cli("eval --config " + cfg) == 0);  // default cap converges
}
