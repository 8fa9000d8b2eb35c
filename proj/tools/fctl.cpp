// Command-line front end: single-instance evaluation, green-time allocation,
// and reproduction of the library's reference tables.
//
// Exit codes: 0 success, 2 config error, 3 infeasible model, 4 numeric failure.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fctl/allocation.hpp"
#include "fctl/delay.hpp"
#include "fctl/exact.hpp"
#include "fctl/heavy_traffic.hpp"
#include "fctl/json_io.hpp"
#include "fctl/reproduce.hpp"
#include "fctl/slot_chain.hpp"
#include "fctl/table.hpp"
#include "fctl/transform.hpp"

namespace {

using namespace fctl;

struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    int lane = 0;
    std::vector<std::string> metrics;
    AllocationMethod method = AllocationMethod::first_order;
    RoundingPolicy rounding = RoundingPolicy::randomized;
    WebsterForm webster_form = WebsterForm::classical;
    bool exact = false;
    int table_id = 0;
};

void emit(const Table& table, const Options& opt) {
    const std::string text =
        opt.format == "md" ? to_markdown(table) : to_csv(table);
    if (opt.out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(opt.out_path, std::ios::binary);
        if (!out) throw config_error("cannot open output file: " + opt.out_path);
        out << text;
    }
}

FctlInstance lane_instance(const RunConfig& cfg, int lane) {
    if (lane < 0 || lane >= static_cast<int>(cfg.spec.lanes.size()))
        throw config_error("lane index " + std::to_string(lane) +
                           " out of range (config has " +
                           std::to_string(cfg.spec.lanes.size()) + " lanes)");
    if (!cfg.greens[lane])
        throw config_error("lane " + std::to_string(lane) +
                           ": a green time is required for eval");
    return FctlInstance(cfg.spec.lanes[lane].arrival, *cfg.greens[lane],
                        cfg.spec.cycle);
}

Table run_eval(const RunConfig& cfg, const Options& opt) {
    const FctlInstance inst = lane_instance(cfg, opt.lane);
    const bool integer_cycle = inst.integer_cycle();
    const double beta = inst.beta();

    std::set<std::string> wanted(opt.metrics.begin(), opt.metrics.end());
    auto selected = [&](const std::string& name) {
        return wanted.empty() || wanted.count(name) > 0;
    };
    const std::set<std::string> known{
        "beta",        "load",          "p0_transform",     "p0_oracle",
        "p0_approx",   "mean_transform", "mean_oracle",
        "mean_first_order", "mean_refined"};
    for (const auto& name : wanted)
        if (!known.count(name))
            throw config_error("unknown metric \"" + name + "\"");
    for (const auto& name : wanted)
        if ((name == "p0_oracle" || name == "mean_oracle") && !integer_cycle)
            throw config_error("metric \"" + name +
                               "\" needs an integer cycle (lane " +
                               std::to_string(opt.lane) + ")");

    Table t;
    t.columns = {"metric", "value"};
    auto row = [&](const std::string& name, double value) {
        if (selected(name)) t.push_row({name, format_value(value)});
    };
    row("beta", beta);
    row("load", inst.load());
    if (selected("p0_transform")) row("p0_transform", overflow_pgf(inst, 0.0).real());
    if (integer_cycle && selected("p0_oracle"))
        row("p0_oracle", stationary_overflow(inst).pmf.at(0));
    row("p0_approx", p_empty_approx(beta));
    if (selected("mean_transform")) row("mean_transform", mean_overflow(inst));
    if (integer_cycle && selected("mean_oracle"))
        row("mean_oracle", stationary_overflow(inst).mean);
    const HeavyTrafficPoint pt{beta, inst.cycle(), inst.green().mean()};
    row("mean_first_order", mean_first_order(pt, inst.arrival()));
    row("mean_refined", mean_refined(pt, inst.arrival()));
    return t;
}

Table run_allocate(const RunConfig& cfg, const Options& opt) {
    const IntersectionSpec& spec = cfg.spec;
    AllocationResult result;
    switch (opt.method) {
        case AllocationMethod::first_order:
            result = first_order_allocation(spec);
            break;
        case AllocationMethod::refined:
            result = refined_allocation(spec);
            break;
        case AllocationMethod::weighted_closed:
            result = weighted_closed_form(spec);
            break;
        case AllocationMethod::weighted_numerical:
            result = weighted_numerical(spec);
            break;
        case AllocationMethod::brute_force: {
            bool weighted = false;
            for (const auto& l : spec.lanes)
                if (l.weight != 1.0) weighted = true;
            result = brute_force_integer(
                spec, weighted ? AllocationObjective::weighted_sum_mean_overflow
                               : AllocationObjective::sum_mean_overflow);
            break;
        }
        case AllocationMethod::webster:
            result = webster_allocation(spec);
            break;
    }
    const std::vector<GreenTime> rounded =
        round_greens(spec, result.greens, opt.rounding);

    Table t;
    t.columns = {"lane", "beta", "green", "g_floor", "g_ceil", "p_floor",
                 "mean_predicted"};
    if (opt.exact) {
        t.columns.push_back("mean_exact");
        t.columns.push_back("delay");
    }
    std::vector<double> exact_means(spec.lanes.size(), 0.0);
    std::vector<double> green_means(spec.lanes.size(), 0.0);
    for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
        const ArrivalModel& m = spec.lanes[i].arrival;
        const HeavyTrafficPoint pt{result.betas[i], spec.cycle, result.greens[i]};
        std::string predicted;
        switch (opt.method) {
            case AllocationMethod::refined:
                predicted = format_value(mean_refined(pt, m));
                break;
            case AllocationMethod::brute_force:
                predicted = format_value(mean_overflow(FctlInstance(
                    m, GreenTime::deterministic(static_cast<int>(result.greens[i])),
                    spec.cycle)));
                break;
            case AllocationMethod::webster:
                break;  // Webster predicts delays, not overflow queues
            default:
                predicted = format_value(mean_first_order(pt, m));
                break;
        }
        std::vector<std::string> row{
            format_value(static_cast<double>(i + 1)),
            format_value(result.betas[i]),
            format_value(result.greens[i]),
            format_value(static_cast<double>(rounded[i].floor_slots)),
            format_value(static_cast<double>(rounded[i].ceil_slots)),
            format_value(rounded[i].p_floor),
            predicted};
        if (opt.exact) {
            const FctlInstance inst(m, rounded[i], spec.cycle);
            exact_means[i] = exact_mean_overflow(inst);
            green_means[i] = rounded[i].mean();
            row.push_back(format_value(exact_means[i]));
            row.push_back(format_value(
                mean_delay(m.mean(), m.variance(), spec.cycle, green_means[i],
                           exact_means[i])));
        }
        t.push_row(std::move(row));
    }
    if (opt.exact) {
        const auto rep = intersection_delay(spec, green_means, exact_means);
        std::vector<std::string> row(t.columns.size(), "");
        row[0] = "all";
        row.back() = format_value(rep.aggregate);
        t.push_row(std::move(row));
    }
    return t;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-cycle traffic-light queue: exact and heavy-traffic "
                 "analysis, green-time allocation"};
    app.require_subcommand(1);

    Options opt;

    const std::map<std::string, AllocationMethod> method_names{
        {"first-order", AllocationMethod::first_order},
        {"refined", AllocationMethod::refined},
        {"weighted-closed", AllocationMethod::weighted_closed},
        {"weighted-numerical", AllocationMethod::weighted_numerical},
        {"brute-force", AllocationMethod::brute_force},
        {"webster", AllocationMethod::webster}};
    const std::map<std::string, RoundingPolicy> rounding_names{
        {"floor", RoundingPolicy::floor},
        {"nearest", RoundingPolicy::nearest},
        {"randomized", RoundingPolicy::randomized}};
    const std::map<std::string, WebsterForm> webster_names{
        {"printed", WebsterForm::printed},
        {"classical", WebsterForm::classical}};

    auto* eval = app.add_subcommand(
        "eval", "evaluate one lane: exact and approximate overflow metrics");
    eval->add_option("--config", opt.config_path, "intersection config (JSON)")
        ->required();
    eval->add_option("--lane", opt.lane, "lane index (default 0)");
    eval->add_option("--metrics", opt.metrics,
                     "metric names to report (default: all applicable)")
        ->delimiter(',');

    auto* allocate = app.add_subcommand(
        "allocate", "divide green time among the lanes of an intersection");
    allocate->add_option("--config", opt.config_path, "intersection config (JSON)")
        ->required();
    allocate
        ->add_option("--method", opt.method, "allocation rule")
        ->transform(CLI::CheckedTransformer(method_names, CLI::ignore_case));
    allocate->add_option("--rounding", opt.rounding, "green-time rounding policy")
        ->transform(CLI::CheckedTransformer(rounding_names, CLI::ignore_case));
    allocate->add_flag("--exact", opt.exact,
                       "add exact mean overflow and delay columns");

    auto* reproduce = app.add_subcommand(
        "reproduce", "emit one of the built-in reference tables (1..9)");
    reproduce->add_option("--table", opt.table_id, "table id in 1..9")
        ->required();

    for (auto* cmd : {eval, allocate, reproduce}) {
        cmd->add_option("--format", opt.format, "output format")
            ->check(CLI::IsMember({"csv", "md"}));
        cmd->add_option("--out", opt.out_path, "output file (default stdout)");
        cmd->add_option("--webster-form", opt.webster_form,
                        "Webster delay formula variant")
            ->transform(CLI::CheckedTransformer(webster_names, CLI::ignore_case));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (eval->parsed()) {
            emit(run_eval(load_config(opt.config_path), opt), opt);
        } else if (allocate->parsed()) {
            const RunConfig cfg = load_config(opt.config_path);
            cfg.spec.validate();
            emit(run_allocate(cfg, opt), opt);
        } else if (reproduce->parsed()) {
            emit(reproduce_table(opt.table_id, opt.webster_form), opt);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const infeasible_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const numeric_error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
