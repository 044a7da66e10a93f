#include <algorithm>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trackfind/bench.hpp"
#include "trackfind/generator.hpp"
#include "trackfind/io.hpp"
#include "trackfind/plot.hpp"
#include "trackfind/solvers.hpp"

namespace {

using nlohmann::json;
using namespace trackfind;

json report_to_json(const SolveReport& report) {
    json out{
        {"method", report.method},
        {"objective", report.objective},
        {"energy", report.energy},
        {"feasible", report.feasible},
        {"wall_time_seconds", report.wall_time_seconds},
        {"seed", report.seed},
        {"segments_selected", std::count(report.assignment.begin(), report.assignment.end(), 1)},
    };
    if (report.raw_objective) out["raw_objective"] = *report.raw_objective;
    if (report.raw_feasible) out["raw_feasible"] = *report.raw_feasible;
    if (!report.tracks.empty()) out["tracks"] = report.tracks;
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Track-finding optimization toolkit: generate benchmark instances, "
                 "solve them with annealing / exact search / greedy, report gaps"};
    app.require_subcommand(1);

    // --- gen ---
    auto* gen = app.add_subcommand("gen", "Generate synthetic instance files");
    GeneratorConfig gen_config;
    FilterConfig gen_filter;
    std::string gen_out = "instance.tf";
    int gen_count = 1;
    std::string preset_name;
    gen->add_option("--tracks", gen_config.num_tracks, "Tracks (= hits per layer)");
    gen->add_option("--layers", gen_config.num_layers, "Detector layers")
        ->check(CLI::Range(3, 64));
    gen->add_option("--spacing", gen_config.layer_spacing, "Layer spacing [um]");
    gen->add_option("--curvature", gen_config.curvature, "Max per-layer turn [rad]");
    gen->add_option("--jitter", gen_config.transverse_jitter, "Per-hit transverse noise [um]");
    gen->add_option("--seed", gen_config.seed, "Generator seed");
    gen->add_option("--preset", preset_name, "Scale preset: small, medium or large")
        ->check(CLI::IsMember({"small", "medium", "large"}));
    gen->add_option("--max-skip", gen_filter.max_layer_skip, "Max missing layers per segment")
        ->check(CLI::Range(0, 2));
    gen->add_option("--max-angle", gen_filter.max_turn_angle, "Triplet turn cutoff [rad]");
    gen->add_option("--count", gen_count, "Number of instances (suffix _NN added)")
        ->check(CLI::PositiveNumber);
    gen->add_option("--out", gen_out, "Output file (or stem when --count > 1)");

    // --- solve ---
    auto* solve = app.add_subcommand("solve", "Solve one instance with one method");
    std::string solve_path, solve_method = "sa";
    double solve_alpha = 100.0, solve_gamma = 1.0, solve_time_limit = 360.0;
    int solve_exact_cap = 128;
    AnnealSchedule solve_schedule;
    solve->add_option("instance", solve_path, "Instance file")->required();
    solve->add_option("--method", solve_method, "sa, exact or greedy")
        ->check(CLI::IsMember({"sa", "exact", "greedy"}));
    solve->add_option("--alpha", solve_alpha, "Objective weight");
    solve->add_option("--gamma", solve_gamma, "Penalty weight (sa)");
    solve->add_option("--seed", solve_schedule.seed, "Annealer seed");
    solve->add_option("--sweeps", solve_schedule.sweeps, "Annealer temperature steps");
    solve->add_option("--restarts", solve_schedule.restarts, "Annealer restarts");
    solve->add_option("--t-initial", solve_schedule.initial_temperature,
                      "Initial temperature (default: auto)");
    solve->add_option("--t-final", solve_schedule.final_temperature,
                      "Final temperature (default: 1e-3 x initial)");
    solve->add_option("--time-limit", solve_time_limit, "Exact-search time limit [s]");
    solve->add_option("--exact-cap", solve_exact_cap, "Exact-search hits/layer cap (0 = off)");

    // --- bench ---
    auto* bench = app.add_subcommand("bench", "Run a method suite over instances, emit CSV");
    std::vector<std::string> bench_paths;
    std::string bench_methods = "sa,exact,greedy";
    std::string bench_out = "bench.csv";
    BenchConfig bench_config;
    bench->add_option("instances", bench_paths, "Instance files")->required();
    bench->add_option("--methods", bench_methods, "Comma-separated subset of sa,exact,greedy");
    bench->add_option("--alpha", bench_config.alpha, "Objective weight");
    bench->add_option("--gamma", bench_config.gamma, "Penalty weight (sa)");
    bench->add_option("--seed", bench_config.schedule.seed, "Master seed");
    bench->add_option("--sweeps", bench_config.schedule.sweeps, "Annealer temperature steps");
    bench->add_option("--restarts", bench_config.schedule.restarts, "Annealer restarts");
    bench->add_option("--time-limit", bench_config.time_limit_seconds,
                      "Per-solve time limit [s]");
    bench->add_option("--exact-cap", bench_config.exact_cap,
                      "Exact-search hits/layer cap (0 = off)");
    bench->add_option("--out", bench_out, "Output CSV path");

    // --- plot ---
    auto* plot = app.add_subcommand("plot", "Render an SVG chart from a bench CSV");
    std::string plot_csv_path, plot_axis = "gap", plot_out = "plot.svg";
    plot->add_option("csv", plot_csv_path, "Bench CSV file")->required();
    plot->add_option("--y", plot_axis, "Y axis: gap or time")
        ->check(CLI::IsMember({"gap", "time"}));
    plot->add_option("--out", plot_out, "Output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;  // --help exits 0, usage errors 1
    }

    if (gen->parsed()) {
        if (!preset_name.empty()) {
            gen_config.preset = preset_name == "small"    ? GeneratorConfig::Preset::small
                                : preset_name == "medium" ? GeneratorConfig::Preset::medium
                                                          : GeneratorConfig::Preset::large;
        }
        for (int i = 0; i < gen_count; ++i) {
            GeneratorConfig config = gen_config;
            config.seed = gen_config.seed + static_cast<std::uint64_t>(i);
            std::string path = gen_out;
            if (gen_count > 1) {
                std::string stem = path;
                std::string ext;
                if (const auto dot = path.find_last_of('.');
                    dot != std::string::npos && path.find('/', dot) == std::string::npos) {
                    stem = path.substr(0, dot);
                    ext = path.substr(dot);
                }
                char suffix[16];
                std::snprintf(suffix, sizeof(suffix), "_%02d", i + 1);
                path = stem + suffix + (ext.empty() ? ".tf" : ext);
            }
            const Instance inst = generate_event(config, gen_filter);
            write_instance(inst, path);
            std::cout << path << ": " << inst.num_hits() << " hits, " << inst.num_segments()
                      << " segments, " << inst.triplets.size() << " triplets\n";
        }
        return 0;
    }

    if (solve->parsed()) {
        const Instance inst = read_instance(solve_path);
        SolveReport report;
        if (solve_method == "sa") {
            report = anneal_tracks(inst, solve_alpha, solve_gamma, solve_schedule);
        } else if (solve_method == "exact") {
            ExactOptions options;
            options.max_hits_per_layer = solve_exact_cap;
            options.time_limit_seconds = solve_time_limit;
            report = exact_search(inst, solve_alpha, options);
        } else {
            report = greedy_baseline(inst, solve_alpha);
        }
        json out = report_to_json(report);
        if (inst.has_truth()) {
            const double reference = solve_alpha * true_cost(inst);
            out["true_objective"] = reference;
            if (report.feasible && reference != 0.0) {
                out["gap_percent"] = gap(report.objective, reference);
            }
        }
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (bench->parsed()) {
        bench_config.methods.clear();
        std::size_t start = 0;
        while (start <= bench_methods.size()) {
            const auto comma = bench_methods.find(',', start);
            const std::string method = bench_methods.substr(start, comma - start);
            if (!method.empty()) bench_config.methods.push_back(method);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        const BenchResult result = run_bench(bench_paths, bench_config);
        std::ofstream csv(bench_out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open '" + bench_out + "' for writing");
        csv << to_csv(result);
        for (const BenchRow& avg : result.averages) {
            std::cout << avg.method << ": ATT=" << avg.tt << "s";
            if (avg.gap_percent) std::cout << " AGAP=" << *avg.gap_percent << "%";
            std::cout << "\n";
        }
        std::cout << "wrote " << bench_out << "\n";
        return 0;
    }

    if (plot->parsed()) {
        plot_csv(plot_csv_path, plot_axis == "time" ? PlotAxis::time : PlotAxis::gap, plot_out);
        std::cout << "wrote " << plot_out << "\n";
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
