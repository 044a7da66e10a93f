#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trackfind/solvers.hpp"

namespace trackfind {

/// One instance x method result. Times are wall-clock seconds rounded to
/// millisecond resolution, with tt always equal to tp + tr. s and
/// gap_percent are absent when the method failed (timeout or refusal).
struct BenchRow {
    std::string instance;
    int no_hits = 0;
    std::string method;
    std::optional<double> s_star;
    std::optional<double> s;
    double tp = 0.0;
    double tr = 0.0;
    double tt = 0.0;
    std::optional<double> gap_percent;
    bool feasible = false;
    std::uint64_t seed = 0;

    friend bool operator==(const BenchRow&, const BenchRow&) = default;
};

/// Percentage excess of `computed` over `reference`:
/// (computed - reference) / |reference| * 100. Positive means worse than the
/// reference whatever its sign. Zero reference is rejected.
double gap(double computed, double reference);

struct BenchConfig {
    std::vector<std::string> methods{"sa", "exact", "greedy"};
    double alpha = 100.0;
    double gamma = 1.0;
    AnnealSchedule schedule{};
    double time_limit_seconds = 360.0;
    int exact_cap = 128;   // hits-per-layer guard handed to the exact solver; 0 = off
};

struct BenchResult {
    std::vector<BenchRow> rows;
    std::vector<BenchRow> averages;  // one per method, instance name "average"
};

/// Runs every method on every instance file. Per cell, tp covers parsing
/// plus model building and tr the solve itself. The gap reference is the
/// exact optimum when the "exact" method ran successfully on the instance,
/// otherwise the alpha-scaled true cost when the instance carries truth.
BenchResult run_bench(const std::vector<std::string>& instance_paths, const BenchConfig& config);

/// Fixed column set:
/// instance,no_hits,method,S_star,S,TP,TR,TT,GAP,feasible,seed
/// Absent optionals serialize as empty fields; parsing an emitted CSV
/// restores every row exactly.
std::string to_csv(const BenchResult& result);
BenchResult parse_csv(const std::string& text);

}  // namespace trackfind
