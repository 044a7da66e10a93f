#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trackfind/bench.hpp"
#include "trackfind/io.hpp"

namespace trackfind {

double gap(double computed, double reference) {
    if (reference == 0.0) throw std::invalid_argument("undefined gap: zero reference");
    return (computed - reference) / std::abs(reference) * 100.0;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double to_millis_resolution(double seconds) {
    return std::round(seconds * 1000.0) / 1000.0;
}

struct Cell {
    SolveReport report;
    bool solved = false;
    double tp = 0.0;
    double tr = 0.0;
    std::uint64_t seed = 0;
};

Cell run_cell(const std::string& path, const std::string& method, const BenchConfig& config,
              std::uint64_t cell_seed) {
    Cell cell;
    const auto tp_start = Clock::now();
    const Instance inst = read_instance(path);
    if (method == "sa") {
        const QuboModel model = build_qubm(inst, config.alpha, config.gamma);
        cell.tp = seconds_since(tp_start);
        AnnealSchedule schedule = config.schedule;
        schedule.seed = cell_seed;
        cell.seed = cell_seed;
        const auto tr_start = Clock::now();
        const SolveReport raw = simulated_annealing(model, schedule);
        cell.report = repair_report(inst, model, raw);
        cell.tr = seconds_since(tr_start);
        cell.solved = true;
    } else if (method == "exact") {
        cell.tp = seconds_since(tp_start);
        ExactOptions options;
        options.max_hits_per_layer = config.exact_cap;
        options.time_limit_seconds = config.time_limit_seconds;
        const auto tr_start = Clock::now();
        try {
            cell.report = exact_search(inst, config.alpha, options);
            cell.solved = true;
        } catch (const TimeoutError&) {
            cell.solved = false;
        } catch (const std::runtime_error& e) {
            if (std::string(e.what()).find("too large") == std::string::npos) throw;
            cell.solved = false;
        }
        cell.tr = seconds_since(tr_start);
    } else if (method == "greedy") {
        cell.tp = seconds_since(tp_start);
        const auto tr_start = Clock::now();
        cell.report = greedy_baseline(inst, config.alpha);
        cell.tr = seconds_since(tr_start);
        cell.solved = true;
    } else {
        throw std::invalid_argument("unknown method '" + method + "'");
    }
    return cell;
}

std::string instance_name(const std::string& path) {
    const auto slash = path.find_last_of('/');
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
        name.erase(dot);
    }
    return name;
}

void append_double(std::string& out, double value) {
    std::array<char, 64> buf;
    const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), result.ptr);
}

}  // namespace

BenchResult run_bench(const std::vector<std::string>& instance_paths, const BenchConfig& config) {
    if (config.methods.empty()) throw std::invalid_argument("no methods");
    const std::set<std::string> known{"sa", "exact", "greedy"};
    for (const auto& m : config.methods) {
        if (!known.count(m)) throw std::invalid_argument("unknown method '" + m + "'");
    }
    if (instance_paths.empty()) throw std::invalid_argument("no instances");

    BenchResult result;
    for (std::size_t index = 0; index < instance_paths.size(); ++index) {
        const std::string& path = instance_paths[index];
        const Instance inst = read_instance(path);
        const std::string name = instance_name(path);

        std::vector<Cell> cells;
        cells.reserve(config.methods.size());
        for (const auto& method : config.methods) {
            cells.push_back(
                run_cell(path, method, config, config.schedule.seed + static_cast<std::uint64_t>(index)));
        }

        // Reference: the exact optimum when available, else the true cost.
        std::optional<double> reference;
        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            if (config.methods[m] == "exact" && cells[m].solved) {
                reference = cells[m].report.objective;
            }
        }
        if (!reference && inst.has_truth()) {
            reference = config.alpha * true_cost(inst);
        }

        for (std::size_t m = 0; m < config.methods.size(); ++m) {
            const Cell& cell = cells[m];
            BenchRow row;
            row.instance = name;
            row.no_hits = inst.num_hits();
            row.method = config.methods[m];
            row.s_star = reference;
            row.tp = to_millis_resolution(cell.tp);
            row.tr = to_millis_resolution(cell.tr);
            row.tt = row.tp + row.tr;
            row.seed = cell.seed;
            if (cell.solved) {
                row.s = cell.report.objective;
                row.feasible = cell.report.feasible;
                if (reference && *reference != 0.0 && cell.report.feasible) {
                    row.gap_percent = gap(*row.s, *reference);
                }
            }
            result.rows.push_back(std::move(row));
        }
    }

    for (const auto& method : config.methods) {
        BenchRow avg;
        avg.instance = "average";
        avg.method = method;
        double tp = 0.0, tr = 0.0, gap_sum = 0.0;
        int count = 0, gap_count = 0;
        bool all_feasible = true;
        for (const BenchRow& row : result.rows) {
            if (row.method != method) continue;
            tp += row.tp;
            tr += row.tr;
            ++count;
            all_feasible = all_feasible && row.feasible;
            if (row.gap_percent) {
                gap_sum += *row.gap_percent;
                ++gap_count;
            }
        }
        if (count > 0) {
            avg.tp = to_millis_resolution(tp / count);
            avg.tr = to_millis_resolution(tr / count);
            avg.tt = avg.tp + avg.tr;
        }
        if (gap_count > 0) avg.gap_percent = gap_sum / gap_count;
        avg.feasible = all_feasible;
        result.averages.push_back(std::move(avg));
    }
    return result;
}

namespace {

constexpr const char* kCsvHeader = "instance,no_hits,method,S_star,S,TP,TR,TT,GAP,feasible,seed";

void append_row(std::string& out, const BenchRow& row) {
    out += row.instance;
    out += ',';
    out += std::to_string(row.no_hits);
    out += ',';
    out += row.method;
    out += ',';
    if (row.s_star) append_double(out, *row.s_star);
    out += ',';
    if (row.s) append_double(out, *row.s);
    out += ',';
    append_double(out, row.tp);
    out += ',';
    append_double(out, row.tr);
    out += ',';
    append_double(out, row.tt);
    out += ',';
    if (row.gap_percent) append_double(out, *row.gap_percent);
    out += ',';
    out += row.feasible ? '1' : '0';
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
}

}  // namespace

std::string to_csv(const BenchResult& result) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const BenchRow& row : result.rows) append_row(out, row);
    for (const BenchRow& row : result.averages) append_row(out, row);
    return out;
}

BenchResult parse_csv(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    if (!std::getline(stream, line) || line != kCsvHeader) {
        throw std::runtime_error("not a bench CSV: bad or missing header");
    }
    BenchResult result;
    int line_no = 1;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            fields.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (fields.size() != 11) {
            throw std::runtime_error("bad CSV row at line " + std::to_string(line_no));
        }
        auto number = [&](const std::string& s) {
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
            if (ec != std::errc() || ptr != s.data() + s.size()) {
                throw std::runtime_error("bad number '" + s + "' at line " + std::to_string(line_no));
            }
            return value;
        };
        auto optional_number = [&](const std::string& s) -> std::optional<double> {
            if (s.empty()) return std::nullopt;
            return number(s);
        };
        BenchRow row;
        row.instance = fields[0];
        row.no_hits = static_cast<int>(number(fields[1]));
        row.method = fields[2];
        row.s_star = optional_number(fields[3]);
        row.s = optional_number(fields[4]);
        row.tp = number(fields[5]);
        row.tr = number(fields[6]);
        row.tt = number(fields[7]);
        row.gap_percent = optional_number(fields[8]);
        row.feasible = fields[9] == "1";
        row.seed = static_cast<std::uint64_t>(number(fields[10]));
        if (row.instance == "average") {
            result.averages.push_back(std::move(row));
        } else {
            result.rows.push_back(std::move(row));
        }
    }
    return result;
}

}  // namespace trackfind
