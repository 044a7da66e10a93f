#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "trackfind/rng.hpp"
#include "trackfind/solvers.hpp"

namespace trackfind {

QuboState::QuboState(const QuboModel& model, Assignment x)
    : model_(model), x_(std::move(x)) {
    if (static_cast<int>(x_.size()) != model.num_vars) {
        throw std::invalid_argument("dimension error: assignment length != num_vars");
    }
    adjacency_.resize(static_cast<std::size_t>(model.num_vars));
    for (const QuadraticTerm& t : model.quadratic) {
        adjacency_[static_cast<std::size_t>(t.a)].emplace_back(t.b, t.coeff);
        adjacency_[static_cast<std::size_t>(t.b)].emplace_back(t.a, t.coeff);
    }
    energy_ = qubo_energy(model, x_);
}

double QuboState::flip_delta(int v) const {
    const std::size_t vi = static_cast<std::size_t>(v);
    double around = model_.linear[vi];
    for (const auto& [u, coeff] : adjacency_[vi]) {
        if (x_[static_cast<std::size_t>(u)]) around += coeff;
    }
    return x_[vi] ? -around : around;
}

void QuboState::flip(int v) {
    energy_ += flip_delta(v);
    x_[static_cast<std::size_t>(v)] ^= 1;
}

namespace {

double auto_initial_temperature(const QuboModel& model) {
    // Largest |dE| of any single flip from the all-zero state; from there the
    // delta of flipping v on its own is just the linear term.
    double max_delta = 0.0;
    for (double l : model.linear) max_delta = std::max(max_delta, std::abs(l));
    if (max_delta <= 0.0) {
        for (const QuadraticTerm& t : model.quadratic) {
            max_delta = std::max(max_delta, std::abs(t.coeff));
        }
    }
    return max_delta > 0.0 ? max_delta : 1.0;
}

}  // namespace

SolveReport simulated_annealing(const QuboModel& model, const AnnealSchedule& schedule) {
    if (model.num_vars <= 0) {
        throw std::invalid_argument("cannot anneal an empty model");
    }
    if (schedule.sweeps < 1 || schedule.restarts < 1) {
        throw std::invalid_argument("sweeps and restarts must be at least 1");
    }
    if (schedule.initial_temperature > 0.0 && schedule.final_temperature > 0.0 &&
        !(schedule.final_temperature < schedule.initial_temperature)) {
        throw std::invalid_argument("final temperature must be below the initial one");
    }
    const double t_initial = schedule.initial_temperature > 0.0
                                 ? schedule.initial_temperature
                                 : auto_initial_temperature(model);
    const double t_final = std::min(schedule.final_temperature > 0.0
                                        ? schedule.final_temperature
                                        : 1e-3 * t_initial,
                                    t_initial);

    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = static_cast<std::size_t>(model.num_vars);
    const double cool = schedule.sweeps > 1
                            ? std::pow(t_final / t_initial, 1.0 / (schedule.sweeps - 1))
                            : 1.0;

    Assignment best;
    double best_energy = 0.0;
    bool have_best = false;

    for (int restart = 0; restart < schedule.restarts; ++restart) {
        SplitMix64 rng(schedule.seed + static_cast<std::uint64_t>(restart));
        Assignment x(n);
        for (std::size_t v = 0; v < n; ++v) x[v] = rng.coin() ? 1 : 0;
        QuboState state(model, std::move(x));

        Assignment restart_best = state.assignment();
        double restart_best_energy = state.energy();

        double temperature = t_initial;
        for (int sweep = 0; sweep < schedule.sweeps; ++sweep) {
            for (int v = 0; v < model.num_vars; ++v) {
                const double delta = state.flip_delta(v);
                if (delta <= 0.0 || rng.uniform01() < std::exp(-delta / temperature)) {
                    state.flip(v);
                    if (state.energy() < restart_best_energy) {
                        restart_best_energy = state.energy();
                        restart_best = state.assignment();
                    }
                }
            }
            temperature *= cool;
        }
        // Re-evaluate from scratch so accumulated flip deltas cannot drift the
        // cross-restart comparison.
        const double exact_energy = qubo_energy(model, restart_best);
        if (!have_best || exact_energy < best_energy) {
            best_energy = exact_energy;
            best = std::move(restart_best);
            have_best = true;
        }
    }

    SolveReport report;
    report.method = "sa";
    report.assignment = std::move(best);
    report.energy = best_energy;
    report.objective = model.objective_value(report.assignment);
    // The penalty is a nonnegative multiple of gamma, so anything below
    // gamma/2 can only be rounding noise.
    report.feasible = (report.energy - report.objective) < 0.5 * model.gamma;
    report.seed = schedule.seed;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace trackfind
