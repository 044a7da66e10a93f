#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "trackfind/formulations.hpp"

namespace trackfind {

/// Geometric cooling schedule for the annealer. A non-positive initial
/// temperature means "auto": the largest single-flip |dE| reachable from the
/// all-zero state. A non-positive final temperature defaults to 1e-3 times
/// the initial one. Each sweep attempts one flip per variable; restarts run
/// independent chains seeded with seed + restart index, and the best state
/// over all of them wins.
struct AnnealSchedule {
    double initial_temperature = 0.0;
    double final_temperature = 0.0;
    int sweeps = 1000;
    int restarts = 10;
    std::uint64_t seed = 1;
};

struct SolveReport {
    std::string method;
    Assignment assignment;
    double objective = 0.0;   // alpha-scaled cost of the selected triplets
    double energy = 0.0;      // model energy (equals objective when feasible/exact)
    bool feasible = false;
    TrackList tracks;         // decoded paths; empty when not decodable
    double wall_time_seconds = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> raw_objective;  // annealer result before repair
    std::optional<bool> raw_feasible;
};

/// Thrown by the exact solver when it exceeds its deadline.
struct TimeoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Metropolis single-flip annealing on the penalty model. Deterministic for
/// a fixed schedule; energy deltas come from the linear term plus the
/// incident quadratic terms, never from re-evaluating the whole model.
SolveReport simulated_annealing(const QuboModel& model, const AnnealSchedule& schedule);

/// Incremental-evaluation state for a QUBO assignment. The annealer runs on
/// it; it is exposed so the flip deltas can be checked against full
/// re-evaluation.
class QuboState {
public:
    QuboState(const QuboModel& model, Assignment x);

    double energy() const { return energy_; }
    const Assignment& assignment() const { return x_; }
    /// Energy change if variable v were flipped.
    double flip_delta(int v) const;
    void flip(int v);

private:
    const QuboModel& model_;
    Assignment x_;
    double energy_ = 0.0;
    std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

struct ExactOptions {
    int max_hits_per_layer = 8;    // refuse larger instances; 0 disables the cap
    bool prune = true;             // cost-bound pruning (the result is the same)
    double time_limit_seconds = 0.0;  // 0 = unlimited
};

/// Provably optimal selection: depth-first search over the layer-to-layer
/// matchings with a precomputed per-hit lower bound for pruning. Optimality
/// is certified by exhausting the search space.
SolveReport exact_search(const Instance& inst, double alpha, const ExactOptions& options = {});

/// Extends one track per first-layer hit, always taking the cheapest
/// unused continuation. Fast, feasible when candidates suffice, and a
/// sanity floor for the other methods.
SolveReport greedy_baseline(const Instance& inst, double alpha);

/// Splits a feasible assignment into its tracks: one path per first-layer
/// hit, following the unique selected out-segment of each hit.
TrackList decode_tracks(const Instance& inst, const Assignment& x);

/// Inverse of decode_tracks: selects the segment between each consecutive
/// hit pair. Throws if a pair is not a candidate segment.
Assignment encode_tracks(const Instance& inst, const TrackList& tracks);

/// Drives an assignment toward feasibility: clears over-degree hits keeping
/// the locally cheapest segment, then fills under-degree hits greedily.
/// Feasible inputs come back unchanged; when no completion is found the
/// result is still infeasible and the caller sees that via check_feasible.
Assignment repair(const Instance& inst, const Assignment& x);

/// Objective of an assignment on the candidate triplet set, alpha-scaled.
double assignment_objective(const Instance& inst, const Assignment& x, double alpha);

/// Post-processes a raw annealer report: repairs infeasible assignments,
/// recomputes the track objective, decodes tracks. The pre-repair numbers
/// stay available in raw_objective / raw_feasible.
SolveReport repair_report(const Instance& inst, const QuboModel& model, const SolveReport& raw);

/// Build model, anneal, repair, decode: the full per-instance pipeline
/// behind the "sa" method. Records the pre-repair objective as well.
SolveReport anneal_tracks(const Instance& inst, double alpha, double gamma,
                          const AnnealSchedule& schedule);

}  // namespace trackfind
