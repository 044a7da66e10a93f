#include <algorithm>
#include <chrono>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "trackfind/solvers.hpp"

namespace trackfind {

double assignment_objective(const Instance& inst, const Assignment& x, double alpha) {
    if (static_cast<int>(x.size()) != inst.num_segments()) {
        throw std::invalid_argument("dimension error: assignment length != segment count");
    }
    SegmentLookup lookup(inst);
    double total = 0.0;
    for (const Triplet& t : inst.triplets) {
        const int a = lookup.find(t.i, t.j);
        const int b = lookup.find(t.j, t.k);
        if (a >= 0 && b >= 0 && x[static_cast<std::size_t>(a)] && x[static_cast<std::size_t>(b)]) {
            total += alpha * t.cost;
        }
    }
    return total;
}

namespace {

std::uint64_t seg_pair_key(int in_seg, int out_seg) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(in_seg)) << 32) |
           static_cast<std::uint32_t>(out_seg);
}

// Depth-first search over track extensions. Tracks are built one at a time,
// each starting at the lowest unused first-layer hit, so cost feedback
// arrives with every extension instead of after a whole layer matching.
class ExactSearcher {
public:
    ExactSearcher(const Instance& inst, double alpha, const ExactOptions& options)
        : inst_(inst), alpha_(alpha), options_(options) {
        prepare();
    }

    void run(Assignment& best, double& best_objective, bool& found) {
        deadline_set_ = options_.time_limit_seconds > 0.0;
        if (deadline_set_) {
            deadline_ = std::chrono::steady_clock::now() +
                        std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                            std::chrono::duration<double>(options_.time_limit_seconds));
        }
        best_ = &best;
        best_objective_ = &best_objective;
        found_ = &found;
        start_next_track();
    }

    void seed_incumbent(const Assignment& x, double objective) {
        seeded_ = true;
        seed_assignment_ = x;
        seed_objective_ = objective;
    }

    bool apply_seed(Assignment& best, double& best_objective, bool& found) const {
        if (!seeded_) return false;
        best = seed_assignment_;
        best_objective = seed_objective_;
        found = true;
        return true;
    }

private:
    void prepare() {
        const int n = inst_.num_hits();
        layer_of_.resize(static_cast<std::size_t>(n));
        for (int h = 0; h < n; ++h) layer_of_[static_cast<std::size_t>(h)] = inst_.hits[static_cast<std::size_t>(h)].layer;

        out_segs_.assign(static_cast<std::size_t>(n), {});
        for (int s = 0; s < inst_.num_segments(); ++s) {
            out_segs_[static_cast<std::size_t>(inst_.segments[s].from - 1)].push_back(s);
        }
        SegmentLookup lookup(inst_);
        const double no_bound = 0.0;
        hit_bound_.assign(static_cast<std::size_t>(n), no_bound);
        for (const Triplet& t : inst_.triplets) {
            const int a = lookup.find(t.i, t.j);
            const int b = lookup.find(t.j, t.k);
            pair_cost_.emplace(seg_pair_key(a, b), alpha_ * t.cost);
            double& bound = hit_bound_[static_cast<std::size_t>(t.j - 1)];
            bound = std::min(bound, alpha_ * t.cost);
        }

        uncovered_.assign(static_cast<std::size_t>(inst_.num_layers) + 1, 0);
        for (int h = 0; h < n; ++h) uncovered_[static_cast<std::size_t>(layer_of_[static_cast<std::size_t>(h)])] += 1;
        covered_.assign(static_cast<std::size_t>(n), 0);
        selection_.assign(static_cast<std::size_t>(inst_.num_segments()), 0);

        bound_remaining_ = 0.0;
        for (int h = 0; h < n; ++h) {
            if (is_middle(h)) bound_remaining_ += hit_bound_[static_cast<std::size_t>(h)];
        }
        for (const Hit& h : inst_.hits) {
            if (h.layer == 1) starts_.push_back(h.id - 1);
        }
        unstarted_ = static_cast<int>(starts_.size());
    }

    bool is_middle(int h) const {
        const int l = layer_of_[static_cast<std::size_t>(h)];
        return l >= 2 && l <= inst_.num_layers - 1;
    }

    void check_deadline() {
        if (!deadline_set_ || (++tick_ & 0xFFF) != 0) return;
        if (std::chrono::steady_clock::now() > deadline_) {
            throw TimeoutError("time limit exceeded in exact search");
        }
    }

    void start_next_track() {
        check_deadline();
        std::size_t next = 0;
        while (next < starts_.size() && covered_[static_cast<std::size_t>(starts_[next])]) ++next;
        if (next == starts_.size()) {
            for (int l = 1; l <= inst_.num_layers; ++l) {
                if (uncovered_[static_cast<std::size_t>(l)] != 0) return;
            }
            if (!*found_ || partial_ < *best_objective_) {
                *best_objective_ = partial_;
                *best_ = selection_;
                *found_ = true;
            }
            return;
        }
        const int start = starts_[next];
        covered_[static_cast<std::size_t>(start)] = 1;
        uncovered_[1] -= 1;
        unstarted_ -= 1;
        extend_track(start, -1);
        unstarted_ += 1;
        uncovered_[1] += 1;
        covered_[static_cast<std::size_t>(start)] = 0;
    }

    void extend_track(int hit, int in_seg) {
        check_deadline();
        if (layer_of_[static_cast<std::size_t>(hit)] == inst_.num_layers) {
            start_next_track();
            return;
        }
        // Candidates ordered by (extension cost, segment ordinal): cheapest
        // continuation first, ordinal as the deterministic tie-break.
        struct Branch {
            double cost;
            int seg;
            int target;
        };
        std::vector<Branch> branches;
        branches.reserve(out_segs_[static_cast<std::size_t>(hit)].size());
        for (int s : out_segs_[static_cast<std::size_t>(hit)]) {
            const int target = inst_.segments[static_cast<std::size_t>(s)].to - 1;
            if (covered_[static_cast<std::size_t>(target)]) continue;
            double cost = 0.0;
            if (in_seg >= 0) {
                auto it = pair_cost_.find(seg_pair_key(in_seg, s));
                if (it != pair_cost_.end()) cost = it->second;
            }
            branches.push_back({cost, s, target});
        }
        std::sort(branches.begin(), branches.end(), [](const Branch& a, const Branch& b) {
            return a.cost != b.cost ? a.cost < b.cost : a.seg < b.seg;
        });

        const int from_layer = layer_of_[static_cast<std::size_t>(hit)];
        const bool middle = is_middle(hit);
        for (const Branch& br : branches) {
            const int to_layer = layer_of_[static_cast<std::size_t>(br.target)];
            // Layers the track jumps over can only be covered by tracks that
            // have not started yet, one hit each.
            bool coverable = true;
            for (int l = from_layer + 1; l < to_layer; ++l) {
                if (uncovered_[static_cast<std::size_t>(l)] > unstarted_) {
                    coverable = false;
                    break;
                }
            }
            if (!coverable) continue;

            partial_ += br.cost;
            if (middle) bound_remaining_ -= hit_bound_[static_cast<std::size_t>(hit)];
            covered_[static_cast<std::size_t>(br.target)] = 1;
            uncovered_[static_cast<std::size_t>(to_layer)] -= 1;
            selection_[static_cast<std::size_t>(br.seg)] = 1;

            if (!options_.prune || !*found_ || partial_ + bound_remaining_ < *best_objective_) {
                extend_track(br.target, br.seg);
            }

            selection_[static_cast<std::size_t>(br.seg)] = 0;
            uncovered_[static_cast<std::size_t>(to_layer)] += 1;
            covered_[static_cast<std::size_t>(br.target)] = 0;
            if (middle) bound_remaining_ += hit_bound_[static_cast<std::size_t>(hit)];
            partial_ -= br.cost;
        }
    }

    const Instance& inst_;
    double alpha_;
    const ExactOptions& options_;

    std::vector<int> layer_of_;
    std::vector<std::vector<int>> out_segs_;
    std::unordered_map<std::uint64_t, double> pair_cost_;
    std::vector<double> hit_bound_;
    std::vector<int> starts_;

    std::vector<char> covered_;
    std::vector<int> uncovered_;
    Assignment selection_;
    double partial_ = 0.0;
    double bound_remaining_ = 0.0;
    int unstarted_ = 0;

    Assignment* best_ = nullptr;
    double* best_objective_ = nullptr;
    bool* found_ = nullptr;

    bool seeded_ = false;
    Assignment seed_assignment_;
    double seed_objective_ = 0.0;

    bool deadline_set_ = false;
    std::chrono::steady_clock::time_point deadline_;
    std::uint64_t tick_ = 0;
};

}  // namespace

SolveReport exact_search(const Instance& inst, double alpha, const ExactOptions& options) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const auto started = std::chrono::steady_clock::now();

    if (options.max_hits_per_layer > 0) {
        const auto layers = hits_by_layer(inst);
        for (const auto& layer : layers) {
            if (static_cast<int>(layer.size()) > options.max_hits_per_layer) {
                throw std::runtime_error("instance too large for exact search");
            }
        }
    }
    // Surfaces "structurally infeasible instance" before searching.
    build_qcbm(inst, alpha);

    ExactSearcher searcher(inst, alpha, options);
    // Warm start: any feasible incumbent tightens the bound from the first
    // node. Both prune settings get the identical seed, so they return the
    // identical assignment.
    try {
        SolveReport greedy = greedy_baseline(inst, alpha);
        if (greedy.feasible) searcher.seed_incumbent(greedy.assignment, greedy.objective);
    } catch (const std::exception&) {
        // No incumbent; the search simply starts cold.
    }

    Assignment best;
    double best_objective = std::numeric_limits<double>::infinity();
    bool found = false;
    searcher.apply_seed(best, best_objective, found);
    searcher.run(best, best_objective, found);
    if (!found) {
        throw std::runtime_error("structurally infeasible instance: no feasible assignment");
    }

    SolveReport report;
    report.method = "exact";
    report.assignment = std::move(best);
    report.objective = assignment_objective(inst, report.assignment, alpha);
    report.energy = report.objective;
    report.feasible = true;
    report.tracks = decode_tracks(inst, report.assignment);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace trackfind
