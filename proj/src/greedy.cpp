#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "trackfind/solvers.hpp"

namespace trackfind {

namespace {

std::uint64_t seg_pair_key(int in_seg, int out_seg) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(in_seg)) << 32) |
           static_cast<std::uint32_t>(out_seg);
}

}  // namespace

SolveReport greedy_baseline(const Instance& inst, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
    const auto started = std::chrono::steady_clock::now();
    const int n = inst.num_hits();

    std::vector<std::vector<int>> out_segs(static_cast<std::size_t>(n));
    for (int s = 0; s < inst.num_segments(); ++s) {
        out_segs[static_cast<std::size_t>(inst.segments[s].from - 1)].push_back(s);
    }
    SegmentLookup lookup(inst);
    std::unordered_map<std::uint64_t, double> pair_cost;
    pair_cost.reserve(inst.triplets.size());
    for (const Triplet& t : inst.triplets) {
        pair_cost.emplace(seg_pair_key(lookup.find(t.i, t.j), lookup.find(t.j, t.k)),
                          alpha * t.cost);
    }

    Assignment selection(static_cast<std::size_t>(inst.num_segments()), 0);
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    bool stuck = false;

    for (const Hit& start : inst.hits) {
        if (start.layer != 1) continue;
        used[static_cast<std::size_t>(start.id - 1)] = 1;
        int hit = start.id - 1;
        int in_seg = -1;
        while (inst.hits[static_cast<std::size_t>(hit)].layer < inst.num_layers) {
            const int next_layer = inst.hits[static_cast<std::size_t>(hit)].layer + 1;
            int pick = -1;
            double pick_cost = 0.0;
            for (int s : out_segs[static_cast<std::size_t>(hit)]) {
                const int target = inst.segments[static_cast<std::size_t>(s)].to - 1;
                if (inst.hits[static_cast<std::size_t>(target)].layer != next_layer) continue;
                if (used[static_cast<std::size_t>(target)]) continue;
                double cost = 0.0;
                if (in_seg >= 0) {
                    auto it = pair_cost.find(seg_pair_key(in_seg, s));
                    if (it != pair_cost.end()) cost = it->second;
                }
                // Ordinals ascend within out_segs, so strict < keeps the
                // lowest ordinal among equal costs.
                if (pick < 0 || cost < pick_cost) {
                    pick = s;
                    pick_cost = cost;
                }
            }
            if (pick < 0) {
                stuck = true;
                break;
            }
            selection[static_cast<std::size_t>(pick)] = 1;
            hit = inst.segments[static_cast<std::size_t>(pick)].to - 1;
            used[static_cast<std::size_t>(hit)] = 1;
            in_seg = pick;
        }
        if (stuck) break;
    }

    SolveReport report;
    report.method = "greedy";
    report.assignment = std::move(selection);
    report.feasible = !stuck && check_feasible(inst, report.assignment).feasible;
    report.objective = assignment_objective(inst, report.assignment, alpha);
    report.energy = report.objective;
    if (report.feasible) report.tracks = decode_tracks(inst, report.assignment);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace trackfind
