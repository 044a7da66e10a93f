#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "trackfind/solvers.hpp"

namespace trackfind {

TrackList decode_tracks(const Instance& inst, const Assignment& x) {
    const FeasibilityReport report = check_feasible(inst, x);
    if (!report.feasible) {
        throw std::runtime_error("cannot decode infeasible assignment");
    }
    const int n = inst.num_hits();
    std::vector<int> out_of(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < inst.num_segments(); ++s) {
        if (x[static_cast<std::size_t>(s)]) {
            out_of[static_cast<std::size_t>(inst.segments[s].from - 1)] = s;
        }
    }
    TrackList tracks;
    for (const Hit& h : inst.hits) {
        if (h.layer != 1) continue;
        std::vector<int> path{h.id};
        int hit = h.id;
        while (inst.hit(hit).layer < inst.num_layers) {
            const int s = out_of[static_cast<std::size_t>(hit - 1)];
            hit = inst.segments[static_cast<std::size_t>(s)].to;
            path.push_back(hit);
        }
        tracks.push_back(std::move(path));
    }
    return tracks;
}

Assignment encode_tracks(const Instance& inst, const TrackList& tracks) {
    SegmentLookup lookup(inst);
    Assignment x(static_cast<std::size_t>(inst.num_segments()), 0);
    for (const auto& track : tracks) {
        for (std::size_t p = 0; p + 1 < track.size(); ++p) {
            const int s = lookup.find(track[p], track[p + 1]);
            if (s < 0) {
                throw std::runtime_error("track segment (" + std::to_string(track[p]) + "," +
                                         std::to_string(track[p + 1]) +
                                         ") is not a candidate segment");
            }
            x[static_cast<std::size_t>(s)] = 1;
        }
    }
    return x;
}

namespace {

std::uint64_t seg_pair_key(int in_seg, int out_seg) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(in_seg)) << 32) |
           static_cast<std::uint32_t>(out_seg);
}

struct RepairContext {
    const Instance& inst;
    std::unordered_map<std::uint64_t, double> pair_cost;
    std::vector<std::vector<int>> out_segs;  // per hit, ordinal-sorted
    std::vector<std::vector<int>> in_segs;

    explicit RepairContext(const Instance& instance) : inst(instance) {
        const std::size_t n = static_cast<std::size_t>(inst.num_hits());
        out_segs.assign(n, {});
        in_segs.assign(n, {});
        for (int s = 0; s < inst.num_segments(); ++s) {
            out_segs[static_cast<std::size_t>(inst.segments[s].from - 1)].push_back(s);
            in_segs[static_cast<std::size_t>(inst.segments[s].to - 1)].push_back(s);
        }
        SegmentLookup lookup(inst);
        pair_cost.reserve(inst.triplets.size());
        for (const Triplet& t : inst.triplets) {
            pair_cost.emplace(seg_pair_key(lookup.find(t.i, t.j), lookup.find(t.j, t.k)), t.cost);
        }
    }

    double chain_cost(int in_seg, int out_seg) const {
        auto it = pair_cost.find(seg_pair_key(in_seg, out_seg));
        return it == pair_cost.end() ? 0.0 : it->second;
    }
};

}  // namespace

Assignment repair(const Instance& inst, const Assignment& x) {
    if (check_feasible(inst, x).feasible) return x;

    const RepairContext ctx(inst);
    Assignment sel = x;
    const int n = inst.num_hits();

    auto selected = [&](const std::vector<int>& segs) {
        std::vector<int> out;
        for (int s : segs) {
            if (sel[static_cast<std::size_t>(s)]) out.push_back(s);
        }
        return out;
    };
    // Cheapest chained-pair cost this segment can realize against the
    // currently selected partners on its other side; 0 when unchained.
    auto out_score = [&](int hit, int s) {
        double score = 0.0;
        for (int in : selected(ctx.in_segs[static_cast<std::size_t>(hit)])) {
            score = std::min(score, ctx.chain_cost(in, s));
        }
        return score;
    };
    auto in_score = [&](int hit, int s) {
        double score = 0.0;
        for (int out : selected(ctx.out_segs[static_cast<std::size_t>(hit)])) {
            score = std::min(score, ctx.chain_cost(s, out));
        }
        return score;
    };

    // Phase 1: clear over-degree hits, keeping the cheapest-scoring segment.
    for (int h = 0; h < n; ++h) {
        auto keep_best = [&](const std::vector<int>& incident, auto&& score_of) {
            std::vector<int> active = selected(incident);
            if (active.size() <= 1) return;
            int best = active.front();
            double best_score = score_of(h, best);
            for (std::size_t i = 1; i < active.size(); ++i) {
                const double s = score_of(h, active[i]);
                if (s < best_score) {
                    best = active[i];
                    best_score = s;
                }
            }
            for (int s : active) {
                if (s != best) sel[static_cast<std::size_t>(s)] = 0;
            }
        };
        keep_best(ctx.out_segs[static_cast<std::size_t>(h)], out_score);
        keep_best(ctx.in_segs[static_cast<std::size_t>(h)], in_score);
    }

    // Phase 2: complete under-degree hits greedily, cheapest increment first,
    // until a pass adds nothing more.
    auto degrees = [&]() { return check_feasible(inst, sel); };
    FeasibilityReport deg = degrees();
    bool changed = true;
    while (changed && !deg.feasible) {
        changed = false;
        for (const Hit& h : inst.hits) {
            if (h.layer > inst.num_layers - 1) continue;
            if (deg.out_degree[static_cast<std::size_t>(h.id - 1)] != 0) continue;
            int pick = -1;
            double pick_cost = 0.0;
            for (int s : ctx.out_segs[static_cast<std::size_t>(h.id - 1)]) {
                if (sel[static_cast<std::size_t>(s)]) continue;
                const int target = inst.segments[static_cast<std::size_t>(s)].to - 1;
                if (deg.in_degree[static_cast<std::size_t>(target)] != 0) continue;
                const double cost = out_score(h.id - 1, s) + in_score(target, s);
                if (pick < 0 || cost < pick_cost) {
                    pick = s;
                    pick_cost = cost;
                }
            }
            if (pick >= 0) {
                sel[static_cast<std::size_t>(pick)] = 1;
                deg.out_degree[static_cast<std::size_t>(h.id - 1)] += 1;
                deg.in_degree[static_cast<std::size_t>(
                    inst.segments[static_cast<std::size_t>(pick)].to - 1)] += 1;
                changed = true;
            }
        }
        deg = degrees();
    }
    if (deg.feasible) return sel;

    // Phase 3: the plain completion stalls when every free partner is taken.
    // The selection is a partial sender/receiver matching at this point, so
    // augmenting paths can reroute existing picks instead of giving up.
    std::vector<int> match_out(static_cast<std::size_t>(n), -1);  // sender -> segment
    std::vector<int> match_in(static_cast<std::size_t>(n), -1);   // receiver -> segment
    for (int s = 0; s < inst.num_segments(); ++s) {
        if (!sel[static_cast<std::size_t>(s)]) continue;
        match_out[static_cast<std::size_t>(inst.segments[s].from - 1)] = s;
        match_in[static_cast<std::size_t>(inst.segments[s].to - 1)] = s;
    }
    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    auto augment = [&](auto&& self, int sender) -> bool {
        // Cheapest chained increment first, ordinal as the tie-break.
        std::vector<std::pair<double, int>> ordered;
        for (int s : ctx.out_segs[static_cast<std::size_t>(sender)]) {
            const int receiver = inst.segments[static_cast<std::size_t>(s)].to - 1;
            if (visited[static_cast<std::size_t>(receiver)]) continue;
            ordered.emplace_back(out_score(sender, s) + in_score(receiver, s), s);
        }
        std::sort(ordered.begin(), ordered.end());
        for (const auto& [unused_cost, s] : ordered) {
            const int receiver = inst.segments[static_cast<std::size_t>(s)].to - 1;
            if (visited[static_cast<std::size_t>(receiver)]) continue;
            visited[static_cast<std::size_t>(receiver)] = 1;
            const int taken = match_in[static_cast<std::size_t>(receiver)];
            const int displaced =
                taken < 0 ? -1 : inst.segments[static_cast<std::size_t>(taken)].from - 1;
            if (taken < 0 || self(self, displaced)) {
                match_in[static_cast<std::size_t>(receiver)] = s;
                match_out[static_cast<std::size_t>(sender)] = s;
                return true;
            }
        }
        return false;
    };
    for (const Hit& h : inst.hits) {
        if (h.layer > inst.num_layers - 1) continue;
        if (match_out[static_cast<std::size_t>(h.id - 1)] >= 0) continue;
        std::fill(visited.begin(), visited.end(), 0);
        augment(augment, h.id - 1);
    }
    Assignment rerouted(static_cast<std::size_t>(inst.num_segments()), 0);
    for (int h = 0; h < n; ++h) {
        if (match_out[static_cast<std::size_t>(h)] >= 0) {
            rerouted[static_cast<std::size_t>(match_out[static_cast<std::size_t>(h)])] = 1;
        }
    }
    if (check_feasible(inst, rerouted).feasible) return rerouted;
    return sel;
}

SolveReport repair_report(const Instance& inst, const QuboModel& model, const SolveReport& raw) {
    SolveReport report = raw;
    report.raw_objective = raw.objective;
    report.raw_feasible = raw.feasible;
    if (!raw.feasible) {
        report.assignment = repair(inst, raw.assignment);
    }
    report.feasible = check_feasible(inst, report.assignment).feasible;
    report.objective = assignment_objective(inst, report.assignment, model.alpha);
    report.energy = qubo_energy(model, report.assignment);
    if (report.feasible) report.tracks = decode_tracks(inst, report.assignment);
    return report;
}

SolveReport anneal_tracks(const Instance& inst, double alpha, double gamma,
                          const AnnealSchedule& schedule) {
    const auto started = std::chrono::steady_clock::now();
    const QuboModel model = build_qubm(inst, alpha, gamma);
    SolveReport raw = simulated_annealing(model, schedule);
    SolveReport report = repair_report(inst, model, raw);
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return report;
}

}  // namespace trackfind
