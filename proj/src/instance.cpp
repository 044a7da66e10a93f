#include "trackfind/instance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace trackfind {

namespace {

std::uint64_t pair_key(int from, int to) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
           static_cast<std::uint32_t>(to);
}

}  // namespace

SegmentLookup::SegmentLookup(const Instance& inst) {
    map_.reserve(inst.segments.size());
    for (int s = 0; s < inst.num_segments(); ++s) {
        map_.emplace(pair_key(inst.segments[s].from, inst.segments[s].to), s);
    }
}

int SegmentLookup::find(int from, int to) const {
    auto it = map_.find(pair_key(from, to));
    return it == map_.end() ? -1 : it->second;
}

std::vector<std::vector<int>> hits_by_layer(const Instance& inst) {
    std::vector<std::vector<int>> layers(static_cast<std::size_t>(inst.num_layers) + 1);
    for (const Hit& h : inst.hits) {
        layers[static_cast<std::size_t>(h.layer)].push_back(h.id);
    }
    return layers;
}

double true_cost(const Instance& inst) {
    if (!inst.has_truth()) {
        throw std::runtime_error("no ground truth");
    }
    double total = 0.0;
    for (const auto& track : inst.truth) {
        for (std::size_t t = 0; t + 2 < track.size(); ++t) {
            total += triplet_cost(inst.hit(track[t]).position,
                                  inst.hit(track[t + 1]).position,
                                  inst.hit(track[t + 2]).position);
        }
    }
    return total;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw std::runtime_error("invalid instance: " + what);
}

}  // namespace

void validate_instance(const Instance& inst) {
    if (inst.num_layers < 1) fail("num_layers must be positive");
    const int n = inst.num_hits();
    for (int i = 0; i < n; ++i) {
        const Hit& h = inst.hits[static_cast<std::size_t>(i)];
        if (h.id != i + 1) fail("hit ids must be dense, 1-based, in order");
        if (h.layer < 1 || h.layer > inst.num_layers) {
            fail("hit " + std::to_string(h.id) + " layer out of range");
        }
    }
    SegmentLookup lookup(inst);
    for (const Segment& s : inst.segments) {
        if (s.from < 1 || s.from > n || s.to < 1 || s.to > n) {
            fail("segment endpoint out of range");
        }
        const int lf = inst.hit(s.from).layer;
        const int lt = inst.hit(s.to).layer;
        if (lf >= lt) fail("segment must go from a lower to a higher layer");
        if (lt - lf > 3) fail("segment skips more than two layers");
        const double geo = segment_length(inst.hit(s.from).position, inst.hit(s.to).position);
        if (!(s.length > 0.0) || std::abs(s.length - geo) > 1e-6 * geo) {
            fail("segment length disagrees with hit positions");
        }
    }
    for (const Triplet& t : inst.triplets) {
        if (lookup.find(t.i, t.j) < 0 || lookup.find(t.j, t.k) < 0) {
            fail("triplet references a segment not in the candidate list");
        }
        const double expect = triplet_cost(inst.hit(t.i).position,
                                           inst.hit(t.j).position,
                                           inst.hit(t.k).position);
        const double tol = 1e-6 * std::max(std::abs(expect), 1e-30);
        if (std::abs(t.cost - expect) > tol) {
            fail("triplet cost disagrees with hit positions");
        }
    }
    if (inst.has_truth()) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        for (const auto& track : inst.truth) {
            if (static_cast<int>(track.size()) != inst.num_layers) {
                fail("truth track must list one hit per layer");
            }
            for (std::size_t p = 0; p < track.size(); ++p) {
                const int id = track[p];
                if (id < 1 || id > n) fail("truth hit id out of range");
                if (seen[static_cast<std::size_t>(id - 1)]) fail("truth tracks overlap");
                seen[static_cast<std::size_t>(id - 1)] = 1;
                if (inst.hit(id).layer != static_cast<int>(p) + 1) {
                    fail("truth track hits must walk layers 1..L in order");
                }
            }
        }
        for (char c : seen) {
            if (!c) fail("truth tracks must cover every hit");
        }
    }
}

}  // namespace trackfind
