#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "trackfind/geometry.hpp"

namespace trackfind {

/// One detector measurement. Ids are 1-based and dense: hits[id - 1].id == id.
struct Hit {
    int id = 0;
    int layer = 0;   // 1 .. Instance::num_layers
    Vec3 position = Vec3::Zero();   // micrometers

    friend bool operator==(const Hit& a, const Hit& b) {
        return a.id == b.id && a.layer == b.layer && a.position == b.position;
    }
};

/// Directed candidate segment between hits on two different layers,
/// from the lower layer to the higher one.
struct Segment {
    int from = 0;
    int to = 0;
    double length = 0.0;   // micrometers

    friend bool operator==(const Segment& a, const Segment& b) {
        return a.from == b.from && a.to == b.to && a.length == b.length;
    }
};

/// Two consecutive candidate segments (i,j) and (j,k) and the cost of
/// selecting them together.
struct Triplet {
    int i = 0, j = 0, k = 0;
    double turn_cosine = 0.0;
    double cost = 0.0;   // micrometer^-1

    friend bool operator==(const Triplet& a, const Triplet& b) {
        return a.i == b.i && a.j == b.j && a.k == b.k &&
               a.turn_cosine == b.turn_cosine && a.cost == b.cost;
    }
};

/// Selection of candidate segments, one flag per Instance::segments entry.
using Assignment = std::vector<std::uint8_t>;

/// Each track is an ordered list of hit ids from the first layer to the last.
using TrackList = std::vector<std::vector<int>>;

struct Instance {
    int num_layers = 0;
    std::vector<Hit> hits;
    std::vector<Segment> segments;   // variable ordinal == index in this list
    std::vector<Triplet> triplets;
    TrackList truth;                 // empty when ground truth is unknown

    bool has_truth() const { return !truth.empty(); }
    int num_hits() const { return static_cast<int>(hits.size()); }
    int num_segments() const { return static_cast<int>(segments.size()); }

    const Hit& hit(int id) const { return hits[static_cast<std::size_t>(id - 1)]; }

    friend bool operator==(const Instance& a, const Instance& b) {
        return a.num_layers == b.num_layers && a.hits == b.hits &&
               a.segments == b.segments && a.triplets == b.triplets &&
               a.truth == b.truth;
    }
};

/// Maps (from, to) hit ids to the segment ordinal, -1 when absent.
class SegmentLookup {
public:
    explicit SegmentLookup(const Instance& inst);
    int find(int from, int to) const;

private:
    std::unordered_map<std::uint64_t, int> map_;
};

/// Hit ids grouped by layer; result[l] lists layer l, result[0] is unused.
std::vector<std::vector<int>> hits_by_layer(const Instance& inst);

/// Total geometric cost of the ground-truth tracks: the sum of the chained
/// segment-pair costs over every consecutive hit triple of every truth track.
/// Computed from positions directly, so truth triples need not appear in the
/// candidate triplet list. Throws when the instance has no truth.
double true_cost(const Instance& inst);

/// Checks the structural invariants (dense ids, layer ranges, segment layer
/// ordering and skip limit, triplet membership and cost consistency, truth
/// partition). Throws std::runtime_error describing the first violation.
void validate_instance(const Instance& inst);

}  // namespace trackfind
