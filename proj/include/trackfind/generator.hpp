#pragma once

#include <cstdint>

#include "trackfind/instance.hpp"

namespace trackfind {

/// Synthetic event generator settings. Layers are parallel planes spaced
/// along the x axis; every track deposits exactly one hit per layer, so a
/// generated event has num_tracks * num_layers hits.
struct GeneratorConfig {
    enum class Preset { none, small, medium, large };

    int num_tracks = 10;
    int num_layers = 7;
    double layer_spacing = 100.0;     // micrometers between planes
    double curvature = 0.05;          // max direction change per layer, radians
    double transverse_jitter = 0.0;   // per-hit measurement noise, micrometers
    std::uint64_t seed = 1;
    Preset preset = Preset::none;     // draws num_tracks from the preset grid
};

/// Candidate filtering: which hit pairs become segments and which segment
/// pairs become triplets.
struct FilterConfig {
    int max_layer_skip = 2;           // a segment may bridge up to this many missing layers
    double max_turn_angle = 0.35;     // radians; triplet admission cutoff
    bool require_forward = true;      // segments must advance along the layer axis
};

/// The track count a config resolves to: the preset draws it from the preset
/// grid (small {10,20,..,100}, medium {125,150,..,350}, large
/// {375,400,..,600}) using the seed, otherwise num_tracks is used as given.
int resolve_track_count(const GeneratorConfig& config);

/// All hit pairs admissible as candidate segments: layer gap within
/// [1, 1 + max_layer_skip] and, when required, a positive step along the
/// layer axis. Sorted by (from, to).
std::vector<Segment> build_segments(const std::vector<Hit>& hits, const FilterConfig& filter);

/// All segment pairs sharing a middle hit whose turning angle stays within
/// the cutoff, each carrying its chained-pair cost. Sorted by (i, j, k).
std::vector<Triplet> build_triplets(const std::vector<Hit>& hits,
                                    const std::vector<Segment>& segments,
                                    const FilterConfig& filter);

/// Generates a complete instance with ground truth: smooth near-straight
/// tracks, candidate segments and triplets filtered per `filter`, and the
/// candidate segment list reduced to segments that occur in at least one
/// admitted triplet. Deterministic per seed.
Instance generate_event(const GeneratorConfig& config, const FilterConfig& filter = {});

}  // namespace trackfind
