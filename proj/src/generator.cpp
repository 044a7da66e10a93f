#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "trackfind/generator.hpp"
#include "trackfind/rng.hpp"

namespace trackfind {

namespace {

constexpr double kMinHitSeparation = 1.0;  // micrometers, per layer
constexpr int kMaxTrackRetries = 200;
constexpr double kMaxInitialTilt = 0.1;    // radians off the layer axis

Vec3 perturbed_direction(const Vec3& dir, double angle, double roll) {
    // Deflect by `angle` toward a direction in the plane orthogonal to dir.
    Vec3 reference = std::abs(dir.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = dir.cross(reference).normalized();
    const Vec3 e2 = dir.cross(e1).normalized();
    const Vec3 out = std::cos(angle) * dir +
                     std::sin(angle) * (std::cos(roll) * e1 + std::sin(roll) * e2);
    return out.normalized();
}

}  // namespace

int resolve_track_count(const GeneratorConfig& config) {
    if (config.preset == GeneratorConfig::Preset::none) return config.num_tracks;
    SplitMix64 rng(config.seed);
    const std::size_t slot = rng.index(10);
    switch (config.preset) {
        case GeneratorConfig::Preset::small:
            return 10 + 10 * static_cast<int>(slot);
        case GeneratorConfig::Preset::medium:
            return 125 + 25 * static_cast<int>(slot);
        case GeneratorConfig::Preset::large:
            return 375 + 25 * static_cast<int>(slot);
        default:
            return config.num_tracks;
    }
}

std::vector<Segment> build_segments(const std::vector<Hit>& hits, const FilterConfig& filter) {
    if (filter.max_layer_skip < 0 || filter.max_layer_skip > 2) {
        throw std::invalid_argument("max_layer_skip must be in [0, 2]");
    }
    std::vector<Segment> segments;
    for (const Hit& a : hits) {
        for (const Hit& b : hits) {
            const int gap = b.layer - a.layer;
            if (gap < 1 || gap > 1 + filter.max_layer_skip) continue;
            if (filter.require_forward && !(b.position.x() - a.position.x() > 0.0)) continue;
            segments.push_back({a.id, b.id, segment_length(a.position, b.position)});
        }
    }
    std::sort(segments.begin(), segments.end(), [](const Segment& a, const Segment& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    return segments;
}

std::vector<Triplet> build_triplets(const std::vector<Hit>& hits,
                                    const std::vector<Segment>& segments,
                                    const FilterConfig& filter) {
    const double min_cosine = std::cos(filter.max_turn_angle);
    std::vector<std::vector<const Segment*>> in_of(hits.size() + 1), out_of(hits.size() + 1);
    for (const Segment& s : segments) {
        out_of[static_cast<std::size_t>(s.from)].push_back(&s);
        in_of[static_cast<std::size_t>(s.to)].push_back(&s);
    }
    auto position = [&](int id) -> const Vec3& {
        return hits[static_cast<std::size_t>(id - 1)].position;
    };
    std::vector<Triplet> triplets;
    for (const Hit& mid : hits) {
        for (const Segment* in : in_of[static_cast<std::size_t>(mid.id)]) {
            for (const Segment* out : out_of[static_cast<std::size_t>(mid.id)]) {
                const double cosine =
                    turning_cosine(position(in->from), position(mid.id), position(out->to));
                if (cosine < min_cosine) continue;
                triplets.push_back({in->from, mid.id, out->to, cosine,
                                    triplet_cost_value(cosine, in->length, out->length)});
            }
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        if (a.i != b.i) return a.i < b.i;
        if (a.j != b.j) return a.j < b.j;
        return a.k < b.k;
    });
    return triplets;
}

Instance generate_event(const GeneratorConfig& config, const FilterConfig& filter) {
    if (config.num_layers < 3) throw std::invalid_argument("num_layers must be at least 3");
    if (!(config.layer_spacing > 0.0)) throw std::invalid_argument("layer_spacing must be positive");
    if (config.curvature < 0.0) throw std::invalid_argument("curvature must be nonnegative");

    const int tracks = resolve_track_count(config);
    if (tracks < 1) throw std::invalid_argument("num_tracks must be positive");
    const int layers = config.num_layers;

    SplitMix64 rng(config.seed);
    // Constant areal density of track origins keeps the decoy rate roughly
    // independent of the track count.
    const double side = 2.0 * config.layer_spacing * std::sqrt(static_cast<double>(tracks));

    // trajectory[t][l] = position of track t on layer l+1.
    std::vector<std::vector<Vec3>> trajectory;
    trajectory.reserve(static_cast<std::size_t>(tracks));

    for (int t = 0; t < tracks; ++t) {
        int retries = 0;
        while (true) {
            std::vector<Vec3> path;
            path.reserve(static_cast<std::size_t>(layers));
            Vec3 pos(config.layer_spacing, rng.uniform(0.0, side), rng.uniform(0.0, side));
            const double tilt = rng.uniform(0.0, kMaxInitialTilt);
            const double heading = rng.uniform(0.0, 2.0 * M_PI);
            Vec3 dir(1.0, std::tan(tilt) * std::cos(heading), std::tan(tilt) * std::sin(heading));
            dir.normalize();
            for (int l = 0; l < layers; ++l) {
                Vec3 hit_pos = pos;
                if (config.transverse_jitter > 0.0) {
                    hit_pos.y() += rng.uniform(-config.transverse_jitter, config.transverse_jitter);
                    hit_pos.z() += rng.uniform(-config.transverse_jitter, config.transverse_jitter);
                }
                path.push_back(hit_pos);
                if (l + 1 == layers) break;
                const double turn = rng.uniform(0.0, config.curvature);
                const double roll = rng.uniform(0.0, 2.0 * M_PI);
                const Vec3 next_dir = perturbed_direction(dir, turn, roll);
                if (next_dir.x() > 0.05) dir = next_dir;
                pos += (config.layer_spacing / dir.x()) * dir;
            }
            bool collides = false;
            for (const auto& other : trajectory) {
                for (int l = 0; l < layers && !collides; ++l) {
                    collides = (other[static_cast<std::size_t>(l)] -
                                path[static_cast<std::size_t>(l)])
                                   .norm() < kMinHitSeparation;
                }
                if (collides) break;
            }
            if (!collides) {
                trajectory.push_back(std::move(path));
                break;
            }
            if (++retries > kMaxTrackRetries) {
                throw std::runtime_error("could not separate tracks after bounded retries");
            }
        }
    }

    Instance inst;
    inst.num_layers = layers;
    inst.hits.reserve(static_cast<std::size_t>(tracks * layers));
    // Layer-major ids: hit of track t on layer l gets id (l-1)*tracks + t + 1.
    for (int l = 0; l < layers; ++l) {
        for (int t = 0; t < tracks; ++t) {
            inst.hits.push_back({l * tracks + t + 1, l + 1,
                                 trajectory[static_cast<std::size_t>(t)][static_cast<std::size_t>(l)]});
        }
    }
    inst.truth.resize(static_cast<std::size_t>(tracks));
    for (int t = 0; t < tracks; ++t) {
        auto& track = inst.truth[static_cast<std::size_t>(t)];
        track.reserve(static_cast<std::size_t>(layers));
        for (int l = 0; l < layers; ++l) track.push_back(l * tracks + t + 1);
    }

    std::vector<Segment> all_segments = build_segments(inst.hits, filter);
    // Direction validity: a candidate segment tilted further off the layer
    // axis than any generated trajectory can reach cannot sit on a smooth
    // track and would only bloat the pairing step. The bound is what the
    // track model itself produces, plus the jitter allowance.
    {
        const double tilt_bound = kMaxInitialTilt + (layers - 2) * config.curvature +
                                  2.83 * config.transverse_jitter / config.layer_spacing + 1e-9;
        const double min_axis_cosine = std::cos(std::min(tilt_bound, M_PI / 2.0));
        std::erase_if(all_segments, [&](const Segment& s) {
            const Vec3 step = inst.hit(s.to).position - inst.hit(s.from).position;
            return step.x() / s.length < min_axis_cosine;
        });
    }
    inst.triplets = build_triplets(inst.hits, all_segments, filter);

    // Keep only segments that some admitted triplet can actually chain;
    // unchainable segments would only inflate the variable count.
    std::vector<char> keep(all_segments.size(), 0);
    {
        std::unordered_map<std::uint64_t, std::size_t> index;
        index.reserve(all_segments.size());
        for (std::size_t s = 0; s < all_segments.size(); ++s) {
            const std::uint64_t key =
                (static_cast<std::uint64_t>(static_cast<std::uint32_t>(all_segments[s].from)) << 32) |
                static_cast<std::uint32_t>(all_segments[s].to);
            index.emplace(key, s);
        }
        auto mark = [&](int from, int to) {
            const std::uint64_t key =
                (static_cast<std::uint64_t>(static_cast<std::uint32_t>(from)) << 32) |
                static_cast<std::uint32_t>(to);
            keep[index.at(key)] = 1;
        };
        for (const Triplet& t : inst.triplets) {
            mark(t.i, t.j);
            mark(t.j, t.k);
        }
    }
    for (std::size_t s = 0; s < all_segments.size(); ++s) {
        if (keep[s]) inst.segments.push_back(all_segments[s]);
    }
    return inst;
}

}  // namespace trackfind
