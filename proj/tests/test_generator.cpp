#include <cmath>
#include <set>

#include <doctest.h>

#include "test_support.hpp"
#include "trackfind/generator.hpp"
#include "trackfind/io.hpp"
#include "trackfind/solvers.hpp"

using namespace trackfind;
using namespace test_support;

TEST_CASE("generated events have equal hits per layer") {
    GeneratorConfig config;
    config.num_tracks = 10;
    config.num_layers = 7;
    config.seed = 1;
    const Instance inst = generate_event(config);
    CHECK(inst.num_hits() == 70);
    const auto layers = hits_by_layer(inst);
    for (int l = 1; l <= inst.num_layers; ++l) {
        CHECK(layers[static_cast<std::size_t>(l)].size() == 10);
    }
    CHECK(inst.truth.size() == 10);
    validate_instance(inst);
}

TEST_CASE("zero curvature makes every truth triple collinear") {
    GeneratorConfig config;
    config.num_tracks = 5;
    config.num_layers = 6;
    config.curvature = 0.0;
    config.seed = 2;
    const Instance inst = generate_event(config);
    for (const auto& track : inst.truth) {
        for (std::size_t p = 0; p + 2 < track.size(); ++p) {
            const double cosine =
                turning_cosine(inst.hit(track[p]).position, inst.hit(track[p + 1]).position,
                               inst.hit(track[p + 2]).position);
            CHECK(cosine == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("the same seed reproduces the same bytes") {
    GeneratorConfig config;
    config.num_tracks = 6;
    config.num_layers = 7;
    config.seed = 42;
    const Instance a = generate_event(config);
    const Instance b = generate_event(config);
    CHECK(format_instance(a) == format_instance(b));

    config.seed = 43;
    const Instance c = generate_event(config);
    CHECK(format_instance(a) != format_instance(c));
}

TEST_CASE("segment building respects layer gaps and direction") {
    SUBCASE("counting bound on two hits per layer") {
        std::vector<Hit> hits;
        int id = 1;
        for (int layer = 1; layer <= 3; ++layer) {
            hits.push_back(make_hit(id++, layer, 100.0 * layer, 0.0, 0.0));
            hits.push_back(make_hit(id++, layer, 100.0 * layer, 50.0, 0.0));
        }
        const auto segments = build_segments(hits, FilterConfig{0, M_PI, true});
        CHECK(segments.size() == 8);  // 2*2 per consecutive layer pair
    }

    SUBCASE("skip limit admits up to two missing layers") {
        std::vector<Hit> hits;
        for (int layer = 1; layer <= 5; ++layer) {
            hits.push_back(make_hit(layer, layer, 100.0 * layer, 0.0, 0.0));
        }
        const auto segments = build_segments(hits, FilterConfig{2, M_PI, true});
        std::set<std::pair<int, int>> pairs;
        for (const Segment& s : segments) pairs.emplace(s.from, s.to);
        CHECK(pairs.count({1, 4}) == 1);
        CHECK(pairs.count({1, 5}) == 0);
    }

    SUBCASE("every truth-consecutive pair of a generated event is emitted") {
        GeneratorConfig config;
        config.num_tracks = 7;
        config.num_layers = 6;
        config.seed = 77;
        const Instance inst = generate_event(config);
        const auto segments = build_segments(inst.hits, FilterConfig{});
        std::set<std::pair<int, int>> pairs;
        for (const Segment& s : segments) pairs.emplace(s.from, s.to);
        for (const auto& track : inst.truth) {
            for (std::size_t p = 0; p + 1 < track.size(); ++p) {
                CHECK(pairs.count({track[p], track[p + 1]}) == 1);
            }
        }
    }
}

TEST_CASE("triplet building filters on the turning angle") {
    std::vector<Hit> collinear{make_hit(1, 1, 0, 0, 0), make_hit(2, 2, 100, 0, 0),
                               make_hit(3, 3, 200, 0, 0)};
    auto segments = build_segments(collinear, FilterConfig{0, 0.01, true});
    auto triplets = build_triplets(collinear, segments, FilterConfig{0, 0.01, true});
    REQUIRE(triplets.size() == 1);
    CHECK(triplets[0].turn_cosine == 1.0);

    std::vector<Hit> bent{make_hit(1, 1, 0, 0, 0), make_hit(2, 2, 100, 0, 0),
                          make_hit(3, 3, 100.000001, 100, 0)};
    segments = build_segments(bent, FilterConfig{0, 0.35, true});
    REQUIRE(segments.size() == 2);
    triplets = build_triplets(bent, segments, FilterConfig{0, 0.35, true});
    CHECK(triplets.empty());  // right-angle turn, way past 0.35 rad
}

TEST_CASE("truth stays admissible when curvature is below the cutoff") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        GeneratorConfig config;
        config.num_tracks = 6;
        config.num_layers = 7;
        config.curvature = 0.1;
        config.seed = seed;
        FilterConfig filter;  // cutoff 0.35
        const Instance inst = generate_event(config, filter);

        const Assignment truth = encode_tracks(inst, inst.truth);
        CHECK(check_feasible(inst, truth).feasible);

        // Every truth triple must be a candidate triplet.
        std::set<std::tuple<int, int, int>> admitted;
        for (const Triplet& t : inst.triplets) admitted.emplace(t.i, t.j, t.k);
        for (const auto& track : inst.truth) {
            for (std::size_t p = 0; p + 2 < track.size(); ++p) {
                CHECK(admitted.count({track[p], track[p + 1], track[p + 2]}) == 1);
            }
        }

        // And so the exact optimum can only improve on the truth cost.
        ExactOptions options;
        options.max_hits_per_layer = 16;
        const SolveReport exact = exact_search(inst, 100.0, options);
        CHECK(exact.objective <= 100.0 * true_cost(inst) + 1e-9);
    }
}

TEST_CASE("presets draw track counts from their grids") {
    std::set<int> small_values, medium_values, large_values;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        GeneratorConfig config;
        config.seed = seed;

        config.preset = GeneratorConfig::Preset::small;
        const int small = resolve_track_count(config);
        CHECK(small >= 10);
        CHECK(small <= 100);
        CHECK(small % 10 == 0);
        small_values.insert(small);

        config.preset = GeneratorConfig::Preset::medium;
        const int medium = resolve_track_count(config);
        CHECK(medium >= 125);
        CHECK(medium <= 350);
        CHECK((medium - 125) % 25 == 0);
        medium_values.insert(medium);

        config.preset = GeneratorConfig::Preset::large;
        const int large = resolve_track_count(config);
        CHECK(large >= 375);
        CHECK(large <= 600);
        CHECK((large - 375) % 25 == 0);
        large_values.insert(large);

        CHECK(resolve_track_count(config) == large);  // deterministic per seed
    }
    // Uniform draws over 40 seeds should touch most of each 10-value grid.
    CHECK(small_values.size() >= 5);
    CHECK(medium_values.size() >= 5);
    CHECK(large_values.size() >= 5);
}

TEST_CASE("generator rejects bad configurations") {
    GeneratorConfig config;
    config.num_layers = 2;
    CHECK_THROWS_AS(generate_event(config), std::invalid_argument);

    config.num_layers = 5;
    config.num_tracks = 0;
    CHECK_THROWS_AS(generate_event(config), std::invalid_argument);

    config.num_tracks = 2;
    config.curvature = -0.1;
    CHECK_THROWS_AS(generate_event(config), std::invalid_argument);

    FilterConfig filter;
    filter.max_layer_skip = 3;
    CHECK_THROWS_AS(build_segments({}, filter), std::invalid_argument);
}
