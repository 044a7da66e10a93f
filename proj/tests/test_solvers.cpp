#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "test_support.hpp"
#include "trackfind/generator.hpp"
#include "trackfind/solvers.hpp"

using namespace trackfind;
using namespace test_support;

namespace {

QuboModel linear_only_model(const std::vector<double>& linear) {
    QuboModel model;
    model.num_vars = static_cast<int>(linear.size());
    model.alpha = 1.0;
    model.gamma = 1.0;
    model.linear = linear;
    return model;
}

AnnealSchedule quick_schedule(std::uint64_t seed) {
    AnnealSchedule schedule;
    schedule.seed = seed;
    return schedule;
}

}  // namespace

TEST_CASE("annealer settles monotone landscapes") {
    const SolveReport up = simulated_annealing(linear_only_model({1.0, 2.0, 0.5, 3.0}),
                                               quick_schedule(1));
    CHECK(up.assignment == Assignment{0, 0, 0, 0});
    CHECK(up.energy == 0.0);

    const SolveReport down = simulated_annealing(linear_only_model({-1.0, -2.0, -0.5, -3.0}),
                                                 quick_schedule(1));
    CHECK(down.assignment == Assignment{1, 1, 1, 1});
    CHECK(down.energy == -6.5);
}

TEST_CASE("annealer reaches the exhaustive minimum on a small penalty model") {
    const Instance inst = two_track_instance();
    const QuboModel model = build_qubm(inst, 100.0, 1.0);

    double best_energy = 0.0;
    bool first = true;
    for_each_assignment(inst.num_segments(), [&](const Assignment& x) {
        const double energy = qubo_energy(model, x);
        if (first || energy < best_energy) {
            best_energy = energy;
            first = false;
        }
    });

    const SolveReport report = simulated_annealing(model, quick_schedule(3));
    CHECK(report.energy == doctest::Approx(best_energy).epsilon(1e-10));
    CHECK(report.feasible);
}

TEST_CASE("annealer is deterministic per seed and monotone in restarts") {
    GeneratorConfig config;
    config.num_tracks = 3;
    config.num_layers = 5;
    config.seed = 17;
    const Instance inst = generate_event(config);
    const QuboModel model = build_qubm(inst, 100.0, 1.0);

    const SolveReport a = simulated_annealing(model, quick_schedule(42));
    const SolveReport b = simulated_annealing(model, quick_schedule(42));
    CHECK(a.assignment == b.assignment);
    CHECK(a.energy == b.energy);

    AnnealSchedule more = quick_schedule(42);
    double previous = 0.0;
    for (int restarts = 1; restarts <= 6; ++restarts) {
        more.restarts = restarts;
        const double energy = simulated_annealing(model, more).energy;
        if (restarts > 1) CHECK(energy <= previous);
        previous = energy;
    }
}

TEST_CASE("incremental flip deltas match full re-evaluation") {
    SplitMix64 rng(23);
    QuboModel model;
    model.num_vars = 24;
    model.alpha = 1.0;
    model.gamma = 1.0;
    model.offset = rng.uniform(-2, 2);
    for (int v = 0; v < model.num_vars; ++v) model.linear.push_back(rng.uniform(-3, 3));
    for (int a = 0; a < model.num_vars; ++a) {
        for (int b = a + 1; b < model.num_vars; ++b) {
            if (rng.uniform01() < 0.3) model.quadratic.push_back({a, b, rng.uniform(-2, 2)});
        }
    }

    Assignment x(static_cast<std::size_t>(model.num_vars), 0);
    for (auto& bit : x) bit = rng.coin();
    QuboState state(model, x);

    for (int flip = 0; flip < 1000; ++flip) {
        const int v = static_cast<int>(rng.index(static_cast<std::size_t>(model.num_vars)));
        const double before = qubo_energy(model, state.assignment());
        const double delta = state.flip_delta(v);
        state.flip(v);
        const double after = qubo_energy(model, state.assignment());
        CHECK(std::abs((after - before) - delta) < 1e-9);
        CHECK(std::abs(state.energy() - after) < 1e-9);
    }
}

TEST_CASE("exact search solves the unique chain") {
    const Instance inst = straight_track_instance(4);
    const SolveReport report = exact_search(inst, 100.0);
    CHECK(report.feasible);
    CHECK(report.objective == doctest::Approx(100.0 * true_cost(inst)).epsilon(1e-12));
    CHECK(report.tracks == inst.truth);
}

TEST_CASE("exact search prefers straight tracks over crossing decoys") {
    const Instance inst = two_track_instance();
    const SolveReport report = exact_search(inst, 100.0);

    // Oracle: full enumeration over all assignments.
    double oracle_best = 0.0;
    Assignment oracle_assignment;
    REQUIRE(oracle_best_feasible(inst, 100.0, oracle_best, oracle_assignment));
    CHECK(report.objective == doctest::Approx(oracle_best).epsilon(1e-12));

    // The straight pairing is strictly better than the crossing one here, so
    // the tracks must follow the parallel lines.
    REQUIRE(report.tracks.size() == 2);
    for (const auto& track : report.tracks) {
        const double y = inst.hit(track[0]).position.y();
        for (int id : track) CHECK(inst.hit(id).position.y() == y);
    }
}

TEST_CASE("pruned search equals exhaustive enumeration") {
    SplitMix64 seeds(404);
    for (int trial = 0; trial < 8; ++trial) {
        GeneratorConfig config;
        config.num_tracks = 2 + static_cast<int>(seeds.index(3));
        config.num_layers = 3 + static_cast<int>(seeds.index(2));
        config.curvature = 0.15;
        config.seed = seeds.next_u64() % 10000;
        const Instance inst = generate_event(config);

        ExactOptions pruned;
        ExactOptions exhaustive;
        exhaustive.prune = false;
        const SolveReport a = exact_search(inst, 100.0, pruned);
        const SolveReport b = exact_search(inst, 100.0, exhaustive);
        CHECK(a.objective == b.objective);
        CHECK(a.assignment == b.assignment);
    }
}

TEST_CASE("exact search refuses instances above the layer cap") {
    GeneratorConfig config;
    config.num_tracks = 9;
    config.num_layers = 3;
    config.seed = 7;
    const Instance inst = generate_event(config);
    CHECK_THROWS_WITH_AS(exact_search(inst, 100.0),
                         doctest::Contains("instance too large for exact search"),
                         std::runtime_error);

    ExactOptions relaxed;
    relaxed.max_hits_per_layer = 0;
    CHECK(exact_search(inst, 100.0, relaxed).feasible);
}

TEST_CASE("exact search times out on a dense instance") {
    GeneratorConfig config;
    config.num_tracks = 90;
    config.num_layers = 7;
    config.seed = 9;
    Instance inst = generate_event(config);
    // Rebuild the unfiltered candidate sets: every forward pair within the
    // skip limit, every near-straight chain. The search tree over those is
    // far beyond any unit-test budget.
    inst.segments = build_segments(inst.hits, FilterConfig{});
    inst.triplets = build_triplets(inst.hits, inst.segments, FilterConfig{});

    ExactOptions options;
    options.max_hits_per_layer = 0;
    options.time_limit_seconds = 0.1;
    CHECK_THROWS_AS(exact_search(inst, 100.0, options), TimeoutError);
}

TEST_CASE("greedy follows the unique chain and stays above the optimum") {
    const Instance chain = straight_track_instance(5);
    const SolveReport greedy_chain = greedy_baseline(chain, 100.0);
    CHECK(greedy_chain.feasible);
    CHECK(greedy_chain.tracks == chain.truth);

    GeneratorConfig config;
    config.num_tracks = 4;
    config.num_layers = 5;
    config.curvature = 0.02;
    config.seed = 71;
    const Instance separated = generate_event(config);
    const SolveReport greedy = greedy_baseline(separated, 100.0);
    const SolveReport exact = exact_search(separated, 100.0);
    CHECK(greedy.feasible);
    CHECK(exact.objective <= greedy.objective + 1e-12);

    // Crossing-heavy: still feasible, never better than the optimum.
    GeneratorConfig crossing;
    crossing.num_tracks = 5;
    crossing.num_layers = 6;
    crossing.curvature = 0.2;
    crossing.seed = 72;
    const Instance dense = generate_event(crossing);
    const SolveReport greedy_dense = greedy_baseline(dense, 100.0);
    const SolveReport exact_dense = exact_search(dense, 100.0);
    if (greedy_dense.feasible) {
        CHECK(exact_dense.objective <= greedy_dense.objective + 1e-12);
    }
}

TEST_CASE("exact optimum lower-bounds annealed and random feasible assignments") {
    GeneratorConfig config;
    config.num_tracks = 4;
    config.num_layers = 5;
    config.curvature = 0.12;
    config.seed = 99;
    const Instance inst = generate_event(config);
    const SolveReport exact = exact_search(inst, 100.0);

    const SolveReport sa = anneal_tracks(inst, 100.0, 1.0, quick_schedule(5));
    if (sa.feasible) CHECK(exact.objective <= sa.objective + 1e-12);

    // Random feasible assignments via shuffled-truth permutations.
    CHECK(exact.objective <= 100.0 * true_cost(inst) + 1e-12);
}

TEST_CASE("decode and encode round-trip") {
    GeneratorConfig config;
    config.num_tracks = 3;
    config.num_layers = 5;
    config.seed = 19;
    const Instance inst = generate_event(config);

    const Assignment truth = encode_tracks(inst, inst.truth);
    CHECK(decode_tracks(inst, truth) == inst.truth);

    const SolveReport exact = exact_search(inst, 100.0);
    CHECK(encode_tracks(inst, decode_tracks(inst, exact.assignment)) == exact.assignment);

    const Assignment zero(static_cast<std::size_t>(inst.num_segments()), 0);
    CHECK_THROWS_WITH_AS(decode_tracks(inst, zero),
                         doctest::Contains("cannot decode infeasible assignment"),
                         std::runtime_error);
}

TEST_CASE("decoding a swapped matching yields two valid non-truth paths") {
    const Instance inst = two_track_instance();
    // Swap the tracks between layers 2 and 3: 1->3->6, 2->4->5.
    const TrackList swapped{{1, 3, 6}, {2, 4, 5}};
    const Assignment x = encode_tracks(inst, swapped);
    REQUIRE(check_feasible(inst, x).feasible);
    const TrackList decoded = decode_tracks(inst, x);
    CHECK(decoded == swapped);
    CHECK(decoded.size() == 2);
}

TEST_CASE("repair fixes what it can") {
    GeneratorConfig config;
    config.num_tracks = 3;
    config.num_layers = 4;
    config.seed = 29;
    const Instance inst = generate_event(config);
    const Assignment truth = encode_tracks(inst, inst.truth);

    SUBCASE("feasible input comes back unchanged") {
        CHECK(repair(inst, truth) == truth);
    }

    SUBCASE("the unique chain completes from nothing") {
        const Instance chain = straight_track_instance(4);
        const Assignment zero(static_cast<std::size_t>(chain.num_segments()), 0);
        const Assignment repaired = repair(chain, zero);
        CHECK(repaired == encode_tracks(chain, chain.truth));
    }

    SUBCASE("over-degree selections become feasible") {
        Assignment overfull = truth;
        for (auto& bit : overfull) bit = 1;  // every candidate selected
        const Assignment repaired = repair(inst, overfull);
        CHECK(check_feasible(inst, repaired).feasible);
    }

    SUBCASE("annealer leftovers become feasible") {
        SplitMix64 rng(87);
        Assignment noisy = truth;
        for (auto& bit : noisy) {
            if (rng.uniform01() < 0.2) bit ^= 1;
        }
        const Assignment repaired = repair(inst, noisy);
        CHECK(check_feasible(inst, repaired).feasible);
    }
}

TEST_CASE("default annealing lands on the optimum for small instances") {
    // Regression guard on the default schedule, not a tight benchmark: at
    // least 95 of 100 seeded runs must reach the exact optimum.
    GeneratorConfig config;
    config.num_tracks = 4;
    config.num_layers = 4;
    config.curvature = 0.1;
    config.seed = 1234;
    const Instance inst = generate_event(config);
    const SolveReport exact = exact_search(inst, 100.0);
    const QuboModel model = build_qubm(inst, 100.0, 1.0);

    int optima = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const SolveReport raw = simulated_annealing(model, quick_schedule(seed));
        const SolveReport sa = repair_report(inst, model, raw);
        if (sa.feasible && std::abs(sa.objective - exact.objective) < 1e-9) ++optima;
    }
    CHECK(optima >= 95);
}
