#include <doctest.h>

#include <random>
#include <thread>

#include "evrep/representations.hpp"
#include "test_support.hpp"

using namespace evrep;

namespace {

const SensorGeometry k16{16, 16};

LabitsConfig labits_config(std::size_t bins, std::optional<TimeWindow> window = std::nullopt) {
    LabitsConfig config;
    config.bins = bins;
    config.window = window;
    return config;
}

}  // namespace

TEST_CASE("labits hand trace: explicit window, single event") {
    // window [0, 800], B=3: tau_range 200, probes at 200/400/600; event at 250
    const EventStream stream(k16, {Event{250, 5, 5, 1}});
    const DenseTensor labits = build_labits(stream, labits_config(3, TimeWindow(0, 800)));
    CHECK(labits.at(0, 5, 5) == 0.25f);   // future branch: (250-200)/200
    CHECK(labits.at(1, 5, 5) == -0.75f);  // past branch: (250-400)/200
    CHECK(labits.at(2, 5, 5) == -1.0f);   // nothing within reach
    for (std::size_t c = 0; c < 3; ++c) {
        for (std::size_t y = 0; y < 16; ++y) {
            for (std::size_t x = 0; x < 16; ++x) {
                if (x != 5 || y != 5) {
                    CHECK(labits.at(c, y, x) == -1.0f);
                }
            }
        }
    }
}

TEST_CASE("labits hand trace: natural window boundary collision") {
    // natural window [100, 900], B=3: probes 300/500/700. The event at exactly
    // probe - tau_range lands on -1 and merges with the fill value.
    const EventStream stream(k16, {Event{100, 5, 5, 1}, Event{900, 5, 5, 1}});
    const DenseTensor labits = build_labits(stream, labits_config(3));
    CHECK(labits.at(0, 5, 5) == -1.0f);
    CHECK(labits.at(1, 5, 5) == -1.0f);
    CHECK(labits.at(2, 5, 5) == 1.0f);
}

TEST_CASE("labits matches the literal per-probe reference on random streams") {
    std::mt19937_64 rng(42);
    for (int round = 0; round < 25; ++round) {
        const EventStream stream = testutil::random_stream(rng, {.max_events = 2000});
        LabitsConfig config = labits_config(1 + static_cast<std::size_t>(rng() % 16));
        if (rng() % 2 == 0) {
            config.window = TimeWindow(0, 1'100'000);
        }
        if (rng() % 2 == 0) {
            config.future_mode = FutureMode::latest_overwrite;
        }
        const DenseTensor fast = build_labits(stream, config);
        const DenseTensor reference = testutil::labits_reference(stream, config);
        CHECK(testutil::max_abs_difference(fast, reference) <= 1e-6);
    }
}

TEST_CASE("labits prefers the past event when both sides qualify") {
    // probe at 400 (B=1, window [0, 800]): past event 390, future event 410
    const EventStream stream(k16, {Event{390, 3, 3, 1}, Event{410, 3, 3, 1}});
    const DenseTensor labits = build_labits(stream, labits_config(1, TimeWindow(0, 800)));
    CHECK(labits.at(0, 3, 3) == doctest::Approx(-0.025));
    CHECK(labits.at(0, 3, 3) <= 0.0f);
}

TEST_CASE("future selection: earliest by default, latest behind the flag") {
    // probe at 400, future range (400, 800]: events at 500 and 700
    const EventStream stream(k16, {Event{500, 3, 3, 1}, Event{700, 3, 3, 1}});
    const DenseTensor earliest = build_labits(stream, labits_config(1, TimeWindow(0, 800)));
    CHECK(earliest.at(0, 3, 3) == 0.25f);  // (500-400)/400
    LabitsConfig config = labits_config(1, TimeWindow(0, 800));
    config.future_mode = FutureMode::latest_overwrite;
    const DenseTensor latest = build_labits(stream, config);
    CHECK(latest.at(0, 3, 3) == 0.75f);  // (700-400)/400
}

TEST_CASE("labits values stay in [-1, 1] for arbitrary streams") {
    std::mt19937_64 rng(99);
    for (int round = 0; round < 30; ++round) {
        const EventStream stream = testutil::random_stream(rng, {.max_events = 1500});
        const DenseTensor labits =
            build_labits(stream, labits_config(1 + static_cast<std::size_t>(rng() % 12)));
        for (const float v : labits.values()) {
            CHECK(v >= -1.0f);
            CHECK(v <= 1.0f);
        }
    }
}

TEST_CASE("hot-pixel locality: spam at one pixel never leaks to others") {
    std::mt19937_64 rng(1234);
    const EventStream base = testutil::random_stream(rng, {.max_events = 600,
                                                           .max_width = 32,
                                                           .max_height = 32,
                                                           .max_time_us = 100'000});
    const TimeWindow window(0, 120'000);
    const LabitsConfig config = labits_config(8, window);
    const DenseTensor before = build_labits(base, config);

    std::vector<Event> spammed(base.events().begin(), base.events().end());
    const std::uint16_t hot_x = 3;
    const std::uint16_t hot_y = 4;
    for (int i = 0; i < 10'000; ++i) {
        spammed.push_back(Event{static_cast<std::uint64_t>(12 * i), hot_x, hot_y, 1});
    }
    const EventStream noisy = make_sorted_stream(base.geometry(), std::move(spammed));
    const DenseTensor after = build_labits(noisy, config);

    for (std::size_t c = 0; c < before.channels(); ++c) {
        for (std::size_t y = 0; y < before.height(); ++y) {
            for (std::size_t x = 0; x < before.width(); ++x) {
                if (x == hot_x && y == hot_y) {
                    continue;
                }
                CHECK(std::bit_cast<std::uint32_t>(before.at(c, y, x))
                      == std::bit_cast<std::uint32_t>(after.at(c, y, x)));
            }
        }
    }
}

TEST_CASE("time surface") {
    SUBCASE("most recent event per polarity, window-normalized") {
        const EventStream stream(k16, {Event{100, 5, 5, 1}, Event{900, 5, 5, 1}});
        const DenseTensor ts = build_time_surface(stream, TimeWindow(100, 900));
        CHECK(ts.at(1, 5, 5) == 1.0f);   // (900-100)/800
        CHECK(ts.at(0, 5, 5) == -1.0f);  // no negative event
    }
    SUBCASE("empty stream is all fill") {
        const EventStream stream(k16, {});
        const DenseTensor ts = build_time_surface(stream, TimeWindow(0, 100));
        for (const float v : ts.values()) {
            CHECK(v == -1.0f);
        }
    }
    SUBCASE("later same-polarity event overwrites the earlier one") {
        const EventStream stream(k16, {Event{100, 2, 2, -1}, Event{500, 2, 2, -1}});
        const DenseTensor ts = build_time_surface(stream, TimeWindow(0, 1000));
        CHECK(ts.at(0, 2, 2) == 0.5f);
    }
}

TEST_CASE("event frame sums polarities") {
    const EventStream cancel(k16, {Event{1, 5, 5, 1}, Event{2, 5, 5, -1}});
    CHECK(build_event_frame(cancel).at(0, 5, 5) == 0.0f);
    const EventStream triple(k16, {Event{1, 5, 5, 1}, Event{2, 5, 5, 1}, Event{3, 5, 5, 1}});
    CHECK(build_event_frame(triple).at(0, 5, 5) == 3.0f);
    const DenseTensor empty = build_event_frame(EventStream(k16, {}));
    for (const float v : empty.values()) {
        CHECK(v == 0.0f);
    }
}

TEST_CASE("event count tallies per polarity") {
    const EventStream stream(k16, {Event{1, 5, 5, 1}, Event{2, 5, 5, -1}});
    const DenseTensor count = build_event_count(stream);
    CHECK(count.at(0, 5, 5) == 1.0f);
    CHECK(count.at(1, 5, 5) == 1.0f);
    std::vector<Event> repeated;
    for (int i = 0; i < 37; ++i) {
        repeated.push_back(Event{static_cast<std::uint64_t>(i), 4, 4, 1});
    }
    CHECK(build_event_count(EventStream(k16, std::move(repeated))).at(1, 4, 4) == 37.0f);
}

TEST_CASE("voxel grid bilinear kernel") {
    SUBCASE("event exactly on a bin") {
        // B=5 over [0, 1024]: t* = t/1024*4; t=512 -> t*=2, exact in binary
        const EventStream stream(k16, {Event{512, 5, 5, 1}});
        const DenseTensor voxel =
            build_voxel_grid(stream, VoxelConfig{5, TimeWindow(0, 1024)});
        CHECK(voxel.at(2, 5, 5) == 1.0f);
        CHECK(voxel.at(0, 5, 5) == 0.0f);
        CHECK(voxel.at(1, 5, 5) == 0.0f);
        CHECK(voxel.at(3, 5, 5) == 0.0f);
        CHECK(voxel.at(4, 5, 5) == 0.0f);
    }
    SUBCASE("half-way event splits evenly") {
        // B=4 over [0, 1000]: t* = t/1000*3; t=500 -> t*=1.5
        const EventStream stream(k16, {Event{500, 5, 5, 1}});
        const DenseTensor voxel =
            build_voxel_grid(stream, VoxelConfig{4, TimeWindow(0, 1000)});
        CHECK(voxel.at(1, 5, 5) == 0.5f);
        CHECK(voxel.at(2, 5, 5) == 0.5f);
    }
    SUBCASE("events outside an explicit window only reach their kernel tail") {
        // window [1000, 2000], B=4: t* = (t-1000)/1000*3
        std::vector<Event> events = {Event{500, 5, 5, 1},   // t* = -1.5: off the grid
                                     Event{900, 6, 6, 1},   // t* = -0.3: 0.7 into bin 0
                                     Event{2600, 7, 7, 1}}; // t* = 4.8: off the grid
        const EventStream stream(k16, std::move(events));
        const DenseTensor voxel =
            build_voxel_grid(stream, VoxelConfig{4, TimeWindow(1000, 2000)});
        for (std::size_t b = 0; b < 4; ++b) {
            CHECK(voxel.at(b, 5, 5) == 0.0f);
            CHECK(voxel.at(b, 7, 7) == 0.0f);
        }
        CHECK(voxel.at(0, 6, 6) == doctest::Approx(0.7).epsilon(1e-6));
        CHECK(voxel.at(1, 6, 6) == 0.0f);
    }
    SUBCASE("bin sums equal polarity sums (kernel partition of unity)") {
        std::mt19937_64 rng(5);
        for (int round = 0; round < 10; ++round) {
            const EventStream stream = testutil::random_stream(rng, {.max_events = 2000});
            const std::size_t bins = 2 + rng() % 14;
            const DenseTensor voxel = build_voxel_grid(stream, VoxelConfig{bins, std::nullopt});
            const DenseTensor frame = build_event_frame(stream);
            for (std::size_t y = 0; y < frame.height(); ++y) {
                for (std::size_t x = 0; x < frame.width(); ++x) {
                    double sum = 0.0;
                    for (std::size_t b = 0; b < bins; ++b) {
                        sum += voxel.at(b, y, x);
                    }
                    CHECK(std::abs(sum - frame.at(0, y, x)) <= 1e-5);
                }
            }
        }
    }
}

TEST_CASE("tore volume") {
    SUBCASE("single event fills only the top layer") {
        const EventStream stream(k16, {Event{500, 5, 5, 1}});
        const DenseTensor tore = build_tore(stream, ToreConfig{3, TimeWindow(0, 1000)});
        CHECK(tore.at(3, 5, 5) == 0.5f);   // positive stack starts at K
        CHECK(tore.at(4, 5, 5) == -1.0f);
        CHECK(tore.at(5, 5, 5) == -1.0f);
        CHECK(tore.at(0, 5, 5) == -1.0f);  // negative stack untouched
    }
    SUBCASE("stack keeps most recent first") {
        const EventStream stream(k16, {Event{200, 5, 5, 1}, Event{800, 5, 5, 1}});
        const DenseTensor tore = build_tore(stream, ToreConfig{2, TimeWindow(0, 1000)});
        CHECK(tore.at(2, 5, 5) == 0.8f);
        CHECK(tore.at(3, 5, 5) == 0.2f);
    }
    SUBCASE("depth-1 volume equals the time surface exactly") {
        std::mt19937_64 rng(77);
        for (int round = 0; round < 20; ++round) {
            const EventStream stream = testutil::random_stream(rng, {.max_events = 1200});
            const TimeWindow window = natural_window(stream);
            const DenseTensor tore = build_tore(stream, ToreConfig{1, window});
            const DenseTensor ts = build_time_surface(stream, window);
            CHECK(testutil::bitwise_equal(tore, ts));
        }
    }
}

TEST_CASE("builders are deterministic across runs, threads and parallelism") {
    std::mt19937_64 rng(31337);
    const EventStream stream = testutil::random_stream(rng, {.max_events = 3000});

    const DenseTensor once = build_labits(stream, labits_config(12));
    const DenseTensor twice = build_labits(stream, labits_config(12));
    CHECK(testutil::bitwise_equal(once, twice));

    LabitsConfig threaded = labits_config(12);
    threaded.threads = 4;
    CHECK(testutil::bitwise_equal(once, build_labits(stream, threaded)));

    // concurrent builds over the same immutable stream
    DenseTensor from_a(1, 1, 1);
    DenseTensor from_b(1, 1, 1);
    std::thread a([&] { from_a = build_voxel_grid(stream, VoxelConfig{8, std::nullopt}); });
    std::thread b([&] { from_b = build_voxel_grid(stream, VoxelConfig{8, std::nullopt}); });
    a.join();
    b.join();
    CHECK(testutil::bitwise_equal(from_a, from_b));
}

TEST_CASE("builder error paths") {
    const EventStream stream(k16, {Event{100, 1, 1, 1}, Event{900, 2, 2, 1}});
    CHECK_THROWS_AS(build_labits(stream, labits_config(0)), BadConfig);
    CHECK_THROWS_AS(build_voxel_grid(stream, VoxelConfig{1, std::nullopt}), BadConfig);
    CHECK_THROWS_AS(build_tore(stream, ToreConfig{0, std::nullopt}), BadConfig);

    const EventStream single(k16, {Event{100, 1, 1, 1}});
    CHECK_THROWS_AS(build_labits(single, labits_config(4)), DegenerateWindow);
    const EventStream same_t(k16, {Event{100, 1, 1, 1}, Event{100, 2, 2, 1}});
    CHECK_THROWS_AS(build_voxel_grid(same_t, VoxelConfig{4, std::nullopt}), DegenerateWindow);
}
