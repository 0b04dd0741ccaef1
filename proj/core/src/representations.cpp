#include "evrep/representations.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace evrep {

namespace {

TimeWindow resolve_window(const EventStream& stream, const std::optional<TimeWindow>& window) {
    if (window) {
        return *window;
    }
    if (stream.size() < 2 || stream.events().back().t == stream.events().front().t) {
        throw DegenerateWindow("stream cannot supply a natural window");
    }
    return TimeWindow(stream.events().front().t, stream.events().back().t);
}

/// Index range [first, last) of events with lo <= t <= hi, bounds in
/// microseconds as doubles so probe arithmetic stays in one domain.
std::pair<std::size_t, std::size_t> event_range(std::span<const Event> events, double lo,
                                                double hi) {
    const auto first = std::partition_point(
        events.begin(), events.end(),
        [lo](const Event& e) { return static_cast<double>(e.t) < lo; });
    const auto last = std::partition_point(
        first, events.end(), [hi](const Event& e) { return static_cast<double>(e.t) <= hi; });
    return {static_cast<std::size_t>(first - events.begin()),
            static_cast<std::size_t>(last - events.begin())};
}

// One ascending pass over the events of a probe chunk. Each event can serve
// at most the two probes bracketing it as a past candidate and the probe one
// interval ahead as a future candidate, so it touches <= 4 probe cells. Per
// cell a state byte arbitrates: past overwrites past (the scan order makes
// the last write the most recent event) and beats future outright, which is
// safe because for any single probe every past candidate is scanned before
// any future candidate.
void fill_labits_probes(std::span<const Event> events, const SensorGeometry& geometry,
                        double window_start, double tau_range, FutureMode future_mode,
                        std::size_t probe_begin, std::size_t probe_end, DenseTensor& out) {
    enum : std::uint8_t { kFill = 0, kFromFuture = 1, kFromPast = 2 };
    const std::size_t plane = geometry.pixel_count();
    std::vector<std::uint8_t> state((probe_end - probe_begin) * plane, kFill);

    const double chunk_lo =
        window_start + static_cast<double>(probe_begin) * tau_range - tau_range;
    const double chunk_hi =
        window_start + static_cast<double>(probe_end - 1) * tau_range + tau_range;
    const auto [first, last] = event_range(events, chunk_lo, chunk_hi);
    float* values = out.values().data();

    for (std::size_t n = first; n < last; ++n) {
        const Event& e = events[n];
        const double t = static_cast<double>(e.t);
        const std::size_t px = static_cast<std::size_t>(e.y) * geometry.width + e.x;
        // nearest probes; the +-1 slack absorbs the division rounding, the
        // canonical comparisons below decide the actual membership
        const long nearest = static_cast<long>(std::floor((t - window_start) / tau_range));
        const long lo = std::max<long>(nearest - 1, static_cast<long>(probe_begin));
        const long hi = std::min<long>(nearest + 2, static_cast<long>(probe_end) - 1);
        for (long i = lo; i <= hi; ++i) {
            const double probe = window_start + static_cast<double>(i) * tau_range;
            std::uint8_t* cell =
                state.data() + (static_cast<std::size_t>(i) - probe_begin) * plane + px;
            if (t <= probe) {
                if (t < probe - tau_range) {
                    continue;
                }
                *cell = kFromPast;
            } else {
                if (t > probe + tau_range || *cell == kFromPast
                    || (*cell == kFromFuture && future_mode == FutureMode::earliest)) {
                    continue;
                }
                *cell = kFromFuture;
            }
            values[(static_cast<std::size_t>(i) - 1) * plane + px] =
                static_cast<float>((t - probe) / tau_range);
        }
    }
}

}  // namespace

DenseTensor build_labits(const EventStream& stream, const LabitsConfig& config) {
    if (config.bins < 1) {
        throw BadConfig("labits needs at least one bin");
    }
    const TimeWindow window = resolve_window(stream, config.window);
    const double tau_range =
        static_cast<double>(window.duration_us()) / static_cast<double>(config.bins + 1);
    const auto& geometry = stream.geometry();
    DenseTensor out(config.bins, geometry.height, geometry.width, -1.0f);
    const double window_start = static_cast<double>(window.t_start);

    unsigned threads = config.threads == 0 ? std::thread::hardware_concurrency() : config.threads;
    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(config.bins));

    if (threads == 1) {
        fill_labits_probes(stream.events(), geometry, window_start, tau_range, config.future_mode,
                           1, config.bins + 1, out);
        return out;
    }

    // Probes partition the output into disjoint layers, so workers never share
    // writes and the result is bit-identical at any thread count.
    std::vector<std::thread> workers;
    workers.reserve(threads);
    const std::size_t per_worker = (config.bins + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = 1 + w * per_worker;
        const std::size_t end = std::min<std::size_t>(begin + per_worker, config.bins + 1);
        if (begin >= end) {
            break;
        }
        workers.emplace_back([&, begin, end] {
            fill_labits_probes(stream.events(), geometry, window_start, tau_range,
                               config.future_mode, begin, end, out);
        });
    }
    for (std::thread& worker : workers) {
        worker.join();
    }
    return out;
}

DenseTensor build_time_surface(const EventStream& stream, const TimeWindow& window) {
    const auto& geometry = stream.geometry();
    DenseTensor out(2, geometry.height, geometry.width, -1.0f);
    const double start = static_cast<double>(window.t_start);
    const double duration = static_cast<double>(window.duration_us());
    const auto [first, last] = event_range(stream.events(), start,
                                           static_cast<double>(window.t_end));
    for (std::size_t n = first; n < last; ++n) {
        const Event& e = stream.events()[n];
        const std::size_t channel = e.p > 0 ? 1 : 0;
        out.at(channel, e.y, e.x) =
            static_cast<float>((static_cast<double>(e.t) - start) / duration);
    }
    return out;
}

DenseTensor build_event_frame(const EventStream& stream) {
    const auto& geometry = stream.geometry();
    DenseTensor out(1, geometry.height, geometry.width, 0.0f);
    for (const Event& e : stream.events()) {
        out.at(0, e.y, e.x) += static_cast<float>(e.p);
    }
    return out;
}

DenseTensor build_event_count(const EventStream& stream) {
    const auto& geometry = stream.geometry();
    DenseTensor out(2, geometry.height, geometry.width, 0.0f);
    for (const Event& e : stream.events()) {
        out.at(e.p > 0 ? 1 : 0, e.y, e.x) += 1.0f;
    }
    return out;
}

DenseTensor build_voxel_grid(const EventStream& stream, const VoxelConfig& config) {
    if (config.bins < 2) {
        throw BadConfig("voxel grid needs at least two bins");
    }
    const TimeWindow window = resolve_window(stream, config.window);
    const auto& geometry = stream.geometry();
    DenseTensor out(config.bins, geometry.height, geometry.width, 0.0f);
    const double start = static_cast<double>(window.t_start);
    const double duration = static_cast<double>(window.duration_us());
    const double scale = static_cast<double>(config.bins - 1);
    const std::size_t plane = geometry.pixel_count();
    float* values = out.values().data();
    for (const Event& e : stream.events()) {
        const double t_star = (static_cast<double>(e.t) - start) / duration * scale;
        const double b0 = std::floor(t_star);
        const std::size_t px = static_cast<std::size_t>(e.y) * geometry.width + e.x;
        const long lo = static_cast<long>(b0);
        if (lo >= 0 && lo < static_cast<long>(config.bins)) {
            values[static_cast<std::size_t>(lo) * plane + px] +=
                static_cast<float>(e.p * (1.0 - (t_star - b0)));
        }
        if (lo + 1 >= 0 && lo + 1 < static_cast<long>(config.bins)) {
            values[static_cast<std::size_t>(lo + 1) * plane + px] +=
                static_cast<float>(e.p * (t_star - b0));
        }
    }
    return out;
}

DenseTensor build_tore(const EventStream& stream, const ToreConfig& config) {
    if (config.depth < 1) {
        throw BadConfig("tore volume needs depth >= 1");
    }
    const TimeWindow window = resolve_window(stream, config.window);
    const auto& geometry = stream.geometry();
    const std::size_t depth = config.depth;
    DenseTensor out(2 * depth, geometry.height, geometry.width, -1.0f);
    const double start = static_cast<double>(window.t_start);
    const double duration = static_cast<double>(window.duration_us());
    const std::size_t plane = geometry.pixel_count();
    float* values = out.values().data();
    const auto [first, last] = event_range(stream.events(), start,
                                           static_cast<double>(window.t_end));
    for (std::size_t n = first; n < last; ++n) {
        const Event& e = stream.events()[n];
        const std::size_t px = static_cast<std::size_t>(e.y) * geometry.width + e.x;
        const std::size_t base = (e.p > 0 ? depth : 0) * plane + px;
        // shift the pixel's stack one layer down; layer 0 stays most recent
        for (std::size_t d = depth - 1; d > 0; --d) {
            values[base + d * plane] = values[base + (d - 1) * plane];
        }
        values[base] = static_cast<float>((static_cast<double>(e.t) - start) / duration);
    }
    return out;
}

}  // namespace evrep
