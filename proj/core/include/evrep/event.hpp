#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evrep/errors.hpp"

namespace evrep {

/// A single sensor event: microsecond timestamp, pixel coordinates, polarity.
/// Polarity is stored as -1/+1; 0/1 encodings are mapped on ingest.
struct Event {
    std::uint64_t t;  ///< timestamp in microseconds
    std::uint16_t x;  ///< column, 0 <= x < width
    std::uint16_t y;  ///< row, 0 <= y < height
    std::int8_t p;    ///< polarity, exactly -1 or +1

    friend bool operator==(const Event&, const Event&) = default;
};

struct SensorGeometry {
    std::uint16_t width = 0;
    std::uint16_t height = 0;

    [[nodiscard]] std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * height;
    }
    friend bool operator==(const SensorGeometry&, const SensorGeometry&) = default;
};

/// Half- or fully-closed time interval in microseconds. Construction rejects
/// zero-duration windows (t_end must be strictly greater than t_start).
struct TimeWindow {
    TimeWindow(std::uint64_t start_us, std::uint64_t end_us) : t_start(start_us), t_end(end_us) {
        if (t_end <= t_start) {
            throw DegenerateWindow("window [" + std::to_string(t_start) + ", "
                                   + std::to_string(t_end) + "] has no duration");
        }
    }

    std::uint64_t t_start;
    std::uint64_t t_end;

    [[nodiscard]] std::uint64_t duration_us() const { return t_end - t_start; }
    friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

/// An immutable, validated event sequence over a fixed sensor geometry.
///
/// Invariants checked at construction: every event is inside the geometry,
/// polarities are -1/+1, and timestamps ascend (ties allowed; tie order is
/// the storage order and is preserved by every operation).
class EventStream {
public:
    EventStream(SensorGeometry geometry, std::vector<Event> events);

    [[nodiscard]] const SensorGeometry& geometry() const { return geometry_; }
    [[nodiscard]] std::span<const Event> events() const { return events_; }
    [[nodiscard]] std::size_t size() const { return events_.size(); }
    [[nodiscard]] bool empty() const { return events_.empty(); }

private:
    SensorGeometry geometry_;
    std::vector<Event> events_;
};

/// Builds a stream from possibly unsorted events. Stable: events with equal
/// timestamps keep their input order. The one sanctioned way to reorder;
/// EventStream itself rejects unsorted input instead of silently sorting.
EventStream make_sorted_stream(SensorGeometry geometry, std::vector<Event> events);

/// Events with t_start <= t <= t_end (closed_end) or t_start <= t < t_end.
/// Binary search on t; order preserved. An empty result is valid.
EventStream slice(const EventStream& stream, const TimeWindow& window, bool closed_end);

/// [t_first, t_last] of the stream. Throws DegenerateStream for streams with
/// fewer than two events or zero total duration.
TimeWindow natural_window(const EventStream& stream);

}  // namespace evrep
