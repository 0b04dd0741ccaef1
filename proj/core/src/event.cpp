#include "evrep/event.hpp"

#include <algorithm>

namespace evrep {

namespace {

void validate(const SensorGeometry& geometry, const std::vector<Event>& events) {
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (e.x >= geometry.width || e.y >= geometry.height) {
            throw OutOfBounds(i);
        }
        if (e.p != -1 && e.p != 1) {
            throw InvalidPolarity(i);
        }
        if (i > 0 && e.t < events[i - 1].t) {
            throw UnsortedStream(i);
        }
    }
}

}  // namespace

EventStream::EventStream(SensorGeometry geometry, std::vector<Event> events)
    : geometry_(geometry), events_(std::move(events)) {
    if (geometry_.width < 1 || geometry_.height < 1) {
        throw BadConfig("sensor geometry must be at least 1x1");
    }
    validate(geometry_, events_);
}

EventStream make_sorted_stream(SensorGeometry geometry, std::vector<Event> events) {
    std::stable_sort(events.begin(), events.end(),
                     [](const Event& a, const Event& b) { return a.t < b.t; });
    return EventStream(geometry, std::move(events));
}

EventStream slice(const EventStream& stream, const TimeWindow& window, bool closed_end) {
    const auto events = stream.events();
    const auto first = std::lower_bound(
        events.begin(), events.end(), window.t_start,
        [](const Event& e, std::uint64_t t) { return e.t < t; });
    const auto last = closed_end
        ? std::upper_bound(events.begin(), events.end(), window.t_end,
                           [](std::uint64_t t, const Event& e) { return t < e.t; })
        : std::lower_bound(events.begin(), events.end(), window.t_end,
                           [](const Event& e, std::uint64_t t) { return e.t < t; });
    return EventStream(stream.geometry(), std::vector<Event>(first, last));
}

TimeWindow natural_window(const EventStream& stream) {
    if (stream.size() < 2) {
        throw DegenerateStream("natural window needs at least two events");
    }
    const std::uint64_t first = stream.events().front().t;
    const std::uint64_t last = stream.events().back().t;
    if (last == first) {
        throw DegenerateStream("natural window needs a nonzero duration");
    }
    return TimeWindow(first, last);
}

}  // namespace evrep
