#include "evrep/event_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace evrep {

namespace {

constexpr std::array<char, 4> kMagic = {'E', 'V', 'S', '1'};
constexpr std::size_t kRecordBytes = 14;  // u64 t + u16 x + u16 y + i8 p + pad

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename Int>
bool parse_int(std::string_view field, Int& out) {
    field = trim(field);
    if (field.empty()) {
        return false;
    }
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
    return ec == std::errc() && ptr == field.data() + field.size();
}

void put_le(std::ostream& out, std::uint64_t value, int bytes) {
    for (int i = 0; i < bytes; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
    std::uint64_t value = 0;
    for (int i = 0; i < bytes; ++i) {
        value |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return value;
}

}  // namespace

EventStream parse_csv(std::istream& text, SensorGeometry geometry) {
    std::vector<Event> events;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(text, line)) {
        ++line_number;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        std::array<std::string_view, 4> fields;
        std::size_t begin = 0;
        std::size_t field_count = 0;
        for (std::size_t i = 0; i <= body.size(); ++i) {
            if (i == body.size() || body[i] == ',') {
                if (field_count == 4) {
                    throw MalformedLine(line_number, "expected 4 fields");
                }
                fields[field_count++] = body.substr(begin, i - begin);
                begin = i + 1;
            }
        }
        if (field_count != 4) {
            throw MalformedLine(line_number, "expected 4 fields");
        }
        std::uint64_t t = 0;
        std::uint32_t x = 0;
        std::uint32_t y = 0;
        int polarity = 0;
        if (!parse_int(fields[0], t) || !parse_int(fields[1], x) || !parse_int(fields[2], y)
            || !parse_int(fields[3], polarity)) {
            throw MalformedLine(line_number, "fields must be decimal integers");
        }
        if (polarity != -1 && polarity != 0 && polarity != 1) {
            throw MalformedLine(line_number, "polarity must be -1, 0 or 1");
        }
        if (x > 0xffff || y > 0xffff) {
            throw OutOfBounds(events.size());
        }
        events.push_back(Event{t, static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y),
                               static_cast<std::int8_t>(polarity == 0 ? -1 : polarity)});
    }
    return EventStream(geometry, std::move(events));
}

void write_csv(std::ostream& out, const EventStream& stream) {
    for (const Event& e : stream.events()) {
        out << e.t << ',' << e.x << ',' << e.y << ',' << static_cast<int>(e.p) << '\n';
    }
}

EventStream read_binary(std::istream& bytes) {
    std::array<unsigned char, 16> header;
    bytes.read(reinterpret_cast<char*>(header.data()), header.size());
    if (bytes.gcount() != static_cast<std::streamsize>(header.size())) {
        throw BadMagic("header shorter than 16 bytes");
    }
    if (std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
        throw BadMagic();
    }
    SensorGeometry geometry{static_cast<std::uint16_t>(get_le(header.data() + 4, 2)),
                            static_cast<std::uint16_t>(get_le(header.data() + 6, 2))};
    const std::uint64_t count = get_le(header.data() + 8, 8);

    std::vector<Event> events;
    // corrupt headers can promise absurd counts; let TruncatedRecord catch them
    events.reserve(std::min<std::uint64_t>(count, 1 << 20));
    std::array<unsigned char, kRecordBytes> record;
    for (std::uint64_t i = 0; i < count; ++i) {
        bytes.read(reinterpret_cast<char*>(record.data()), record.size());
        if (bytes.gcount() != static_cast<std::streamsize>(record.size())) {
            throw TruncatedRecord("record " + std::to_string(i) + " truncated");
        }
        events.push_back(Event{get_le(record.data(), 8),
                               static_cast<std::uint16_t>(get_le(record.data() + 8, 2)),
                               static_cast<std::uint16_t>(get_le(record.data() + 10, 2)),
                               static_cast<std::int8_t>(record[12])});
    }
    return EventStream(geometry, std::move(events));
}

void write_binary(std::ostream& out, const EventStream& stream) {
    out.write(kMagic.data(), kMagic.size());
    put_le(out, stream.geometry().width, 2);
    put_le(out, stream.geometry().height, 2);
    put_le(out, stream.size(), 8);
    for (const Event& e : stream.events()) {
        put_le(out, e.t, 8);
        put_le(out, e.x, 2);
        put_le(out, e.y, 2);
        out.put(static_cast<char>(e.p));
        out.put('\0');
    }
}

EventStream read_events_file(const std::string& path, std::optional<SensorGeometry> geometry) {
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ifstream in(path, csv ? std::ios::in : std::ios::in | std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    if (!csv) {
        return read_binary(in);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    if (!geometry) {
        // Written CSV carries the geometry as a leading comment; honor it when present.
        std::uint32_t w = 0;
        std::uint32_t h = 0;
        if (std::sscanf(buffer.str().c_str(), "# geometry %u %u", &w, &h) == 2 && w > 0 && h > 0
            && w <= 0xffff && h <= 0xffff) {
            geometry = SensorGeometry{static_cast<std::uint16_t>(w), static_cast<std::uint16_t>(h)};
        }
    }
    if (geometry) {
        return parse_csv(buffer, *geometry);
    }
    // Bare CSV with no declared geometry: tightest fit around the events.
    EventStream probe = parse_csv(buffer, SensorGeometry{0xffff, 0xffff});
    std::uint16_t w = 1;
    std::uint16_t h = 1;
    for (const Event& e : probe.events()) {
        w = std::max<std::uint16_t>(w, e.x + 1);
        h = std::max<std::uint16_t>(h, e.y + 1);
    }
    return EventStream(SensorGeometry{w, h},
                       std::vector<Event>(probe.events().begin(), probe.events().end()));
}

void write_events_file(const std::string& path, const EventStream& stream) {
    const bool csv = path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
    std::ofstream out(path, csv ? std::ios::out : std::ios::out | std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    if (csv) {
        out << "# geometry " << stream.geometry().width << ' ' << stream.geometry().height << '\n';
        write_csv(out, stream);
    } else {
        write_binary(out, stream);
    }
}

}  // namespace evrep
