#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "evrep/event.hpp"

namespace evrep {

/// Parses `t,x,y,p` lines (decimal integers, `#` comments, blank lines ignored).
/// Polarity may be encoded as {-1,1} or {0,1}; 0 maps to -1. Input must already
/// be sorted by t; unsorted input is an error, never silently reordered.
EventStream parse_csv(std::istream& text, SensorGeometry geometry);

/// Writes one `t,x,y,p` line per event with polarity as -1/1.
void write_csv(std::ostream& out, const EventStream& stream);

/// Binary stream format, little-endian:
///   header:  magic "EVS1", u16 width, u16 height, u64 event count
///   records: u64 t (microseconds), u16 x, u16 y, i8 p, 1 zero pad byte
EventStream read_binary(std::istream& bytes);
void write_binary(std::ostream& out, const EventStream& stream);

/// File helpers. `.csv` extension selects CSV, anything else the binary format.
/// CSV files written here start with a `# geometry W H` comment; on read the
/// comment (or the explicit `geometry` argument) wins, otherwise the geometry
/// is the tightest fit around the events.
EventStream read_events_file(const std::string& path,
                             std::optional<SensorGeometry> geometry = std::nullopt);
void write_events_file(const std::string& path, const EventStream& stream);

}  // namespace evrep
