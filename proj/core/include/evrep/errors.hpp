#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evrep {

/// Base class for all evrep domain errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A CSV line that does not match `t,x,y,p`. Carries the 1-based line number.
struct MalformedLine : Error {
    explicit MalformedLine(std::size_t line_number, const std::string& detail = "")
        : Error("malformed line " + std::to_string(line_number)
                + (detail.empty() ? "" : ": " + detail)),
          line(line_number) {}
    std::size_t line;
};

/// Event coordinates outside the declared sensor geometry. Carries the 0-based event index.
struct OutOfBounds : Error {
    explicit OutOfBounds(std::size_t event_index)
        : Error("event " + std::to_string(event_index) + " outside sensor geometry"),
          index(event_index) {}
    std::size_t index;
};

/// Event polarity other than -1/+1. Carries the 0-based event index.
struct InvalidPolarity : Error {
    explicit InvalidPolarity(std::size_t event_index)
        : Error("event " + std::to_string(event_index) + " has polarity outside {-1,+1}"),
          index(event_index) {}
    std::size_t index;
};

/// Timestamps not ascending. Carries the 0-based index of the first offending event.
struct UnsortedStream : Error {
    explicit UnsortedStream(std::size_t event_index)
        : Error("stream unsorted at event " + std::to_string(event_index)),
          index(event_index) {}
    std::size_t index;
};

struct BadMagic : Error {
    BadMagic() : Error("bad magic bytes") {}
    explicit BadMagic(const std::string& detail) : Error("bad magic bytes: " + detail) {}
};

struct TruncatedRecord : Error {
    using Error::Error;
};

/// Stream too short (or zero-duration) to derive a natural time window.
struct DegenerateStream : Error {
    using Error::Error;
};

/// Time window with t_end <= t_start.
struct DegenerateWindow : Error {
    using Error::Error;
};

struct BadThreshold : Error {
    using Error::Error;
};

struct BadConfig : Error {
    using Error::Error;
};

struct DimMismatch : Error {
    using Error::Error;
};

struct NoValidPixels : Error {
    using Error::Error;
};

struct EmptyScene : Error {
    using Error::Error;
};

struct EmptyIterates : Error {
    using Error::Error;
};

struct TauOutOfRange : Error {
    using Error::Error;
};

struct Underdetermined : Error {
    using Error::Error;
};

}  // namespace evrep
