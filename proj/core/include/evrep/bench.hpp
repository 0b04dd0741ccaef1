#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evrep/event.hpp"

namespace evrep {

/// Timing protocol configuration. Every representation is timed on the same
/// packet set; per packet the median of `repeats` runs counts, with one
/// untimed warm-up excluded from the statistics.
struct BenchConfig {
    std::size_t packet_count = 50;
    std::uint64_t packet_duration_us = 100'000;
    int repeats = 3;
    std::size_t labits_bins = 65;
    std::size_t voxel_bins = 65;
    std::size_t tore_depth = 3;
    /// Adds a multi-threaded layered-builder row next to the single-threaded
    /// rows so both modes appear in one report.
    bool parallel = false;
};

struct RepresentationTiming {
    std::string name;
    double mean_s = 0.0;
    double median_s = 0.0;
    double p95_s = 0.0;
    double events_per_s = 0.0;
    /// FNV-1a over the output tensor bytes of every packet; lets callers check
    /// that timed builds equal standalone builds bit for bit.
    std::uint64_t checksum = 0;
};

struct BenchReport {
    std::vector<RepresentationTiming> rows;
    std::string machine;
    BenchConfig config;

    [[nodiscard]] std::string table() const;
    /// One structured record per representation, line-delimited.
    [[nodiscard]] std::string records() const;
};

/// Times every builder on every packet (identical packets for all builders,
/// monotonic clock, full build call including output allocation). Timings are
/// environment-dependent and reported, never asserted here.
BenchReport run_bench(std::span<const EventStream> streams, const BenchConfig& config);

/// FNV-1a checksum used for the report's bit-identity column.
std::uint64_t fnv1a(std::span<const std::byte> bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace evrep
