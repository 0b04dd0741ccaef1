#include "evrep/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <thread>

#include "evrep/representations.hpp"
#include "evrep/tensor.hpp"

namespace evrep {

std::uint64_t fnv1a(std::span<const std::byte> bytes, std::uint64_t seed) {
    std::uint64_t hash = seed;
    for (const std::byte b : bytes) {
        hash ^= static_cast<std::uint64_t>(b);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

namespace {

std::uint64_t tensor_checksum(const DenseTensor& tensor, std::uint64_t seed) {
    const auto values = tensor.values();
    return fnv1a(std::as_bytes(values), seed);
}

struct Candidate {
    std::string name;
    std::function<DenseTensor(const EventStream&)> build;
};

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

BenchReport run_bench(std::span<const EventStream> streams, const BenchConfig& config) {
    if (streams.empty()) {
        throw DegenerateStream("benchmark needs at least one packet");
    }
    std::uint64_t total_events = 0;
    for (const EventStream& stream : streams) {
        natural_window(stream);  // throws DegenerateStream on unusable packets
        total_events += stream.size();
    }
    if (config.repeats < 1) {
        throw BadConfig("repeats must be >= 1");
    }

    std::vector<Candidate> candidates;
    candidates.push_back({"labits", [&](const EventStream& s) {
                              LabitsConfig c;
                              c.bins = config.labits_bins;
                              return build_labits(s, c);
                          }});
    if (config.parallel) {
        candidates.push_back({"labits_mt", [&](const EventStream& s) {
                                  LabitsConfig c;
                                  c.bins = config.labits_bins;
                                  c.threads = 0;  // hardware concurrency
                                  return build_labits(s, c);
                              }});
    }
    candidates.push_back({"voxel", [&](const EventStream& s) {
                              VoxelConfig c;
                              c.bins = config.voxel_bins;
                              return build_voxel_grid(s, c);
                          }});
    candidates.push_back({"tore", [&](const EventStream& s) {
                              ToreConfig c;
                              c.depth = config.tore_depth;
                              return build_tore(s, c);
                          }});
    candidates.push_back({"time_surface", [&](const EventStream& s) {
                              return build_time_surface(s, natural_window(s));
                          }});
    candidates.push_back({"event_frame", [&](const EventStream& s) {
                              return build_event_frame(s);
                          }});
    candidates.push_back({"event_count", [&](const EventStream& s) {
                              return build_event_count(s);
                          }});

    using clock = std::chrono::steady_clock;
    BenchReport report;
    report.config = config;
    {
        std::ostringstream machine;
        machine << std::thread::hardware_concurrency() << " hw threads, "
                << (sizeof(void*) * 8) << "-bit";
        report.machine = machine.str();
    }

    for (const Candidate& candidate : candidates) {
        std::vector<double> per_packet;
        per_packet.reserve(streams.size());
        std::uint64_t checksum = 0xcbf29ce484222325ULL;
        for (const EventStream& stream : streams) {
            // warm-up run, also feeds the bit-identity checksum
            checksum = tensor_checksum(candidate.build(stream), checksum);
            std::vector<double> repeats;
            repeats.reserve(config.repeats);
            for (int r = 0; r < config.repeats; ++r) {
                const auto begin = clock::now();
                const DenseTensor tensor = candidate.build(stream);
                const auto end = clock::now();
                // keep the result alive through the stop so allocation stays in
                (void)tensor;
                repeats.push_back(std::chrono::duration<double>(end - begin).count());
            }
            per_packet.push_back(median_of(repeats));
        }
        RepresentationTiming row;
        row.name = candidate.name;
        double sum = 0.0;
        for (const double t : per_packet) {
            sum += t;
        }
        row.mean_s = sum / static_cast<double>(per_packet.size());
        row.median_s = median_of(per_packet);
        std::vector<double> sorted = per_packet;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t idx =
            std::min(sorted.size() - 1,
                     static_cast<std::size_t>(std::ceil(0.95 * sorted.size())) - 1);
        row.p95_s = sorted[idx];
        row.events_per_s = sum > 0.0 ? static_cast<double>(total_events) / sum : 0.0;
        row.checksum = checksum;
        report.rows.push_back(std::move(row));
    }
    return report;
}

std::string BenchReport::table() const {
    std::ostringstream out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-14s %12s %12s %12s %16s\n", "representation", "mean_s",
                  "median_s", "p95_s", "events_per_s");
    out << line;
    for (const RepresentationTiming& row : rows) {
        std::snprintf(line, sizeof(line), "%-14s %12.6f %12.6f %12.6f %16.0f\n", row.name.c_str(),
                      row.mean_s, row.median_s, row.p95_s, row.events_per_s);
        out << line;
    }
    return out.str();
}

std::string BenchReport::records() const {
    std::ostringstream out;
    char line[512];
    for (const RepresentationTiming& row : rows) {
        std::snprintf(line, sizeof(line),
                      "{\"name\":\"%s\",\"mean_s\":%.9g,\"median_s\":%.9g,\"p95_s\":%.9g,"
                      "\"events_per_s\":%.9g}\n",
                      row.name.c_str(), row.mean_s, row.median_s, row.p95_s, row.events_per_s);
        out << line;
    }
    return out.str();
}

}  // namespace evrep
