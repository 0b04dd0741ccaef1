#pragma once

#include <optional>

#include "evrep/event.hpp"
#include "evrep/tensor.hpp"

namespace evrep {

/// How the layered bidirectional builder picks among several future events in
/// a probe's forward search range. `earliest` keeps the event closest to the
/// probe time; `latest_overwrite` keeps the last one in scan order instead
/// (kept selectable for fidelity testing against the overwrite formulation).
enum class FutureMode {
    earliest,
    latest_overwrite,
};

/// Configuration for the layered bidirectional time-surface builder.
///
/// The window [t_start, t_end] is split into bins+1 equal intervals of length
/// tau_range; layer i (1-based) is anchored at probe time
/// t_start + i * tau_range. With no explicit window the stream's natural
/// window (first to last event timestamp) is used.
struct LabitsConfig {
    std::size_t bins = 65;
    std::optional<TimeWindow> window;  ///< nullopt = natural window
    FutureMode future_mode = FutureMode::earliest;
    unsigned threads = 1;  ///< 0 = hardware concurrency; output is identical at any level
};

struct VoxelConfig {
    std::size_t bins = 65;  ///< must be >= 2 (bilinear kernel needs two grid points)
    std::optional<TimeWindow> window;
};

struct ToreConfig {
    std::size_t depth = 3;  ///< K most recent timestamps kept per pixel per polarity
    std::optional<TimeWindow> window;
};

/// Layered bidirectional time surfaces, bins x H x W.
///
/// For each probe time p = t_start + i * tau_range (i = 1..bins) and pixel:
///   - if any event falls in the closed past range [p - tau_range, p], the
///     value is the normalized time (t - p) / tau_range of the most recent
///     one, in [-1, 0];
///   - otherwise, if any event falls in the future range (p, p + tau_range],
///     the value is the normalized time of the selected one (see FutureMode),
///     in (0, 1];
///   - otherwise -1.
/// Polarity is ignored. Every output value lies in [-1, 1] regardless of the
/// input, and a past event exactly at p - tau_range yields -1, which is
/// indistinguishable from the fill value.
DenseTensor build_labits(const EventStream& stream, const LabitsConfig& config);

/// Per-polarity image of the most recent event's normalized timestamp
/// (t - t_start) / duration, 2 x H x W; channel 0 negative, channel 1
/// positive; -1 where a pixel saw no event of that polarity in the window.
DenseTensor build_time_surface(const EventStream& stream, const TimeWindow& window);

/// Sum of event polarities per pixel over the whole stream, 1 x H x W.
DenseTensor build_event_frame(const EventStream& stream);

/// Per-polarity event counts over the whole stream, 2 x H x W
/// (channel 0 negative, channel 1 positive).
DenseTensor build_event_count(const EventStream& stream);

/// Temporal bilinear accumulation of polarities into bins x H x W. Each event
/// lands at t* = (t - t_start) / duration * (bins - 1) and adds
/// p * max(0, 1 - |b - t*|) to its two neighboring integer bins. Accumulation
/// runs in event order so float addition is deterministic.
DenseTensor build_voxel_grid(const EventStream& stream, const VoxelConfig& config);

/// The K most recent normalized timestamps per pixel per polarity,
/// 2K x H x W: negative-polarity layers 0..K-1, positive K..2K-1; layer 0 is
/// the most recent; -1 fills missing depth. The K=1 volume equals the time
/// surface elementwise.
DenseTensor build_tore(const EventStream& stream, const ToreConfig& config);

}  // namespace evrep
