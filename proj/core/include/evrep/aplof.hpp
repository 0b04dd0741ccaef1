#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "evrep/flow.hpp"
#include "evrep/tensor.hpp"

namespace evrep {

/// Boolean pixel mask marking where a layered time-surface layer carries
/// reliable local-motion information.
struct ActivePixelMask {
    enum class Resolution { high, low };

    ActivePixelMask(std::size_t height, std::size_t width, Resolution resolution)
        : height(height), width(width), resolution(resolution), active(height * width, 0) {}

    std::size_t height;
    std::size_t width;
    Resolution resolution;
    std::vector<std::uint8_t> active;

    [[nodiscard]] bool at(std::size_t y, std::size_t x) const { return active[y * width + x] != 0; }
    void set(std::size_t y, std::size_t x, bool value) { active[y * width + x] = value ? 1 : 0; }
    [[nodiscard]] std::size_t count() const;
};

/// High-resolution active pixel mask: true where |layer| < beta. The -1 fill
/// value is never active for any beta <= 1. Default beta 0.3.
ActivePixelMask apm_high(const DenseTensor& labits_layer, double beta = 0.3);

/// Low-resolution mask from 8x8 average pooling of the HR mask (stride 8,
/// edge blocks averaged over in-bounds pixels only); a block is active when
/// its active fraction reaches gamma. Default gamma 0.125.
ActivePixelMask apm_low(const ActivePixelMask& hr_mask, double gamma = 0.125);

/// Ground-truth local flow at a probe time from cumulative flows at
/// tau-10ms / tau / tau+10ms: at each active, valid start pixel the value
/// flow_plus - flow_minus (displacement over the 20 ms bracket, px) is
/// scattered to the pixel's current position start + round(flow_tau).
/// Out-of-frame targets drop; colliding targets average.
FlowField aplof_ground_truth(const FlowField& flow_minus, const FlowField& flow_plus,
                             const FlowField& flow_tau, const ActivePixelMask& hr_mask);

/// Analytic local-flow estimate from a single layered time-surface layer.
///
/// At each active pixel a plane a*x + b*y + c is least-squares fitted to the
/// layer values of active pixels in the surrounding patch; the gradient
/// g = (a, b) is in normalized time per pixel, so the velocity estimate is
/// g / (|g|^2 * tau_range_s) px/s — normal flow pointing along increasing
/// time. Pixels with fewer than min_support active neighbors, or with
/// |g| < 1e-6, come back invalid.
FlowField aplof_from_labits(const DenseTensor& labits_layer, double tau_range_s,
                            double beta = 0.3, int patch = 5, int min_support = 6);

/// High- plus low-resolution local-flow pair, each masked by its own APM.
struct AplofPair {
    FlowField hr;
    FlowField lr;
};

/// Sum of the HR and LR mean-L1 terms, each the mean over jointly valid
/// pixels of |du| + |dv|.
double aplof_loss(const AplofPair& pred, const AplofPair& gt);

/// One-sided and centered first-derivative estimates from a trajectory
/// sampled at spacing dt. Errors shrink as O(dt) and O(dt^2) respectively.
double backward_difference(const std::function<double(double)>& f, double t, double dt);
double central_difference(const std::function<double(double)>& f, double t, double dt);

}  // namespace evrep
