#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evrep/flow.hpp"

namespace evrep {

/// Per-pixel continuous-time displacement curves over normalized time
/// tau = (t - t_r) / (t_t - t_r) in [0, 1]. Each pixel stores control points
/// P_1..P_degree (px); P_0 is implicitly zero, so displacement at tau = 0 is
/// exactly (0, 0) everywhere.
class BezierTrajectoryField {
public:
    BezierTrajectoryField(std::size_t height, std::size_t width, std::size_t degree,
                          std::uint64_t t_reference, std::uint64_t t_target);

    [[nodiscard]] std::size_t height() const { return height_; }
    [[nodiscard]] std::size_t width() const { return width_; }
    [[nodiscard]] std::size_t degree() const { return degree_; }
    [[nodiscard]] std::uint64_t t_reference() const { return t_reference_; }
    [[nodiscard]] std::uint64_t t_target() const { return t_target_; }

    /// i in 1..degree (P_0 is fixed at zero and not stored).
    [[nodiscard]] Vec2 control_point(std::size_t y, std::size_t x, std::size_t i) const;
    void set_control_point(std::size_t y, std::size_t x, std::size_t i, Vec2 value);

    friend bool operator==(const BezierTrajectoryField&, const BezierTrajectoryField&) = default;

private:
    std::size_t height_;
    std::size_t width_;
    std::size_t degree_;
    std::uint64_t t_reference_;
    std::uint64_t t_target_;
    std::vector<float> points_;  // H * W * degree * 2
};

/// N_k ground-truth cumulative flows at strictly increasing normalized times.
struct TrajectoryGroundTruth {
    std::vector<double> times;     ///< in [0, 1], strictly increasing
    std::vector<FlowField> flows;  ///< one per time, all same dims
};

/// Per-pixel displacement at normalized time tau via de Casteljau recursion
/// (stable up to high degrees). Throws TauOutOfRange outside [0, 1].
FlowField bezier_eval(const BezierTrajectoryField& field, double tau);

/// Iterate-weighted supervision loss: (1/N_k) * sum_i gamma^(N_i - i) *
/// sum_k mean-over-valid-pixels |f_gt(T_k) - B_i(T_k)|_1, with the per-pixel
/// L1 taken over both components. Default gamma 0.8.
double trajectory_loss(std::span<const BezierTrajectoryField> iterates,
                       const TrajectoryGroundTruth& gt, double gamma = 0.8);

struct TwoViewMetrics {
    double epe;         ///< mean L2 endpoint error over jointly valid pixels
    double ae_degrees;  ///< mean space-time angular error (unit time component)
};
TwoViewMetrics two_view_metrics(const FlowField& pred_endpoint, const FlowField& gt_endpoint);

struct TrajectoryMetrics {
    double tepe;
    double tae_degrees;
};
/// EPE / AE against each ground-truth flow, averaged uniformly over the
/// evaluation times.
TrajectoryMetrics trajectory_metrics(const BezierTrajectoryField& pred,
                                     const TrajectoryGroundTruth& gt);

/// Per-pixel linear least squares on the Bernstein basis with P_0 pinned to
/// zero. Requires N_k >= degree (throws Underdetermined otherwise). Pixels
/// without full ground-truth validity keep zero control points.
BezierTrajectoryField fit_bezier(const TrajectoryGroundTruth& gt, std::size_t degree,
                                 std::uint64_t t_reference = 0,
                                 std::uint64_t t_target = 1'000'000);

/// Trajectory-field file format, little-endian: magic "BZF1", u32 height,
/// u32 width, u32 degree, u64 t_reference, u64 t_target, then per pixel
/// degree x (f32, f32) control points.
void write_bezier_field(const std::string& path, const BezierTrajectoryField& field);
BezierTrajectoryField read_bezier_field(const std::string& path);

}  // namespace evrep
