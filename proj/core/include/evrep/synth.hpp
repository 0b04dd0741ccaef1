#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "evrep/event.hpp"
#include "evrep/flow.hpp"

namespace evrep {

/// Deterministic 64-bit generator (splitmix-style), fixed by its constants so
/// golden event sequences are portable across implementations:
/// state update adds 0x9E3779B97F4A7C15; output mixing xor-shifts by 30/27/31
/// and multiplies by 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), from the top 53 bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Parametric 2D motion of an object's reference point. position() is exactly
/// differentiable on the scene window and velocity() is that derivative, so
/// every ground-truth quantity downstream is analytic, not sampled.
class MotionModel {
public:
    /// Straight line through the origin at (vx, vy) px/s.
    static MotionModel constant_velocity(double vx, double vy);
    /// Reference point orbits `center` at `radius` px and `angular_rate` rad/s,
    /// starting at angle 0 (center + (radius, 0)).
    static MotionModel circular(Vec2 center, double radius, double angular_rate);
    /// Per-axis Taylor coefficients at tau=0 in px/s^k: position is
    /// sum_k c_k tau^k / k!, velocity its exact derivative.
    static MotionModel polynomial(std::vector<double> coeffs_x, std::vector<double> coeffs_y);

    /// Reference-point position at tau seconds after window start.
    [[nodiscard]] Vec2 position(double tau) const;
    [[nodiscard]] Vec2 velocity(double tau) const;
    [[nodiscard]] Vec2 displacement(double tau) const { return position(tau) - position(0.0); }

private:
    struct ConstantVelocity {
        double vx;
        double vy;
    };
    struct Circular {
        Vec2 center;
        double radius;
        double angular_rate;
    };
    struct Polynomial {
        std::vector<double> coeffs_x;
        std::vector<double> coeffs_y;
    };

    explicit MotionModel(std::variant<ConstantVelocity, Circular, Polynomial> model)
        : model_(std::move(model)) {}

    std::variant<ConstantVelocity, Circular, Polynomial> model_;
};

/// A full-height column of points at x0 (relative to the motion reference).
struct VerticalEdge {
    double x0 = 0.0;
};

/// Arbitrary point offsets relative to the motion reference.
struct PointCloud {
    std::vector<Vec2> offsets;
};

struct SceneObject {
    std::variant<VerticalEdge, PointCloud> shape;
    MotionModel motion;
};

/// Defective pixel firing spurious events at `rate` per second.
struct HotPixel {
    std::uint16_t x = 0;
    std::uint16_t y = 0;
    double rate = 0.0;
};

struct SyntheticScene {
    SensorGeometry geometry;
    TimeWindow window;
    std::vector<SceneObject> objects;
    std::vector<HotPixel> hot_pixels;
};

/// Emits the scene's ideal event stream: one +1 event per tracked object point
/// at every integer-pixel crossing time (timestamps rounded to the nearest
/// microsecond), plus Poisson hot-pixel events from the seeded generator.
/// Points leaving the sensor clip silently at the border. Ties sort by
/// (t, object index, y, x); hot pixels order after all objects.
/// Throws EmptyScene when the scene's objects emit nothing (for scenes that
/// have objects), or when a pure-noise scene emits nothing at all.
EventStream emit_events(const SyntheticScene& scene, std::uint64_t seed = 0);

/// Exact analytic flows, velocities and trajectories of a scene. All fields
/// are indexed by a point's start pixel (its rounded position at the window
/// start); pixels covered by no object are invalid and carry zero flow.
class GroundTruth {
public:
    explicit GroundTruth(SyntheticScene scene);

    /// Cumulative displacement (px) from the window start to tau seconds.
    [[nodiscard]] FlowField flow_at(double tau) const;
    /// Instantaneous velocity (px/s) at tau seconds.
    [[nodiscard]] FlowField velocity_at(double tau) const;
    /// Displacement of the point registered at start pixel (x, y), if any.
    [[nodiscard]] std::optional<Vec2> trajectory(std::size_t x, std::size_t y, double tau) const;

    [[nodiscard]] const SyntheticScene& scene() const { return scene_; }

private:
    SyntheticScene scene_;
    std::vector<int> object_at_;  // per pixel: owning object index, -1 = none
};

inline GroundTruth ground_truth(SyntheticScene scene) { return GroundTruth(std::move(scene)); }

/// Parses the flat key-value scene description (see the file-format notes in
/// the README): top-level `width`, `height`, `t_start_us`, `t_end_us` keys,
/// then `[object]` and `[hot_pixel]` sections. Throws MalformedLine with the
/// offending line number.
SyntheticScene parse_scene(std::istream& text);
SyntheticScene parse_scene_file(const std::string& path);

}  // namespace evrep
