#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evrep/errors.hpp"

namespace evrep {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// Per-pixel 2-vector field (displacement in pixels, or velocity in px/s where
/// stated) with a validity mask. Invalid pixels are excluded from every norm
/// and mean computed over the field.
class FlowField {
public:
    FlowField(std::size_t height, std::size_t width)
        : height_(height), width_(width), u_(height * width, 0.0f), v_(height * width, 0.0f),
          valid_(height * width, 0) {}

    [[nodiscard]] std::size_t height() const { return height_; }
    [[nodiscard]] std::size_t width() const { return width_; }

    [[nodiscard]] float& u(std::size_t y, std::size_t x) { return u_[y * width_ + x]; }
    [[nodiscard]] float& v(std::size_t y, std::size_t x) { return v_[y * width_ + x]; }
    [[nodiscard]] float u(std::size_t y, std::size_t x) const { return u_[y * width_ + x]; }
    [[nodiscard]] float v(std::size_t y, std::size_t x) const { return v_[y * width_ + x]; }

    [[nodiscard]] bool valid(std::size_t y, std::size_t x) const {
        return valid_[y * width_ + x] != 0;
    }
    void set(std::size_t y, std::size_t x, float u, float v, bool valid = true) {
        u_[y * width_ + x] = u;
        v_[y * width_ + x] = v;
        valid_[y * width_ + x] = valid ? 1 : 0;
    }
    void invalidate(std::size_t y, std::size_t x) { valid_[y * width_ + x] = 0; }

    [[nodiscard]] std::size_t valid_count() const;
    [[nodiscard]] bool same_dims(const FlowField& other) const {
        return height_ == other.height_ && width_ == other.width_;
    }

    friend bool operator==(const FlowField&, const FlowField&) = default;

private:
    std::size_t height_;
    std::size_t width_;
    std::vector<float> u_;
    std::vector<float> v_;
    std::vector<std::uint8_t> valid_;
};

/// Flow file format, little-endian: magic "FLW1", u32 height, u32 width, then
/// per pixel f32 u, f32 v, u8 valid, 3 zero pad bytes.
void write_flow_field(const std::string& path, const FlowField& field);
FlowField read_flow_field(const std::string& path);

/// Mean L1 distance (|du| + |dv| per pixel) over jointly valid pixels.
/// Throws NoValidPixels when the fields share no valid pixel.
double mean_l1(const FlowField& a, const FlowField& b);

}  // namespace evrep
