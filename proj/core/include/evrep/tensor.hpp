#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evrep/errors.hpp"

namespace evrep {

/// Dense C x H x W float tensor, row-major with the channel (or bin) axis
/// outermost. The universal output type of the representation builders.
class DenseTensor {
public:
    DenseTensor(std::size_t channels, std::size_t height, std::size_t width, float fill = 0.0f)
        : channels_(channels),
          height_(height),
          width_(width),
          values_(channels * height * width, fill) {}

    [[nodiscard]] std::size_t channels() const { return channels_; }
    [[nodiscard]] std::size_t height() const { return height_; }
    [[nodiscard]] std::size_t width() const { return width_; }

    [[nodiscard]] float& at(std::size_t c, std::size_t y, std::size_t x) {
        return values_[(c * height_ + y) * width_ + x];
    }
    [[nodiscard]] float at(std::size_t c, std::size_t y, std::size_t x) const {
        return values_[(c * height_ + y) * width_ + x];
    }

    [[nodiscard]] std::span<const float> values() const { return values_; }
    [[nodiscard]] std::span<float> values() { return values_; }

    /// One C-contiguous channel plane (H*W floats).
    [[nodiscard]] std::span<const float> channel(std::size_t c) const {
        return std::span<const float>(values_).subspan(c * height_ * width_, height_ * width_);
    }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    std::size_t channels_;
    std::size_t height_;
    std::size_t width_;
    std::vector<float> values_;
};

/// Copy of one channel as a 1 x H x W tensor.
DenseTensor extract_layer(const DenseTensor& tensor, std::size_t channel);

/// Tensor file format, little-endian: magic "DTN1", u32 rank, u32 dims[rank],
/// f32 values row-major. Readers reject non-finite values.
void write_dense_tensor(const std::string& path, const DenseTensor& tensor);
DenseTensor read_dense_tensor(const std::string& path);

}  // namespace evrep
