#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "evrep/tensor.hpp"

namespace evrep {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

enum class Colormap { gray, viridis };

/// How tensor values map to the 0..255 byte range before colormap lookup:
/// `fixed_unit` is the affine map [-1, 1] -> [0, 255] (the layered builders'
/// value range, so fill pixels land on the colormap's lowest entry);
/// `min_max` stretches the layer's own extrema (all-equal layers map to 0).
/// Rounding is half away from zero.
enum class RangeMode { fixed_unit, min_max };

/// The 256-entry viridis table, loaded from the checked-in data file at build
/// time so every implementation shares identical bytes.
const std::array<Rgb, 256>& viridis_lut();

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    int channels = 1;  // 1 = grayscale, 3 = RGB
    std::vector<std::uint8_t> pixels;
};

Image render_layer(const DenseTensor& tensor, std::size_t layer, Colormap colormap,
                   RangeMode range_mode);

/// Binary portable pixmap: P5 for single-channel images, P6 for RGB.
void write_pnm(const std::string& path, const Image& image);

}  // namespace evrep
