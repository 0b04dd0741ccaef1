#include "evrep/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace evrep {

const std::array<Rgb, 256>& viridis_lut() {
    static const std::array<Rgb, 256> lut = {{
#include "evrep/viridis_lut.inc"
    }};
    return lut;
}

Image render_layer(const DenseTensor& tensor, std::size_t layer, Colormap colormap,
                   RangeMode range_mode) {
    if (layer >= tensor.channels()) {
        throw DimMismatch("layer " + std::to_string(layer) + " out of range (tensor has "
                          + std::to_string(tensor.channels()) + ")");
    }
    const auto values = tensor.channel(layer);
    double lo = -1.0;
    double hi = 1.0;
    if (range_mode == RangeMode::min_max) {
        const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
        lo = *min_it;
        hi = *max_it;
    }

    Image image;
    image.width = tensor.width();
    image.height = tensor.height();
    image.channels = colormap == Colormap::gray ? 1 : 3;
    image.pixels.resize(image.width * image.height * image.channels);
    for (std::size_t i = 0; i < values.size(); ++i) {
        long byte = 0;
        if (hi > lo) {
            byte = std::lround((static_cast<double>(values[i]) - lo) / (hi - lo) * 255.0);
        }
        const std::uint8_t level = static_cast<std::uint8_t>(std::clamp(byte, 0L, 255L));
        if (colormap == Colormap::gray) {
            image.pixels[i] = level;
        } else {
            const Rgb rgb = viridis_lut()[level];
            image.pixels[i * 3] = rgb.r;
            image.pixels[i * 3 + 1] = rgb.g;
            image.pixels[i * 3 + 2] = rgb.b;
        }
    }
    return image;
}

void write_pnm(const std::string& path, const Image& image) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out << (image.channels == 1 ? "P5" : "P6") << '\n'
        << image.width << ' ' << image.height << '\n'
        << "255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
}

}  // namespace evrep
