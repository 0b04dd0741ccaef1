#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "evrep/image.hpp"

using namespace evrep;

TEST_CASE("viridis table anchors") {
    const auto& lut = viridis_lut();
    CHECK(lut[0] == Rgb{68, 1, 84});
    CHECK(lut[255] == Rgb{253, 231, 37});
}

TEST_CASE("fixed-range mapping: [-1, 1] -> [0, 255], half away from zero") {
    DenseTensor tensor(1, 2, 2, -1.0f);
    tensor.at(0, 0, 1) = 0.0f;
    tensor.at(0, 1, 0) = 1.0f;
    const Image image = render_layer(tensor, 0, Colormap::gray, RangeMode::fixed_unit);
    CHECK(image.channels == 1);
    CHECK(image.pixels[0] == 0);    // fill -1 is the darkest level
    CHECK(image.pixels[1] == 128);  // 127.5 rounds away from zero
    CHECK(image.pixels[2] == 255);
}

TEST_CASE("min-max mapping stretches the layer, degenerate layers go dark") {
    DenseTensor tensor(1, 1, 3, 0.0f);
    tensor.at(0, 0, 1) = 5.0f;
    tensor.at(0, 0, 2) = 10.0f;
    const Image image = render_layer(tensor, 0, Colormap::gray, RangeMode::min_max);
    CHECK(image.pixels[0] == 0);
    CHECK(image.pixels[1] == 128);
    CHECK(image.pixels[2] == 255);

    const DenseTensor flat(1, 2, 2, 3.5f);
    const Image flat_image = render_layer(flat, 0, Colormap::gray, RangeMode::min_max);
    for (const std::uint8_t p : flat_image.pixels) {
        CHECK(p == 0);
    }
}

TEST_CASE("viridis rendering maps fill pixels to the lowest entry") {
    const DenseTensor tensor(1, 2, 2, -1.0f);
    const Image image = render_layer(tensor, 0, Colormap::viridis, RangeMode::fixed_unit);
    REQUIRE(image.channels == 3);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(image.pixels[i * 3] == 68);
        CHECK(image.pixels[i * 3 + 1] == 1);
        CHECK(image.pixels[i * 3 + 2] == 84);
    }
}

TEST_CASE("pnm writer emits binary P5/P6") {
    Image gray;
    gray.width = 2;
    gray.height = 1;
    gray.channels = 1;
    gray.pixels = {7, 255};
    const std::string gray_path = "/tmp/evrep_test_image.pgm";
    write_pnm(gray_path, gray);
    std::ifstream in(gray_path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    CHECK(buffer.str() == std::string("P5\n2 1\n255\n") + '\x07' + '\xff');
    std::remove(gray_path.c_str());

    Image rgb;
    rgb.width = 1;
    rgb.height = 1;
    rgb.channels = 3;
    rgb.pixels = {1, 2, 3};
    const std::string rgb_path = "/tmp/evrep_test_image.ppm";
    write_pnm(rgb_path, rgb);
    std::ifstream rgb_in(rgb_path, std::ios::binary);
    std::stringstream rgb_buffer;
    rgb_buffer << rgb_in.rdbuf();
    CHECK(rgb_buffer.str() == std::string("P6\n1 1\n255\n") + '\x01' + '\x02' + '\x03');
    std::remove(rgb_path.c_str());
}

TEST_CASE("layer bounds are enforced") {
    const DenseTensor tensor(2, 4, 4);
    CHECK_THROWS_AS(render_layer(tensor, 2, Colormap::gray, RangeMode::fixed_unit), DimMismatch);
}
