#include "evrep/tensor.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace evrep {

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'T', 'N', '1'};

void put_u32(std::ostream& out, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b;
    in.read(reinterpret_cast<char*>(b.data()), b.size());
    if (in.gcount() != 4) {
        throw TruncatedRecord("tensor file truncated in header");
    }
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8)
         | (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

DenseTensor extract_layer(const DenseTensor& tensor, std::size_t channel) {
    if (channel >= tensor.channels()) {
        throw DimMismatch("layer " + std::to_string(channel) + " out of range (tensor has "
                          + std::to_string(tensor.channels()) + ")");
    }
    DenseTensor layer(1, tensor.height(), tensor.width());
    const auto src = tensor.channel(channel);
    std::copy(src.begin(), src.end(), layer.values().begin());
    return layer;
}

void write_dense_tensor(const std::string& path, const DenseTensor& tensor) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, 3);
    put_u32(out, static_cast<std::uint32_t>(tensor.channels()));
    put_u32(out, static_cast<std::uint32_t>(tensor.height()));
    put_u32(out, static_cast<std::uint32_t>(tensor.width()));
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(tensor.values().data()),
                  static_cast<std::streamsize>(tensor.values().size() * sizeof(float)));
    } else {
        for (const float v : tensor.values()) {
            put_u32(out, std::bit_cast<std::uint32_t>(v));
        }
    }
}

DenseTensor read_dense_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::array<char, 4> magic;
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || std::memcmp(magic.data(), kMagic.data(), 4) != 0) {
        throw BadMagic("not a DTN1 file: " + path);
    }
    const std::uint32_t rank = get_u32(in);
    if (rank < 1 || rank > 3) {
        throw TruncatedRecord("unsupported tensor rank " + std::to_string(rank));
    }
    std::array<std::uint32_t, 3> dims = {1, 1, 1};
    // Lower-rank tensors load as 1 x H x W / 1 x 1 x W.
    for (std::uint32_t i = 0; i < rank; ++i) {
        dims[3 - rank + i] = get_u32(in);
    }
    DenseTensor tensor(dims[0], dims[1], dims[2]);
    if constexpr (std::endian::native == std::endian::little) {
        const std::streamsize bytes =
            static_cast<std::streamsize>(tensor.values().size() * sizeof(float));
        in.read(reinterpret_cast<char*>(tensor.values().data()), bytes);
        if (in.gcount() != bytes) {
            throw TruncatedRecord("tensor file shorter than its dims promise");
        }
    } else {
        for (float& v : tensor.values()) {
            v = std::bit_cast<float>(get_u32(in));
        }
    }
    for (const float v : tensor.values()) {
        if (!std::isfinite(v)) {
            throw TruncatedRecord("tensor contains non-finite values");
        }
    }
    return tensor;
}

}  // namespace evrep
