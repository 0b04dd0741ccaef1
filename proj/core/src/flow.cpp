#include "evrep/flow.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

namespace evrep {

namespace {

constexpr std::array<char, 4> kMagic = {'F', 'L', 'W', '1'};

void put_u32(std::ostream& out, std::uint32_t value) {
    for (int i = 0; i < 4; ++i) {
        out.put(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8)
         | (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

std::size_t FlowField::valid_count() const {
    std::size_t n = 0;
    for (const std::uint8_t f : valid_) {
        n += f;
    }
    return n;
}

void write_flow_field(const std::string& path, const FlowField& field) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    out.write(kMagic.data(), kMagic.size());
    put_u32(out, static_cast<std::uint32_t>(field.height()));
    put_u32(out, static_cast<std::uint32_t>(field.width()));
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            put_u32(out, std::bit_cast<std::uint32_t>(field.u(y, x)));
            put_u32(out, std::bit_cast<std::uint32_t>(field.v(y, x)));
            out.put(field.valid(y, x) ? '\1' : '\0');
            out.put('\0');
            out.put('\0');
            out.put('\0');
        }
    }
}

FlowField read_flow_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path);
    }
    std::array<unsigned char, 12> header;
    in.read(reinterpret_cast<char*>(header.data()), header.size());
    if (in.gcount() != static_cast<std::streamsize>(header.size())
        || std::memcmp(header.data(), kMagic.data(), 4) != 0) {
        throw BadMagic("not a FLW1 file: " + path);
    }
    FlowField field(get_u32(header.data() + 4), get_u32(header.data() + 8));
    std::array<unsigned char, 12> record;
    for (std::size_t y = 0; y < field.height(); ++y) {
        for (std::size_t x = 0; x < field.width(); ++x) {
            in.read(reinterpret_cast<char*>(record.data()), record.size());
            if (in.gcount() != static_cast<std::streamsize>(record.size())) {
                throw TruncatedRecord("flow file truncated at pixel (" + std::to_string(x) + ", "
                                      + std::to_string(y) + ")");
            }
            field.set(y, x, std::bit_cast<float>(get_u32(record.data())),
                      std::bit_cast<float>(get_u32(record.data() + 4)), record[8] != 0);
        }
    }
    return field;
}

double mean_l1(const FlowField& a, const FlowField& b) {
    if (!a.same_dims(b)) {
        throw DimMismatch("flow fields differ in size");
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t y = 0; y < a.height(); ++y) {
        for (std::size_t x = 0; x < a.width(); ++x) {
            if (a.valid(y, x) && b.valid(y, x)) {
                sum += std::abs(static_cast<double>(a.u(y, x)) - b.u(y, x))
                     + std::abs(static_cast<double>(a.v(y, x)) - b.v(y, x));
                ++n;
            }
        }
    }
    if (n == 0) {
        throw NoValidPixels("no jointly valid pixels");
    }
    return sum / static_cast<double>(n);
}

}  // namespace evrep
