#pragma once

// CHSF field snapshots. Layout, little-endian throughout:
//
//   "CHSF"        4 bytes magic
//   version       u16 (= 1)
//   dims          u8
//   per axis      u32 n, f64 length
//   time          f64
//   samples       f64 x size, row-major

#include "chsmc/errors.hpp"
#include "chsmc/field.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace chsmc {

struct Snapshot {
    Field field;
    double time;
};

inline constexpr std::uint16_t kSnapshotVersion = 1;

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    U bits = std::bit_cast<U>(value);
    std::array<char, sizeof(U)> bytes{};
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFFu);
    os.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(std::istream& is) {
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t,
              std::conditional_t<sizeof(T) == 2, std::uint16_t, std::uint8_t>>>;
    std::array<unsigned char, sizeof(U)> bytes{};
    is.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!is) throw Error("snapshot: truncated stream");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) bits = static_cast<U>(bits | static_cast<U>(static_cast<U>(bytes[i]) << (8 * i)));
    return std::bit_cast<T>(bits);
}

} // namespace detail

inline void write_snapshot(std::ostream& os, const Field& u, double time) {
    const Grid& g = u.grid();
    os.write("CHSF", 4);
    detail::put_le<std::uint16_t>(os, kSnapshotVersion);
    detail::put_le<std::uint8_t>(os, static_cast<std::uint8_t>(g.dims()));
    for (int axis = 0; axis < g.dims(); ++axis) {
        detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.n(axis)));
        detail::put_le<double>(os, g.length(axis));
    }
    detail::put_le<double>(os, time);
    for (double v : u.values()) detail::put_le<double>(os, v);
}

inline Snapshot read_snapshot(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CHSF", 4) != 0) throw Error("snapshot: bad magic");
    if (detail::get_le<std::uint16_t>(is) != kSnapshotVersion) throw Error("snapshot: unsupported version");
    const auto dims = detail::get_le<std::uint8_t>(is);
    if (dims != 1 && dims != 2) throw Error("snapshot: dims must be 1 or 2");
    std::array<std::uint32_t, 2> n{1, 1};
    std::array<double, 2> length{1.0, 1.0};
    for (int axis = 0; axis < dims; ++axis) {
        n[axis] = detail::get_le<std::uint32_t>(is);
        length[axis] = detail::get_le<double>(is);
    }
    const Grid grid = dims == 1 ? Grid(n[0], length[0]) : Grid(n[0], n[1], length[0], length[1]);
    const double time = detail::get_le<double>(is);
    std::vector<double> values(grid.size());
    for (double& v : values) v = detail::get_le<double>(is);
    return {Field(grid, std::move(values)), time};
}

inline void write_snapshot_file(const std::string& path, const Field& u, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot open " + path + " for writing");
    write_snapshot(os, u, time);
}

inline Snapshot read_snapshot_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path);
    return read_snapshot(is);
}

} // namespace chsmc
