#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "leray/csv.hpp"
#include "leray/errors.hpp"
#include "leray/field.hpp"

namespace leray {

// Snapshot file layout (all integers and floats little-endian):
//   8 bytes   magic "NSSNAP01"
//   4 x u32   nx, ny, reserved=0, reserved=0
//   2 x f64   lx, ly
//   1 x f64   time
//   3 arrays  ny*nx f64 row-major: u, v, p/rho
inline constexpr char kSnapshotMagic[8] = {'N', 'S', 'S', 'N', 'A', 'P', '0', '1'};

namespace detail {

inline void put_u32(std::string& out, uint32_t v) {
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
    uint64_t bits = std::bit_cast<uint64_t>(v);
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

class ByteReader {
  public:
    ByteReader(const unsigned char* data, size_t size) : data_(data), size_(size) {}

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int b = 0; b < 4; ++b) v |= static_cast<uint32_t>(data_[pos_ + b]) << (8 * b);
        pos_ += 4;
        return v;
    }

    double f64() {
        need(8);
        uint64_t v = 0;
        for (int b = 0; b < 8; ++b) v |= static_cast<uint64_t>(data_[pos_ + b]) << (8 * b);
        pos_ += 8;
        return std::bit_cast<double>(v);
    }

    void f64_array(std::vector<double>& out, size_t count) {
        out.resize(count);
        for (size_t k = 0; k < count; ++k) out[k] = f64();
    }

    size_t remaining() const { return size_ - pos_; }

  private:
    void need(size_t n) const {
        if (pos_ + n > size_)
            throw CorruptFileError("snapshot file truncated: need " + std::to_string(n) +
                                   " more bytes at offset " + std::to_string(pos_));
    }
    const unsigned char* data_;
    size_t size_;
    size_t pos_ = 0;
};

} // namespace detail

inline std::string snapshot_serialize(const Snapshot& s) {
    if (!all_finite(s)) throw ValidationError("snapshot contains non-finite values");
    const Grid& g = s.grid();
    std::string out;
    out.reserve(44 + 3 * 8 * static_cast<size_t>(g.size()));
    out.append(kSnapshotMagic, sizeof(kSnapshotMagic));
    detail::put_u32(out, static_cast<uint32_t>(g.nx));
    detail::put_u32(out, static_cast<uint32_t>(g.ny));
    detail::put_u32(out, 0);
    detail::put_u32(out, 0);
    detail::put_f64(out, g.lx);
    detail::put_f64(out, g.ly);
    detail::put_f64(out, s.time);
    for (double v : s.velocity.u.data) detail::put_f64(out, v);
    for (double v : s.velocity.v.data) detail::put_f64(out, v);
    for (double v : s.pressure.data) detail::put_f64(out, v);
    return out;
}

inline void snapshot_write(const Snapshot& s, const std::string& path) {
    std::string bytes = snapshot_serialize(s);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed while writing '" + path + "'");
}

inline Snapshot snapshot_deserialize(const std::string& bytes) {
    if (bytes.size() < sizeof(kSnapshotMagic) ||
        std::memcmp(bytes.data(), kSnapshotMagic, sizeof(kSnapshotMagic)) != 0)
        throw FormatError("not a snapshot file (bad magic bytes)");

    detail::ByteReader r(reinterpret_cast<const unsigned char*>(bytes.data()) + 8,
                         bytes.size() - 8);
    uint32_t nx = r.u32();
    uint32_t ny = r.u32();
    r.u32(); // reserved
    r.u32(); // reserved
    double lx = r.f64();
    double ly = r.f64();
    double time = r.f64();

    if (nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0 || nx > (1u << 20) || ny > (1u << 20))
        throw CorruptFileError("snapshot header carries invalid dimensions " +
                               std::to_string(nx) + "x" + std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0))
        throw CorruptFileError("snapshot header carries non-positive domain lengths");

    size_t count = static_cast<size_t>(nx) * ny;
    if (r.remaining() != 3 * 8 * count)
        throw CorruptFileError("snapshot payload size mismatch: header promises " +
                               std::to_string(3 * 8 * count) + " bytes, file carries " +
                               std::to_string(r.remaining()));

    Grid grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    std::vector<double> u, v, p;
    r.f64_array(u, count);
    r.f64_array(v, count);
    r.f64_array(p, count);

    Snapshot s(time, VelocityField(ScalarField(grid, std::move(u)), ScalarField(grid, std::move(v))),
               ScalarField(grid, std::move(p)));
    if (!all_finite(s)) throw ValidationError("snapshot file contains non-finite values");
    return s;
}

inline Snapshot snapshot_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot file '" + path + "'");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return snapshot_deserialize(bytes);
}

/// CSV import: header x_index,y_index,u,v,p_over_rho and one row per node.
/// Node indices must cover the grid exactly once; grid dimensions are
/// inferred from the largest indices. Domain lengths and time are not part
/// of the CSV and are supplied by the caller.
inline Snapshot snapshot_read_csv(const std::string& path, double lx = kTwoPi,
                                  double ly = kTwoPi, double time = 0.0) {
    CsvTable table = csv_parse_file(path);
    const std::vector<std::string> expected = {"x_index", "y_index", "u", "v", "p_over_rho"};
    if (table.header != expected)
        throw FormatError("snapshot CSV must have header x_index,y_index,u,v,p_over_rho");
    if (table.rows.empty()) throw CorruptFileError("snapshot CSV has no data rows");

    long nx = 0, ny = 0;
    for (const auto& row : table.rows) {
        nx = std::max(nx, parse_long(row[0], "x_index") + 1);
        ny = std::max(ny, parse_long(row[1], "y_index") + 1);
    }
    Grid grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    size_t count = static_cast<size_t>(grid.size());
    if (table.rows.size() != count)
        throw CorruptFileError("snapshot CSV has " + std::to_string(table.rows.size()) +
                               " rows, grid " + std::to_string(nx) + "x" + std::to_string(ny) +
                               " needs " + std::to_string(count));

    std::vector<double> u(count), v(count), p(count);
    std::vector<char> seen(count, 0);
    for (const auto& row : table.rows) {
        long i = parse_long(row[0], "x_index");
        long j = parse_long(row[1], "y_index");
        size_t n = static_cast<size_t>(j) * nx + i;
        if (seen[n]) throw CorruptFileError("snapshot CSV repeats node (" + row[0] + "," + row[1] + ")");
        seen[n] = 1;
        u[n] = parse_double(row[2], "u");
        v[n] = parse_double(row[3], "v");
        p[n] = parse_double(row[4], "p_over_rho");
    }

    Snapshot s(time, VelocityField(ScalarField(grid, std::move(u)), ScalarField(grid, std::move(v))),
               ScalarField(grid, std::move(p)));
    if (!all_finite(s)) throw ValidationError("snapshot CSV contains non-finite values");
    return s;
}

} // namespace leray
