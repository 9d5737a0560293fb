#include "patchlab/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace patchlab::io {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping not implemented");

namespace {

constexpr char kMagic[4] = {'P', 'L', 'F', 'S'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("snapshot: truncated file");
    return v;
}

}  // namespace

void write_snapshot(const std::string& path, const VectorField& f, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("snapshot: cannot open " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.dim));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.ncomp));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(f.grid.n));
    put<double>(os, f.grid.extent);
    put<double>(os, time);
    for (const auto& c : f.comp)
        os.write(reinterpret_cast<const char*>(c.data.data()),
                 static_cast<std::streamsize>(c.data.size() * sizeof(double)));
    if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

void write_snapshot(const std::string& path, const ScalarField& f, double time) {
    VectorField wrap;
    wrap.grid = f.grid;
    wrap.ncomp = 1;
    wrap.comp.push_back(f);
    write_snapshot(path, wrap, time);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    if (take<std::uint32_t>(is) != kVersion)
        throw std::runtime_error("snapshot: unsupported version in " + path);
    const int dim = static_cast<int>(take<std::uint32_t>(is));
    const int ncomp = static_cast<int>(take<std::uint32_t>(is));
    const int n = static_cast<int>(take<std::uint32_t>(is));
    const double extent = take<double>(is);

    Snapshot snap;
    snap.time = take<double>(is);
    Grid g = build_grid(dim, extent, n);
    snap.field.grid = g;
    snap.field.ncomp = ncomp;
    snap.field.comp.assign(ncomp, ScalarField(g));
    for (auto& c : snap.field.comp) {
        is.read(reinterpret_cast<char*>(c.data.data()),
                static_cast<std::streamsize>(c.data.size() * sizeof(double)));
        if (!is) throw std::runtime_error("snapshot: truncated payload in " + path);
    }
    return snap;
}

std::string slice_csv(const ScalarField& f, int axis, int fixed_i, int fixed_j) {
    std::ostringstream os;
    os.precision(17);
    os << "coord,value\n";
    const Grid& g = f.grid;
    for (int t = 0; t < g.n; ++t) {
        double v;
        if (g.dim == 2)
            v = axis == 0 ? f.at(t, fixed_i) : f.at(fixed_i, t);
        else
            v = axis == 0 ? f.at(t, fixed_i, fixed_j)
                          : (axis == 1 ? f.at(fixed_i, t, fixed_j) : f.at(fixed_i, fixed_j, t));
        os << t * g.h << "," << v << "\n";
    }
    return os.str();
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << content;
}

}  // namespace patchlab::io
