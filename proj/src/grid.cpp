#include "structmg/grid.hpp"

#include <atomic>
#include <cstring>
#include <istream>
#include <ostream>

namespace structmg {

namespace {
std::atomic<int> g_team{0};
}

namespace par {
int team_size() {
    int t = g_team.load(std::memory_order_relaxed);
    return t > 0 ? t : hardware_team();
}
void set_team_size(int n) { g_team.store(n, std::memory_order_relaxed); }
} // namespace par

StructuredGrid coarsen_grid(const StructuredGrid& fine, std::array<int, 3> strides,
                            Centering centering) {
    StructuredGrid coarse;
    coarse.halo = fine.halo;
    coarse.strides = strides;
    coarse.base = {0, 0, 0};
    for (int ax = 0; ax < 3; ++ax) {
        const int s = strides[ax];
        if (s != 1 && s != 2)
            throw std::invalid_argument("coarsen_grid: stride must be 1 or 2, got " +
                                        std::to_string(s));
        const int n = fine.dims[ax];
        if (s == 1) {
            coarse.dims[ax] = n;
        } else if (centering == Centering::cell) {
            coarse.dims[ax] = (n + s - 1) / s;
        } else {
            coarse.dims[ax] = (n - 1) / s + 1;
        }
    }
    return coarse;
}

namespace {
constexpr std::uint32_t kVecMagic = 0x53'4d'47'56; // "SMGV"
}

void write_vector_header(std::ostream& os, const StructuredGrid& g, int scalar_bytes) {
    std::uint32_t magic = kVecMagic;
    os.write(reinterpret_cast<const char*>(&magic), 4);
    std::int32_t fields[13] = {g.dims[0],    g.dims[1],    g.dims[2],  g.halo[0], g.halo[1],
                               g.halo[2],    g.strides[0], g.strides[1], g.strides[2],
                               g.base[0],    g.base[1],    g.base[2],  scalar_bytes};
    os.write(reinterpret_cast<const char*>(fields), sizeof(fields));
}

StructuredGrid read_vector_header(std::istream& is, int& scalar_bytes) {
    std::uint32_t magic = 0;
    is.read(reinterpret_cast<char*>(&magic), 4);
    if (!is || magic != kVecMagic) throw std::runtime_error("read_vector: bad magic");
    std::int32_t f[13];
    is.read(reinterpret_cast<char*>(f), sizeof(f));
    if (!is) throw std::runtime_error("read_vector: truncated header");
    StructuredGrid g;
    g.dims = {f[0], f[1], f[2]};
    g.halo = {f[3], f[4], f[5]};
    g.strides = {f[6], f[7], f[8]};
    g.base = {f[9], f[10], f[11]};
    scalar_bytes = f[12];
    return g;
}

} // namespace structmg
