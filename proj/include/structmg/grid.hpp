#ifndef STRUCTMG_GRID_HPP
#define STRUCTMG_GRID_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "structmg/parallel.hpp"
#include "structmg/stencil.hpp"

namespace structmg {

/// A local box with halo layers. Interior coordinates run in [0, dims);
/// padded coordinates in [0, dims + 2*halo). `strides`/`base` describe how
/// this grid was derived from its parent (all ones / zeros on the finest).
struct StructuredGrid {
    std::array<int, 3> dims{1, 1, 1};
    std::array<int, 3> halo{1, 1, 1};
    std::array<int, 3> strides{1, 1, 1};
    std::array<int, 3> base{0, 0, 0};

    int padded(int ax) const { return dims[ax] + 2 * halo[ax]; }
    long padded_count() const { return 1L * padded(0) * padded(1) * padded(2); }
    long interior_count() const { return 1L * dims[0] * dims[1] * dims[2]; }

    /// Linear index of a padded coordinate, z innermost.
    long pindex(int px, int py, int pz) const {
        return (1L * px * padded(1) + py) * padded(2) + pz;
    }
    /// Displacement of a neighbor offset within the padded layout.
    long pdelta(const Offset& o) const { return (1L * o[0] * padded(1) + o[1]) * padded(2) + o[2]; }
    /// Linear index of an interior coordinate within the padded layout.
    long iindex(int ix, int iy, int iz) const {
        return pindex(ix + halo[0], iy + halo[1], iz + halo[2]);
    }
    /// Canonical linear index over interior points only (row-major, z innermost).
    long linear_interior(int ix, int iy, int iz) const {
        return (1L * ix * dims[1] + iy) * dims[2] + iz;
    }

    bool interior_contains(int ix, int iy, int iz) const {
        return ix >= 0 && ix < dims[0] && iy >= 0 && iy < dims[1] && iz >= 0 && iz < dims[2];
    }
    bool padded_contains_interior(int ix, int iy, int iz) const {
        return ix >= -halo[0] && ix < dims[0] + halo[0] && iy >= -halo[1] &&
               iy < dims[1] + halo[1] && iz >= -halo[2] && iz < dims[2] + halo[2];
    }

    /// Parent-grid interior coordinate of this grid's point (interior coords).
    std::array<int, 3> fine_image(std::array<int, 3> idx) const {
        return {idx[0] * strides[0] + base[0], idx[1] * strides[1] + base[1],
                idx[2] * strides[2] + base[2]};
    }

    bool operator==(const StructuredGrid& o) const {
        return dims == o.dims && halo == o.halo && strides == o.strides && base == o.base;
    }
};

/// Coarse geometry for the given strides. Cell-centered axes shrink to
/// ceil(n/s), vertex-centered to floor((n-1)/s)+1; stride-1 axes are copied.
StructuredGrid coarsen_grid(const StructuredGrid& fine, std::array<int, 3> strides,
                            Centering centering);

template <class T>
struct GridVector {
    StructuredGrid grid;
    std::vector<T> data;

    GridVector() = default;
    explicit GridVector(const StructuredGrid& g) : grid(g), data(g.padded_count(), T(0)) {}

    T& at_p(int px, int py, int pz) { return data[grid.pindex(px, py, pz)]; }
    const T& at_p(int px, int py, int pz) const { return data[grid.pindex(px, py, pz)]; }
    T& at_i(int ix, int iy, int iz) { return data[grid.iindex(ix, iy, iz)]; }
    const T& at_i(int ix, int iy, int iz) const { return data[grid.iindex(ix, iy, iz)]; }
};

inline void check_same_grid(const StructuredGrid& a, const StructuredGrid& b, const char* op) {
    if (!(a == b)) throw std::invalid_argument(std::string(op) + ": grid mismatch");
}

template <class T>
void set_zero(GridVector<T>& v) {
    std::fill(v.data.begin(), v.data.end(), T(0));
}

/// Sets every interior value; halos stay zero.
template <class T>
void fill_interior(GridVector<T>& v, T value) {
    const StructuredGrid& g = v.grid;
    for (int x = 0; x < g.dims[0]; ++x)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int z = 0; z < g.dims[2]; ++z) v.at_i(x, y, z) = value;
}

template <class T, class Rng>
void random_fill(GridVector<T>& v, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    const StructuredGrid& g = v.grid;
    for (int x = 0; x < g.dims[0]; ++x)
        for (int y = 0; y < g.dims[1]; ++y)
            for (int z = 0; z < g.dims[2]; ++z) v.at_i(x, y, z) = static_cast<T>(dist(rng));
}

template <class T>
void copy(const GridVector<T>& src, GridVector<T>& dst) {
    check_same_grid(src.grid, dst.grid, "copy");
    dst.data = src.data;
}

/// y += a*x over the padded box (halos are zero on both sides, so this is
/// equivalent to an interior-only update).
template <class T>
void axpy(T a, const GridVector<T>& x, GridVector<T>& y) {
    check_same_grid(x.grid, y.grid, "axpy");
    const long n = static_cast<long>(x.data.size());
    const T* xs = x.data.data();
    T* ys = y.data.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(par::team_size())
#endif
    for (long i = 0; i < n; ++i) ys[i] += a * xs[i];
}

template <class T>
void scale(GridVector<T>& x, T a) {
    for (T& v : x.data) v *= a;
}

namespace detail {
/// Deterministic reduction: fixed blocks over the canonical interior order,
/// partials combined in block order regardless of the worker count.
template <class T, class F>
double block_reduce(const StructuredGrid& g, const GridVector<T>& a, const GridVector<T>& b,
                    F&& term) {
    const long n = g.interior_count();
    const long block = 8192;
    const long nblocks = (n + block - 1) / block;
    std::vector<double> partials(static_cast<std::size_t>(nblocks), 0.0);
    const int ny = g.dims[1], nz = g.dims[2];
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(par::team_size())
#endif
    for (long bi = 0; bi < nblocks; ++bi) {
        const long lo = bi * block, hi = std::min(n, lo + block);
        double s = 0.0;
        for (long li = lo; li < hi; ++li) {
            const int iz = static_cast<int>(li % nz);
            const int iy = static_cast<int>((li / nz) % ny);
            const int ix = static_cast<int>(li / (1L * nz * ny));
            s += term(a.at_i(ix, iy, iz), b.at_i(ix, iy, iz));
        }
        partials[static_cast<std::size_t>(bi)] = s;
    }
    double total = 0.0;
    for (double s : partials) total += s;
    return total;
}
} // namespace detail

template <class T>
double dot(const GridVector<T>& a, const GridVector<T>& b) {
    check_same_grid(a.grid, b.grid, "dot");
    return detail::block_reduce(a.grid, a, b,
                                [](T x, T y) { return static_cast<double>(x) * static_cast<double>(y); });
}

template <class T>
double norm2(const GridVector<T>& a) {
    return std::sqrt(dot(a, a));
}

/// Single-box boundary treatment: every non-interior (halo) point is set to
/// zero. This is the hook where inter-box copies would happen.
template <class T>
void halo_exchange(GridVector<T>& v) {
    const StructuredGrid& g = v.grid;
    for (int px = 0; px < g.padded(0); ++px)
        for (int py = 0; py < g.padded(1); ++py)
            for (int pz = 0; pz < g.padded(2); ++pz) {
                const bool interior = px >= g.halo[0] && px < g.halo[0] + g.dims[0] &&
                                      py >= g.halo[1] && py < g.halo[1] + g.dims[1] &&
                                      pz >= g.halo[2] && pz < g.halo[2] + g.dims[2];
                if (!interior) v.at_p(px, py, pz) = T(0);
            }
}

// -- binary fixture i/o ------------------------------------------------------

void write_vector_header(std::ostream& os, const StructuredGrid& g, int scalar_bytes);
StructuredGrid read_vector_header(std::istream& is, int& scalar_bytes);

template <class T>
void write_vector(std::ostream& os, const GridVector<T>& v) {
    write_vector_header(os, v.grid, static_cast<int>(sizeof(T)));
    os.write(reinterpret_cast<const char*>(v.data.data()),
             static_cast<std::streamsize>(v.data.size() * sizeof(T)));
}

template <class T>
GridVector<T> read_vector(std::istream& is) {
    int bytes = 0;
    StructuredGrid g = read_vector_header(is, bytes);
    if (bytes != static_cast<int>(sizeof(T)))
        throw std::runtime_error("read_vector: precision tag mismatch");
    GridVector<T> v(g);
    is.read(reinterpret_cast<char*>(v.data.data()),
            static_cast<std::streamsize>(v.data.size() * sizeof(T)));
    if (!is) throw std::runtime_error("read_vector: truncated payload");
    return v;
}

} // namespace structmg

#endif
