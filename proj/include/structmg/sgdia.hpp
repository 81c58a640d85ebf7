#ifndef STRUCTMG_SGDIA_HPP
#define STRUCTMG_SGDIA_HPP

#include <iosfwd>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "structmg/grid.hpp"
#include "structmg/stencil.hpp"

namespace structmg {

/// Structured matrix in SG-DIA layout: one dense coefficient block per padded
/// grid point, pattern entries innermost in canonical order. No index arrays.
/// Coefficients of non-interior points and of entries reaching outside the
/// interior are zero, so boundary rows need no special cases.
template <class T>
struct SgDiaMatrix {
    StructuredGrid grid;
    StencilPattern pattern;
    std::vector<T> coeffs;

    SgDiaMatrix() = default;
    SgDiaMatrix(const StructuredGrid& g, StencilPattern p)
        : grid(g), pattern(std::move(p)),
          coeffs(static_cast<std::size_t>(g.padded_count()) * pattern.entries_per_row(), T(0)) {
        for (int ax = 0; ax < 3; ++ax)
            if (g.halo[ax] < 1)
                throw std::invalid_argument("SgDiaMatrix: halo width must be >= 1");
    }

    int npe() const { return pattern.entries_per_row(); }

    T& c(int px, int py, int pz, int k) {
        return coeffs[static_cast<std::size_t>(grid.pindex(px, py, pz)) * npe() + k];
    }
    const T& c(int px, int py, int pz, int k) const {
        return coeffs[static_cast<std::size_t>(grid.pindex(px, py, pz)) * npe() + k];
    }
    T& ci(int ix, int iy, int iz, int k) {
        return c(ix + grid.halo[0], iy + grid.halo[1], iz + grid.halo[2], k);
    }
    const T& ci(int ix, int iy, int iz, int k) const {
        return c(ix + grid.halo[0], iy + grid.halo[1], iz + grid.halo[2], k);
    }
};

/// Zeroes every coefficient of non-interior points, and every interior
/// coefficient whose neighbor leaves the interior box.
template <class T>
void zero_boundary_entries(SgDiaMatrix<T>& A) {
    const StructuredGrid& g = A.grid;
    const int npe = A.npe();
    for (int px = 0; px < g.padded(0); ++px)
        for (int py = 0; py < g.padded(1); ++py)
            for (int pz = 0; pz < g.padded(2); ++pz) {
                const int ix = px - g.halo[0], iy = py - g.halo[1], iz = pz - g.halo[2];
                if (!g.interior_contains(ix, iy, iz)) {
                    for (int k = 0; k < npe; ++k) A.c(px, py, pz, k) = T(0);
                    continue;
                }
                for (int k = 0; k < npe; ++k) {
                    const Offset& o = A.pattern.offsets[k];
                    if (!g.interior_contains(ix + o[0], iy + o[1], iz + o[2]))
                        A.c(px, py, pz, k) = T(0);
                }
            }
}

/// y = A x over interior points; x halos must be current (zero at physical
/// boundaries). Each output point is written once, so the kernel parallelizes
/// without cross-point conflicts and is bitwise deterministic.
template <class T>
void spmv(const SgDiaMatrix<T>& A, const GridVector<T>& x, GridVector<T>& y) {
    check_same_grid(A.grid, x.grid, "spmv");
    check_same_grid(A.grid, y.grid, "spmv");
    const StructuredGrid& g = A.grid;
    const int npe = A.npe();
    std::vector<long> delta(static_cast<std::size_t>(npe));
    for (int k = 0; k < npe; ++k) delta[static_cast<std::size_t>(k)] = g.pdelta(A.pattern.offsets[static_cast<std::size_t>(k)]);
    const T* xs = x.data.data();
    const T* cs = A.coeffs.data();
    T* ys = y.data.data();
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) num_threads(par::team_size())
#endif
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy) {
            long p = g.iindex(ix, iy, 0);
            for (int iz = 0; iz < g.dims[2]; ++iz, ++p) {
                const T* row = cs + static_cast<std::size_t>(p) * npe;
                T acc = T(0);
                for (int k = 0; k < npe; ++k)
                    acc += row[k] * xs[p + delta[static_cast<std::size_t>(k)]];
                ys[p] = acc;
            }
        }
}

/// r = b - A x, same contract as spmv.
template <class T>
void residual(const SgDiaMatrix<T>& A, const GridVector<T>& x, const GridVector<T>& b,
              GridVector<T>& r) {
    check_same_grid(A.grid, x.grid, "residual");
    check_same_grid(A.grid, b.grid, "residual");
    check_same_grid(A.grid, r.grid, "residual");
    const StructuredGrid& g = A.grid;
    const int npe = A.npe();
    std::vector<long> delta(static_cast<std::size_t>(npe));
    for (int k = 0; k < npe; ++k) delta[static_cast<std::size_t>(k)] = g.pdelta(A.pattern.offsets[static_cast<std::size_t>(k)]);
    const T* xs = x.data.data();
    const T* bs = b.data.data();
    const T* cs = A.coeffs.data();
    T* rs = r.data.data();
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) num_threads(par::team_size())
#endif
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy) {
            long p = g.iindex(ix, iy, 0);
            for (int iz = 0; iz < g.dims[2]; ++iz, ++p) {
                const T* row = cs + static_cast<std::size_t>(p) * npe;
                T acc = bs[p];
                for (int k = 0; k < npe; ++k)
                    acc -= row[k] * xs[p + delta[static_cast<std::size_t>(k)]];
                rs[p] = acc;
            }
        }
}

struct Triplet {
    long row = 0;
    long col = 0;
    double val = 0.0;
};

/// Explicit sparse view over linearized interior indices. Entries whose
/// neighbor leaves the interior are omitted.
template <class T>
std::vector<Triplet> export_triplets(const SgDiaMatrix<T>& A) {
    const StructuredGrid& g = A.grid;
    std::vector<Triplet> out;
    out.reserve(static_cast<std::size_t>(g.interior_count()) * A.npe());
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz)
                for (int k = 0; k < A.npe(); ++k) {
                    const Offset& o = A.pattern.offsets[k];
                    const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
                    if (!g.interior_contains(jx, jy, jz)) continue;
                    out.push_back(Triplet{g.linear_interior(ix, iy, iz),
                                          g.linear_interior(jx, jy, jz),
                                          static_cast<double>(A.ci(ix, iy, iz, k))});
                }
    return out;
}

template <class T>
bool has_nonzero_diagonal(const SgDiaMatrix<T>& A) {
    const int cd = A.pattern.center_index();
    if (cd < 0) return false;
    const StructuredGrid& g = A.grid;
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz)
                if (A.ci(ix, iy, iz, cd) == T(0)) return false;
    return true;
}

template <class T>
void write_matrix(std::ostream& os, const SgDiaMatrix<T>& A) {
    write_vector_header(os, A.grid, static_cast<int>(sizeof(T)));
    const std::string pat = serialize_pattern(A.pattern);
    const std::uint32_t len = static_cast<std::uint32_t>(pat.size());
    os.write(reinterpret_cast<const char*>(&len), 4);
    os.write(pat.data(), len);
    os.write(reinterpret_cast<const char*>(A.coeffs.data()),
             static_cast<std::streamsize>(A.coeffs.size() * sizeof(T)));
}

template <class T>
SgDiaMatrix<T> read_matrix(std::istream& is) {
    int bytes = 0;
    StructuredGrid g = read_vector_header(is, bytes);
    if (bytes != static_cast<int>(sizeof(T)))
        throw std::runtime_error("read_matrix: precision tag mismatch");
    std::uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 4);
    std::string pat(len, '\0');
    is.read(pat.data(), len);
    if (!is) throw std::runtime_error("read_matrix: truncated header");
    SgDiaMatrix<T> A(g, parse_pattern(pat));
    is.read(reinterpret_cast<char*>(A.coeffs.data()),
            static_cast<std::streamsize>(A.coeffs.size() * sizeof(T)));
    if (!is) throw std::runtime_error("read_matrix: truncated payload");
    return A;
}

/// Coordinate text export for cross-checking with external tools.
template <class T>
void write_matrix_market(std::ostream& os, const SgDiaMatrix<T>& A) {
    std::vector<Triplet> trips = export_triplets(A);
    os << "%%MatrixMarket matrix coordinate real general\n";
    const long n = A.grid.interior_count();
    os << n << ' ' << n << ' ' << trips.size() << '\n';
    os.precision(17);
    for (const Triplet& t : trips) os << t.row + 1 << ' ' << t.col + 1 << ' ' << t.val << '\n';
}

} // namespace structmg

#endif
