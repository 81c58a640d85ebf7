#ifndef STRUCTMG_TRANSFER_HPP
#define STRUCTMG_TRANSFER_HPP

#include <span>
#include <stdexcept>
#include <vector>

#include "structmg/grid.hpp"
#include "structmg/sgdia.hpp"
#include "structmg/stencil.hpp"

namespace structmg {

enum class WeightScheme { constant, trilinear };

/// Interpolation or restriction operator: one coefficient per (coarse point,
/// footprint entry), stored on the coarse grid like an SG-DIA block. The fine
/// point of entry k at coarse point C is fine_image(C) + offsets[k].
template <class T>
struct TransferOp {
    StructuredGrid fine;
    StructuredGrid coarse;
    TransferPattern pattern;
    std::vector<T> coeffs;

    TransferOp() = default;
    TransferOp(const StructuredGrid& f, const StructuredGrid& c, TransferPattern p)
        : fine(f), coarse(c), pattern(std::move(p)),
          coeffs(static_cast<std::size_t>(c.padded_count()) * pattern.entries(), T(0)) {}

    int npe() const { return pattern.entries(); }
    T& c(int px, int py, int pz, int k) {
        return coeffs[static_cast<std::size_t>(coarse.pindex(px, py, pz)) * npe() + k];
    }
    const T& c(int px, int py, int pz, int k) const {
        return coeffs[static_cast<std::size_t>(coarse.pindex(px, py, pz)) * npe() + k];
    }
    T& ci(int ix, int iy, int iz, int k) {
        return c(ix + coarse.halo[0], iy + coarse.halo[1], iz + coarse.halo[2], k);
    }
    const T& ci(int ix, int iy, int iz, int k) const {
        return c(ix + coarse.halo[0], iy + coarse.halo[1], iz + coarse.halo[2], k);
    }
};

namespace detail {
template <class T>
void check_transfer_geometry(const StructuredGrid& fine, const StructuredGrid& coarse,
                             const TransferPattern& pat, const char* op) {
    (void)pat;
    for (int ax = 0; ax < 3; ++ax) {
        if (coarse.strides[ax] != 1 && coarse.strides[ax] != 2)
            throw std::invalid_argument(std::string(op) + ": coarse strides must be 1 or 2");
        (void)fine;
    }
}
} // namespace detail

/// Uniform weights. `constant` is the cell-centered piecewise-constant
/// scheme (all weights 1); `trilinear` is the vertex-centered scheme with
/// weight 1/2 per unit offset on strided axes. `scale` multiplies every
/// weight; a transposed restriction passes 1/prod(strides) here.
template <class T>
TransferOp<T> build_transfer(const StructuredGrid& fine, const StructuredGrid& coarse,
                             const TransferPattern& pat, WeightScheme scheme, double scale = 1.0) {
    detail::check_transfer_geometry<T>(fine, coarse, pat, "build_transfer");
    if (scheme == WeightScheme::constant && pat.centering != Centering::cell)
        throw std::invalid_argument("build_transfer: constant weights require a cell footprint");
    if (scheme == WeightScheme::trilinear && pat.centering != Centering::vertex)
        throw std::invalid_argument("build_transfer: trilinear weights require a vertex footprint");

    std::vector<double> w(pat.entries(), 1.0);
    if (scheme == WeightScheme::trilinear) {
        for (int k = 0; k < pat.entries(); ++k) {
            double v = 1.0;
            for (int ax = 0; ax < 3; ++ax)
                if (pat.offsets[k][ax] != 0) v *= 0.5;
            w[static_cast<std::size_t>(k)] = v;
        }
    }

    TransferOp<T> op(fine, coarse, pat);
    for (int ix = 0; ix < coarse.dims[0]; ++ix)
        for (int iy = 0; iy < coarse.dims[1]; ++iy)
            for (int iz = 0; iz < coarse.dims[2]; ++iz)
                for (int k = 0; k < pat.entries(); ++k)
                    op.ci(ix, iy, iz, k) = static_cast<T>(w[static_cast<std::size_t>(k)] * scale);
    return op;
}

/// Per-element weights (operator-dependent hook). `weights` holds one value
/// per (coarse interior point, entry) in canonical order.
template <class T>
TransferOp<T> build_transfer_user(const StructuredGrid& fine, const StructuredGrid& coarse,
                                  const TransferPattern& pat, std::span<const T> weights,
                                  double scale = 1.0) {
    detail::check_transfer_geometry<T>(fine, coarse, pat, "build_transfer_user");
    const std::size_t want =
        static_cast<std::size_t>(coarse.interior_count()) * pat.entries();
    if (weights.size() != want)
        throw std::invalid_argument("build_transfer_user: expected " + std::to_string(want) +
                                    " weights, got " + std::to_string(weights.size()));
    TransferOp<T> op(fine, coarse, pat);
    std::size_t i = 0;
    for (int ix = 0; ix < coarse.dims[0]; ++ix)
        for (int iy = 0; iy < coarse.dims[1]; ++iy)
            for (int iz = 0; iz < coarse.dims[2]; ++iz)
                for (int k = 0; k < pat.entries(); ++k)
                    op.ci(ix, iy, iz, k) = static_cast<T>(weights[i++] * scale);
    return op;
}

/// coarse_v(C) = sum_k R(C)[k] * fine_v(image(C) + off_k). Pure gather over
/// coarse points; fine reads may touch the fine halo (zero there).
template <class T>
void restrict_apply(const TransferOp<T>& R, const GridVector<T>& fine_v, GridVector<T>& coarse_v) {
    check_same_grid(R.fine, fine_v.grid, "restrict_apply");
    check_same_grid(R.coarse, coarse_v.grid, "restrict_apply");
    const StructuredGrid& cg = R.coarse;
    const int npe = R.npe();
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) num_threads(par::team_size())
#endif
    for (int ix = 0; ix < cg.dims[0]; ++ix)
        for (int iy = 0; iy < cg.dims[1]; ++iy)
            for (int iz = 0; iz < cg.dims[2]; ++iz) {
                const std::array<int, 3> img = cg.fine_image({ix, iy, iz});
                T acc = T(0);
                for (int k = 0; k < npe; ++k) {
                    const Offset& o = R.pattern.offsets[k];
                    acc += R.ci(ix, iy, iz, k) *
                           fine_v.at_i(img[0] + o[0], img[1] + o[1], img[2] + o[2]);
                }
                coarse_v.at_i(ix, iy, iz) = acc;
            }
}

/// fine_v(F) += sum over coarse points C with F in their footprint of
/// P(C)[k] * coarse_v(C). Gather form: each fine point resolves its own
/// coarse sources, so the loop parallelizes without write conflicts.
template <class T>
void interpolate_add(const TransferOp<T>& P, const GridVector<T>& coarse_v,
                     GridVector<T>& fine_v) {
    check_same_grid(P.fine, fine_v.grid, "interpolate_add");
    check_same_grid(P.coarse, coarse_v.grid, "interpolate_add");
    const StructuredGrid& fg = P.fine;
    const StructuredGrid& cg = P.coarse;
    const int npe = P.npe();
#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) num_threads(par::team_size())
#endif
    for (int fx = 0; fx < fg.dims[0]; ++fx)
        for (int fy = 0; fy < fg.dims[1]; ++fy)
            for (int fz = 0; fz < fg.dims[2]; ++fz) {
                T acc = T(0);
                for (int k = 0; k < npe; ++k) {
                    const Offset& o = P.pattern.offsets[k];
                    // invert image(C) + off = F per axis
                    int cx, cy, cz;
                    const int nx = fx - o[0] - cg.base[0];
                    const int ny = fy - o[1] - cg.base[1];
                    const int nz = fz - o[2] - cg.base[2];
                    if (nx % cg.strides[0] || ny % cg.strides[1] || nz % cg.strides[2]) continue;
                    cx = nx / cg.strides[0];
                    cy = ny / cg.strides[1];
                    cz = nz / cg.strides[2];
                    if (!cg.interior_contains(cx, cy, cz)) continue;
                    acc += P.ci(cx, cy, cz, k) * coarse_v.at_i(cx, cy, cz);
                }
                fine_v.at_i(fx, fy, fz) += acc;
            }
}

/// Triplets of the interpolation map (rows fine, cols coarse). The transposed
/// restriction view swaps row/col.
template <class T>
std::vector<Triplet> export_transfer_triplets(const TransferOp<T>& op, bool as_restriction) {
    const StructuredGrid& cg = op.coarse;
    const StructuredGrid& fg = op.fine;
    std::vector<Triplet> out;
    for (int ix = 0; ix < cg.dims[0]; ++ix)
        for (int iy = 0; iy < cg.dims[1]; ++iy)
            for (int iz = 0; iz < cg.dims[2]; ++iz) {
                const std::array<int, 3> img = cg.fine_image({ix, iy, iz});
                const long crow = cg.linear_interior(ix, iy, iz);
                for (int k = 0; k < op.npe(); ++k) {
                    const Offset& o = op.pattern.offsets[k];
                    const int fx = img[0] + o[0], fy = img[1] + o[1], fz = img[2] + o[2];
                    if (!fg.interior_contains(fx, fy, fz)) continue;
                    const long frow = fg.linear_interior(fx, fy, fz);
                    const double v = static_cast<double>(op.ci(ix, iy, iz, k));
                    if (as_restriction)
                        out.push_back(Triplet{crow, frow, v});
                    else
                        out.push_back(Triplet{frow, crow, v});
                }
            }
    return out;
}

} // namespace structmg

#endif
