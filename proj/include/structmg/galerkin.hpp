#ifndef STRUCTMG_GALERKIN_HPP
#define STRUCTMG_GALERKIN_HPP

#include <stdexcept>

#include "structmg/chains.hpp"
#include "structmg/sgdia.hpp"
#include "structmg/transfer.hpp"

namespace structmg {

/// Fused triple-matrix product: for each coarse point and coarse entry, the
/// value is the sum over the entry's influence chains of
/// R(C_i)[r] * A(image(C_i)+u)[a] * P(C_j)[p]. Single pass, no intermediate
/// product. Entries whose coarse neighbor leaves the interior stay zero, and
/// chains touching fine halo points vanish through the operand's zero padding.
template <class T>
SgDiaMatrix<T> galerkin_product(const TransferOp<T>& R, const SgDiaMatrix<T>& A,
                                const TransferOp<T>& P, const ChainTable& table) {
    if (!(table.r_pattern == R.pattern) || !(table.a_pattern == A.pattern) ||
        !(table.p_pattern == P.pattern))
        throw std::invalid_argument("galerkin_product: chain table derived for other patterns");
    check_same_grid(R.fine, A.grid, "galerkin_product");
    check_same_grid(P.fine, A.grid, "galerkin_product");
    check_same_grid(R.coarse, P.coarse, "galerkin_product");
    if (R.coarse.strides != table.strides)
        throw std::invalid_argument("galerkin_product: chain table derived for other strides");
    for (int ax = 0; ax < 3; ++ax)
        if (A.grid.halo[ax] < 1)
            throw std::invalid_argument("galerkin_product: fine halo must be >= 1");

    const StructuredGrid& cg = R.coarse;
    const StructuredGrid& fg = A.grid;
    SgDiaMatrix<T> Ac(cg, table.coarse_pattern);
    const int nce = Ac.npe();
    const int npe_a = A.npe();

    // flatten each chain into padded-layout displacements once per product
    struct FlatChain {
        long a_at; // A block displacement of F_u from the fine image, in coeffs
        int r_entry, p_entry;
    };
    std::vector<std::vector<FlatChain>> flat(table.chains.size());
    for (std::size_t e = 0; e < table.chains.size(); ++e)
        for (const InfluenceChain& ch : table.chains[e])
            flat[e].push_back(FlatChain{fg.pdelta(ch.u_off) * npe_a + ch.a_entry, ch.r_entry,
                                        ch.p_entry});

#ifdef _OPENMP
#pragma omp parallel for collapse(2) schedule(static) num_threads(par::team_size())
#endif
    for (int ix = 0; ix < cg.dims[0]; ++ix)
        for (int iy = 0; iy < cg.dims[1]; ++iy)
            for (int iz = 0; iz < cg.dims[2]; ++iz) {
                const std::array<int, 3> img = cg.fine_image({ix, iy, iz});
                const T* rrow =
                    R.coeffs.data() + static_cast<std::size_t>(cg.iindex(ix, iy, iz)) * R.npe();
                const T* arow = A.coeffs.data() +
                                static_cast<std::size_t>(fg.iindex(img[0], img[1], img[2])) *
                                    npe_a;
                for (int e = 0; e < nce; ++e) {
                    const Offset& c = table.coarse_pattern.offsets[static_cast<std::size_t>(e)];
                    const int jx = ix + c[0], jy = iy + c[1], jz = iz + c[2];
                    if (!cg.interior_contains(jx, jy, jz)) continue; // stays zero
                    const T* prow = P.coeffs.data() +
                                    static_cast<std::size_t>(cg.iindex(jx, jy, jz)) * P.npe();
                    T acc = T(0);
                    for (const FlatChain& ch : flat[static_cast<std::size_t>(e)])
                        acc += rrow[ch.r_entry] * arow[ch.a_at] * prow[ch.p_entry];
                    Ac.ci(ix, iy, iz, e) = acc;
                }
            }
    return Ac;
}

} // namespace structmg

#endif
