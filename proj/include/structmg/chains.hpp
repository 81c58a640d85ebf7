#ifndef STRUCTMG_CHAINS_HPP
#define STRUCTMG_CHAINS_HPP

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "structmg/stencil.hpp"

namespace structmg {

/// One multiplicative path R(C_i,F_u) * A(F_u,F_v) * P(F_v,C_j) contributing
/// to the coarse entry at offset C_j - C_i. `u_off` is F_u's displacement
/// from C_i's fine image; the entry fields index the operand patterns.
struct InfluenceChain {
    int r_entry = 0;
    Offset u_off{0, 0, 0};
    int a_entry = 0;
    int p_entry = 0;
    int c_entry = 0;

    bool operator==(const InfluenceChain& o) const {
        return r_entry == o.r_entry && u_off == o.u_off && a_entry == o.a_entry &&
               p_entry == o.p_entry && c_entry == o.c_entry;
    }
};

/// All chains for one (restriction, operator, interpolation, strides)
/// combination. Value-independent: derived once per combination and reused by
/// matrices with the same patterns.
struct ChainTable {
    TransferPattern r_pattern;
    StencilPattern a_pattern;
    TransferPattern p_pattern;
    std::array<int, 3> strides{2, 2, 2};
    Centering centering = Centering::cell;

    StencilPattern coarse_pattern;                 // offsets with at least one chain
    std::vector<std::vector<InfluenceChain>> chains; // grouped per coarse entry

    std::size_t total_chains() const;
    /// One line per chain: coarse offset, r entry, u offset, a entry, p entry.
    void dump(std::ostream& os) const;
    /// Renders the table as the fused kernel body it stands for: one guarded
    /// block per coarse entry, one accumulation block per fine source point.
    /// Inspection aid only; the product executes the table directly.
    void print_kernel(std::ostream& os) const;
    std::string cache_key() const;
};

/// Enumerates every chain for the operand patterns. A fine point F_u in the
/// restriction footprint of C_i reaches F_v = F_u + a; the chain survives
/// when F_v lands in the interpolation footprint of some coarse neighbor C_j,
/// i.e. u + a - p is divisible by the strides. Deterministic and independent
/// of matrix values.
ChainTable derive_chains(const TransferPattern& r, const StencilPattern& a,
                         const TransferPattern& p, std::array<int, 3> strides);

} // namespace structmg

#endif
