#ifndef STRUCTMG_STENCIL_HPP
#define STRUCTMG_STENCIL_HPP

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace structmg {

/// Neighbor displacement in grid units. For 2D patterns the z component is 0.
using Offset = std::array<int, 3>;

enum class Centering { vertex, cell };

/// A stencil pattern: the set of neighbor offsets carrying coefficients at
/// every grid point. Offsets are kept in canonical lexicographic order by
/// (x, y, z), which is also the coefficient layout order everywhere else.
struct StencilPattern {
    int dim = 3;
    std::vector<Offset> offsets;
    std::string name = "custom";

    int entries_per_row() const { return static_cast<int>(offsets.size()); }
    bool has_center() const { return center_index() >= 0; }
    /// Index of the all-zero offset, or -1 when absent.
    int center_index() const;
    /// Index of `o`, or -1 when absent.
    int index_of(const Offset& o) const;
    bool contains(const Offset& o) const { return index_of(o) >= 0; }

    bool operator==(const StencilPattern& other) const {
        return dim == other.dim && offsets == other.offsets;
    }
};

/// Sorts, validates (offsets within {-1,0,1}^dim, no duplicates) and names
/// the pattern. Any custom mask within that family is accepted.
StencilPattern make_pattern(int dim, std::vector<Offset> offsets);

/// Canonical masks: 2d5, 2d9, 3d7, 3d15, 3d19, 3d27.
StencilPattern pattern_from_name(std::string_view name);

/// Drops the z component and deduplicates; input must be 3D.
StencilPattern project_to_2d(const StencilPattern& p);

/// Offsets strictly preceding the center in lexicographic order.
/// The pattern must contain the center.
StencilPattern lower_triangular_part(const StencilPattern& p);

/// Offsets strictly following the center in lexicographic order.
StencilPattern upper_triangular_part(const StencilPattern& p);

/// Negates every offset and re-canonicalizes. Involution.
StencilPattern transpose_pattern(const StencilPattern& p);

/// Text form "3d7:[(-1,0,0),...]" (2D omits the z component).
std::string serialize_pattern(const StencilPattern& p);

/// Accepts a canonical name or the serialized text form.
StencilPattern parse_pattern(std::string_view text);

/// Interpolation/restriction footprint: offsets of the fine points coupled
/// to one coarse element, in fine-grid units around the element's fine image.
struct TransferPattern {
    Centering centering = Centering::cell;
    int dim = 3;
    std::vector<Offset> offsets;
    std::string name = "custom";

    int entries() const { return static_cast<int>(offsets.size()); }
    int index_of(const Offset& o) const;

    bool operator==(const TransferPattern& other) const {
        return centering == other.centering && dim == other.dim && offsets == other.offsets;
    }
};

/// Canonical transfer footprints: 3d8c, 2d4c, 3d7v, 3d27v, 2d9v.
TransferPattern transfer_from_name(std::string_view name);

TransferPattern make_transfer(Centering centering, int dim, std::vector<Offset> offsets);

/// Footprint implied by the coarsening strides: per strided axis the cell
/// footprint covers {0,1} and the vertex footprint {-1,0,1}; unstrided axes
/// contribute only 0.
TransferPattern transfer_for_strides(Centering centering, std::array<int, 3> strides, int dim = 3);

std::string to_string(Centering c);

} // namespace structmg

#endif
