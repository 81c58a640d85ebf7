#ifndef STRUCTMG_SCHEDULE_HPP
#define STRUCTMG_SCHEDULE_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "structmg/stencil.hpp"

namespace structmg {

/// Column-to-column dependence in the outer two dimensions.
using Dep2 = std::array<int, 2>;

/// Removes every dependence implied by a multi-hop path of the others
/// (transitive reduction restricted to the stencil graph). Input must be
/// strictly one-sided: all offsets lexicographically negative, or all
/// positive.
std::vector<Dep2> sparsify_dependences(std::vector<Dep2> deps);

enum class SweepDirection { forward, backward };

struct SyncDep {
    int row = 0;      // y row of the dependence column
    int required = 0; // x progress that row must have reached
};

/// Static schedule for one triangular sweep over the (x, y) columns of a
/// grid: contiguous y-block ownership per worker, columns in sweep order,
/// and the per-column cross-worker waits that survive sparsification.
struct LevelSchedule {
    int nx = 0;
    int ny = 0;
    int workers = 1;
    SweepDirection dir = SweepDirection::forward;
    std::vector<Dep2> deps; // sparsified dependence offsets actually enforced

    std::vector<int> owner;                    // per column ix*ny+iy
    std::vector<std::vector<int>> order;       // per worker, encoded columns
    std::vector<std::vector<SyncDep>> sync;    // per column ix*ny+iy

    int column(int ix, int iy) const { return ix * ny + iy; }
    void dump(std::ostream& os) const;
};

/// Builds the schedule for the given raw dependence offsets (sparsification
/// happens inside). Forward sweeps take lexicographically negative offsets
/// and run columns in ascending (x, y) order per worker; backward sweeps take
/// positive offsets and run in descending order. Cross-worker waits are kept
/// only for dependence columns owned by another worker; same-worker
/// dependences are already satisfied by the traversal order. A worker count
/// above the number of y rows is clamped with a warning.
LevelSchedule build_schedule(int nx, int ny, const std::vector<Dep2>& raw_deps, int workers,
                             SweepDirection dir = SweepDirection::forward);

/// 2D dependence sets of a 3D (or 2D) pattern: the distinct nonzero (x, y)
/// displacements of the given offsets.
std::vector<Dep2> project_deps(const std::vector<Offset>& offsets);
/// Column couplings of a full pattern that point to earlier columns in
/// (x, y)-lexicographic order (used by line sweeps).
std::vector<Dep2> line_lower_deps(const StencilPattern& p);
std::vector<Dep2> line_upper_deps(const StencilPattern& p);

} // namespace structmg

#endif
