#ifndef STRUCTMG_PARALLEL_HPP
#define STRUCTMG_PARALLEL_HPP

#ifdef _OPENMP
#include <omp.h>
#endif

namespace structmg::par {

/// Worker-team size used by the kernels. All results are bitwise independent
/// of this value; it only controls how work is split.
int team_size();
void set_team_size(int n);

inline int hardware_team() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

/// Disables dynamic team-size adjustment so that requested worker counts are
/// honored exactly (the triangular-solve sync protocol relies on it).
inline void pin_team_sizes() {
#ifdef _OPENMP
    omp_set_dynamic(0);
#endif
}

} // namespace structmg::par

#endif
