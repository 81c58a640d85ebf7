#ifndef STRUCTMG_TRISOLVE_HPP
#define STRUCTMG_TRISOLVE_HPP

#include <atomic>
#include <exception>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "structmg/grid.hpp"
#include "structmg/parallel.hpp"
#include "structmg/schedule.hpp"
#include "structmg/sgdia.hpp"

namespace structmg {

namespace detail {

struct alignas(64) ProgressCounter {
    std::atomic<int> x;
};

/// Walks a schedule with the counter-array protocol: each worker processes
/// its own columns in order, publishes per-row progress after every column,
/// and spin-waits (bounded backoff, no barrier) on the recorded cross-worker
/// dependences. The result is a pure function of the inputs: every column
/// computes from fully determined values, so any worker count and any timing
/// produce bitwise identical output.
template <class ColumnFn>
void run_schedule(const LevelSchedule& s, ColumnFn&& column_fn) {
    const bool fwd = s.dir == SweepDirection::forward;

#ifdef _OPENMP
    if (s.workers > 1) {
        par::pin_team_sizes();
        std::vector<ProgressCounter> counters(static_cast<std::size_t>(s.ny));
        for (auto& c : counters) c.x.store(fwd ? -1 : s.nx, std::memory_order_relaxed);
        std::atomic<bool> abort{false};
        std::exception_ptr error;
        bool team_ok = true;
#pragma omp parallel num_threads(s.workers)
        {
            const int tid = omp_get_thread_num();
#pragma omp single
            {
                if (omp_get_num_threads() != s.workers) team_ok = false;
            }
            // implicit barrier of `single` publishes team_ok to every thread
            if (team_ok && tid < s.workers) {
                try {
                    for (int col : s.order[static_cast<std::size_t>(tid)]) {
                        const int ix = col / s.ny, iy = col % s.ny;
                        bool aborted = false;
                        for (const SyncDep& dep : s.sync[static_cast<std::size_t>(col)]) {
                            const std::atomic<int>& c =
                                counters[static_cast<std::size_t>(dep.row)].x;
                            int spins = 0;
                            while (true) {
                                const int seen = c.load(std::memory_order_acquire);
                                if (fwd ? seen >= dep.required : seen <= dep.required) break;
                                if (abort.load(std::memory_order_relaxed)) {
                                    aborted = true;
                                    break;
                                }
                                if (++spins > 64) {
                                    std::this_thread::yield();
                                    spins = 0;
                                }
                            }
                            if (aborted) break;
                        }
                        if (aborted) break;
                        column_fn(ix, iy);
                        counters[static_cast<std::size_t>(iy)].x.store(
                            ix, std::memory_order_release);
                    }
                } catch (...) {
#pragma omp critical(structmg_run_schedule)
                    {
                        if (!error) error = std::current_exception();
                    }
                    abort.store(true, std::memory_order_relaxed);
                }
            }
        }
        if (error) std::rethrow_exception(error);
        if (team_ok) return;
        // Team could not be formed (e.g. inside a nested region): fall through
        // to the global sequential sweep, which computes the same values.
    }
#endif
    if (fwd) {
        for (int ix = 0; ix < s.nx; ++ix)
            for (int iy = 0; iy < s.ny; ++iy) column_fn(ix, iy);
    } else {
        for (int ix = s.nx - 1; ix >= 0; --ix)
            for (int iy = s.ny - 1; iy >= 0; --iy) column_fn(ix, iy);
    }
}

} // namespace detail

/// Solves one triangular system over the interior: for every point, in sweep
/// order, x_i = (rhs_i - sum_k M(i,k) * x(i + off_k)) * scale * inv_diag_i.
/// `tri_entries` index the strictly-triangular coefficients of M (offsets
/// must point against the sweep direction); `inv_diag` is per padded point
/// (empty means ones, for unit-diagonal factors). x halos must be zero; the
/// z loop inside a column is the vectorizable inner kernel.
template <class T>
void sptrsv(const SgDiaMatrix<T>& M, const std::vector<int>& tri_entries,
            const std::vector<T>& inv_diag, T scale, const GridVector<T>& rhs, GridVector<T>& x,
            const LevelSchedule& sched) {
    check_same_grid(M.grid, rhs.grid, "sptrsv");
    check_same_grid(M.grid, x.grid, "sptrsv");
    const StructuredGrid& g = M.grid;
    if (sched.nx != g.dims[0] || sched.ny != g.dims[1])
        throw std::invalid_argument("sptrsv: schedule built for another grid");
    if (!inv_diag.empty() && inv_diag.size() != static_cast<std::size_t>(g.padded_count()))
        throw std::invalid_argument("sptrsv: inv_diag size mismatch");

    const int nz = g.dims[2];
    const bool fwd = sched.dir == SweepDirection::forward;
    const int nk = static_cast<int>(tri_entries.size());
    const int npe = M.npe();
    std::vector<long> delta(static_cast<std::size_t>(nk));
    for (int t = 0; t < nk; ++t)
        delta[static_cast<std::size_t>(t)] =
            g.pdelta(M.pattern.offsets[static_cast<std::size_t>(tri_entries[static_cast<std::size_t>(t)])]);
    const T* cs = M.coeffs.data();
    const T* bs = rhs.data.data();
    const bool scaled = !inv_diag.empty();
    const T* ds = inv_diag.data();
    T* xs = x.data.data();

    detail::run_schedule(sched, [&](int ix, int iy) {
        const long base = g.iindex(ix, iy, 0);
        for (int step = 0; step < nz; ++step) {
            const int iz = fwd ? step : nz - 1 - step;
            const long p = base + iz;
            const T* row = cs + static_cast<std::size_t>(p) * npe;
            T acc = bs[p];
            for (int t = 0; t < nk; ++t)
                acc -= row[tri_entries[static_cast<std::size_t>(t)]] *
                       xs[p + delta[static_cast<std::size_t>(t)]];
            const T d = scaled ? ds[p] : T(1);
            xs[p] = acc * scale * d;
        }
    });
}

/// Exact tridiagonal solve by forward elimination and back substitution.
/// sub[i] couples to x[i-1], sup[i] to x[i+1] (sub[0] and sup[n-1] unused).
template <class T>
void thomas_solve(std::span<const T> sub, std::span<const T> diag, std::span<const T> sup,
                  std::span<const T> rhs, std::span<T> x) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    if (sub.size() != n || sup.size() != n || rhs.size() != n || x.size() != n)
        throw std::invalid_argument("thomas_solve: length mismatch");
    std::vector<T> cp(n);
    if (diag[0] == T(0)) throw std::runtime_error("thomas_solve: zero pivot at line position 0");
    cp[0] = sup[0] / diag[0];
    x[0] = rhs[0] / diag[0];
    for (std::size_t i = 1; i < n; ++i) {
        const T m = diag[i] - sub[i] * cp[i - 1];
        if (m == T(0))
            throw std::runtime_error("thomas_solve: zero pivot at line position " +
                                     std::to_string(i));
        cp[i] = sup[i] / m;
        x[i] = (rhs[i] - sub[i] * x[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= cp[i] * x[i + 1];
}

template <class T>
std::vector<T> thomas_solve(const std::vector<T>& sub, const std::vector<T>& diag,
                            const std::vector<T>& sup, const std::vector<T>& rhs) {
    std::vector<T> x(diag.size());
    thomas_solve<T>(std::span<const T>(sub), std::span<const T>(diag), std::span<const T>(sup),
                    std::span<const T>(rhs), std::span<T>(x));
    return x;
}

} // namespace structmg

#endif
