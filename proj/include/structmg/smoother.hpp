#ifndef STRUCTMG_SMOOTHER_HPP
#define STRUCTMG_SMOOTHER_HPP

#include <memory>
#include <string>
#include <vector>

#include "structmg/schedule.hpp"
#include "structmg/sgdia.hpp"
#include "structmg/trisolve.hpp"

namespace structmg {

enum class SmootherKind { jacobi, pgs, sgs, lgs, ilu };

inline SmootherKind parse_smoother(std::string_view name) {
    if (name == "jacobi") return SmootherKind::jacobi;
    if (name == "pgs") return SmootherKind::pgs;
    if (name == "sgs") return SmootherKind::sgs;
    if (name == "lgs") return SmootherKind::lgs;
    if (name == "ilu") return SmootherKind::ilu;
    throw std::invalid_argument("parse_smoother: unknown kind '" + std::string(name) +
                                "' (supported: jacobi, pgs, sgs, lgs, ilu)");
}

inline std::string to_string(SmootherKind k) {
    switch (k) {
    case SmootherKind::jacobi: return "jacobi";
    case SmootherKind::pgs: return "pgs";
    case SmootherKind::sgs: return "sgs";
    case SmootherKind::lgs: return "lgs";
    case SmootherKind::ilu: return "ilu";
    }
    return "?";
}

namespace detail {
inline std::string point_str(int ix, int iy, int iz) {
    return "(" + std::to_string(ix) + "," + std::to_string(iy) + "," + std::to_string(iz) + ")";
}

template <class T>
std::vector<T> interior_inverse_diag(const SgDiaMatrix<T>& A, const char* op) {
    const int cd = A.pattern.center_index();
    if (cd < 0) throw std::invalid_argument(std::string(op) + ": pattern has no center offset");
    const StructuredGrid& g = A.grid;
    std::vector<T> inv(static_cast<std::size_t>(g.padded_count()), T(0));
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz) {
                const T d = A.ci(ix, iy, iz, cd);
                if (d == T(0))
                    throw std::runtime_error(std::string(op) + ": zero diagonal at point " +
                                             point_str(ix, iy, iz));
                inv[static_cast<std::size_t>(g.iindex(ix, iy, iz))] = T(1) / d;
            }
    return inv;
}

inline std::vector<int> entry_indices(const StencilPattern& of, const StencilPattern& subset) {
    std::vector<int> idx;
    for (const Offset& o : subset.offsets) idx.push_back(of.index_of(o));
    return idx;
}
} // namespace detail

// -- weighted Jacobi ----------------------------------------------------------

template <class T>
struct JacobiContext {
    std::vector<T> inv_diag; // per padded point, zero outside the interior
    GridVector<T> r;
};

template <class T>
JacobiContext<T> make_jacobi(const SgDiaMatrix<T>& A) {
    return JacobiContext<T>{detail::interior_inverse_diag(A, "jacobi"), GridVector<T>(A.grid)};
}

/// One sweep x += w * D^{-1} (b - A x). Free of read-after-write dependence.
template <class T>
void jacobi(const SgDiaMatrix<T>& A, JacobiContext<T>& ctx, const GridVector<T>& b,
            GridVector<T>& x, T w) {
    residual(A, x, b, ctx.r);
    const long n = static_cast<long>(x.data.size());
    T* xs = x.data.data();
    const T* rs = ctx.r.data.data();
    const T* id = ctx.inv_diag.data();
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(par::team_size())
#endif
    for (long i = 0; i < n; ++i) xs[i] += w * id[i] * rs[i];
}

// -- point Gauss-Seidel -------------------------------------------------------

template <class T>
struct PointGsContext {
    std::vector<int> lower, upper; // entry indices into A's pattern
    std::vector<T> inv_diag;
    LevelSchedule fwd, bwd;
    GridVector<T> r, e;
};

template <class T>
PointGsContext<T> make_point_gs(const SgDiaMatrix<T>& A, int workers = 0) {
    if (workers <= 0) workers = par::team_size();
    PointGsContext<T> ctx;
    const StencilPattern lo = lower_triangular_part(A.pattern);
    const StencilPattern up = upper_triangular_part(A.pattern);
    ctx.lower = detail::entry_indices(A.pattern, lo);
    ctx.upper = detail::entry_indices(A.pattern, up);
    ctx.inv_diag = detail::interior_inverse_diag(A, "point_gs");
    ctx.fwd = build_schedule(A.grid.dims[0], A.grid.dims[1], project_deps(lo.offsets), workers,
                             SweepDirection::forward);
    ctx.bwd = build_schedule(A.grid.dims[0], A.grid.dims[1], project_deps(up.offsets), workers,
                             SweepDirection::backward);
    ctx.r = GridVector<T>(A.grid);
    ctx.e = GridVector<T>(A.grid);
    return ctx;
}

/// x += w (D + wL)^{-1} (b - A x): residual, dependence-preserving lower
/// solve, correction. Identical to the sequential sweep at any worker count.
template <class T>
void gs_forward(const SgDiaMatrix<T>& A, PointGsContext<T>& ctx, const GridVector<T>& b,
                GridVector<T>& x, T w) {
    residual(A, x, b, ctx.r);
    sptrsv(A, ctx.lower, ctx.inv_diag, w, ctx.r, ctx.e, ctx.fwd);
    axpy(T(1), ctx.e, x);
}

template <class T>
void gs_backward(const SgDiaMatrix<T>& A, PointGsContext<T>& ctx, const GridVector<T>& b,
                 GridVector<T>& x, T w) {
    residual(A, x, b, ctx.r);
    sptrsv(A, ctx.upper, ctx.inv_diag, w, ctx.r, ctx.e, ctx.bwd);
    axpy(T(1), ctx.e, x);
}

template <class T>
void sym_gs(const SgDiaMatrix<T>& A, PointGsContext<T>& ctx, const GridVector<T>& b,
            GridVector<T>& x, T w) {
    gs_forward(A, ctx, b, x, w);
    gs_backward(A, ctx, b, x, w);
}

// -- line Gauss-Seidel (z lines) ----------------------------------------------

template <class T>
struct LineGsContext {
    std::vector<int> low_cols, up_cols; // entries coupling to other columns
    int sub_e = -1, diag_e = -1, sup_e = -1;
    LevelSchedule fwd, bwd;
    GridVector<T> r, e;
};

template <class T>
LineGsContext<T> make_line_gs(const SgDiaMatrix<T>& A, int workers = 0) {
    if (workers <= 0) workers = par::team_size();
    LineGsContext<T> ctx;
    ctx.diag_e = A.pattern.center_index();
    if (ctx.diag_e < 0) throw std::invalid_argument("line_gs: pattern has no center offset");
    ctx.sub_e = A.pattern.index_of(Offset{0, 0, -1});
    ctx.sup_e = A.pattern.index_of(Offset{0, 0, 1});
    if (ctx.sub_e < 0 && ctx.sup_e < 0)
        throw std::invalid_argument("line_gs: pattern has no (0,0,+-1) line couplings");
    for (int k = 0; k < A.npe(); ++k) {
        const Offset& o = A.pattern.offsets[k];
        if (o[0] < 0 || (o[0] == 0 && o[1] < 0)) ctx.low_cols.push_back(k);
        if (o[0] > 0 || (o[0] == 0 && o[1] > 0)) ctx.up_cols.push_back(k);
    }
    ctx.fwd = build_schedule(A.grid.dims[0], A.grid.dims[1], line_lower_deps(A.pattern), workers,
                             SweepDirection::forward);
    ctx.bwd = build_schedule(A.grid.dims[0], A.grid.dims[1], line_upper_deps(A.pattern), workers,
                             SweepDirection::backward);
    ctx.r = GridVector<T>(A.grid);
    ctx.e = GridVector<T>(A.grid);
    return ctx;
}

namespace detail {
template <class T>
void line_sweep(const SgDiaMatrix<T>& A, LineGsContext<T>& ctx, T w, bool forward) {
    const StructuredGrid& g = A.grid;
    const int nz = g.dims[2];
    const std::vector<int>& cols = forward ? ctx.low_cols : ctx.up_cols;
    const GridVector<T>& r = ctx.r;
    GridVector<T>& e = ctx.e;
    run_schedule(forward ? ctx.fwd : ctx.bwd, [&](int ix, int iy) {
        std::vector<T> sub(nz, T(0)), dia(nz), sup(nz, T(0)), rhs(nz), sol(nz);
        for (int iz = 0; iz < nz; ++iz) {
            T acc = r.at_i(ix, iy, iz);
            for (int k : cols) {
                const Offset& o = A.pattern.offsets[k];
                acc -= A.ci(ix, iy, iz, k) * e.at_i(ix + o[0], iy + o[1], iz + o[2]);
            }
            rhs[static_cast<std::size_t>(iz)] = w * acc;
            dia[static_cast<std::size_t>(iz)] = A.ci(ix, iy, iz, ctx.diag_e);
            if (ctx.sub_e >= 0) sub[static_cast<std::size_t>(iz)] = A.ci(ix, iy, iz, ctx.sub_e);
            if (ctx.sup_e >= 0) sup[static_cast<std::size_t>(iz)] = A.ci(ix, iy, iz, ctx.sup_e);
        }
        try {
            thomas_solve<T>(sub, dia, sup, rhs, sol);
        } catch (const std::runtime_error& err) {
            throw std::runtime_error("line_gs: column (" + std::to_string(ix) + "," +
                                     std::to_string(iy) + "): " + err.what());
        }
        for (int iz = 0; iz < nz; ++iz) e.at_i(ix, iy, iz) = sol[static_cast<std::size_t>(iz)];
    });
}
} // namespace detail

/// Line relaxation along z: per column the tridiagonal block is solved
/// exactly, with the right-hand side assembled from already-updated neighbor
/// columns; column order obeys the same dependence rules as point GS.
template <class T>
void line_gs_forward(const SgDiaMatrix<T>& A, LineGsContext<T>& ctx, const GridVector<T>& b,
                     GridVector<T>& x, T w) {
    residual(A, x, b, ctx.r);
    detail::line_sweep(A, ctx, w, true);
    axpy(T(1), ctx.e, x);
}

template <class T>
void line_gs_backward(const SgDiaMatrix<T>& A, LineGsContext<T>& ctx, const GridVector<T>& b,
                      GridVector<T>& x, T w) {
    residual(A, x, b, ctx.r);
    detail::line_sweep(A, ctx, w, false);
    axpy(T(1), ctx.e, x);
}

template <class T>
void sym_line_gs(const SgDiaMatrix<T>& A, LineGsContext<T>& ctx, const GridVector<T>& b,
                 GridVector<T>& x, T w) {
    line_gs_forward(A, ctx, b, x, w);
    line_gs_backward(A, ctx, b, x, w);
}

// -- masked incomplete LU -----------------------------------------------------

/// Factors confined to a prescribed mask (which may differ from A's pattern):
/// lower entries hold the multipliers of the unit-lower factor, center and
/// upper entries hold U. Fill outside the mask is dropped; entries of A
/// outside the mask are ignored.
template <class T>
struct IluFactors {
    StencilPattern mask;
    SgDiaMatrix<T> factors;
    std::vector<int> lower, upper;
    std::vector<T> inv_udiag;
    LevelSchedule fwd, bwd;
    GridVector<T> r, y, e;
};

template <class T>
IluFactors<T> ilu_factorize(const SgDiaMatrix<T>& A, const StencilPattern& mask,
                            int workers = 0) {
    if (workers <= 0) workers = par::team_size();
    if (mask.dim != A.pattern.dim)
        throw std::invalid_argument("ilu_factorize: mask dimension mismatch");
    const int cm = mask.center_index();
    if (cm < 0) throw std::invalid_argument("ilu_factorize: mask must contain the center");

    const StructuredGrid& g = A.grid;
    const int nm = mask.entries_per_row();
    IluFactors<T> F;
    F.mask = mask;
    F.factors = SgDiaMatrix<T>(g, mask);
    const StencilPattern lo = lower_triangular_part(mask);
    const StencilPattern up = upper_triangular_part(mask);
    F.lower = detail::entry_indices(mask, lo);
    F.upper = detail::entry_indices(mask, up);

    // A entry feeding each mask slot (-1: starts at zero and receives fill)
    std::vector<int> a_of(static_cast<std::size_t>(nm), -1);
    for (int m = 0; m < nm; ++m) a_of[static_cast<std::size_t>(m)] = A.pattern.index_of(mask.offsets[m]);
    // update target of (lower k, upper l): position off_k + off_l, or -1 when dropped
    std::vector<std::vector<int>> fill_at(F.lower.size(),
                                          std::vector<int>(F.upper.size(), -1));
    for (std::size_t a = 0; a < F.lower.size(); ++a)
        for (std::size_t b = 0; b < F.upper.size(); ++b) {
            const Offset& ok = mask.offsets[static_cast<std::size_t>(F.lower[a])];
            const Offset& ol = mask.offsets[static_cast<std::size_t>(F.upper[b])];
            const Offset tgt{ok[0] + ol[0], ok[1] + ol[1], ok[2] + ol[2]};
            bool in_family = true;
            for (int ax = 0; ax < 3; ++ax)
                if (tgt[ax] < -1 || tgt[ax] > 1) in_family = false;
            if (in_family) fill_at[a][b] = mask.index_of(tgt);
        }

    std::vector<T> w(static_cast<std::size_t>(nm));
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz) {
                for (int m = 0; m < nm; ++m) {
                    const int ak = a_of[static_cast<std::size_t>(m)];
                    w[static_cast<std::size_t>(m)] = ak < 0 ? T(0) : A.ci(ix, iy, iz, ak);
                }
                for (std::size_t a = 0; a < F.lower.size(); ++a) {
                    const int k = F.lower[a];
                    const Offset& ok = mask.offsets[static_cast<std::size_t>(k)];
                    const int jx = ix + ok[0], jy = iy + ok[1], jz = iz + ok[2];
                    if (!g.interior_contains(jx, jy, jz)) continue; // zero coupling outward
                    const T piv = F.factors.ci(jx, jy, jz, cm);
                    if (piv == T(0))
                        throw std::runtime_error("ilu_factorize: zero pivot at point " +
                                                 detail::point_str(jx, jy, jz));
                    const T mult = w[static_cast<std::size_t>(k)] / piv;
                    w[static_cast<std::size_t>(k)] = mult;
                    if (mult == T(0)) continue;
                    for (std::size_t bq = 0; bq < F.upper.size(); ++bq) {
                        const int tgt = fill_at[a][bq];
                        if (tgt < 0) continue;
                        w[static_cast<std::size_t>(tgt)] -=
                            mult * F.factors.ci(jx, jy, jz, F.upper[bq]);
                    }
                }
                if (w[static_cast<std::size_t>(cm)] == T(0))
                    throw std::runtime_error("ilu_factorize: zero pivot at point " +
                                             detail::point_str(ix, iy, iz));
                for (int m = 0; m < nm; ++m)
                    F.factors.ci(ix, iy, iz, m) = w[static_cast<std::size_t>(m)];
            }

    F.inv_udiag.assign(static_cast<std::size_t>(g.padded_count()), T(0));
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz)
                F.inv_udiag[static_cast<std::size_t>(g.iindex(ix, iy, iz))] =
                    T(1) / F.factors.ci(ix, iy, iz, cm);

    F.fwd = build_schedule(g.dims[0], g.dims[1], project_deps(lo.offsets), workers,
                           SweepDirection::forward);
    F.bwd = build_schedule(g.dims[0], g.dims[1], project_deps(up.offsets), workers,
                           SweepDirection::backward);
    F.r = GridVector<T>(g);
    F.y = GridVector<T>(g);
    F.e = GridVector<T>(g);
    return F;
}

/// x += U~^{-1} L~^{-1} (b - A x), both sweeps through the triangular-solve
/// framework.
template <class T>
void ilu_apply(const SgDiaMatrix<T>& A, IluFactors<T>& F, const GridVector<T>& b,
               GridVector<T>& x) {
    check_same_grid(A.grid, F.factors.grid, "ilu_apply");
    residual(A, x, b, F.r);
    sptrsv(F.factors, F.lower, {}, T(1), F.r, F.y, F.fwd);
    sptrsv(F.factors, F.upper, F.inv_udiag, T(1), F.y, F.e, F.bwd);
    axpy(T(1), F.e, x);
}

// -- aggregate used by the multigrid levels -----------------------------------

template <class T>
struct Smoother {
    SmootherKind kind = SmootherKind::pgs;
    T weight = T(1);
    std::unique_ptr<JacobiContext<T>> jac;
    std::unique_ptr<PointGsContext<T>> pgs;
    std::unique_ptr<LineGsContext<T>> lgs;
    std::unique_ptr<IluFactors<T>> ilu;

    void apply_pre(const SgDiaMatrix<T>& A, const GridVector<T>& b, GridVector<T>& x) {
        switch (kind) {
        case SmootherKind::jacobi: jacobi(A, *jac, b, x, weight); break;
        case SmootherKind::pgs: gs_forward(A, *pgs, b, x, weight); break;
        case SmootherKind::sgs: sym_gs(A, *pgs, b, x, weight); break;
        case SmootherKind::lgs: line_gs_forward(A, *lgs, b, x, weight); break;
        case SmootherKind::ilu: ilu_apply(A, *ilu, b, x); break;
        }
    }
    void apply_post(const SgDiaMatrix<T>& A, const GridVector<T>& b, GridVector<T>& x) {
        switch (kind) {
        case SmootherKind::jacobi: jacobi(A, *jac, b, x, weight); break;
        case SmootherKind::pgs: gs_backward(A, *pgs, b, x, weight); break;
        case SmootherKind::sgs: sym_gs(A, *pgs, b, x, weight); break;
        case SmootherKind::lgs: line_gs_backward(A, *lgs, b, x, weight); break;
        case SmootherKind::ilu: ilu_apply(A, *ilu, b, x); break;
        }
    }
};

template <class T>
Smoother<T> make_smoother(const SgDiaMatrix<T>& A, SmootherKind kind, T weight,
                          const StencilPattern* ilu_mask, int workers = 0) {
    Smoother<T> s;
    s.kind = kind;
    s.weight = weight;
    switch (kind) {
    case SmootherKind::jacobi:
        s.jac = std::make_unique<JacobiContext<T>>(make_jacobi(A));
        break;
    case SmootherKind::pgs:
    case SmootherKind::sgs:
        s.pgs = std::make_unique<PointGsContext<T>>(make_point_gs(A, workers));
        break;
    case SmootherKind::lgs:
        s.lgs = std::make_unique<LineGsContext<T>>(make_line_gs(A, workers));
        break;
    case SmootherKind::ilu:
        s.ilu = std::make_unique<IluFactors<T>>(
            ilu_factorize(A, ilu_mask ? *ilu_mask : A.pattern, workers));
        break;
    }
    return s;
}

} // namespace structmg

#endif
