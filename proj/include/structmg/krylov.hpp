#ifndef STRUCTMG_KRYLOV_HPP
#define STRUCTMG_KRYLOV_HPP

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "structmg/grid.hpp"
#include "structmg/sgdia.hpp"

namespace structmg {

enum class TolMode { relative, absolute };

TolMode parse_tol_mode(std::string_view name);

struct SolveStats {
    int iterations = 0;
    bool converged = false;
    std::vector<double> residual_history; // ||r||_2, starting at iteration 0
};

/// Optional preconditioner: z = M(r). Must be linear; identity when absent.
template <class T>
using Preconditioner = std::function<void(const GridVector<T>&, GridVector<T>&)>;

/// Preconditioned conjugate gradient (requires symmetric A and symmetric
/// positive M). Stops when ||r||_2 passes the tolerance; hitting maxiter is
/// reported through the flag, indefiniteness through an exception.
template <class T>
SolveStats pcg(const SgDiaMatrix<T>& A, const GridVector<T>& b, GridVector<T>& x,
               const Preconditioner<T>& M, double tol, TolMode mode, int maxiter) {
    SolveStats st;
    set_zero(x);
    const double nb = norm2(b);
    const double target = mode == TolMode::relative ? tol * nb : tol;
    st.residual_history.push_back(nb);
    if (nb == 0.0) {
        st.converged = true;
        return st;
    }

    GridVector<T> r(b.grid), z(b.grid), p(b.grid), Ap(b.grid);
    copy(b, r); // x = 0
    if (M)
        M(r, z);
    else
        copy(r, z);
    copy(z, p);
    double rz = dot(r, z);

    for (int it = 1; it <= maxiter; ++it) {
        spmv(A, p, Ap);
        const double pAp = dot(p, Ap);
        if (pAp <= 0.0)
            throw std::runtime_error("pcg: indefiniteness detected (p'Ap = " +
                                     std::to_string(pAp) + ")");
        const double alpha = rz / pAp;
        axpy(static_cast<T>(alpha), p, x);
        axpy(static_cast<T>(-alpha), Ap, r);
        const double nr = norm2(r);
        st.residual_history.push_back(nr);
        st.iterations = it;
        if (nr < target) {
            st.converged = true;
            return st;
        }
        if (M)
            M(r, z);
        else
            copy(r, z);
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        // p = z + beta p
        scale(p, static_cast<T>(beta));
        axpy(T(1), z, p);
    }
    return st;
}

/// Right-preconditioned restarted GMRES. The recurrence residual equals the
/// true residual of the returned iterate (up to roundoff), so absolute
/// tolerances keep their meaning. An exact Arnoldi breakdown is used as a
/// solution (lucky breakdown).
template <class T>
SolveStats gmres(const SgDiaMatrix<T>& A, const GridVector<T>& b, GridVector<T>& x,
                 const Preconditioner<T>& M, int restart, double tol, TolMode mode, int maxiter) {
    if (restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
    SolveStats st;
    set_zero(x);
    const double nb = norm2(b);
    const double target = mode == TolMode::relative ? tol * nb : tol;
    st.residual_history.push_back(nb);
    if (nb == 0.0) {
        st.converged = true;
        return st;
    }

    const int m = restart;
    std::vector<GridVector<T>> V;
    V.reserve(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) V.emplace_back(b.grid);
    GridVector<T> w(b.grid), z(b.grid), r(b.grid);
    std::vector<double> H(static_cast<std::size_t>(m + 1) * m, 0.0);
    auto h = [&](int i, int j) -> double& { return H[static_cast<std::size_t>(i) * m + j]; };
    std::vector<double> cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m)),
        g(static_cast<std::size_t>(m) + 1);

    auto update_solution = [&](int k) {
        // back-substitute H y = g, then x += M(V y)
        std::vector<double> y(static_cast<std::size_t>(k));
        for (int i = k - 1; i >= 0; --i) {
            double s = g[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] = s / h(i, i);
        }
        set_zero(w);
        for (int j = 0; j < k; ++j)
            axpy(static_cast<T>(y[static_cast<std::size_t>(j)]), V[static_cast<std::size_t>(j)],
                 w);
        if (M) {
            M(w, z);
            axpy(T(1), z, x);
        } else {
            axpy(T(1), w, x);
        }
    };

    while (st.iterations < maxiter) {
        residual(A, x, b, r);
        double beta = norm2(r);
        if (beta < target || beta == 0.0) {
            st.converged = true;
            return st;
        }
        copy(r, V[0]);
        scale(V[0], static_cast<T>(1.0 / beta));
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;

        int k = 0;
        for (; k < m && st.iterations < maxiter; ++k) {
            if (M) {
                M(V[static_cast<std::size_t>(k)], z);
                spmv(A, z, w);
            } else {
                spmv(A, V[static_cast<std::size_t>(k)], w);
            }
            for (int i = 0; i <= k; ++i) {
                h(i, k) = dot(w, V[static_cast<std::size_t>(i)]);
                axpy(static_cast<T>(-h(i, k)), V[static_cast<std::size_t>(i)], w);
            }
            const double hk1 = norm2(w);
            h(k + 1, k) = hk1;
            bool breakdown = false;
            if (hk1 > 0.0) {
                copy(w, V[static_cast<std::size_t>(k) + 1]);
                scale(V[static_cast<std::size_t>(k) + 1], static_cast<T>(1.0 / hk1));
            } else {
                breakdown = true; // exact solve in the current space
            }
            for (int i = 0; i < k; ++i) {
                const double t = cs[static_cast<std::size_t>(i)] * h(i, k) +
                                 sn[static_cast<std::size_t>(i)] * h(i + 1, k);
                h(i + 1, k) = -sn[static_cast<std::size_t>(i)] * h(i, k) +
                              cs[static_cast<std::size_t>(i)] * h(i + 1, k);
                h(i, k) = t;
            }
            const double denom = std::hypot(h(k, k), h(k + 1, k));
            cs[static_cast<std::size_t>(k)] = denom == 0.0 ? 1.0 : h(k, k) / denom;
            sn[static_cast<std::size_t>(k)] = denom == 0.0 ? 0.0 : h(k + 1, k) / denom;
            h(k, k) = denom;
            h(k + 1, k) = 0.0;
            g[static_cast<std::size_t>(k) + 1] = -sn[static_cast<std::size_t>(k)] *
                                                 g[static_cast<std::size_t>(k)];
            g[static_cast<std::size_t>(k)] = cs[static_cast<std::size_t>(k)] *
                                             g[static_cast<std::size_t>(k)];
            ++st.iterations;
            const double rho = std::fabs(g[static_cast<std::size_t>(k) + 1]);
            st.residual_history.push_back(rho);
            if (rho < target || breakdown) {
                update_solution(k + 1);
                st.converged = true;
                return st;
            }
        }
        update_solution(k);
    }
    // refresh the reported tail with the true residual of the final iterate
    residual(A, x, b, r);
    st.residual_history.back() = norm2(r);
    st.converged = st.residual_history.back() < target;
    return st;
}

inline TolMode parse_tol_mode(std::string_view name) {
    if (name == "rel") return TolMode::relative;
    if (name == "abs") return TolMode::absolute;
    throw std::invalid_argument("parse_tol_mode: unknown mode '" + std::string(name) +
                                "' (supported: rel, abs)");
}

} // namespace structmg

#endif
