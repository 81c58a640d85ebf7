#ifndef STRUCTMG_PROBLEMS_HPP
#define STRUCTMG_PROBLEMS_HPP

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "structmg/grid.hpp"
#include "structmg/sgdia.hpp"

namespace structmg {

template <class T>
struct Problem {
    SgDiaMatrix<T> A;
    GridVector<T> b;
};

namespace detail {
inline StructuredGrid problem_grid(std::array<int, 3> n) {
    for (int ax = 0; ax < 3; ++ax)
        if (n[ax] < 2)
            throw std::invalid_argument("problem generator: dims must be >= 2, got " +
                                        std::to_string(n[ax]));
    StructuredGrid g;
    g.dims = n;
    g.halo = {1, 1, 1};
    return g;
}

/// Fills a constant-coefficient symmetric stencil, then zero-pads Dirichlet
/// boundaries (couplings out of the box are truncated).
template <class T>
SgDiaMatrix<T> constant_stencil(const StructuredGrid& g, const StencilPattern& pat,
                                const std::vector<double>& entry_values) {
    SgDiaMatrix<T> A(g, pat);
    for (int ix = 0; ix < g.dims[0]; ++ix)
        for (int iy = 0; iy < g.dims[1]; ++iy)
            for (int iz = 0; iz < g.dims[2]; ++iz)
                for (int k = 0; k < A.npe(); ++k)
                    A.ci(ix, iy, iz, k) = static_cast<T>(entry_values[static_cast<std::size_t>(k)]);
    zero_boundary_entries(A);
    return A;
}
} // namespace detail

/// 7-point finite-difference Laplacian with unit spacing and Dirichlet
/// boundaries via zero-padded truncation; b = ones.
template <class T>
Problem<T> laplace_3d7(std::array<int, 3> n) {
    StructuredGrid g = detail::problem_grid(n);
    StencilPattern pat = pattern_from_name("3d7");
    std::vector<double> vals(7, -1.0);
    vals[static_cast<std::size_t>(pat.center_index())] = 6.0;
    Problem<T> p{detail::constant_stencil<T>(g, pat, vals), GridVector<T>(g)};
    fill_interior(p.b, T(1));
    return p;
}

/// 7-point operator with coupling 1 along `axis` (0,1,2) and eps along the
/// other axes; eps = 1 reproduces the Laplacian.
template <class T>
Problem<T> aniso_3d7(std::array<int, 3> n, double eps, int axis) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("aniso_3d7: axis must be 0, 1 or 2");
    if (!(eps > 0.0)) throw std::invalid_argument("aniso_3d7: eps must be positive");
    StructuredGrid g = detail::problem_grid(n);
    StencilPattern pat = pattern_from_name("3d7");
    std::vector<double> vals(7, 0.0);
    double center = 0.0;
    for (int k = 0; k < 7; ++k) {
        const Offset& o = pat.offsets[static_cast<std::size_t>(k)];
        if (o == Offset{0, 0, 0}) continue;
        int ax = o[0] != 0 ? 0 : (o[1] != 0 ? 1 : 2);
        const double c = ax == axis ? 1.0 : eps;
        vals[static_cast<std::size_t>(k)] = -c;
        center += c;
    }
    vals[static_cast<std::size_t>(pat.center_index())] = center;
    Problem<T> p{detail::constant_stencil<T>(g, pat, vals), GridVector<T>(g)};
    fill_interior(p.b, T(1));
    return p;
}

/// Rotated diffusion on the 19-point pattern: the strong direction is tilted
/// by `angle_deg` out of the x axis into the (y+z) diagonal, producing mixed
/// second-derivative terms in all three coordinate planes. Symmetric and
/// positive definite for eps > 0 (the discrete symbol stays positive; a
/// sampled check guards the parameters).
template <class T>
Problem<T> skewed_aniso_3d19(std::array<int, 3> n, double eps, double angle_deg) {
    if (!(eps > 0.0)) throw std::invalid_argument("skewed_aniso_3d19: eps must be positive");
    StructuredGrid g = detail::problem_grid(n);
    const double th = angle_deg * M_PI / 180.0;
    const double c = std::cos(th), s = std::sin(th);
    const std::array<double, 3> d{c, s / std::sqrt(2.0), s / std::sqrt(2.0)};
    double K[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) K[i][j] = eps * (i == j ? 1.0 : 0.0) + (1.0 - eps) * d[i] * d[j];

    StencilPattern pat = pattern_from_name("3d19");
    std::vector<double> vals(19, 0.0);
    auto set = [&](Offset o, double v) { vals[static_cast<std::size_t>(pat.index_of(o))] = v; };
    set({0, 0, 0}, 2.0 * (K[0][0] + K[1][1] + K[2][2]));
    for (int ax = 0; ax < 3; ++ax)
        for (int sgn : {-1, 1}) {
            Offset o{0, 0, 0};
            o[ax] = sgn;
            set(o, -K[ax][ax]);
        }
    const std::array<std::array<int, 2>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (auto [i, j] : pairs) {
        Offset o{0, 0, 0};
        o[i] = 1;
        o[j] = 1;
        set(o, -K[i][j] / 2.0);
        o[i] = -1;
        o[j] = -1;
        set(o, -K[i][j] / 2.0);
        o[i] = 1;
        o[j] = -1;
        set(o, K[i][j] / 2.0);
        o[i] = -1;
        o[j] = 1;
        set(o, K[i][j] / 2.0);
    }

    // sampled Fourier symbol of the infinite-grid operator
    double min_symbol = std::numeric_limits<double>::max();
    const int ns = 9;
    for (int i = 0; i <= ns; ++i)
        for (int j = 0; j <= ns; ++j)
            for (int k = 0; k <= ns; ++k) {
                if (i == 0 && j == 0 && k == 0) continue;
                const double kx = M_PI * i / ns, ky = M_PI * j / ns, kz = M_PI * k / ns;
                double sym = 2.0 * (K[0][0] * (1 - std::cos(kx)) + K[1][1] * (1 - std::cos(ky)) +
                                    K[2][2] * (1 - std::cos(kz)));
                sym += 2.0 * K[0][1] * std::sin(kx) * std::sin(ky);
                sym += 2.0 * K[0][2] * std::sin(kx) * std::sin(kz);
                sym += 2.0 * K[1][2] * std::sin(ky) * std::sin(kz);
                min_symbol = std::min(min_symbol, sym);
            }
    if (!(min_symbol > 0.0))
        throw std::invalid_argument("skewed_aniso_3d19: stencil loses definiteness for eps=" +
                                    std::to_string(eps) + ", angle=" + std::to_string(angle_deg));

    Problem<T> p{detail::constant_stencil<T>(g, pat, vals), GridVector<T>(g)};
    fill_interior(p.b, T(1));
    return p;
}

template <class T>
void randomize_rhs(GridVector<T>& b, unsigned long seed) {
    std::mt19937_64 rng(seed);
    random_fill(b, rng, -1.0, 1.0);
}

} // namespace structmg

#endif
