#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "structmg/problems.hpp"
#include "structmg/smoother.hpp"

using namespace structmg;

namespace {
StructuredGrid box(int nx, int ny, int nz) {
    StructuredGrid g;
    g.dims = {nx, ny, nz};
    return g;
}

double a_norm_sq(const SgDiaMatrix<double>& A, const GridVector<double>& e) {
    GridVector<double> Ae(A.grid);
    spmv(A, e, Ae);
    return dot(e, Ae);
}
} // namespace

TEST_CASE("jacobi") {
    StructuredGrid g = box(4, 4, 4);
    std::mt19937_64 rng(3);

    SUBCASE("diagonal matrix, unit weight solves in one sweep") {
        SgDiaMatrix<double> A(g, pattern_from_name("3d7"));
        const int cd = A.pattern.center_index();
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y)
                for (int z = 0; z < 4; ++z) A.ci(x, y, z, cd) = 3.0;
        GridVector<double> b(g), x(g);
        random_fill(b, rng);
        auto ctx = make_jacobi(A);
        jacobi(A, ctx, b, x, 1.0);
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    CHECK(x.at_i(ix, iy, iz) == doctest::Approx(b.at_i(ix, iy, iz) / 3.0));
    }
    SUBCASE("zero weight leaves the iterate unchanged") {
        SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d7"), rng);
        GridVector<double> b(g), x(g);
        random_fill(b, rng);
        random_fill(x, rng);
        GridVector<double> before = x;
        auto ctx = make_jacobi(A);
        jacobi(A, ctx, b, x, 0.0);
        CHECK(x.data == before.data);
    }
    SUBCASE("matches the explicit update formula") {
        SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d7"), rng);
        GridVector<double> b(g), x(g);
        random_fill(b, rng);
        random_fill(x, rng);
        const auto trips = oracles::walk_triplets(A);
        const auto ax = oracles::triplet_matvec(g.interior_count(), trips, x);
        const int cd = A.pattern.center_index();
        GridVector<double> want(g);
        const double w = 0.8;
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    want.at_i(ix, iy, iz) =
                        x.at_i(ix, iy, iz) +
                        w *
                            (b.at_i(ix, iy, iz) -
                             ax[static_cast<std::size_t>(g.linear_interior(ix, iy, iz))]) /
                            A.ci(ix, iy, iz, cd);
        auto ctx = make_jacobi(A);
        jacobi(A, ctx, b, x, w);
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    CHECK(x.at_i(ix, iy, iz) ==
                          doctest::Approx(want.at_i(ix, iy, iz)).epsilon(1e-13));
    }
    SUBCASE("zero diagonal is rejected with the point named") {
        SgDiaMatrix<double> A(g, pattern_from_name("3d7"));
        CHECK_THROWS_WITH_AS(make_jacobi(A), doctest::Contains("(0,0,0)"), std::runtime_error);
    }
}

TEST_CASE("jacobi commutes with axis relabeling") {
    StructuredGrid g = box(3, 4, 5);
    std::mt19937_64 rng(5);
    SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d27"), rng);
    GridVector<double> b(g), x(g);
    random_fill(b, rng);
    random_fill(x, rng);

    // permuted problem: swap axes x<->z everywhere
    StructuredGrid gp = box(5, 4, 3);
    SgDiaMatrix<double> Ap(gp, pattern_from_name("3d27"));
    GridVector<double> bp(gp), xp(gp);
    for (int ix = 0; ix < 3; ++ix)
        for (int iy = 0; iy < 4; ++iy)
            for (int iz = 0; iz < 5; ++iz) {
                bp.at_i(iz, iy, ix) = b.at_i(ix, iy, iz);
                xp.at_i(iz, iy, ix) = x.at_i(ix, iy, iz);
                for (int k = 0; k < A.npe(); ++k) {
                    const Offset& o = A.pattern.offsets[static_cast<std::size_t>(k)];
                    const int kp = Ap.pattern.index_of({o[2], o[1], o[0]});
                    Ap.ci(iz, iy, ix, kp) = A.ci(ix, iy, iz, k);
                }
            }
    auto ctx = make_jacobi(A);
    auto ctxp = make_jacobi(Ap);
    jacobi(A, ctx, b, x, 0.8);
    jacobi(Ap, ctxp, bp, xp, 0.8);
    for (int ix = 0; ix < 3; ++ix)
        for (int iy = 0; iy < 4; ++iy)
            for (int iz = 0; iz < 5; ++iz)
                CHECK(xp.at_i(iz, iy, ix) ==
                      doctest::Approx(x.at_i(ix, iy, iz)).epsilon(1e-14));
}

TEST_CASE("point gauss-seidel") {
    std::mt19937_64 rng(7);

    SUBCASE("lower-triangular matrix is solved by one forward sweep") {
        StructuredGrid g = box(5, 5, 5);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d7"), rng);
        for (const Offset& o : upper_triangular_part(A.pattern).offsets) {
            const int k = A.pattern.index_of(o);
            for (std::size_t p = 0; p < static_cast<std::size_t>(g.padded_count()); ++p)
                A.coeffs[p * A.npe() + static_cast<std::size_t>(k)] = 0.0;
        }
        GridVector<double> b(g), x(g), r(g);
        random_fill(b, rng);
        auto ctx = make_point_gs(A);
        gs_forward(A, ctx, b, x, 1.0);
        residual(A, x, b, r);
        CHECK(norm2(r) <= 1e-12 * norm2(b));
    }

    SUBCASE("parallel sweeps equal the sequential reference bitwise") {
        StructuredGrid g = box(4, 4, 4);
        for (const char* pname : {"3d7", "3d27"}) {
            SgDiaMatrix<double> A =
                oracles::random_diag_dominant<double>(g, pattern_from_name(pname), rng);
            GridVector<double> b(g), x0(g);
            random_fill(b, rng);
            random_fill(x0, rng);

            GridVector<double> want = x0;
            oracles::ref_gs(A, b, want, 1.0, true);
            oracles::ref_gs(A, b, want, 1.0, false);

            for (int workers : {1, 2, 4}) {
                GridVector<double> x = x0;
                auto ctx = make_point_gs(A, workers);
                sym_gs(A, ctx, b, x, 1.0);
                CHECK(x.data == want.data);
            }
        }
    }

    SUBCASE("zero diagonal is rejected") {
        StructuredGrid g = box(3, 3, 3);
        SgDiaMatrix<double> A(g, pattern_from_name("3d7"));
        CHECK_THROWS_AS(make_point_gs(A), std::runtime_error);
    }
}

TEST_CASE("line gauss-seidel") {
    std::mt19937_64 rng(11);

    SUBCASE("matrix coupling only along z is solved in one sweep") {
        StructuredGrid g = box(4, 4, 8);
        StencilPattern pat = make_pattern(3, {{0, 0, -1}, {0, 0, 0}, {0, 0, 1}});
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pat, rng);
        GridVector<double> b(g), x(g), r(g);
        random_fill(b, rng);
        auto ctx = make_line_gs(A);
        line_gs_forward(A, ctx, b, x, 1.0);
        residual(A, x, b, r);
        CHECK(norm2(r) <= 1e-12 * norm2(b));
    }

    SUBCASE("parallel line sweeps equal the sequential reference bitwise") {
        StructuredGrid g = box(4, 4, 4);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d19"), rng);
        GridVector<double> b(g), x0(g);
        random_fill(b, rng);
        random_fill(x0, rng);
        GridVector<double> ref = x0;
        {
            auto ctx = make_line_gs(A, 1);
            line_gs_forward(A, ctx, b, ref, 1.0);
            line_gs_backward(A, ctx, b, ref, 1.0);
        }
        for (int workers : {2, 4}) {
            GridVector<double> x = x0;
            auto ctx = make_line_gs(A, workers);
            line_gs_forward(A, ctx, b, x, 1.0);
            line_gs_backward(A, ctx, b, x, 1.0);
            CHECK(x.data == ref.data);
        }
    }

    SUBCASE("patterns without line couplings are rejected") {
        StructuredGrid g = box(3, 3, 3);
        StencilPattern pat = make_pattern(3, {{-1, 0, 0}, {0, 0, 0}, {1, 0, 0}});
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pat, rng);
        CHECK_THROWS_AS(make_line_gs(A), std::invalid_argument);
    }
}

TEST_CASE("ilu factorization") {
    std::mt19937_64 rng(13);

    SUBCASE("lower-triangular matrix with unit diagonal factors trivially") {
        StructuredGrid g = box(4, 4, 4);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d7"), rng);
        const int cd = A.pattern.center_index();
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz) {
                    A.ci(ix, iy, iz, cd) = 1.0;
                    for (const Offset& o : upper_triangular_part(A.pattern).offsets)
                        A.ci(ix, iy, iz, A.pattern.index_of(o)) = 0.0;
                }
        IluFactors<double> F = ilu_factorize(A, A.pattern);
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    for (int k = 0; k < A.npe(); ++k)
                        CHECK(F.factors.ci(ix, iy, iz, k) == A.ci(ix, iy, iz, k));
    }

    SUBCASE("tridiagonal line embedded in 3d factors exactly") {
        StructuredGrid g = box(2, 2, 8);
        StencilPattern pat = make_pattern(3, {{0, 0, -1}, {0, 0, 0}, {0, 0, 1}});
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pat, rng);
        IluFactors<double> F = ilu_factorize(A, pattern_from_name("3d7"));
        GridVector<double> b(g), x(g), r(g);
        random_fill(b, rng);
        ilu_apply(A, F, b, x);
        residual(A, x, b, r);
        CHECK(norm2(r) <= 1e-12 * norm2(b));
    }

    SUBCASE("matches the reference masked factorization") {
        StructuredGrid g = box(4, 4, 4);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d7"), rng);
        IluFactors<double> F = ilu_factorize(A, A.pattern);
        const long n = g.interior_count();
        oracles::Dense dense = oracles::dense_from_triplets(n, oracles::walk_triplets(A));
        std::vector<std::pair<long, long>> mask;
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    for (const Offset& o : A.pattern.offsets) {
                        const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
                        if (jx < 0 || jx >= 4 || jy < 0 || jy >= 4 || jz < 0 || jz >= 4) continue;
                        mask.emplace_back(g.linear_interior(ix, iy, iz),
                                          g.linear_interior(jx, jy, jz));
                    }
        oracles::Dense ref = oracles::ref_ilu0_dense(dense, mask);
        for (int ix = 0; ix < 4; ++ix)
            for (int iy = 0; iy < 4; ++iy)
                for (int iz = 0; iz < 4; ++iz)
                    for (int k = 0; k < A.npe(); ++k) {
                        const Offset& o = A.pattern.offsets[static_cast<std::size_t>(k)];
                        const int jx = ix + o[0], jy = iy + o[1], jz = iz + o[2];
                        if (jx < 0 || jx >= 4 || jy < 0 || jy >= 4 || jz < 0 || jz >= 4) continue;
                        CHECK(F.factors.ci(ix, iy, iz, k) ==
                              doctest::Approx(ref.at(g.linear_interior(ix, iy, iz),
                                                     g.linear_interior(jx, jy, jz)))
                                  .epsilon(1e-12));
                    }
    }

    SUBCASE("consistent right-hand side leaves the iterate unchanged") {
        StructuredGrid g = box(4, 4, 4);
        SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d19"), rng);
        GridVector<double> x(g), b(g);
        random_fill(x, rng);
        spmv(A, x, b);
        GridVector<double> before = x;
        IluFactors<double> F = ilu_factorize(A, A.pattern);
        ilu_apply(A, F, b, x);
        for (std::size_t i = 0; i < x.data.size(); ++i)
            CHECK(x.data[i] == doctest::Approx(before.data[i]).epsilon(1e-13));
    }

    SUBCASE("masks coarser and finer than the matrix pattern work") {
        StructuredGrid g = box(4, 4, 4);
        SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d19"), rng);
        GridVector<double> b(g);
        random_fill(b, rng);
        for (const char* mask : {"3d7", "3d19", "3d27"}) {
            GridVector<double> x(g), r(g);
            IluFactors<double> F = ilu_factorize(A, pattern_from_name(mask));
            CHECK(F.factors.npe() == pattern_from_name(mask).entries_per_row());
            ilu_apply(A, F, b, x);
            residual(A, x, b, r);
            CHECK(norm2(r) < norm2(b)); // one application reduces the residual
        }
    }

    SUBCASE("parallel application is bitwise stable") {
        StructuredGrid g = box(6, 6, 6);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d27"), rng);
        GridVector<double> b(g);
        random_fill(b, rng);
        GridVector<double> ref(g);
        {
            IluFactors<double> F = ilu_factorize(A, A.pattern, 1);
            ilu_apply(A, F, b, ref);
        }
        for (int workers : {2, 4, 8}) {
            GridVector<double> x(g);
            IluFactors<double> F = ilu_factorize(A, A.pattern, workers);
            ilu_apply(A, F, b, x);
            CHECK(x.data == ref.data);
        }
    }

    SUBCASE("mask without center is rejected") {
        StructuredGrid g = box(3, 3, 3);
        std::mt19937_64 rr(1);
        SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d7"), rr);
        CHECK_THROWS_AS(ilu_factorize(A, make_pattern(3, {{0, 0, 1}, {0, 0, -1}})),
                        std::invalid_argument);
    }
}

TEST_CASE("every smoother contracts the model problem in the energy norm") {
    auto prob = laplace_3d7<double>({8, 8, 8});
    const SgDiaMatrix<double>& A = prob.A;
    std::mt19937_64 rng(17);

    GridVector<double> xstar(A.grid), b(A.grid);
    random_fill(xstar, rng);
    spmv(A, xstar, b);

    for (const char* name : {"jacobi", "pgs", "sgs", "lgs", "ilu"}) {
        const SmootherKind kind = parse_smoother(name);
        const double w = kind == SmootherKind::jacobi ? 0.8 : 1.0;
        Smoother<double> sm = make_smoother(A, kind, w, nullptr);
        GridVector<double> x(A.grid), e(A.grid);
        random_fill(x, rng);
        copy(x, e);
        axpy(-1.0, xstar, e);
        double prev = a_norm_sq(A, e);
        for (int sweep = 0; sweep < 5; ++sweep) {
            sm.apply_pre(A, b, x);
            copy(x, e);
            axpy(-1.0, xstar, e);
            const double cur = a_norm_sq(A, e);
            CHECK(cur <= prev * (1.0 + 1e-12));
            prev = cur;
        }
    }
}
