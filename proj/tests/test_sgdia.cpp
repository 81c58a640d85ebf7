#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "structmg/problems.hpp"
#include "structmg/sgdia.hpp"

using namespace structmg;

namespace {
StructuredGrid box(int nx, int ny, int nz) {
    StructuredGrid g;
    g.dims = {nx, ny, nz};
    return g;
}
} // namespace

TEST_CASE("identity stencil reproduces the input") {
    StructuredGrid g = box(4, 5, 3);
    SgDiaMatrix<double> A(g, pattern_from_name("3d7"));
    const int cd = A.pattern.center_index();
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 5; ++y)
            for (int z = 0; z < 3; ++z) A.ci(x, y, z, cd) = 1.0;
    GridVector<double> x(g), y(g);
    std::mt19937_64 rng(2);
    random_fill(x, rng);
    spmv(A, x, y);
    CHECK(x.data == y.data);

    GridVector<double> zero(g), out(g);
    fill_interior(out, 3.0);
    spmv(A, zero, out);
    for (double v : out.data) CHECK(v == 0.0);
}

TEST_CASE("spmv matches an independent triplet extraction") {
    std::mt19937_64 rng(17);
    for (const char* pname : {"3d7", "3d15", "3d19", "3d27"}) {
        StructuredGrid g = box(8, 8, 8);
        SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name(pname), rng);
        GridVector<double> x(g), y(g);
        random_fill(x, rng);
        spmv(A, x, y);
        const auto trips = oracles::walk_triplets(A);
        const auto ref = oracles::triplet_matvec(g.interior_count(), trips, x);
        for (int ix = 0; ix < 8; ++ix)
            for (int iy = 0; iy < 8; ++iy)
                for (int iz = 0; iz < 8; ++iz) {
                    const double got = y.at_i(ix, iy, iz);
                    const double want = ref[static_cast<std::size_t>(g.linear_interior(ix, iy, iz))];
                    CHECK(got == doctest::Approx(want).epsilon(1e-13));
                }
    }
}

TEST_CASE("residual") {
    StructuredGrid g = box(1, 1, 1);
    SgDiaMatrix<double> A(g, pattern_from_name("3d7"));
    A.ci(0, 0, 0, A.pattern.center_index()) = 2.0;
    GridVector<double> x(g), b(g), r(g);
    b.at_i(0, 0, 0) = 4.0;
    x.at_i(0, 0, 0) = 2.0; // exact solution of the 1-point system
    residual(A, x, b, r);
    CHECK(r.at_i(0, 0, 0) == 0.0);

    set_zero(x);
    residual(A, x, b, r);
    CHECK(r.at_i(0, 0, 0) == b.at_i(0, 0, 0));

    SUBCASE("random instance matches the oracle") {
        StructuredGrid g8 = box(6, 6, 6);
        std::mt19937_64 rng(23);
        SgDiaMatrix<double> M = oracles::random_diag_dominant<double>(g8, pattern_from_name("3d19"), rng);
        GridVector<double> xx(g8), bb(g8), rr(g8);
        random_fill(xx, rng);
        random_fill(bb, rng);
        residual(M, xx, bb, rr);
        const auto ref = oracles::triplet_matvec(g8.interior_count(), oracles::walk_triplets(M), xx);
        for (int ix = 0; ix < 6; ++ix)
            for (int iy = 0; iy < 6; ++iy)
                for (int iz = 0; iz < 6; ++iz) {
                    const double want =
                        bb.at_i(ix, iy, iz) -
                        ref[static_cast<std::size_t>(g8.linear_interior(ix, iy, iz))];
                    CHECK(rr.at_i(ix, iy, iz) == doctest::Approx(want).epsilon(1e-13));
                }
    }
}

TEST_CASE("export_triplets structure") {
    SUBCASE("single point") {
        SgDiaMatrix<double> A(box(1, 1, 1), pattern_from_name("3d7"));
        A.ci(0, 0, 0, A.pattern.center_index()) = 5.0;
        auto ts = export_triplets(A);
        REQUIRE(ts.size() == 1);
        CHECK(ts[0].row == 0);
        CHECK(ts[0].col == 0);
        CHECK(ts[0].val == 5.0);
    }
    SUBCASE("2^3 Laplacian rows keep diag plus three in-range neighbors") {
        auto p = laplace_3d7<double>({2, 2, 2});
        auto ts = export_triplets(p.A);
        std::vector<int> per_row(8, 0);
        for (const Triplet& t : ts) per_row[static_cast<std::size_t>(t.row)]++;
        for (int c : per_row) CHECK(c == 4);
    }
    SUBCASE("triplet matvec equals spmv for random patterns") {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<Offset> offs{{0, 0, 0}};
            for (int x = -1; x <= 1; ++x)
                for (int y = -1; y <= 1; ++y)
                    for (int z = -1; z <= 1; ++z) {
                        if (x == 0 && y == 0 && z == 0) continue;
                        if (rng() % 3 == 0) offs.push_back({x, y, z});
                    }
            StencilPattern pat = make_pattern(3, offs);
            StructuredGrid g = box(4 + int(rng() % 5), 4 + int(rng() % 5), 4 + int(rng() % 5));
            SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pat, rng);
            GridVector<double> x(g), y(g);
            random_fill(x, rng);
            spmv(A, x, y);
            const auto ref = oracles::triplet_matvec(g.interior_count(), export_triplets(A), x);
            for (int ix = 0; ix < g.dims[0]; ++ix)
                for (int iy = 0; iy < g.dims[1]; ++iy)
                    for (int iz = 0; iz < g.dims[2]; ++iz)
                        CHECK(y.at_i(ix, iy, iz) ==
                              doctest::Approx(
                                  ref[static_cast<std::size_t>(g.linear_interior(ix, iy, iz))])
                                  .epsilon(1e-13));
        }
    }
}

TEST_CASE("grid mismatch is rejected") {
    SgDiaMatrix<double> A(box(4, 4, 4), pattern_from_name("3d7"));
    GridVector<double> x(box(4, 4, 4)), y(box(4, 4, 5));
    CHECK_THROWS_AS(spmv(A, x, y), std::invalid_argument);
    CHECK_THROWS_AS(residual(A, y, x, x), std::invalid_argument);
}

TEST_CASE("spmv linearity") {
    StructuredGrid g = box(6, 5, 7);
    std::mt19937_64 rng(37);
    SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d27"), rng);
    GridVector<double> x(g), y(g), lin(g), ax(g), ay(g);
    random_fill(x, rng);
    random_fill(y, rng);
    const double alpha = 0.7, beta = -1.3;
    GridVector<double> combo(g);
    copy(x, combo);
    scale(combo, alpha);
    axpy(beta, y, combo);
    spmv(A, combo, lin);
    spmv(A, x, ax);
    spmv(A, y, ay);
    for (int ix = 0; ix < 6; ++ix)
        for (int iy = 0; iy < 5; ++iy)
            for (int iz = 0; iz < 7; ++iz)
                CHECK(lin.at_i(ix, iy, iz) ==
                      doctest::Approx(alpha * ax.at_i(ix, iy, iz) + beta * ay.at_i(ix, iy, iz))
                          .epsilon(1e-12));
}

TEST_CASE("symmetric coefficients give a symmetric operator") {
    StructuredGrid g = box(6, 6, 6);
    std::mt19937_64 rng(41);
    SgDiaMatrix<double> A = oracles::random_spd<double>(g, pattern_from_name("3d19"), rng);
    GridVector<double> x(g), y(g), Ax(g), Ay(g);
    random_fill(x, rng);
    random_fill(y, rng);
    spmv(A, x, Ax);
    spmv(A, y, Ay);
    CHECK(dot(Ax, y) == doctest::Approx(dot(x, Ay)).epsilon(1e-12));
}

TEST_CASE("matrix io") {
    StructuredGrid g = box(3, 4, 2);
    std::mt19937_64 rng(43);
    SgDiaMatrix<double> A = oracles::random_diag_dominant<double>(g, pattern_from_name("3d15"), rng);
    std::stringstream buf;
    write_matrix(buf, A);
    SgDiaMatrix<double> B = read_matrix<double>(buf);
    CHECK(B.grid == A.grid);
    CHECK(B.pattern == A.pattern);
    CHECK(B.coeffs == A.coeffs);

    std::ostringstream mm;
    write_matrix_market(mm, A);
    const std::string text = mm.str();
    CHECK(text.find("%%MatrixMarket matrix coordinate real general") == 0);
    CHECK(text.find("24 24") != std::string::npos);
}
