#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "structmg/problems.hpp"

using namespace structmg;

TEST_CASE("laplacian rows away from the boundary") {
    auto p = laplace_3d7<double>({6, 6, 6});
    const int cd = p.A.pattern.center_index();
    for (int k = 0; k < p.A.npe(); ++k) {
        const double v = p.A.ci(3, 3, 3, k);
        CHECK(v == (k == cd ? 6.0 : -1.0));
    }
    CHECK(p.b.at_i(2, 4, 1) == 1.0);
    CHECK_THROWS_AS(laplace_3d7<double>({1, 4, 4}), std::invalid_argument);
}

TEST_CASE("laplacian is positive definite") {
    auto p = laplace_3d7<double>({4, 4, 4});
    oracles::Dense d = oracles::dense_from_triplets(p.A.grid.interior_count(),
                                                    oracles::walk_triplets(p.A));
    CHECK(oracles::is_spd(d));
}

TEST_CASE("laplacian lowest mode matches the separable spectrum") {
    const int n = 8;
    auto p = laplace_3d7<double>({n, n, n});
    const double lambda = 3.0 * (2.0 - 2.0 * std::cos(M_PI / (n + 1)));
    GridVector<double> v(p.A.grid), Av(p.A.grid);
    for (int ix = 0; ix < n; ++ix)
        for (int iy = 0; iy < n; ++iy)
            for (int iz = 0; iz < n; ++iz)
                v.at_i(ix, iy, iz) = std::sin(M_PI * (ix + 1) / (n + 1)) *
                                     std::sin(M_PI * (iy + 1) / (n + 1)) *
                                     std::sin(M_PI * (iz + 1) / (n + 1));
    spmv(p.A, v, Av);
    axpy(-lambda, v, Av);
    CHECK(norm2(Av) <= 1e-10 * norm2(v));
}

TEST_CASE("grid-aligned anisotropy") {
    SUBCASE("eps = 1 reproduces the laplacian exactly") {
        auto lap = laplace_3d7<double>({6, 6, 6});
        auto ani = aniso_3d7<double>({6, 6, 6}, 1.0, 2);
        CHECK(ani.A.coeffs == lap.A.coeffs);
    }
    SUBCASE("couplings follow the axis choice") {
        auto p = aniso_3d7<double>({6, 6, 6}, 1e-3, 0);
        CHECK(p.A.ci(3, 3, 3, p.A.pattern.index_of({1, 0, 0})) == -1.0);
        CHECK(p.A.ci(3, 3, 3, p.A.pattern.index_of({0, 1, 0})) == -1e-3);
        CHECK(p.A.ci(3, 3, 3, p.A.pattern.index_of({0, 0, 1})) == -1e-3);
        CHECK(p.A.ci(3, 3, 3, p.A.pattern.center_index()) ==
              doctest::Approx(2.0 + 4e-3).epsilon(1e-14));
    }
    SUBCASE("symmetric for every strength") {
        for (double eps : {1.0, 1e-2, 1e-4}) {
            auto p = aniso_3d7<double>({5, 5, 5}, eps, 2);
            auto m = oracles::to_map(oracles::walk_triplets(p.A));
            for (const auto& [rc, v] : m)
                CHECK(v == doctest::Approx(m.at({rc.second, rc.first})).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(aniso_3d7<double>({4, 4, 4}, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(aniso_3d7<double>({4, 4, 4}, 1e-3, 3), std::invalid_argument);
}

TEST_CASE("skewed anisotropy") {
    SUBCASE("angle zero reduces to the x-aligned operator") {
        auto skew = skewed_aniso_3d19<double>({5, 5, 5}, 1e-2, 0.0);
        auto aligned = aniso_3d7<double>({5, 5, 5}, 1e-2, 0);
        auto ms = oracles::to_map(oracles::walk_triplets(skew.A));
        auto ma = oracles::to_map(oracles::walk_triplets(aligned.A));
        for (auto it = ms.begin(); it != ms.end();) {
            if (std::fabs(it->second) < 1e-15) it = ms.erase(it);
            else ++it;
        }
        REQUIRE(ms.size() == ma.size());
        for (const auto& [rc, v] : ma)
            CHECK(ms.at(rc) == doctest::Approx(v).epsilon(1e-13));
    }
    SUBCASE("all three mixed-term families appear at a tilted angle") {
        auto p = skewed_aniso_3d19<double>({5, 5, 5}, 1e-2, 45.0);
        CHECK(p.A.ci(2, 2, 2, p.A.pattern.index_of({1, 1, 0})) != 0.0);
        CHECK(p.A.ci(2, 2, 2, p.A.pattern.index_of({1, 0, 1})) != 0.0);
        CHECK(p.A.ci(2, 2, 2, p.A.pattern.index_of({0, 1, 1})) != 0.0);
    }
    SUBCASE("symmetric and positive definite at test scale") {
        for (double angle : {15.0, 45.0, 75.0}) {
            auto p = skewed_aniso_3d19<double>({5, 5, 5}, 1e-2, angle);
            auto m = oracles::to_map(oracles::walk_triplets(p.A));
            for (const auto& [rc, v] : m)
                CHECK(v == doctest::Approx(m.at({rc.second, rc.first})).epsilon(1e-12));
            oracles::Dense d = oracles::dense_from_triplets(p.A.grid.interior_count(),
                                                            oracles::walk_triplets(p.A));
            CHECK(oracles::is_spd(d));
        }
    }
    CHECK_THROWS_AS(skewed_aniso_3d19<double>({4, 4, 4}, -0.5, 45.0), std::invalid_argument);
}

TEST_CASE("random right-hand sides are seed-deterministic") {
    auto p1 = laplace_3d7<double>({5, 5, 5});
    auto p2 = laplace_3d7<double>({5, 5, 5});
    randomize_rhs(p1.b, 42);
    randomize_rhs(p2.b, 42);
    CHECK(p1.b.data == p2.b.data);
    randomize_rhs(p2.b, 43);
    CHECK(p1.b.data != p2.b.data);
}

TEST_CASE("generated matrices keep the zero-padding invariant") {
    auto p = skewed_aniso_3d19<double>({4, 4, 4}, 1e-2, 30.0);
    const StructuredGrid& g = p.A.grid;
    for (int ix = 0; ix < 4; ++ix)
        for (int iy = 0; iy < 4; ++iy)
            for (int iz = 0; iz < 4; ++iz)
                for (int k = 0; k < p.A.npe(); ++k) {
                    const Offset& o = p.A.pattern.offsets[static_cast<std::size_t>(k)];
                    if (!g.interior_contains(ix + o[0], iy + o[1], iz + o[2]))
                        CHECK(p.A.ci(ix, iy, iz, k) == 0.0);
                }
}
