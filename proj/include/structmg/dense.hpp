#ifndef STRUCTMG_DENSE_HPP
#define STRUCTMG_DENSE_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "structmg/sgdia.hpp"

namespace structmg {

/// Dense LU with partial pivoting, used as the coarsest-level direct solver.
/// Factorization is done in double regardless of the matrix scalar type.
class DenseLu {
  public:
    DenseLu() = default;

    static DenseLu factor(int n, std::vector<double> a) {
        DenseLu lu;
        lu.n_ = n;
        lu.a_ = std::move(a);
        lu.piv_.resize(static_cast<std::size_t>(n));
        double scale = 0.0;
        for (double v : lu.a_) scale = std::max(scale, std::fabs(v));
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::fabs(lu.at(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::fabs(lu.at(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            if (best <= 1e-13 * scale)
                throw std::runtime_error("dense_lu: singular matrix (pivot " +
                                         std::to_string(k) + ")");
            lu.piv_[static_cast<std::size_t>(k)] = p;
            if (p != k)
                for (int j = 0; j < n; ++j) std::swap(lu.at(k, j), lu.at(p, j));
            const double inv = 1.0 / lu.at(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double m = lu.at(i, k) * inv;
                lu.at(i, k) = m;
                if (m == 0.0) continue;
                for (int j = k + 1; j < n; ++j) lu.at(i, j) -= m * lu.at(k, j);
            }
        }
        return lu;
    }

    template <class T>
    static DenseLu factor_matrix(const SgDiaMatrix<T>& A) {
        const long n = A.grid.interior_count();
        std::vector<double> dense(static_cast<std::size_t>(n) * n, 0.0);
        for (const Triplet& t : export_triplets(A))
            dense[static_cast<std::size_t>(t.row) * n + t.col] += t.val;
        return factor(static_cast<int>(n), std::move(dense));
    }

    void solve(std::vector<double>& x) const {
        if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("dense_lu: size");
        for (int k = 0; k < n_; ++k) {
            const int p = piv_[static_cast<std::size_t>(k)];
            if (p != k) std::swap(x[static_cast<std::size_t>(k)], x[static_cast<std::size_t>(p)]);
            for (int i = k + 1; i < n_; ++i) x[static_cast<std::size_t>(i)] -= at(i, k) * x[static_cast<std::size_t>(k)];
        }
        for (int i = n_ - 1; i >= 0; --i) {
            double s = x[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < n_; ++j) s -= at(i, j) * x[static_cast<std::size_t>(j)];
            x[static_cast<std::size_t>(i)] = s / at(i, i);
        }
    }

    int size() const { return n_; }

  private:
    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
    const double& at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    int n_ = 0;
    std::vector<double> a_;
    std::vector<int> piv_;
};

} // namespace structmg

#endif
