#ifndef STRUCTMG_MG_HPP
#define STRUCTMG_MG_HPP

#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "structmg/chains.hpp"
#include "structmg/dense.hpp"
#include "structmg/galerkin.hpp"
#include "structmg/smoother.hpp"
#include "structmg/transfer.hpp"

namespace structmg {

enum class TransferKind { cell_constant, vertex_trilinear };

TransferKind parse_transfer(std::string_view name);
std::string to_string(TransferKind k);

struct MgOptions {
    std::array<int, 3> strides{2, 2, 2};
    TransferKind transfer = TransferKind::vertex_trilinear;
    bool scale_restriction = true; // R = P^T / prod(strides)
    SmootherKind smoother = SmootherKind::pgs;
    double weight = 1.0;        // GS/LGS relax weight
    double jacobi_weight = 0.8; // damped Jacobi default
    StencilPattern ilu_mask;    // empty offsets: use each level's own pattern
    int pre_sweeps = 1;
    int post_sweeps = 1;
    int max_levels = 20;
    long coarsest_threshold = 1000; // keep coarsening while above this
    int min_coarsen_dim = 8;        // and while strided axes stay at least this large
    int workers = 0;                // 0: library default team
};

template <class T>
struct MgLevel {
    SgDiaMatrix<T> A;
    TransferOp<T> P, R;          // towards the next coarser level
    const ChainTable* table = nullptr;
    Smoother<T> smoother;        // unused on the coarsest level
    GridVector<T> u, f, aux;
};

template <class T>
class MgHierarchy {
  public:
    static MgHierarchy setup(const SgDiaMatrix<T>& A0, const MgOptions& opt) {
        MgHierarchy h;
        h.opt_ = opt;
        const Centering centering =
            opt.transfer == TransferKind::cell_constant ? Centering::cell : Centering::vertex;
        const WeightScheme scheme = opt.transfer == TransferKind::cell_constant
                                        ? WeightScheme::constant
                                        : WeightScheme::trilinear;
        int sprod = 1;
        for (int ax = 0; ax < 3; ++ax) sprod *= opt.strides[ax];
        const double rscale = opt.scale_restriction ? 1.0 / sprod : 1.0;

        h.levels_.emplace_back();
        h.levels_.back().A = A0;

        while (static_cast<int>(h.levels_.size()) < opt.max_levels) {
            MgLevel<T>& fine = h.levels_.back();
            const StructuredGrid& fg = fine.A.grid;

            bool want = fg.interior_count() > opt.coarsest_threshold;
            if (!want) {
                want = true;
                for (int ax = 0; ax < 3; ++ax)
                    if (opt.strides[ax] > 1 && fg.dims[ax] < opt.min_coarsen_dim) want = false;
            }
            if (!want) break;

            StructuredGrid cg = coarsen_grid(fg, opt.strides, centering);
            if (cg.dims == fg.dims) {
                if (h.levels_.size() == 1)
                    throw std::runtime_error("mg setup: coarsening makes no progress "
                                             "(all effective strides are 1)");
                break;
            }

            fine.P = build_transfer<T>(fg, cg, transfer_for_strides(centering, opt.strides),
                                       scheme, 1.0);
            fine.R = build_transfer<T>(fg, cg, fine.P.pattern, scheme, rscale);
            fine.table = &h.table_for(fine.R.pattern, fine.A.pattern, fine.P.pattern, opt.strides);

            MgLevel<T> next;
            next.A = galerkin_product(fine.R, fine.A, fine.P, *fine.table);
            h.levels_.push_back(std::move(next));
        }

        for (std::size_t l = 0; l < h.levels_.size(); ++l) {
            MgLevel<T>& lev = h.levels_[l];
            lev.u = GridVector<T>(lev.A.grid);
            lev.f = GridVector<T>(lev.A.grid);
            lev.aux = GridVector<T>(lev.A.grid);
            if (l + 1 < h.levels_.size()) {
                const double w = opt.smoother == SmootherKind::jacobi ? opt.jacobi_weight
                                                                      : opt.weight;
                const StencilPattern* mask =
                    !opt.ilu_mask.offsets.empty() ? &opt.ilu_mask : nullptr;
                lev.smoother = make_smoother(lev.A, opt.smoother, static_cast<T>(w), mask,
                                             opt.workers);
            }
        }
        try {
            h.coarsest_ = DenseLu::factor_matrix(h.levels_.back().A);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(std::string("mg setup: singular coarsest matrix: ") +
                                     e.what());
        }
        return h;
    }

    int num_levels() const { return static_cast<int>(levels_.size()); }
    const MgLevel<T>& level(int l) const { return levels_[static_cast<std::size_t>(l)]; }

    /// One V-cycle: pre-smooth, restrict the residual, recurse, correct,
    /// post-smooth; the coarsest level is solved directly.
    void vcycle(const GridVector<T>& b, GridVector<T>& x) { cycle(0, b, x); }

    /// Preconditioner application: one V-cycle from a zero initial guess.
    void apply_preconditioner(const GridVector<T>& r, GridVector<T>& z) {
        set_zero(z);
        vcycle(r, z);
    }

    double grid_complexity() const {
        double sum = 0.0;
        const double n0 = static_cast<double>(levels_.front().A.grid.interior_count());
        for (const auto& lev : levels_) sum += static_cast<double>(lev.A.grid.interior_count());
        return sum / n0;
    }

    /// Stored-entry count ratio: every addressable entry of the SG-DIA block
    /// per interior point counts.
    double operator_complexity() const {
        double sum = 0.0;
        const double z0 = static_cast<double>(levels_.front().A.grid.interior_count()) *
                          levels_.front().A.npe();
        for (const auto& lev : levels_)
            sum += static_cast<double>(lev.A.grid.interior_count()) * lev.A.npe();
        return sum / z0;
    }

    void print_summary(std::ostream& os) const {
        os << "level  dims              pattern  entries/row  unknowns\n";
        for (std::size_t l = 0; l < levels_.size(); ++l) {
            const auto& g = levels_[l].A.grid;
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%-6zu %4d x %4d x %4d  %-8s %-12d %ld\n", l,
                          g.dims[0], g.dims[1], g.dims[2], levels_[l].A.pattern.name.c_str(),
                          levels_[l].A.npe(), g.interior_count());
            os << buf;
        }
        os << "C_G = " << grid_complexity() << "  C_O = " << operator_complexity() << "\n";
    }

    const MgOptions& options() const { return opt_; }

  private:
    void cycle(int l, const GridVector<T>& b, GridVector<T>& x) {
        MgLevel<T>& lev = levels_[static_cast<std::size_t>(l)];
        if (l + 1 == num_levels()) {
            solve_coarsest(b, x);
            return;
        }
        for (int s = 0; s < opt_.pre_sweeps; ++s) lev.smoother.apply_pre(lev.A, b, x);
        residual(lev.A, x, b, lev.aux);
        MgLevel<T>& next = levels_[static_cast<std::size_t>(l + 1)];
        restrict_apply(lev.R, lev.aux, next.f);
        set_zero(next.u);
        cycle(l + 1, next.f, next.u);
        interpolate_add(lev.P, next.u, x);
        for (int s = 0; s < opt_.post_sweeps; ++s) lev.smoother.apply_post(lev.A, b, x);
    }

    void solve_coarsest(const GridVector<T>& b, GridVector<T>& x) {
        const StructuredGrid& g = levels_.back().A.grid;
        std::vector<double> rhs(static_cast<std::size_t>(g.interior_count()));
        for (int ix = 0; ix < g.dims[0]; ++ix)
            for (int iy = 0; iy < g.dims[1]; ++iy)
                for (int iz = 0; iz < g.dims[2]; ++iz)
                    rhs[static_cast<std::size_t>(g.linear_interior(ix, iy, iz))] =
                        static_cast<double>(b.at_i(ix, iy, iz));
        coarsest_.solve(rhs);
        for (int ix = 0; ix < g.dims[0]; ++ix)
            for (int iy = 0; iy < g.dims[1]; ++iy)
                for (int iz = 0; iz < g.dims[2]; ++iz)
                    x.at_i(ix, iy, iz) = static_cast<T>(
                        rhs[static_cast<std::size_t>(g.linear_interior(ix, iy, iz))]);
    }

    const ChainTable& table_for(const TransferPattern& r, const StencilPattern& a,
                                const TransferPattern& p, std::array<int, 3> strides) {
        ChainTable probe;
        probe.r_pattern = r;
        probe.a_pattern = a;
        probe.p_pattern = p;
        probe.strides = strides;
        probe.centering = r.centering;
        const std::string key = probe.cache_key();
        auto it = tables_.find(key);
        if (it == tables_.end())
            it = tables_.emplace(key, derive_chains(r, a, p, strides)).first;
        return it->second;
    }

    MgOptions opt_;
    std::vector<MgLevel<T>> levels_;
    DenseLu coarsest_;
    std::map<std::string, ChainTable> tables_;
};

inline TransferKind parse_transfer(std::string_view name) {
    if (name == "cell") return TransferKind::cell_constant;
    if (name == "vertex") return TransferKind::vertex_trilinear;
    throw std::invalid_argument("parse_transfer: unknown kind '" + std::string(name) +
                                "' (supported: cell, vertex)");
}

inline std::string to_string(TransferKind k) {
    return k == TransferKind::cell_constant ? "cell" : "vertex";
}

} // namespace structmg

#endif
