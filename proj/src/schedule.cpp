#include "structmg/schedule.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <ostream>
#include <set>
#include <stdexcept>

namespace structmg {

namespace {

int sign2(const Dep2& d) {
    if (d[0] < 0 || (d[0] == 0 && d[1] < 0)) return -1;
    if (d[0] > 0 || (d[0] == 0 && d[1] > 0)) return +1;
    return 0;
}

/// True when `d` equals a sum of two or more elements of `deps` (elements may
/// repeat): the dependence then follows from the cascade of the others.
bool reachable_by_composition(const Dep2& d, const std::vector<Dep2>& deps) {
    // Offsets live in {-1,0,1}^2 and are one-sided, so compositions that can
    // reproduce an offset are short; bound coordinates and depth generously.
    const int bound = 4;
    std::set<std::array<int, 3>> seen; // (x, y, depth>=2 flag)
    std::function<bool(Dep2, int)> walk = [&](Dep2 cur, int steps) -> bool {
        if (steps >= 2 && cur == d) return true;
        if (steps > 6) return false;
        for (const Dep2& e : deps) {
            Dep2 nxt{cur[0] + e[0], cur[1] + e[1]};
            if (std::abs(nxt[0]) > bound || std::abs(nxt[1]) > bound) continue;
            std::array<int, 3> key{nxt[0], nxt[1], std::min(steps + 1, 2)};
            if (!seen.insert(key).second) continue;
            if (walk(nxt, steps + 1)) return true;
        }
        return false;
    };
    return walk(Dep2{0, 0}, 0);
}

} // namespace

std::vector<Dep2> sparsify_dependences(std::vector<Dep2> deps) {
    std::sort(deps.begin(), deps.end());
    deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    int side = 0;
    for (const Dep2& d : deps) {
        const int s = sign2(d);
        if (s == 0) throw std::invalid_argument("sparsify_dependences: zero offset");
        if (side == 0) side = s;
        if (s != side)
            throw std::invalid_argument("sparsify_dependences: offsets must be one-sided");
    }
    std::vector<Dep2> kept;
    for (const Dep2& d : deps)
        if (!reachable_by_composition(d, deps)) kept.push_back(d);
    return kept;
}

std::vector<Dep2> project_deps(const std::vector<Offset>& offsets) {
    std::vector<Dep2> out;
    for (const Offset& o : offsets) {
        Dep2 d{o[0], o[1]};
        if (d[0] == 0 && d[1] == 0) continue;
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Dep2> line_lower_deps(const StencilPattern& p) {
    std::vector<Dep2> out;
    for (const Offset& o : p.offsets) {
        Dep2 d{o[0], o[1]};
        if (sign2(d) != -1) continue;
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Dep2> line_upper_deps(const StencilPattern& p) {
    std::vector<Dep2> out;
    for (const Offset& o : p.offsets) {
        Dep2 d{o[0], o[1]};
        if (sign2(d) != +1) continue;
        if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

LevelSchedule build_schedule(int nx, int ny, const std::vector<Dep2>& raw_deps, int workers,
                             SweepDirection dir) {
    if (nx < 1 || ny < 1) throw std::invalid_argument("build_schedule: empty grid");
    if (workers < 1) throw std::invalid_argument("build_schedule: workers must be >= 1");

    LevelSchedule s;
    s.nx = nx;
    s.ny = ny;
    s.dir = dir;
    s.deps = sparsify_dependences(raw_deps);
    const int expect = dir == SweepDirection::forward ? -1 : +1;
    for (const Dep2& d : s.deps)
        if (sign2(d) != expect)
            throw std::invalid_argument("build_schedule: dependence side does not match sweep "
                                        "direction");

    if (workers > ny) {
        static std::set<std::pair<int, int>> warned;
        if (warned.insert({workers, ny}).second)
            std::fprintf(stderr,
                         "structmg: clamping %d workers to %d columns of the y partition\n",
                         workers, ny);
        workers = ny;
    }
    s.workers = workers;

    s.owner.assign(static_cast<std::size_t>(nx) * ny, 0);
    for (int w = 0; w < workers; ++w) {
        const int y0 = static_cast<int>((static_cast<long>(w) * ny) / workers);
        const int y1 = static_cast<int>((static_cast<long>(w + 1) * ny) / workers);
        for (int iy = y0; iy < y1; ++iy)
            for (int ix = 0; ix < nx; ++ix)
                s.owner[static_cast<std::size_t>(s.column(ix, iy))] = w;
    }

    s.order.assign(static_cast<std::size_t>(workers), {});
    for (int w = 0; w < workers; ++w) {
        const int y0 = static_cast<int>((static_cast<long>(w) * ny) / workers);
        const int y1 = static_cast<int>((static_cast<long>(w + 1) * ny) / workers);
        auto& list = s.order[static_cast<std::size_t>(w)];
        list.reserve(static_cast<std::size_t>(nx) * (y1 - y0));
        if (dir == SweepDirection::forward) {
            for (int ix = 0; ix < nx; ++ix)
                for (int iy = y0; iy < y1; ++iy) list.push_back(s.column(ix, iy));
        } else {
            for (int ix = nx - 1; ix >= 0; --ix)
                for (int iy = y1 - 1; iy >= y0; --iy) list.push_back(s.column(ix, iy));
        }
    }

    s.sync.assign(static_cast<std::size_t>(nx) * ny, {});
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy) {
            const int col = s.column(ix, iy);
            std::vector<SyncDep>& waits = s.sync[static_cast<std::size_t>(col)];
            for (const Dep2& d : s.deps) {
                const int tx = ix + d[0], ty = iy + d[1];
                if (tx < 0 || tx >= nx || ty < 0 || ty >= ny) continue;
                if (s.owner[static_cast<std::size_t>(s.column(tx, ty))] ==
                    s.owner[static_cast<std::size_t>(col)])
                    continue; // satisfied by the worker's own traversal order
                bool merged = false;
                for (SyncDep& sd : waits)
                    if (sd.row == ty) {
                        // one wait per row suffices: keep the strongest
                        sd.required = dir == SweepDirection::forward
                                          ? std::max(sd.required, tx)
                                          : std::min(sd.required, tx);
                        merged = true;
                        break;
                    }
                if (!merged) waits.push_back(SyncDep{ty, tx});
            }
        }
    return s;
}

void LevelSchedule::dump(std::ostream& os) const {
    os << "# grid " << nx << " x " << ny << " workers=" << workers
       << " dir=" << (dir == SweepDirection::forward ? "forward" : "backward") << " deps=[";
    for (std::size_t i = 0; i < deps.size(); ++i) {
        if (i) os << ',';
        os << '(' << deps[i][0] << ',' << deps[i][1] << ')';
    }
    os << "]\n";
    for (int ix = 0; ix < nx; ++ix)
        for (int iy = 0; iy < ny; ++iy) {
            const int col = column(ix, iy);
            os << "col (" << ix << ',' << iy << ") owner=" << owner[static_cast<std::size_t>(col)]
               << " sync=[";
            const auto& waits = sync[static_cast<std::size_t>(col)];
            for (std::size_t i = 0; i < waits.size(); ++i) {
                if (i) os << ',';
                os << "(row " << waits[i].row << " reaches x " << waits[i].required << ')';
            }
            os << "]\n";
        }
}

} // namespace structmg
