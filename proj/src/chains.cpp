#include "structmg/chains.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace structmg {

std::size_t ChainTable::total_chains() const {
    std::size_t n = 0;
    for (const auto& group : chains) n += group.size();
    return n;
}

ChainTable derive_chains(const TransferPattern& r, const StencilPattern& a,
                         const TransferPattern& p, std::array<int, 3> strides) {
    if (r.centering != p.centering)
        throw std::invalid_argument("derive_chains: restriction is " + to_string(r.centering) +
                                    "-centered but interpolation is " + to_string(p.centering) +
                                    "-centered");
    if (r.dim != a.dim || p.dim != a.dim)
        throw std::invalid_argument("derive_chains: operand dimensions differ");
    for (int ax = 0; ax < 3; ++ax) {
        if (ax >= a.dim && strides[ax] != 1)
            throw std::invalid_argument("derive_chains: stride on missing axis");
        if (strides[ax] != 1 && strides[ax] != 2)
            throw std::invalid_argument("derive_chains: stride must be 1 or 2, got " +
                                        std::to_string(strides[ax]));
    }

    struct PartialChain {
        int r_entry, a_entry, p_entry;
        Offset u;
    };
    std::map<Offset, std::vector<PartialChain>> by_coarse;

    for (int ri = 0; ri < r.entries(); ++ri) {
        const Offset& u = r.offsets[ri];
        for (int ai = 0; ai < a.entries_per_row(); ++ai) {
            const Offset& ao = a.offsets[ai];
            for (int pi = 0; pi < p.entries(); ++pi) {
                const Offset& po = p.offsets[pi];
                Offset c{0, 0, 0};
                bool ok = true;
                for (int ax = 0; ax < 3 && ok; ++ax) {
                    const int num = u[ax] + ao[ax] - po[ax];
                    if (num % strides[ax] != 0)
                        ok = false;
                    else
                        c[ax] = num / strides[ax];
                }
                if (ok) by_coarse[c].push_back(PartialChain{ri, ai, pi, u});
            }
        }
    }

    ChainTable table;
    table.r_pattern = r;
    table.a_pattern = a;
    table.p_pattern = p;
    table.strides = strides;
    table.centering = r.centering;

    std::vector<Offset> coarse_offsets;
    for (const auto& [c, _] : by_coarse) {
        for (int ax = 0; ax < 3; ++ax)
            if (c[ax] < -1 || c[ax] > 1)
                throw std::runtime_error("derive_chains: coarse pattern grows beyond the "
                                         "{-1,0,1} family; combination unsupported");
        coarse_offsets.push_back(c);
    }
    table.coarse_pattern = make_pattern(a.dim, coarse_offsets);

    table.chains.resize(by_coarse.size());
    int ci = 0;
    for (auto& [c, group] : by_coarse) {
        std::sort(group.begin(), group.end(), [](const PartialChain& x, const PartialChain& y) {
            if (x.r_entry != y.r_entry) return x.r_entry < y.r_entry;
            if (x.a_entry != y.a_entry) return x.a_entry < y.a_entry;
            return x.p_entry < y.p_entry;
        });
        auto& dst = table.chains[ci];
        dst.reserve(group.size());
        for (const PartialChain& pc : group)
            dst.push_back(InfluenceChain{pc.r_entry, pc.u, pc.a_entry, pc.p_entry, ci});
        ++ci;
    }
    return table;
}

void ChainTable::dump(std::ostream& os) const {
    os << "# R=" << (r_pattern.name.empty() ? "custom" : r_pattern.name)
       << " A=" << a_pattern.name << " P=" << p_pattern.name << " strides=(" << strides[0] << ','
       << strides[1] << ',' << strides[2] << ") centering=" << to_string(centering) << "\n";
    os << "# coarse entries=" << coarse_pattern.entries_per_row()
       << " chains=" << total_chains() << "\n";
    for (std::size_t e = 0; e < chains.size(); ++e) {
        const Offset& c = coarse_pattern.offsets[e];
        for (const InfluenceChain& ch : chains[e]) {
            os << "c=(" << c[0] << ',' << c[1] << ',' << c[2] << ") r=" << ch.r_entry << " u=("
               << ch.u_off[0] << ',' << ch.u_off[1] << ',' << ch.u_off[2] << ") a=" << ch.a_entry
               << " p=" << ch.p_entry << "\n";
        }
    }
}

namespace {
std::string coord_expr(const char* base, const Offset& o, int dim) {
    std::ostringstream os;
    os << base << '(';
    const char axes[] = {'X', 'Y', 'Z'};
    for (int ax = 0; ax < dim; ++ax) {
        if (ax) os << ',';
        os << axes[ax];
        if (o[ax] > 0) os << '+' << o[ax];
        if (o[ax] < 0) os << o[ax];
    }
    os << ')';
    return os.str();
}

std::string fine_expr(const Offset& u, std::array<int, 3> s, int dim) {
    std::ostringstream os;
    os << "AF(";
    const char axes[] = {'x', 'y', 'z'};
    for (int ax = 0; ax < dim; ++ax) {
        if (ax) os << ',';
        if (s[ax] != 1) os << s[ax] << '*';
        os << axes[ax];
        if (u[ax] > 0) os << '+' << u[ax];
        if (u[ax] < 0) os << u[ax];
    }
    os << ')';
    return os.str();
}
} // namespace

void ChainTable::print_kernel(std::ostream& os) const {
    const int dim = a_pattern.dim;
    os << "// fused product kernel for R=" << r_pattern.name << " A=" << a_pattern.name
       << " P=" << p_pattern.name << " strides=(" << strides[0] << ',' << strides[1] << ','
       << strides[2] << ")\n";
    os << "// per coarse point (X,Y" << (dim == 3 ? ",Z" : "") << ") with fine image (x,y"
       << (dim == 3 ? ",z" : "") << "); Rv = " << coord_expr("RC", Offset{0, 0, 0}, dim) << "\n";
    for (std::size_t e = 0; e < chains.size(); ++e) {
        const Offset& c = coarse_pattern.offsets[e];
        os << "if (in_range" << coord_expr("", c, dim) << ") {\n";
        os << "  res = 0;  Pv = " << coord_expr("PC", c, dim) << ";\n";
        std::size_t i = 0;
        while (i < chains[e].size()) {
            const int r = chains[e][i].r_entry;
            const Offset u = chains[e][i].u_off;
            os << "  { // source " << fine_expr(u, strides, dim) << "\n";
            os << "    tmp = 0;  ptr = " << fine_expr(u, strides, dim) << ";\n";
            for (; i < chains[e].size() && chains[e][i].r_entry == r; ++i)
                os << "    tmp += Pv[" << chains[e][i].p_entry << "] * ptr["
                   << chains[e][i].a_entry << "];\n";
            os << "    res += tmp * Rv[" << r << "];\n  }\n";
        }
        os << "  AC[" << e << "] = res;\n}\n";
    }
}

std::string ChainTable::cache_key() const {
    std::ostringstream os;
    os << to_string(centering) << '|' << serialize_pattern(a_pattern) << "|R";
    for (const Offset& o : r_pattern.offsets) os << '(' << o[0] << o[1] << o[2] << ')';
    os << "|P";
    for (const Offset& o : p_pattern.offsets) os << '(' << o[0] << o[1] << o[2] << ')';
    os << '|' << strides[0] << strides[1] << strides[2];
    return os.str();
}

} // namespace structmg
