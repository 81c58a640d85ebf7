#include "structmg/stencil.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace structmg {

namespace {

const Offset kCenter{0, 0, 0};

bool in_unit_range(const Offset& o, int dim) {
    for (int ax = 0; ax < 3; ++ax) {
        if (ax >= dim && o[ax] != 0) return false;
        if (o[ax] < -1 || o[ax] > 1) return false;
    }
    return true;
}

std::vector<Offset> sorted_unique(std::vector<Offset> offs, const char* what) {
    std::sort(offs.begin(), offs.end());
    if (std::adjacent_find(offs.begin(), offs.end()) != offs.end())
        throw std::invalid_argument(std::string(what) + ": duplicate offset");
    return offs;
}

std::vector<Offset> canonical_mask(std::string_view name) {
    std::vector<Offset> offs;
    auto cube = [&](int dim, auto keep) {
        for (int x = -1; x <= 1; ++x)
            for (int y = -1; y <= 1; ++y)
                for (int z = -1; z <= 1; ++z) {
                    if (dim == 2 && z != 0) continue;
                    Offset o{x, y, z};
                    if (keep(o)) offs.push_back(o);
                }
    };
    auto nnz = [](const Offset& o) { return std::abs(o[0]) + std::abs(o[1]) + std::abs(o[2]); };
    if (name == "2d5")
        cube(2, [&](const Offset& o) { return nnz(o) <= 1; });
    else if (name == "2d9")
        cube(2, [](const Offset&) { return true; });
    else if (name == "3d7")
        cube(3, [&](const Offset& o) { return nnz(o) <= 1; });
    else if (name == "3d15")
        // cross footprint in the outer two axes, full range along z
        cube(3, [](const Offset& o) { return o[0] * o[1] == 0; });
    else if (name == "3d19")
        cube(3, [&](const Offset& o) { return nnz(o) <= 2; });
    else if (name == "3d27")
        cube(3, [](const Offset&) { return true; });
    return offs;
}

const char* kPatternNames[] = {"2d5", "2d9", "3d7", "3d15", "3d19", "3d27"};

std::string detect_name(int dim, const std::vector<Offset>& offs) {
    for (const char* n : kPatternNames) {
        if ((n[0] - '0') != dim) continue;
        if (canonical_mask(n) == offs) return n;
    }
    return "custom";
}

int find_offset(const std::vector<Offset>& offs, const Offset& o) {
    auto it = std::lower_bound(offs.begin(), offs.end(), o);
    if (it == offs.end() || *it != o) return -1;
    return static_cast<int>(it - offs.begin());
}

} // namespace

int StencilPattern::center_index() const { return find_offset(offsets, kCenter); }

int StencilPattern::index_of(const Offset& o) const { return find_offset(offsets, o); }

int TransferPattern::index_of(const Offset& o) const { return find_offset(offsets, o); }

StencilPattern make_pattern(int dim, std::vector<Offset> offsets) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("make_pattern: dim must be 2 or 3");
    if (offsets.empty())
        throw std::invalid_argument("make_pattern: empty offset set");
    for (const Offset& o : offsets)
        if (!in_unit_range(o, dim))
            throw std::invalid_argument("make_pattern: offset out of the {-1,0,1}^" +
                                        std::to_string(dim) + " family");
    StencilPattern p;
    p.dim = dim;
    p.offsets = sorted_unique(std::move(offsets), "make_pattern");
    p.name = detect_name(dim, p.offsets);
    return p;
}

StencilPattern pattern_from_name(std::string_view name) {
    std::vector<Offset> offs = canonical_mask(name);
    if (offs.empty())
        throw std::invalid_argument("pattern_from_name: unknown label '" + std::string(name) +
                                    "' (supported: 2d5, 2d9, 3d7, 3d15, 3d19, 3d27)");
    StencilPattern p;
    p.dim = name[0] - '0';
    p.offsets = std::move(offs);
    std::sort(p.offsets.begin(), p.offsets.end());
    p.name = std::string(name);
    return p;
}

StencilPattern project_to_2d(const StencilPattern& p) {
    if (p.dim != 3)
        throw std::invalid_argument("project_to_2d: input must be 3D");
    std::vector<Offset> offs;
    for (const Offset& o : p.offsets) {
        Offset q{o[0], o[1], 0};
        if (find_offset(offs, q) < 0) {
            offs.push_back(q);
            std::sort(offs.begin(), offs.end());
        }
    }
    StencilPattern out;
    out.dim = 2;
    out.offsets = std::move(offs);
    out.name = detect_name(2, out.offsets);
    return out;
}

StencilPattern lower_triangular_part(const StencilPattern& p) {
    if (!p.has_center())
        throw std::invalid_argument("lower_triangular_part: pattern has no center offset");
    StencilPattern out;
    out.dim = p.dim;
    for (const Offset& o : p.offsets)
        if (o < kCenter) out.offsets.push_back(o);
    out.name = detect_name(p.dim, out.offsets);
    return out;
}

StencilPattern upper_triangular_part(const StencilPattern& p) {
    if (!p.has_center())
        throw std::invalid_argument("upper_triangular_part: pattern has no center offset");
    StencilPattern out;
    out.dim = p.dim;
    for (const Offset& o : p.offsets)
        if (kCenter < o) out.offsets.push_back(o);
    out.name = detect_name(p.dim, out.offsets);
    return out;
}

StencilPattern transpose_pattern(const StencilPattern& p) {
    std::vector<Offset> offs;
    offs.reserve(p.offsets.size());
    for (const Offset& o : p.offsets) offs.push_back(Offset{-o[0], -o[1], -o[2]});
    std::sort(offs.begin(), offs.end());
    StencilPattern out;
    out.dim = p.dim;
    out.offsets = std::move(offs);
    out.name = detect_name(p.dim, out.offsets);
    return out;
}

std::string serialize_pattern(const StencilPattern& p) {
    std::ostringstream os;
    os << p.dim << 'd' << p.offsets.size() << ":[";
    for (std::size_t i = 0; i < p.offsets.size(); ++i) {
        const Offset& o = p.offsets[i];
        if (i) os << ',';
        os << '(' << o[0] << ',' << o[1];
        if (p.dim == 3) os << ',' << o[2];
        os << ')';
    }
    os << ']';
    return os.str();
}

StencilPattern parse_pattern(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) return pattern_from_name(text);

    std::string head(text.substr(0, colon));
    if (head.size() < 2 || (head[0] != '2' && head[0] != '3') || head[1] != 'd')
        throw std::invalid_argument("parse_pattern: bad header '" + head + "'");
    int dim = head[0] - '0';

    std::string body(text.substr(colon + 1));
    std::vector<Offset> offs;
    std::size_t pos = 0;
    while ((pos = body.find('(', pos)) != std::string::npos) {
        std::size_t end = body.find(')', pos);
        if (end == std::string::npos)
            throw std::invalid_argument("parse_pattern: unterminated tuple");
        std::string tup = body.substr(pos + 1, end - pos - 1);
        Offset o{0, 0, 0};
        int comp = 0;
        std::istringstream ts(tup);
        std::string tok;
        while (std::getline(ts, tok, ',')) {
            if (comp >= dim)
                throw std::invalid_argument("parse_pattern: too many components in " + tup);
            o[comp++] = std::stoi(tok);
        }
        if (comp != dim)
            throw std::invalid_argument("parse_pattern: expected " + std::to_string(dim) +
                                        " components in (" + tup + ")");
        offs.push_back(o);
        pos = end + 1;
    }
    if (offs.empty())
        throw std::invalid_argument("parse_pattern: no offsets in '" + std::string(text) + "'");
    StencilPattern p = make_pattern(dim, std::move(offs));
    std::size_t declared = std::strtoul(head.c_str() + 2, nullptr, 10);
    if (declared != p.offsets.size())
        throw std::invalid_argument("parse_pattern: header count mismatch in '" +
                                    std::string(text) + "'");
    return p;
}

namespace {

std::vector<Offset> product_set(const std::vector<std::vector<int>>& per_axis) {
    std::vector<Offset> offs;
    for (int x : per_axis[0])
        for (int y : per_axis[1])
            for (int z : per_axis[2]) offs.push_back(Offset{x, y, z});
    std::sort(offs.begin(), offs.end());
    return offs;
}

std::string transfer_name(Centering c, int dim, std::size_t n) {
    std::ostringstream os;
    os << dim << 'd' << n << (c == Centering::cell ? 'c' : 'v');
    std::string s = os.str();
    static const char* known[] = {"3d8c", "2d4c", "3d7v", "3d27v", "2d9v"};
    for (const char* k : known)
        if (s == k) return s;
    return "custom";
}

} // namespace

TransferPattern make_transfer(Centering centering, int dim, std::vector<Offset> offsets) {
    if (dim != 2 && dim != 3)
        throw std::invalid_argument("make_transfer: dim must be 2 or 3");
    for (const Offset& o : offsets)
        if (!in_unit_range(o, dim))
            throw std::invalid_argument("make_transfer: offset out of range");
    TransferPattern t;
    t.centering = centering;
    t.dim = dim;
    t.offsets = sorted_unique(std::move(offsets), "make_transfer");
    if (centering == Centering::cell)
        for (const Offset& o : t.offsets)
            for (int ax = 0; ax < 3; ++ax)
                if (o[ax] < 0)
                    throw std::invalid_argument("make_transfer: cell footprint offsets are >= 0");
    t.name = transfer_name(centering, dim, t.offsets.size());
    return t;
}

TransferPattern transfer_from_name(std::string_view name) {
    if (name == "3d8c")
        return transfer_for_strides(Centering::cell, {2, 2, 2}, 3);
    if (name == "2d4c")
        return transfer_for_strides(Centering::cell, {2, 2, 1}, 2);
    if (name == "3d27v")
        return transfer_for_strides(Centering::vertex, {2, 2, 2}, 3);
    if (name == "2d9v")
        return transfer_for_strides(Centering::vertex, {2, 2, 1}, 2);
    if (name == "3d7v") {
        std::vector<Offset> offs;
        for (const Offset& o : canonical_mask("3d7")) offs.push_back(o);
        return make_transfer(Centering::vertex, 3, std::move(offs));
    }
    throw std::invalid_argument("transfer_from_name: unknown label '" + std::string(name) +
                                "' (supported: 3d8c, 2d4c, 3d7v, 3d27v, 2d9v)");
}

TransferPattern transfer_for_strides(Centering centering, std::array<int, 3> strides, int dim) {
    std::vector<std::vector<int>> per_axis(3);
    for (int ax = 0; ax < 3; ++ax) {
        if (ax >= dim || strides[ax] == 1)
            per_axis[ax] = {0};
        else if (strides[ax] == 2)
            per_axis[ax] = (centering == Centering::cell) ? std::vector<int>{0, 1}
                                                          : std::vector<int>{-1, 0, 1};
        else
            throw std::invalid_argument("transfer_for_strides: stride must be 1 or 2");
    }
    TransferPattern t;
    t.centering = centering;
    t.dim = dim;
    t.offsets = product_set(per_axis);
    t.name = transfer_name(centering, dim, t.offsets.size());
    return t;
}

std::string to_string(Centering c) { return c == Centering::cell ? "cell" : "vertex"; }

} // namespace structmg
