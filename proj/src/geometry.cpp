#include "figlearn/geometry.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "figlearn/errors.hpp"

namespace figlearn::geom {

namespace {

// Unit boundary segments. H runs (x,y)-(x+1,y), V runs (x,y)-(x,y+1),
// DP is the main diagonal (x,y)-(x+1,y+1), DN the anti-diagonal
// (x,y+1)-(x+1,y) of the cell anchored at (x,y).
enum class EdgeKind : uint8_t { H = 0, V = 1, DP = 2, DN = 3 };

struct Edge {
    int x = 0;
    int y = 0;
    EdgeKind kind = EdgeKind::H;

    friend constexpr auto operator<=>(const Edge&, const Edge&) = default;
};

std::array<Edge, 3> tri_edges(const TriCell& c) {
    switch (c.half) {
        case Half::NW:
            return {Edge{c.x, c.y, EdgeKind::V}, Edge{c.x, c.y + 1, EdgeKind::H},
                    Edge{c.x, c.y, EdgeKind::DP}};
        case Half::NE:
            return {Edge{c.x, c.y + 1, EdgeKind::H}, Edge{c.x + 1, c.y, EdgeKind::V},
                    Edge{c.x, c.y, EdgeKind::DN}};
        case Half::SE:
            return {Edge{c.x, c.y, EdgeKind::H}, Edge{c.x + 1, c.y, EdgeKind::V},
                    Edge{c.x, c.y, EdgeKind::DP}};
        case Half::SW:
            return {Edge{c.x, c.y, EdgeKind::H}, Edge{c.x, c.y, EdgeKind::V},
                    Edge{c.x, c.y, EdgeKind::DN}};
    }
    fail("InvalidHalf", "corrupt TriCell half");
}

bool complementary(Half a, Half b) {
    return (static_cast<uint8_t>(a) ^ 2u) == static_cast<uint8_t>(b);
}

// Validates the interior-disjointness rule on a sorted cell list.
void check_disjoint_sorted(const std::vector<TriCell>& cells) {
    for (size_t i = 0; i + 1 < cells.size(); ++i) {
        const TriCell& a = cells[i];
        const TriCell& b = cells[i + 1];
        if (a.x != b.x || a.y != b.y) continue;
        if (a.half == b.half) {
            fail("OverlappingCells", "duplicate TriCell in shape");
        }
        if (!complementary(a.half, b.half)) {
            fail("OverlappingCells", "mixed-diagonal halves share a cell");
        }
        if (i + 2 < cells.size() && cells[i + 2].x == a.x && cells[i + 2].y == a.y) {
            fail("OverlappingCells", "more than two halves share a cell");
        }
    }
}

void check_connected(const std::vector<TriCell>& cells) {
    if (cells.empty()) {
        fail("DisconnectedShape", "empty cell set");
    }
    std::map<Edge, std::array<int, 2>> owners;
    for (size_t i = 0; i < cells.size(); ++i) {
        for (const Edge& e : tri_edges(cells[i])) {
            auto [it, fresh] = owners.try_emplace(e, std::array<int, 2>{-1, -1});
            if (fresh) {
                it->second[0] = static_cast<int>(i);
            } else {
                it->second[1] = static_cast<int>(i);
            }
        }
    }
    std::vector<std::vector<int>> adj(cells.size());
    for (const auto& [edge, pair] : owners) {
        if (pair[1] >= 0) {
            adj[static_cast<size_t>(pair[0])].push_back(pair[1]);
            adj[static_cast<size_t>(pair[1])].push_back(pair[0]);
        }
    }
    std::vector<char> seen(cells.size(), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    size_t reached = 1;
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        for (int nxt : adj[static_cast<size_t>(cur)]) {
            if (!seen[static_cast<size_t>(nxt)]) {
                seen[static_cast<size_t>(nxt)] = 1;
                ++reached;
                stack.push_back(nxt);
            }
        }
    }
    if (reached != cells.size()) {
        fail("DisconnectedShape", "triangles do not form an edge-connected shape");
    }
}

// Translate so min x = min y = 0. Preserves sortedness.
void shift_to_origin(std::vector<TriCell>& cells) {
    int mx = cells.front().x;
    int my = cells.front().y;
    for (const TriCell& c : cells) {
        mx = std::min(mx, c.x);
        my = std::min(my, c.y);
    }
    if (mx != 0 || my != 0) {
        for (TriCell& c : cells) {
            c.x -= mx;
            c.y -= my;
        }
    }
}

Point min_corner(const std::vector<TriCell>& cells) {
    int mx = cells.front().x;
    int my = cells.front().y;
    for (const TriCell& c : cells) {
        mx = std::min(mx, c.x);
        my = std::min(my, c.y);
    }
    return {mx, my};
}

// Merge two sorted disjoint-candidate lists; nullopt when interiors overlap.
std::optional<std::vector<TriCell>> merge_if_disjoint(const std::vector<TriCell>& a,
                                                      const std::vector<TriCell>& b,
                                                      Point b_shift) {
    std::vector<TriCell> out;
    out.reserve(a.size() + b.size());
    size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        TriCell next;
        if (j >= b.size()) {
            next = a[i++];
        } else {
            TriCell bb{b[j].x + b_shift.x, b[j].y + b_shift.y, b[j].half};
            if (i >= a.size() || bb < a[i]) {
                next = bb;
                ++j;
            } else {
                next = a[i++];
            }
        }
        if (!out.empty()) {
            const TriCell& prev = out.back();
            if (prev.x == next.x && prev.y == next.y) {
                if (prev.half == next.half || !complementary(prev.half, next.half)) {
                    return std::nullopt;
                }
                if (out.size() >= 2) {
                    const TriCell& p2 = out[out.size() - 2];
                    if (p2.x == next.x && p2.y == next.y) return std::nullopt;
                }
            }
        }
        out.push_back(next);
    }
    return out;
}

void sort_parse(Parse& p) { std::sort(p.parts.begin(), p.parts.end()); }

Point rot_quarter(Point p) { return {p.y, -p.x}; }

uint64_t pair_key(int32_t a, int32_t b) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
}

} // namespace

const char* half_name(Half h) {
    switch (h) {
        case Half::NW: return "NW";
        case Half::NE: return "NE";
        case Half::SE: return "SE";
        case Half::SW: return "SW";
    }
    return "??";
}

std::optional<Half> half_from_name(std::string_view s) {
    if (s == "NW") return Half::NW;
    if (s == "NE") return Half::NE;
    if (s == "SE") return Half::SE;
    if (s == "SW") return Half::SW;
    return std::nullopt;
}

bool cells_overlap(const TriCell& a, const TriCell& b) {
    if (a.x != b.x || a.y != b.y) return false;
    return !complementary(a.half, b.half) || a.half == b.half;
}

bool cells_share_edge(const TriCell& a, const TriCell& b) {
    if (a == b) return false;
    const auto ea = tri_edges(a);
    const auto eb = tri_edges(b);
    for (const Edge& x : ea) {
        for (const Edge& y : eb) {
            if (x == y) return true;
        }
    }
    return false;
}

TriCell rotate90(const TriCell& c) {
    return TriCell{c.y, -c.x - 1,
                   static_cast<Half>((static_cast<uint8_t>(c.half) + 1u) & 3u)};
}

size_t Shape::hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mixin = [&h](uint64_t v) {
        h ^= v;
        h *= 0x100000001b3ull;
    };
    for (const TriCell& c : cells) {
        mixin(static_cast<uint64_t>(static_cast<uint32_t>(c.x)));
        mixin(static_cast<uint64_t>(static_cast<uint32_t>(c.y)));
        mixin(static_cast<uint64_t>(c.half));
    }
    return static_cast<size_t>(h);
}

Shape canonicalize(std::vector<TriCell> cells) {
    std::sort(cells.begin(), cells.end());
    check_disjoint_sorted(cells);
    check_connected(cells);
    shift_to_origin(cells);
    return Shape{std::move(cells)};
}

Shape rotate_shape(const Shape& s, int angle) {
    if (angle != 0 && angle != 90 && angle != 180 && angle != 270) {
        fail("InvalidAngle", "rotation angle must be one of 0/90/180/270");
    }
    std::vector<TriCell> cells = s.cells;
    for (int k = 0; k < angle / 90; ++k) {
        for (TriCell& c : cells) c = rotate90(c);
    }
    std::sort(cells.begin(), cells.end());
    if (!cells.empty()) shift_to_origin(cells);
    return Shape{std::move(cells)};
}

std::vector<Side> boundary_sides(const Shape& s) {
    std::map<Edge, int> count;
    for (const TriCell& c : s.cells) {
        for (const Edge& e : tri_edges(c)) ++count[e];
    }
    // Group single-owner edges by the line they lie on, then chain
    // consecutive edges into maximal runs.
    std::map<std::pair<EdgeKind, int>, std::vector<int>> lines;
    for (const auto& [e, n] : count) {
        if (n != 1) continue;
        switch (e.kind) {
            case EdgeKind::H: lines[{EdgeKind::H, e.y}].push_back(e.x); break;
            case EdgeKind::V: lines[{EdgeKind::V, e.x}].push_back(e.y); break;
            case EdgeKind::DP: lines[{EdgeKind::DP, e.y - e.x}].push_back(e.x); break;
            case EdgeKind::DN: lines[{EdgeKind::DN, e.y + e.x}].push_back(e.x); break;
        }
    }
    std::vector<Side> sides;
    for (auto& [key, ticks] : lines) {
        std::sort(ticks.begin(), ticks.end());
        size_t i = 0;
        while (i < ticks.size()) {
            size_t j = i;
            while (j + 1 < ticks.size() && ticks[j + 1] == ticks[j] + 1) ++j;
            const int t0 = ticks[i];
            const int64_t len = ticks[j] + 1 - t0;
            Side side;
            switch (key.first) {
                case EdgeKind::H:
                    side = {{t0, key.second}, {t0 + static_cast<int>(len), key.second},
                            len * len, SideKind::Axis};
                    break;
                case EdgeKind::V:
                    side = {{key.second, t0}, {key.second, t0 + static_cast<int>(len)},
                            len * len, SideKind::Axis};
                    break;
                case EdgeKind::DP:
                    side = {{t0, t0 + key.second},
                            {t0 + static_cast<int>(len), t0 + static_cast<int>(len) + key.second},
                            2 * len * len, SideKind::Diagonal};
                    break;
                case EdgeKind::DN:
                    side = {{t0, key.second - t0 + 1},
                            {t0 + static_cast<int>(len), key.second - t0 - static_cast<int>(len) + 1},
                            2 * len * len, SideKind::Diagonal};
                    break;
            }
            sides.push_back(side);
            i = j + 1;
        }
    }
    std::sort(sides.begin(), sides.end());
    return sides;
}

Figure figure_from_primitive(int slot, const Shape& shape) {
    Figure f;
    f.shape = shape;
    f.parses.push_back(Parse{{PartPlacement{slot, 0, 0, 0}}});
    f.part_count = 1;
    return f;
}

std::vector<AttachConfig> attach_placements(const Shape& a, const Shape& b) {
    const std::vector<Side> sa = boundary_sides(a);
    const std::vector<Side> sb = boundary_sides(b);

    std::set<Point> offsets;
    for (const Side& x : sa) {
        const Point dx = x.end - x.start;
        for (const Side& y : sb) {
            if (y.end - y.start == dx) {
                offsets.insert(x.start - y.start);
            }
        }
    }

    std::map<Shape, std::vector<AttachPlacement>> grouped;
    for (const Point& t : offsets) {
        auto merged = merge_if_disjoint(a.cells, b.cells, t);
        if (!merged) continue;
        const Point corner = min_corner(*merged);
        const Point shift{-corner.x, -corner.y};
        if (shift.x != 0 || shift.y != 0) {
            for (TriCell& c : *merged) {
                c.x += shift.x;
                c.y += shift.y;
            }
        }
        grouped[Shape{std::move(*merged)}].push_back(AttachPlacement{t, shift});
    }

    std::vector<AttachConfig> out;
    out.reserve(grouped.size());
    for (auto& [shape, placements] : grouped) {
        out.push_back(AttachConfig{shape, std::move(placements)});
    }
    return out;
}

std::vector<Shape> attach_shapes(const Shape& a, const Shape& b) {
    std::vector<Shape> out;
    for (auto& cfg : attach_placements(a, b)) {
        out.push_back(std::move(cfg.shape));
    }
    return out;
}

std::vector<Figure> enumerate_attachments(const Figure& a, const Figure& b) {
    if (a.part_count + b.part_count > 3) {
        fail("PartBudgetExceeded", "attachment would exceed three parts");
    }
    std::vector<Figure> out;
    for (const AttachConfig& cfg : attach_placements(a.shape, b.shape)) {
        Figure f;
        f.shape = cfg.shape;
        std::set<Parse> parses;
        for (const AttachPlacement& pl : cfg.placements) {
            for (const Parse& pa : a.parses) {
                for (const Parse& pb : b.parses) {
                    if (pa.parts.size() + pb.parts.size() > 3) continue;
                    Parse combined;
                    combined.parts.reserve(pa.parts.size() + pb.parts.size());
                    for (const PartPlacement& p : pa.parts) {
                        combined.parts.push_back(
                            {p.slot, p.dx + pl.canon_shift.x, p.dy + pl.canon_shift.y, p.rot});
                    }
                    for (const PartPlacement& p : pb.parts) {
                        combined.parts.push_back({p.slot,
                                                  p.dx + pl.b_offset.x + pl.canon_shift.x,
                                                  p.dy + pl.b_offset.y + pl.canon_shift.y,
                                                  p.rot});
                    }
                    sort_parse(combined);
                    parses.insert(std::move(combined));
                }
            }
        }
        f.parses.assign(parses.begin(), parses.end());
        f.part_count = static_cast<int>(f.parses.front().parts.size());
        for (const Parse& p : f.parses) {
            f.part_count = std::min(f.part_count, static_cast<int>(p.parts.size()));
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::optional<int32_t> Universe::find(const Shape& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

int32_t Universe::require(const Shape& s) const {
    auto id = find(s);
    if (!id) {
        fail("UnknownFigure", "shape is not a member of this universe");
    }
    return *id;
}

int32_t Universe::rotate_id(int32_t id, int angle) const {
    if (angle != 0 && angle != 90 && angle != 180 && angle != 270) {
        fail("InvalidAngle", "rotation angle must be one of 0/90/180/270");
    }
    int32_t cur = id;
    for (int k = 0; k < angle / 90; ++k) {
        cur = entries_[static_cast<size_t>(cur)].rotated90;
    }
    return cur;
}

const std::vector<int32_t>& Universe::attach_ids(int32_t a, int32_t b) const {
    const uint64_t key = pair_key(a, b);
    {
        std::lock_guard<std::mutex> lock(*attach_mutex_);
        auto it = attach_cache_.find(key);
        if (it != attach_cache_.end()) return it->second;
    }
    std::vector<int32_t> ids;
    for (const Shape& s : attach_shapes(entry(a).shape, entry(b).shape)) {
        auto id = find(s);
        ids.push_back(id ? *id : -1);
    }
    std::lock_guard<std::mutex> lock(*attach_mutex_);
    auto [it, fresh] = attach_cache_.try_emplace(key, std::move(ids));
    (void)fresh;
    return it->second;
}

namespace {

struct Proto {
    Shape shape;
    std::set<Parse> parses;
    std::set<Recipe> recipes;
};

struct Accum {
    std::set<Parse> parses;
    std::set<Recipe> recipes;
};

} // namespace

Universe enumerate_universe(const std::array<Primitive, 4>& prims,
                            int max_parts,
                            size_t universe_cap) {
    if (max_parts < 1 || max_parts > 3) {
        fail("OutOfRange", "max_parts must be within [1, 3]");
    }
    for (size_t i = 0; i < prims.size(); ++i) {
        if (prims[i].shape.cells.size() != 4) {
            fail("SchemaError", "primitive '" + prims[i].id + "' must have exactly 4 TriCells");
        }
        if (canonicalize(prims[i].shape.cells) != prims[i].shape) {
            fail("SchemaError", "primitive '" + prims[i].id + "' shape is not canonical");
        }
        for (size_t j = i + 1; j < prims.size(); ++j) {
            if (prims[i].id == prims[j].id) {
                fail("SchemaError", "duplicate primitive id '" + prims[i].id + "'");
            }
            if (prims[i].shape == prims[j].shape) {
                fail("SchemaError", "primitives '" + prims[i].id + "' and '" + prims[j].id +
                                        "' have identical shapes");
            }
        }
    }

    // Canonicalization shift of each primitive at each quarter turn; needed to
    // rewrite part placements when a whole figure is rotated.
    std::array<std::array<Point, 4>, 4> rot_shift;
    for (int slot = 0; slot < 4; ++slot) {
        std::vector<TriCell> raw = prims[static_cast<size_t>(slot)].shape.cells;
        for (int k = 0; k < 4; ++k) {
            const Point corner = min_corner(raw);
            rot_shift[static_cast<size_t>(slot)][static_cast<size_t>(k)] = {-corner.x, -corner.y};
            for (TriCell& c : raw) c = rotate90(c);
        }
    }

    auto rotate_parse_quarter = [&rot_shift](const Parse& p) {
        Parse out;
        out.parts.reserve(p.parts.size());
        for (const PartPlacement& part : p.parts) {
            const int k = part.rot / 90;
            const Point s_r = rot_shift[static_cast<size_t>(part.slot)][static_cast<size_t>(k)];
            const Point s_r1 =
                rot_shift[static_cast<size_t>(part.slot)][static_cast<size_t>((k + 1) & 3)];
            const Point t = rot_quarter({part.dx + s_r.x, part.dy + s_r.y});
            out.parts.push_back(
                {part.slot, t.x - s_r1.x, t.y - s_r1.y, (part.rot + 90) % 360});
        }
        sort_parse(out);
        return out;
    };

    std::vector<Proto> protos;
    for (int slot = 0; slot < 4; ++slot) {
        Proto p;
        p.shape = prims[static_cast<size_t>(slot)].shape;
        p.parses.insert(Parse{{PartPlacement{slot, 0, 0, 0}}});
        p.recipes.insert(Recipe{{slot}, {}, 0});
        protos.push_back(std::move(p));
    }

    if (max_parts >= 2) {
        std::map<std::pair<int, int>, std::vector<Proto>> pairs2;
        for (int i = 0; i < 4; ++i) {
            for (int j = i; j < 4; ++j) {
                const auto cfgs = attach_placements(prims[static_cast<size_t>(i)].shape,
                                                    prims[static_cast<size_t>(j)].shape);
                std::vector<Proto>& dest = pairs2[{i, j}];
                for (size_t ci = 0; ci < cfgs.size(); ++ci) {
                    Proto p;
                    p.shape = cfgs[ci].shape;
                    for (const AttachPlacement& pl : cfgs[ci].placements) {
                        Parse parse{{PartPlacement{i, pl.canon_shift.x, pl.canon_shift.y, 0},
                                     PartPlacement{j, pl.b_offset.x + pl.canon_shift.x,
                                                   pl.b_offset.y + pl.canon_shift.y, 0}}};
                        sort_parse(parse);
                        p.parses.insert(std::move(parse));
                    }
                    p.recipes.insert(Recipe{{i, j}, {static_cast<int>(ci) + 1}, 0});
                    dest.push_back(std::move(p));
                }
            }
        }

        if (max_parts >= 3) {
            for (const auto& [pair, cfgs2] : pairs2) {
                for (int z = 0; z < 4; ++z) {
                    for (const Proto& f2 : cfgs2) {
                        const auto cfgs3 =
                            attach_placements(f2.shape, prims[static_cast<size_t>(z)].shape);
                        for (size_t ci = 0; ci < cfgs3.size(); ++ci) {
                            Proto p;
                            p.shape = cfgs3[ci].shape;
                            for (const AttachPlacement& pl : cfgs3[ci].placements) {
                                for (const Parse& base : f2.parses) {
                                    Parse parse;
                                    parse.parts.reserve(3);
                                    for (const PartPlacement& part : base.parts) {
                                        parse.parts.push_back({part.slot,
                                                               part.dx + pl.canon_shift.x,
                                                               part.dy + pl.canon_shift.y,
                                                               part.rot});
                                    }
                                    parse.parts.push_back(
                                        {z, pl.b_offset.x + pl.canon_shift.x,
                                         pl.b_offset.y + pl.canon_shift.y, 0});
                                    sort_parse(parse);
                                    p.parses.insert(std::move(parse));
                                }
                            }
                            for (const Recipe& r2 : f2.recipes) {
                                Recipe r = r2;
                                r.slots.push_back(z);
                                r.configs.push_back(static_cast<int>(ci) + 1);
                                p.recipes.insert(std::move(r));
                            }
                            protos.push_back(std::move(p));
                        }
                    }
                }
            }
        }

        for (auto& [pair, cfgs2] : pairs2) {
            for (Proto& p : cfgs2) protos.push_back(std::move(p));
        }
    }

    // Expand each configuration through the four global rotations and merge
    // by canonical shape.
    std::map<Shape, Accum> merged;
    for (const Proto& proto : protos) {
        Shape shape = proto.shape;
        std::vector<Parse> parses(proto.parses.begin(), proto.parses.end());
        for (int k = 0; k < 4; ++k) {
            if (k > 0) {
                std::vector<TriCell> cells = shape.cells;
                for (TriCell& c : cells) c = rotate90(c);
                std::sort(cells.begin(), cells.end());
                const Point corner = min_corner(cells);
                const Point g{-corner.x, -corner.y};
                for (TriCell& c : cells) {
                    c.x += g.x;
                    c.y += g.y;
                }
                shape = Shape{std::move(cells)};
                for (Parse& p : parses) {
                    p = rotate_parse_quarter(p);
                    for (PartPlacement& part : p.parts) {
                        part.dx += g.x;
                        part.dy += g.y;
                    }
                }
            }
            Accum& acc = merged[shape];
            for (const Parse& p : parses) acc.parses.insert(p);
            for (const Recipe& r : proto.recipes) {
                Recipe rk = r;
                rk.rot = 90 * k;
                acc.recipes.insert(std::move(rk));
            }
            if (merged.size() > universe_cap) {
                fail("UniverseCapExceeded",
                     "universe exceeds configured cap of " + std::to_string(universe_cap));
            }
        }
    }

    Universe u;
    u.prims_ = prims;
    u.max_parts_ = max_parts;
    u.entries_.reserve(merged.size());
    for (auto& [shape, acc] : merged) {
        Universe::Entry e;
        e.shape = shape;
        e.parses.assign(acc.parses.begin(), acc.parses.end());
        e.recipes.assign(acc.recipes.begin(), acc.recipes.end());
        e.part_count = static_cast<int>(e.parses.front().parts.size());
        for (const Parse& p : e.parses) {
            e.part_count = std::min(e.part_count, static_cast<int>(p.parts.size()));
            for (const PartPlacement& part : p.parts) {
                e.slot_mask |= static_cast<uint8_t>(1u << part.slot);
            }
        }
        u.entries_.push_back(std::move(e));
    }
    for (int32_t id = 0; id < u.size(); ++id) {
        u.index_.emplace(u.entries_[static_cast<size_t>(id)].shape, id);
    }
    for (int slot = 0; slot < 4; ++slot) {
        u.base_[static_cast<size_t>(slot)] =
            u.require(prims[static_cast<size_t>(slot)].shape);
    }
    for (int32_t id = 0; id < u.size(); ++id) {
        Universe::Entry& e = u.entries_[static_cast<size_t>(id)];
        e.rotated90 = u.require(rotate_shape(e.shape, 90));
        for (int slot = 0; slot < 4; ++slot) {
            if (e.slot_mask & (1u << slot)) {
                u.has_[static_cast<size_t>(slot)].push_back(id);
            }
        }
    }
    return u;
}

} // namespace figlearn::geom
