#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace figlearn::geom {

// A TriCell is one half of the unit lattice cell with lower-left corner
// (x, y). The main diagonal (from (x,y) to (x+1,y+1)) cuts the cell into the
// NW/SE pair; the anti-diagonal (from (x,y+1) to (x+1,y)) cuts it into the
// NE/SW pair. Halves of the same cell are interior-disjoint exactly when
// they form one of those two pairs.
enum class Half : uint8_t { NW = 0, NE = 1, SE = 2, SW = 3 };

const char* half_name(Half h);
std::optional<Half> half_from_name(std::string_view s);

struct TriCell {
    int x = 0;
    int y = 0;
    Half half = Half::NW;

    friend constexpr auto operator<=>(const TriCell&, const TriCell&) = default;
};

// Interior overlap test: same cell and not a complementary pair.
bool cells_overlap(const TriCell& a, const TriCell& b);

// True when the two triangles share a positive-length boundary segment.
bool cells_share_edge(const TriCell& a, const TriCell& b);

// One quarter turn. Cell anchors map (x,y) -> (y,-x-1) and the halves cycle
// NW -> NE -> SE -> SW -> NW, which together form a rigid motion of the plane.
TriCell rotate90(const TriCell& c);

// Canonical shape: interior-disjoint, edge-connected, translated so that
// min x = min y = 0, cells sorted by (x, y, half).
struct Shape {
    std::vector<TriCell> cells;

    bool operator==(const Shape&) const = default;
    bool operator<(const Shape& o) const { return cells < o.cells; }
    bool empty() const { return cells.empty(); }
    size_t hash() const;
};

struct ShapeHash {
    size_t operator()(const Shape& s) const { return s.hash(); }
};

// Validates (OverlappingCells, DisconnectedShape), translates to the origin
// and sorts. Idempotent on canonical input.
Shape canonicalize(std::vector<TriCell> cells);

// angle in {0, 90, 180, 270}; anything else is InvalidAngle.
Shape rotate_shape(const Shape& s, int angle);

struct Point {
    int x = 0;
    int y = 0;

    friend constexpr auto operator<=>(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
};

enum class SideKind : uint8_t { Axis, Diagonal };

// A maximal straight run of the shape boundary. Endpoints are lattice points
// normalized so start < end; inner boundaries (holes) contribute sides too.
struct Side {
    Point start;
    Point end;
    int64_t squared_length = 0;
    SideKind kind = SideKind::Axis;

    friend constexpr auto operator<=>(const Side&, const Side&) = default;
};

std::vector<Side> boundary_sides(const Shape& s);

// One way of placing a figure: its parts with per-part translation and
// rotation. Part cells are rotate_shape(primitive, rot) shifted by (dx, dy).
struct PartPlacement {
    int slot = 0;  // index into the trial's four primitives
    int dx = 0;
    int dy = 0;
    int rot = 0;   // degrees, one of 0/90/180/270

    friend constexpr auto operator<=>(const PartPlacement&, const PartPlacement&) = default;
};

struct Parse {
    std::vector<PartPlacement> parts;  // kept sorted for dedup

    friend auto operator<=>(const Parse&, const Parse&) = default;
};

struct Figure {
    Shape shape;
    std::vector<Parse> parses;
    int part_count = 0;  // smallest parse size
};

Figure figure_from_primitive(int slot, const Shape& shape);

// One valid placement of b against a: b shifted by b_offset, the union
// shifted by canon_shift to reach canonical position.
struct AttachPlacement {
    Point b_offset;
    Point canon_shift;
};

// One attachment configuration: a distinct canonical result shape together
// with every placement that produces it.
struct AttachConfig {
    Shape shape;
    std::vector<AttachPlacement> placements;
};

// All placements of b (translation only) such that a full side of b
// coincides with an equal-length side of a and interiors stay disjoint.
// Ordered by canonical cell list; this order defines configuration indices.
std::vector<AttachConfig> attach_placements(const Shape& a, const Shape& b);

std::vector<Shape> attach_shapes(const Shape& a, const Shape& b);

// Figure-level attachment: configurations in canonical order with the two
// figures' parses merged (combinations beyond three parts are not recorded).
std::vector<Figure> enumerate_attachments(const Figure& a, const Figure& b);

struct Primitive {
    std::string id;
    Shape shape;  // exactly 4 TriCells
};

// How a figure was assembled: parts in attachment order (left-nested), the
// 1-based configuration index chosen at each attachment step, and the global
// rotation applied to the finished configuration.
struct Recipe {
    std::vector<int> slots;
    std::vector<int> configs;
    int rot = 0;

    friend auto operator<=>(const Recipe&, const Recipe&) = default;
};

// Exhaustive set of figures buildable from four primitives with 1..max_parts
// parts, at all four global rotations, deduplicated by canonical shape and
// ordered canonically (lexicographic on cell lists).
class Universe {
public:
    struct Entry {
        Shape shape;
        std::vector<Parse> parses;
        std::vector<Recipe> recipes;
        int part_count = 0;
        int32_t rotated90 = -1;  // id of this shape rotated one quarter turn
        uint8_t slot_mask = 0;   // bit i set when some parse uses slot i
    };

    int32_t size() const { return static_cast<int32_t>(entries_.size()); }
    const Entry& entry(int32_t id) const { return entries_[static_cast<size_t>(id)]; }
    const std::array<Primitive, 4>& primitives() const { return prims_; }
    int max_parts() const { return max_parts_; }

    std::optional<int32_t> find(const Shape& s) const;
    int32_t require(const Shape& s) const;  // UnknownFigure

    int32_t base_figure(int slot) const { return base_[static_cast<size_t>(slot)]; }
    const std::vector<int32_t>& containing_slot(int slot) const {
        return has_[static_cast<size_t>(slot)];
    }

    int32_t rotate_id(int32_t id, int angle) const;

    // Attachment configurations between two universe members, in geometric
    // configuration order; entries are universe ids, -1 where the resulting
    // shape is not a universe member. Cached; safe to call concurrently.
    const std::vector<int32_t>& attach_ids(int32_t a, int32_t b) const;

private:
    friend Universe enumerate_universe(const std::array<Primitive, 4>&, int, size_t);

    std::vector<Entry> entries_;
    std::unordered_map<Shape, int32_t, ShapeHash> index_;
    std::array<int32_t, 4> base_{-1, -1, -1, -1};
    std::array<std::vector<int32_t>, 4> has_;
    std::array<Primitive, 4> prims_;
    int max_parts_ = 3;

    mutable std::unordered_map<uint64_t, std::vector<int32_t>> attach_cache_;
    std::unique_ptr<std::mutex> attach_mutex_ = std::make_unique<std::mutex>();
};

Universe enumerate_universe(const std::array<Primitive, 4>& prims,
                            int max_parts = 3,
                            size_t universe_cap = 200000);

} // namespace figlearn::geom
