#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace k2agg {

struct Point {
    uint32_t x = 0;  // column
    uint32_t y = 0;  // row
    friend bool operator==(const Point&, const Point&) = default;
};

struct WeightedPoint {
    uint32_t x = 0;
    uint32_t y = 0;
    uint64_t w = 0;
    friend bool operator==(const WeightedPoint&, const WeightedPoint&) = default;
};

/*
 * Inclusive rectangle [x1,x2] x [y1,y2] over columns x and rows y.
 */
struct QueryRect {
    uint32_t x1 = 0, x2 = 0, y1 = 0, y2 = 0;

    QueryRect() = default;
    QueryRect(uint32_t x1_, uint32_t x2_, uint32_t y1_, uint32_t y2_)
        : x1(x1_), x2(x2_), y1(y1_), y2(y2_) {
        if (x1 > x2 || y1 > y2) throw std::invalid_argument("QueryRect: empty range");
    }

    static QueryRect full(uint64_t side) {
        return QueryRect(0, static_cast<uint32_t>(side - 1), 0, static_cast<uint32_t>(side - 1));
    }

    bool contains(uint32_t x, uint32_t y) const {
        return x1 <= x && x <= x2 && y1 <= y && y <= y2;
    }
    // Against a square block with top-left corner (bx,by) and the given side.
    bool intersects_block(uint64_t bx, uint64_t by, uint64_t side) const {
        return bx <= x2 && bx + side - 1 >= x1 && by <= y2 && by + side - 1 >= y1;
    }
    bool contains_block(uint64_t bx, uint64_t by, uint64_t side) const {
        return x1 <= bx && bx + side - 1 <= x2 && y1 <= by && by + side - 1 <= y2;
    }
    uint64_t area() const {
        return (uint64_t(x2) - x1 + 1) * (uint64_t(y2) - y1 + 1);
    }
};

// Overlap-and-interleave map between signed and unsigned integers:
// -i -> 2i-1 (odd), j -> 2j (even).
inline uint64_t zigzag_encode(int64_t v) {
    return v < 0 ? 2 * static_cast<uint64_t>(-v) - 1 : 2 * static_cast<uint64_t>(v);
}

inline int64_t zigzag_decode(uint64_t u) {
    return (u & 1) ? -static_cast<int64_t>((u + 1) / 2) : static_cast<int64_t>(u / 2);
}

inline unsigned ceil_log2(uint64_t v) {
    unsigned r = 0;
    uint64_t p = 1;
    while (p < v) {
        p <<= 1;
        ++r;
    }
    return r;
}

inline unsigned bit_width_nonzero(uint64_t v) {
    // Number of bits needed to write v, with bit_width_nonzero(0) == 1.
    unsigned r = 1;
    while (v >>= 1) ++r;
    return r;
}

/*
 * Per-level branching schedule of a K^2-tree. Each entry repeats a branching
 * factor k for a number of levels; the padded grid side is the product of all
 * per-level factors. The default is k=4 for the first six levels and k=2 for
 * the rest, with the side rounded up to the next power of two.
 */
class KSchedule {
public:
    struct Entry {
        uint32_t k = 2;
        uint32_t levels = 1;
    };

    KSchedule() = default;
    explicit KSchedule(std::vector<Entry> entries);

    // Smallest uniform-k schedule whose side covers min_side.
    static KSchedule uniform(uint32_t k, uint64_t min_side);
    // k1 for at most max_k1_levels top levels, then k2, covering min_side.
    static KSchedule hybrid(uint64_t min_side, uint32_t k1 = 4, uint32_t max_k1_levels = 6,
                            uint32_t k2 = 2);
    // "hybrid" | "<k>" | comma list of "<k>" or "<k>x<levels>"; a trailing
    // entry without a level count is repeated until min_side is covered.
    static KSchedule parse(const std::string& text, uint64_t min_side);

    const std::vector<Entry>& entries() const { return entries_; }
    unsigned num_levels() const { return static_cast<unsigned>(sides_.size()) - 1; }
    uint64_t side() const { return sides_[0]; }
    // Submatrix side of a node at the given level; side_at(0) is the padded
    // grid side, side_at(num_levels()) == 1 (individual cells).
    uint64_t side_at(unsigned level) const { return sides_[level]; }
    uint32_t k_at(unsigned level) const { return ks_[level]; }

    std::string describe() const;
    friend bool operator==(const KSchedule&, const KSchedule&) = default;

private:
    std::vector<Entry> entries_;
    std::vector<uint32_t> ks_;      // branching factor per level
    std::vector<uint64_t> sides_;   // node side per level, plus trailing 1
};

// Morton child index of (x,y) inside a block at (ox,oy) split into k x k
// children of side child_side: left-to-right within a row of children,
// top-to-bottom across rows.
inline uint32_t morton_child(uint32_t x, uint32_t y, uint64_t ox, uint64_t oy,
                             uint64_t child_side, uint32_t k) {
    return static_cast<uint32_t>(((y - oy) / child_side) * k + (x - ox) / child_side);
}

// Total order of cells along the schedule's space-filling traversal.
bool morton_less(const KSchedule& schedule, Point a, Point b);

struct MortonLess {
    const KSchedule* schedule;
    bool operator()(const Point& a, const Point& b) const { return morton_less(*schedule, a, b); }
    bool operator()(const WeightedPoint& a, const WeightedPoint& b) const {
        return morton_less(*schedule, Point{a.x, a.y}, Point{b.x, b.y});
    }
};

/*
 * A parsed point file: one optional weight per non-empty cell of a
 * rows x cols grid. Weights default to 1 when the file has no weight column.
 */
struct Dataset {
    uint64_t rows = 0;
    uint64_t cols = 0;
    uint64_t weight_domain = 0;  // d: weights lie in [0, d-1]; 0 = unknown
    std::vector<WeightedPoint> points;
};

}  // namespace k2agg
