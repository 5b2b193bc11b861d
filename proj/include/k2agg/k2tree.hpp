#pragma once

#include <cstdint>
#include <vector>

#include "k2agg/bitvector.hpp"
#include "k2agg/grid.hpp"
#include "k2agg/regions.hpp"

namespace k2agg {

/*
 * K^2-tree over a binary point grid. The matrix is recursively split into
 * k x k equal submatrices (k may vary per level via the schedule); each
 * submatrix gets a bit, 1 when it holds at least one point, and only 1-bits
 * are subdivided further. T holds the bits of every level but the last in
 * level order, L the last-level bits (individual cells). Queries walk top
 * down following only the branches that overlap the range, locating child
 * blocks through rank on T.
 */
class K2Tree {
public:
    struct Parts {
        KSchedule schedule;
        uint64_t rows = 0, cols = 0;
        BitVector t, l;
    };

    K2Tree() = default;

    // Points are sorted in place (skipped when already Morton-sorted);
    // duplicate cells and out-of-grid coordinates are rejected.
    static K2Tree build(std::vector<Point> points, uint64_t rows, uint64_t cols,
                        const KSchedule& schedule);
    static K2Tree build(const std::vector<WeightedPoint>& points, uint64_t rows, uint64_t cols,
                        const KSchedule& schedule);
    static K2Tree from_parts(Parts parts);

    // All non-empty cells in q, in Morton order.
    std::vector<Point> report(const QueryRect& q) const;
    bool check_cell(uint32_t x, uint32_t y) const;
    // |report(q)| without materializing the points; the non-augmented
    // counting baseline.
    uint64_t count_by_traversal(const QueryRect& q) const;

    const KSchedule& schedule() const { return schedule_; }
    uint64_t side() const { return schedule_.side(); }
    uint64_t rows() const { return rows_; }
    uint64_t cols() const { return cols_; }
    uint64_t num_points() const { return npoints_; }
    const BitVector& t() const { return t_; }
    const BitVector& l() const { return l_; }

    uint64_t payload_bits() const { return t_.size() + l_.size(); }
    uint64_t size_in_bits() const { return t_.size_in_bits() + l_.size_in_bits(); }

private:
    friend class CountingK2Tree;

    unsigned height() const { return schedule_.num_levels(); }
    bool bit_at(uint64_t pos) const {
        return pos < t_.size() ? t_[pos] : l_[pos - t_.size()];
    }
    // Start of the child block of the 1-bit at pos (a level-(level+1) node).
    uint64_t child_block(uint64_t pos, unsigned level) const {
        uint64_t ordinal = t_.rank1(pos) - regions_.ones_before(level) - 1;
        uint64_t k = schedule_.k_at(level + 1);
        return regions_.start(level + 1) + ordinal * k * k;
    }

    template <typename CellFn>
    void walk(uint64_t block, unsigned level, uint64_t ox, uint64_t oy, const QueryRect& q,
              CellFn&& on_cell) const;

    KSchedule schedule_;
    uint64_t rows_ = 0, cols_ = 0, npoints_ = 0;
    BitVector t_, l_;
    RegionIndex regions_;
};

}  // namespace k2agg
