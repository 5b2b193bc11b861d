#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "k2agg/grid.hpp"

namespace k2agg {

/*
 * Brute-force reference over an explicit dense grid; ground truth for the
 * property tests. Capped at 4096x4096 to keep test runs fast.
 */
class DenseGrid {
public:
    static constexpr uint64_t kMaxSide = 4096;

    DenseGrid(uint64_t rows, uint64_t cols);
    explicit DenseGrid(const Dataset& data);
    DenseGrid(const std::vector<WeightedPoint>& points, uint64_t rows, uint64_t cols);

    void set(uint32_t x, uint32_t y, uint64_t w);
    std::optional<uint64_t> cell(uint32_t x, uint32_t y) const;
    uint64_t rows() const { return rows_; }
    uint64_t cols() const { return cols_; }

    // All points in q, row-major scan order.
    std::vector<WeightedPoint> collect(const QueryRect& q) const;
    uint64_t o_count(const QueryRect& q) const;
    uint64_t o_sum(const QueryRect& q) const;
    std::optional<uint64_t> o_max(const QueryRect& q) const;
    std::optional<uint64_t> o_min(const QueryRect& q) const;
    // Weight-descending prefix of the points in q; ties broken by Morton
    // (z-order) position.
    std::vector<WeightedPoint> o_topk(const QueryRect& q, uint64_t k) const;
    std::vector<WeightedPoint> o_interval(const QueryRect& q, uint64_t w_lo, uint64_t w_hi) const;

private:
    uint64_t rows_, cols_;
    std::vector<int64_t> cells_;  // -1 = empty
};

// z-order comparison of cell coordinates; agrees with every power-of-two
// row-major schedule.
bool zorder_less(Point a, Point b);

}  // namespace k2agg
