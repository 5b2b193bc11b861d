#include "k2agg/dense_grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace k2agg {

bool zorder_less(Point a, Point b) {
    // Row-major z-order: the y bit outranks the x bit of the same position.
    for (int bit = 31; bit >= 0; --bit) {
        uint32_t mask = 1u << bit;
        if ((a.y & mask) != (b.y & mask)) return (a.y & mask) == 0;
        if ((a.x & mask) != (b.x & mask)) return (a.x & mask) == 0;
    }
    return false;
}

DenseGrid::DenseGrid(uint64_t rows, uint64_t cols) : rows_(rows), cols_(cols) {
    if (rows > kMaxSide || cols > kMaxSide) {
        throw std::invalid_argument("DenseGrid: grid larger than the oracle cap");
    }
    cells_.assign(rows * cols, -1);
}

DenseGrid::DenseGrid(const Dataset& data) : DenseGrid(data.points, data.rows, data.cols) {}

DenseGrid::DenseGrid(const std::vector<WeightedPoint>& points, uint64_t rows, uint64_t cols)
    : DenseGrid(rows, cols) {
    for (const WeightedPoint& p : points) set(p.x, p.y, p.w);
}

void DenseGrid::set(uint32_t x, uint32_t y, uint64_t w) {
    if (x >= cols_ || y >= rows_) throw std::out_of_range("DenseGrid::set: outside the grid");
    cells_[uint64_t(y) * cols_ + x] = static_cast<int64_t>(w);
}

std::optional<uint64_t> DenseGrid::cell(uint32_t x, uint32_t y) const {
    if (x >= cols_ || y >= rows_) return std::nullopt;
    int64_t v = cells_[uint64_t(y) * cols_ + x];
    if (v < 0) return std::nullopt;
    return static_cast<uint64_t>(v);
}

std::vector<WeightedPoint> DenseGrid::collect(const QueryRect& q) const {
    std::vector<WeightedPoint> out;
    if (rows_ == 0 || cols_ == 0) return out;
    uint32_t x2 = static_cast<uint32_t>(std::min<uint64_t>(q.x2, cols_ - 1));
    uint32_t y2 = static_cast<uint32_t>(std::min<uint64_t>(q.y2, rows_ - 1));
    for (uint32_t y = q.y1; y <= y2 && y < rows_; ++y) {
        const int64_t* row = &cells_[uint64_t(y) * cols_];
        for (uint32_t x = q.x1; x <= x2; ++x) {
            if (row[x] >= 0) out.push_back({x, y, static_cast<uint64_t>(row[x])});
        }
    }
    return out;
}

uint64_t DenseGrid::o_count(const QueryRect& q) const {
    return collect(q).size();
}

uint64_t DenseGrid::o_sum(const QueryRect& q) const {
    uint64_t s = 0;
    for (const WeightedPoint& p : collect(q)) s += p.w;
    return s;
}

std::optional<uint64_t> DenseGrid::o_max(const QueryRect& q) const {
    std::optional<uint64_t> best;
    for (const WeightedPoint& p : collect(q)) {
        if (!best || p.w > *best) best = p.w;
    }
    return best;
}

std::optional<uint64_t> DenseGrid::o_min(const QueryRect& q) const {
    std::optional<uint64_t> best;
    for (const WeightedPoint& p : collect(q)) {
        if (!best || p.w < *best) best = p.w;
    }
    return best;
}

std::vector<WeightedPoint> DenseGrid::o_topk(const QueryRect& q, uint64_t k) const {
    std::vector<WeightedPoint> all = collect(q);
    std::stable_sort(all.begin(), all.end(), [](const WeightedPoint& a, const WeightedPoint& b) {
        if (a.w != b.w) return a.w > b.w;
        return zorder_less({a.x, a.y}, {b.x, b.y});
    });
    if (all.size() > k) all.resize(k);
    return all;
}

std::vector<WeightedPoint> DenseGrid::o_interval(const QueryRect& q, uint64_t w_lo,
                                                 uint64_t w_hi) const {
    std::vector<WeightedPoint> out;
    for (const WeightedPoint& p : collect(q)) {
        if (p.w >= w_lo && p.w <= w_hi) out.push_back(p);
    }
    return out;
}

}  // namespace k2agg
