#include "k2agg/k2tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace k2agg {

namespace {

struct NodeRange {
    uint64_t begin, end;  // range into the Morton-sorted point array
    uint64_t ox, oy;
};

void validate_points(const std::vector<Point>& points, uint64_t rows, uint64_t cols) {
    for (const Point& p : points) {
        if (p.x >= cols || p.y >= rows) {
            throw std::invalid_argument("K2Tree: point (" + std::to_string(p.x) + "," +
                                        std::to_string(p.y) + ") outside the declared grid");
        }
    }
}

}  // namespace

K2Tree K2Tree::build(std::vector<Point> points, uint64_t rows, uint64_t cols,
                     const KSchedule& schedule) {
    if (schedule.side() < std::max(rows, cols)) {
        throw std::invalid_argument("K2Tree: schedule side smaller than the grid");
    }
    validate_points(points, rows, cols);
    MortonLess less{&schedule};
    if (!std::is_sorted(points.begin(), points.end(), less)) {
        std::sort(points.begin(), points.end(), less);
    }
    for (size_t i = 1; i < points.size(); ++i) {
        if (points[i] == points[i - 1]) {
            throw std::invalid_argument("K2Tree: duplicate cell (" + std::to_string(points[i].x) +
                                        "," + std::to_string(points[i].y) + ")");
        }
    }

    unsigned h = schedule.num_levels();
    std::vector<BitBuffer> regions(h);
    std::vector<NodeRange> nodes{{0, points.size(), 0, 0}};
    std::vector<NodeRange> next;
    for (unsigned level = 0; level < h; ++level) {
        uint32_t k = schedule.k_at(level);
        uint64_t cs = schedule.side_at(level + 1);
        bool last = (level + 1 == h);
        next.clear();
        for (const NodeRange& node : nodes) {
            uint64_t cursor = node.begin;
            for (uint32_t ci = 0; ci < k * k; ++ci) {
                uint64_t child_begin = cursor;
                while (cursor < node.end &&
                       morton_child(points[cursor].x, points[cursor].y, node.ox, node.oy, cs, k) ==
                           ci) {
                    ++cursor;
                }
                bool nonempty = cursor > child_begin;
                regions[level].push_back(nonempty);
                if (nonempty && !last) {
                    next.push_back({child_begin, cursor,
                                    node.ox + (ci % k) * cs, node.oy + (ci / k) * cs});
                }
            }
            if (cursor != node.end) throw std::logic_error("K2Tree: partition out of order");
        }
        std::swap(nodes, next);
    }

    K2Tree tree;
    tree.schedule_ = schedule;
    tree.rows_ = rows;
    tree.cols_ = cols;
    tree.npoints_ = points.size();
    BitBuffer tbits;
    for (unsigned r = 0; r + 1 < h; ++r) tbits.append(regions[r]);
    tree.t_ = BitVector(std::move(tbits));
    tree.l_ = BitVector(std::move(regions[h - 1]));
    tree.regions_ = RegionIndex::derive(schedule, tree.t_, &tree.l_);
    return tree;
}

K2Tree K2Tree::build(const std::vector<WeightedPoint>& points, uint64_t rows, uint64_t cols,
                     const KSchedule& schedule) {
    std::vector<Point> plain(points.size());
    for (size_t i = 0; i < points.size(); ++i) plain[i] = {points[i].x, points[i].y};
    return build(std::move(plain), rows, cols, schedule);
}

K2Tree K2Tree::from_parts(Parts parts) {
    K2Tree tree;
    tree.schedule_ = std::move(parts.schedule);
    tree.rows_ = parts.rows;
    tree.cols_ = parts.cols;
    if (tree.schedule_.side() < std::max(tree.rows_, tree.cols_)) {
        throw std::invalid_argument("K2Tree: schedule side smaller than the grid");
    }
    tree.t_ = std::move(parts.t);
    tree.l_ = std::move(parts.l);
    tree.regions_ = RegionIndex::derive(tree.schedule_, tree.t_, &tree.l_);
    tree.npoints_ = tree.l_.ones();
    return tree;
}

template <typename CellFn>
void K2Tree::walk(uint64_t block, unsigned level, uint64_t ox, uint64_t oy, const QueryRect& q,
                  CellFn&& on_cell) const {
    uint32_t k = schedule_.k_at(level);
    uint64_t cs = schedule_.side_at(level + 1);
    bool last = (level + 1 == height());
    for (uint32_t ci = 0; ci < k * k; ++ci) {
        uint64_t pos = block + ci;
        if (!bit_at(pos)) continue;
        uint64_t cx = ox + (ci % k) * cs;
        uint64_t cy = oy + (ci / k) * cs;
        if (!q.intersects_block(cx, cy, cs)) continue;
        if (last) {
            on_cell(static_cast<uint32_t>(cx), static_cast<uint32_t>(cy));
        } else {
            walk(child_block(pos, level), level + 1, cx, cy, q, on_cell);
        }
    }
}

std::vector<Point> K2Tree::report(const QueryRect& q) const {
    std::vector<Point> out;
    walk(0, 0, 0, 0, q, [&](uint32_t x, uint32_t y) { out.push_back({x, y}); });
    return out;
}

uint64_t K2Tree::count_by_traversal(const QueryRect& q) const {
    uint64_t count = 0;
    walk(0, 0, 0, 0, q, [&](uint32_t, uint32_t) { ++count; });
    return count;
}

bool K2Tree::check_cell(uint32_t x, uint32_t y) const {
    if (x >= side() || y >= side()) return false;
    uint64_t block = 0;
    uint64_t ox = 0, oy = 0;
    for (unsigned level = 0; level < height(); ++level) {
        uint32_t k = schedule_.k_at(level);
        uint64_t cs = schedule_.side_at(level + 1);
        uint32_t ci = morton_child(x, y, ox, oy, cs, k);
        uint64_t pos = block + ci;
        if (!bit_at(pos)) return false;
        if (level + 1 == height()) return true;
        block = child_block(pos, level);
        ox += (ci % k) * cs;
        oy += (ci / k) * cs;
    }
    return true;
}

}  // namespace k2agg
