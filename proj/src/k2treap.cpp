#include "k2agg/k2treap.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace k2agg {

namespace {

struct Builder {
    const KSchedule& schedule;
    std::vector<WeightedPoint>& pts;
    std::vector<char> extracted;
    unsigned height;
    std::vector<BitBuffer> regions;          // child blocks per level
    std::vector<std::vector<uint64_t>> diffs;  // per node level
    std::vector<std::vector<uint32_t>> offx, offy;

    Builder(const KSchedule& s, std::vector<WeightedPoint>& p)
        : schedule(s), pts(p), extracted(p.size(), 0), height(s.num_levels()),
          regions(height), diffs(height + 1), offx(height), offy(height) {}

    // Extracts the heaviest live point of [b,e) (Morton-earliest on ties) and
    // recurses over the children. Caller guarantees a live point exists.
    void node(uint64_t b, uint64_t e, unsigned level, uint64_t ox, uint64_t oy,
              uint64_t parent_w) {
        uint64_t best = UINT64_MAX;
        for (uint64_t i = b; i < e; ++i) {
            if (extracted[i]) continue;
            if (best == UINT64_MAX || pts[i].w > pts[best].w) best = i;
        }
        extracted[best] = 1;
        const WeightedPoint p = pts[best];
        diffs[level].push_back(level == 0 ? p.w : parent_w - p.w);
        if (level < height) {
            offx[level].push_back(static_cast<uint32_t>(p.x - ox));
            offy[level].push_back(static_cast<uint32_t>(p.y - oy));
        }
        if (level == height) return;

        uint32_t k = schedule.k_at(level);
        uint64_t cs = schedule.side_at(level + 1);
        uint64_t cursor = b;
        for (uint32_t ci = 0; ci < k * k; ++ci) {
            uint64_t child_begin = cursor;
            bool live = false;
            while (cursor < e &&
                   morton_child(pts[cursor].x, pts[cursor].y, ox, oy, cs, k) == ci) {
                live = live || !extracted[cursor];
                ++cursor;
            }
            regions[level].push_back(live);
            if (live) {
                node(child_begin, cursor, level + 1, ox + (ci % k) * cs, oy + (ci / k) * cs, p.w);
            }
        }
    }
};

}  // namespace

K2Treap K2Treap::build(std::vector<WeightedPoint> points, uint64_t rows, uint64_t cols,
                       const KSchedule& schedule, uint64_t weight_domain, unsigned dac_width) {
    if (schedule.side() < std::max(rows, cols)) {
        throw std::invalid_argument("K2Treap: schedule side smaller than the grid");
    }
    uint64_t max_w = 0;
    for (const WeightedPoint& p : points) {
        if (p.x >= cols || p.y >= rows) {
            throw std::invalid_argument("K2Treap: point outside the declared grid");
        }
        max_w = std::max(max_w, p.w);
    }
    if (weight_domain == 0) {
        weight_domain = points.empty() ? 1 : max_w + 1;
    } else if (max_w >= weight_domain) {
        throw std::invalid_argument("K2Treap: weight outside the declared domain");
    }

    MortonLess less{&schedule};
    if (!std::is_sorted(points.begin(), points.end(), less)) {
        std::sort(points.begin(), points.end(), less);
    }
    for (size_t i = 1; i < points.size(); ++i) {
        if (points[i].x == points[i - 1].x && points[i].y == points[i - 1].y) {
            throw std::invalid_argument("K2Treap: duplicate cell");
        }
    }

    Builder builder(schedule, points);
    if (!points.empty()) {
        builder.node(0, points.size(), 0, 0, 0, 0);
    } else {
        // keep the (all-zero) root block so the layout stays uniform
        uint32_t k0 = schedule.k_at(0);
        for (uint32_t i = 0; i < k0 * k0; ++i) builder.regions[0].push_back(false);
    }

    K2Treap tr;
    tr.schedule_ = schedule;
    tr.rows_ = rows;
    tr.cols_ = cols;
    tr.npoints_ = points.size();
    tr.weight_domain_ = weight_domain;

    BitBuffer tbits;
    for (BitBuffer& r : builder.regions) tbits.append(r);
    tr.t_ = BitVector(std::move(tbits));
    tr.regions_ = RegionIndex::derive(schedule, tr.t_, nullptr);

    std::vector<uint64_t> all_diffs;
    tr.first_.resize(builder.diffs.size() + 1);
    for (size_t l = 0; l < builder.diffs.size(); ++l) {
        tr.first_[l] = all_diffs.size();
        all_diffs.insert(all_diffs.end(), builder.diffs[l].begin(), builder.diffs[l].end());
    }
    tr.first_.back() = all_diffs.size();
    tr.values_ = DacSequence::encode(all_diffs, dac_width);

    unsigned h = schedule.num_levels();
    tr.coord_x_.reserve(h);
    tr.coord_y_.reserve(h);
    for (unsigned l = 0; l < h; ++l) {
        unsigned width = std::max(1u, ceil_log2(schedule.side_at(l)));
        PackedIntArray xs(width), ys(width);
        for (uint32_t v : builder.offx[l]) xs.append(v);
        for (uint32_t v : builder.offy[l]) ys.append(v);
        tr.coord_x_.push_back(std::move(xs));
        tr.coord_y_.push_back(std::move(ys));
    }
    return tr;
}

K2Treap K2Treap::from_parts(Parts parts) {
    K2Treap tr;
    tr.schedule_ = std::move(parts.schedule);
    tr.rows_ = parts.rows;
    tr.cols_ = parts.cols;
    tr.weight_domain_ = parts.weight_domain;
    tr.t_ = std::move(parts.t);
    tr.coord_x_ = std::move(parts.coord_x);
    tr.coord_y_ = std::move(parts.coord_y);
    tr.values_ = std::move(parts.values);
    tr.regions_ = RegionIndex::derive(tr.schedule_, tr.t_, nullptr);
    tr.npoints_ = tr.values_.size();

    unsigned h = tr.schedule_.num_levels();
    if (tr.coord_x_.size() != h || tr.coord_y_.size() != h) {
        throw std::invalid_argument("K2Treap: coordinate level count mismatch");
    }
    tr.first_.assign(h + 2, 0);
    if (tr.npoints_ > 0) {
        tr.first_[1] = 1;
        for (unsigned l = 1; l <= h; ++l) {
            uint64_t nodes_at_l = l < h ? tr.regions_.ones_before(l) - tr.regions_.ones_before(l - 1)
                                        : tr.t_.ones() - tr.regions_.ones_before(l - 1);
            tr.first_[l + 1] = tr.first_[l] + nodes_at_l;
        }
    }
    if (tr.first_.back() != tr.values_.size()) {
        throw std::invalid_argument("K2Treap: value count inconsistent with topology");
    }
    for (unsigned l = 0; l < h; ++l) {
        uint64_t expect = tr.first_[l + 1] - tr.first_[l];
        if (tr.coord_x_[l].size() != expect || tr.coord_y_[l].size() != expect) {
            throw std::invalid_argument("K2Treap: coordinate count inconsistent with topology");
        }
    }
    return tr;
}

K2Treap::NodeRef K2Treap::root_ref() const {
    NodeRef root;
    root.level = 0;
    root.block = 0;
    root.ox = root.oy = 0;
    root.x = static_cast<uint32_t>(coord_x_[0].get(0));
    root.y = static_cast<uint32_t>(coord_y_[0].get(0));
    root.w = values_.access(0);
    return root;
}

K2Treap::NodeRef K2Treap::decode_child(const NodeRef& parent, uint64_t pos, uint32_t ci) const {
    uint32_t k = schedule_.k_at(parent.level);
    uint64_t cs = schedule_.side_at(parent.level + 1);
    NodeRef child;
    child.level = parent.level + 1;
    child.ox = parent.ox + (ci % k) * cs;
    child.oy = parent.oy + (ci / k) * cs;
    uint64_t vi = t_.rank1(pos);
    child.w = parent.w - values_.access(vi);
    if (child.level < height()) {
        uint64_t idx = vi - first_[child.level];
        child.x = static_cast<uint32_t>(child.ox + coord_x_[child.level].get(idx));
        child.y = static_cast<uint32_t>(child.oy + coord_y_[child.level].get(idx));
        uint64_t ck = schedule_.k_at(child.level);
        child.block = regions_.start(child.level) +
                      (vi - 1 - regions_.ones_before(child.level - 1)) * ck * ck;
    } else {
        child.x = static_cast<uint32_t>(child.ox);
        child.y = static_cast<uint32_t>(child.oy);
        child.block = 0;
    }
    return child;
}

std::optional<uint64_t> K2Treap::access_cell(uint32_t x, uint32_t y) const {
    if (npoints_ == 0 || x >= side() || y >= side()) return std::nullopt;
    NodeRef node = root_ref();
    while (true) {
        if (node.x == x && node.y == y) return node.w;
        if (node.level == height()) return std::nullopt;
        uint32_t k = schedule_.k_at(node.level);
        uint64_t cs = schedule_.side_at(node.level + 1);
        uint32_t ci = morton_child(x, y, node.ox, node.oy, cs, k);
        uint64_t pos = node.block + ci;
        if (!t_[pos]) return std::nullopt;
        node = decode_child(node, pos, ci);
    }
}

std::vector<WeightedPoint> K2Treap::top_k(const QueryRect& q, uint64_t k,
                                          TopKStats* stats) const {
    std::vector<WeightedPoint> out;
    if (npoints_ == 0 || k == 0) return out;

    struct Entry {
        uint64_t w;
        uint64_t seq;
        NodeRef node;
    };
    struct Cmp {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.w != b.w) return a.w < b.w;
            return a.seq > b.seq;  // FIFO among equal maxima
        }
    };
    std::priority_queue<Entry, std::vector<Entry>, Cmp> queue;
    uint64_t seq = 0;
    TopKStats local;
    NodeRef root = root_ref();
    if (q.intersects_block(0, 0, side())) {
        queue.push({root.w, seq++, root});
        ++local.pushes;
    }
    while (!queue.empty() && out.size() < k) {
        NodeRef node = queue.top().node;
        queue.pop();
        ++local.pops;
        if (q.contains(node.x, node.y)) out.push_back({node.x, node.y, node.w});
        if (node.level == height()) continue;
        uint32_t kb = schedule_.k_at(node.level);
        uint64_t cs = schedule_.side_at(node.level + 1);
        for (uint32_t ci = 0; ci < kb * kb; ++ci) {
            uint64_t pos = node.block + ci;
            if (!t_[pos]) continue;
            uint64_t cx = node.ox + (ci % kb) * cs;
            uint64_t cy = node.oy + (ci / kb) * cs;
            if (!q.intersects_block(cx, cy, cs)) continue;
            NodeRef child = decode_child(node, pos, ci);
            queue.push({child.w, seq++, child});
            ++local.pushes;
        }
    }
    if (stats) *stats = local;
    return out;
}

template <typename Fn>
void K2Treap::dfs(const NodeRef& node, const QueryRect& q, uint64_t prune_below, Fn&& fn) const {
    if (node.w < prune_below) return;  // the node max dominates its subtree
    fn(node);
    if (node.level == height()) return;
    uint32_t k = schedule_.k_at(node.level);
    uint64_t cs = schedule_.side_at(node.level + 1);
    for (uint32_t ci = 0; ci < k * k; ++ci) {
        uint64_t pos = node.block + ci;
        if (!t_[pos]) continue;
        uint64_t cx = node.ox + (ci % k) * cs;
        uint64_t cy = node.oy + (ci / k) * cs;
        if (!q.intersects_block(cx, cy, cs)) continue;
        dfs(decode_child(node, pos, ci), q, prune_below, fn);
    }
}

std::vector<WeightedPoint> K2Treap::range_report(const QueryRect& q) const {
    std::vector<WeightedPoint> out;
    if (npoints_ == 0 || !q.intersects_block(0, 0, side())) return out;
    dfs(root_ref(), q, 0, [&](const NodeRef& n) {
        if (q.contains(n.x, n.y)) out.push_back({n.x, n.y, n.w});
    });
    return out;
}

std::vector<WeightedPoint> K2Treap::interval(const QueryRect& q, uint64_t w_lo,
                                             uint64_t w_hi) const {
    if (w_lo > w_hi) throw std::invalid_argument("K2Treap::interval: empty weight range");
    std::vector<WeightedPoint> out;
    if (npoints_ == 0 || !q.intersects_block(0, 0, side())) return out;
    dfs(root_ref(), q, w_lo, [&](const NodeRef& n) {
        if (n.w <= w_hi && n.w >= w_lo && q.contains(n.x, n.y)) {
            out.push_back({n.x, n.y, n.w});
        }
    });
    return out;
}

void K2Treap::for_each_node(
    const std::function<void(unsigned, uint32_t, uint32_t, uint64_t, uint64_t)>& fn) const {
    if (npoints_ == 0) return;
    struct Item {
        NodeRef node;
        uint64_t parent_w;
    };
    std::vector<Item> stack{{root_ref(), root_ref().w}};
    while (!stack.empty()) {
        Item it = stack.back();
        stack.pop_back();
        fn(it.node.level, it.node.x, it.node.y, it.node.w, it.parent_w);
        if (it.node.level == height()) continue;
        uint32_t k = schedule_.k_at(it.node.level);
        for (uint32_t ci = 0; ci < k * k; ++ci) {
            uint64_t pos = it.node.block + ci;
            if (!t_[pos]) continue;
            stack.push_back({decode_child(it.node, pos, ci), it.node.w});
        }
    }
}

uint64_t K2Treap::size_in_bits() const {
    uint64_t bits = t_.size_in_bits() + values_.size_in_bits();
    for (const PackedIntArray& a : coord_x_) bits += a.size_in_bits();
    for (const PackedIntArray& a : coord_y_) bits += a.size_in_bits();
    bits += first_.size() * 64;
    return bits;
}

}  // namespace k2agg
