#include "k2agg/counting_k2tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace k2agg {

namespace {

struct AggBuilder {
    const KSchedule& schedule;
    const std::vector<WeightedPoint>& pts;
    const std::vector<uint64_t>& prefix;  // prefix aggregate over sorted points
    unsigned deepest;                     // deepest node level carrying a diff
    std::vector<std::vector<uint64_t>> diffs;  // zigzagged, per node level

    uint64_t range_value(uint64_t b, uint64_t e) const { return prefix[e] - prefix[b]; }

    // Records the diffs of the children of one node (they sit at level+1);
    // the caller guarantees level+1 <= deepest and a non-empty range.
    void node(uint64_t b, uint64_t e, unsigned level, uint64_t ox, uint64_t oy) {
        uint32_t k = schedule.k_at(level);
        uint64_t cs = schedule.side_at(level + 1);
        uint64_t parent_value = range_value(b, e);

        struct Child {
            uint64_t begin, end;
            uint32_t ci;
        };
        std::vector<Child> children;
        uint64_t cursor = b;
        for (uint32_t ci = 0; ci < k * k; ++ci) {
            uint64_t child_begin = cursor;
            while (cursor < e &&
                   morton_child(pts[cursor].x, pts[cursor].y, ox, oy, cs, k) == ci) {
                ++cursor;
            }
            if (cursor > child_begin) children.push_back({child_begin, cursor, ci});
        }
        uint64_t expected = parent_value / children.size();
        for (const Child& c : children) {
            int64_t diff = static_cast<int64_t>(range_value(c.begin, c.end)) -
                           static_cast<int64_t>(expected);
            diffs[level + 1].push_back(zigzag_encode(diff));
            if (level + 2 <= deepest) {
                node(c.begin, c.end, level + 1, ox + (c.ci % k) * cs, oy + (c.ci / k) * cs);
            }
        }
    }
};

}  // namespace

CountingK2Tree CountingK2Tree::build(std::vector<WeightedPoint> points, uint64_t rows,
                                     uint64_t cols, const KSchedule& schedule,
                                     unsigned aug_levels, AggregateMode mode,
                                     unsigned dac_width) {
    if (aug_levels < 1) throw std::invalid_argument("CountingK2Tree: aug_levels must be >= 1");
    uint64_t max_w = 0;
    for (const WeightedPoint& p : points) max_w = std::max(max_w, p.w);

    MortonLess less{&schedule};
    if (!std::is_sorted(points.begin(), points.end(), less)) {
        std::sort(points.begin(), points.end(), less);
    }

    CountingK2Tree ct;
    ct.base_ = K2Tree::build(points, rows, cols, schedule);
    ct.mode_ = mode;
    ct.aug_levels_ = std::min<unsigned>(aug_levels, schedule.num_levels());
    ct.weight_domain_ = mode == AggregateMode::Sum ? (points.empty() ? 1 : max_w + 1) : 0;

    std::vector<uint64_t> prefix(points.size() + 1, 0);
    for (size_t i = 0; i < points.size(); ++i) {
        prefix[i + 1] = prefix[i] + (mode == AggregateMode::Sum ? points[i].w : 1);
    }
    ct.total_ = prefix.back();

    // Diffs are recorded for node levels 1..aug_levels-1; cells never store.
    unsigned deepest = ct.aug_levels_ - 1;
    AggBuilder agg{schedule, points, prefix, deepest,
                   std::vector<std::vector<uint64_t>>(schedule.num_levels() + 1)};
    if (!points.empty() && deepest >= 1) agg.node(0, points.size(), 0, 0, 0);

    std::vector<uint64_t> seq{ct.total_};
    for (const auto& level_diffs : agg.diffs) {
        seq.insert(seq.end(), level_diffs.begin(), level_diffs.end());
    }
    ct.counts_ = DacSequence::encode(seq, dac_width);

    if (mode == AggregateMode::Sum) {
        std::vector<uint64_t> weights(points.size());
        for (size_t i = 0; i < points.size(); ++i) weights[i] = points[i].w;
        ct.leaf_weights_ = DacSequence::encode(weights, DacSequence::kDefaultWidth);
    }
    return ct;
}

CountingK2Tree CountingK2Tree::from_parts(Parts parts) {
    CountingK2Tree ct;
    ct.base_ = K2Tree::from_parts(std::move(parts.base));
    ct.mode_ = parts.mode;
    ct.aug_levels_ = std::min<unsigned>(parts.aug_levels, ct.base_.schedule().num_levels());
    if (ct.aug_levels_ < 1) throw std::invalid_argument("CountingK2Tree: aug_levels must be >= 1");
    ct.weight_domain_ = parts.weight_domain;
    ct.counts_ = std::move(parts.counts);
    ct.leaf_weights_ = std::move(parts.leaf_weights);
    if (ct.counts_.size() == 0) throw std::invalid_argument("CountingK2Tree: missing root count");
    ct.total_ = ct.counts_.access(0);

    uint64_t expected_entries = 1 + ct.base_.regions_.ones_before(ct.aug_levels_ - 1);
    if (ct.counts_.size() != expected_entries) {
        throw std::invalid_argument("CountingK2Tree: counts length inconsistent with topology");
    }
    if (ct.mode_ == AggregateMode::Sum &&
        ct.leaf_weights_.size() != ct.base_.num_points()) {
        throw std::invalid_argument("CountingK2Tree: leaf weight count mismatch");
    }
    if (ct.mode_ == AggregateMode::Count && ct.total_ != ct.base_.num_points()) {
        throw std::invalid_argument("CountingK2Tree: root count does not match the point count");
    }
    return ct;
}

CountingK2Tree CountingK2Tree::with_aug_levels(unsigned aug_levels) const {
    unsigned clamped = std::min<unsigned>(aug_levels, base_.schedule().num_levels());
    if (clamped < 1) throw std::invalid_argument("CountingK2Tree: aug_levels must be >= 1");
    if (clamped > aug_levels_) {
        throw std::invalid_argument("CountingK2Tree: cannot extend augmentation without rebuild");
    }
    CountingK2Tree ct = *this;
    ct.aug_levels_ = clamped;
    uint64_t new_len = 1 + base_.regions_.ones_before(clamped - 1);
    std::vector<uint64_t> seq(new_len);
    for (uint64_t i = 0; i < new_len; ++i) seq[i] = counts_.access(i);
    ct.counts_ = DacSequence::encode(seq, counts_.chunk_width());
    return ct;
}

uint64_t CountingK2Tree::leaf_value(uint64_t pos) const {
    if (mode_ == AggregateMode::Count) return 1;
    uint64_t lidx = pos - base_.t_.size();
    return leaf_weights_.access(base_.l_.rank1(lidx) - 1);
}

uint64_t CountingK2Tree::node_children(uint64_t block, unsigned level) const {
    uint64_t k = base_.schedule_.k_at(level);
    return base_.t_.prefix_rank(block + k * k) - base_.t_.prefix_rank(block);
}

uint64_t CountingK2Tree::traverse(uint64_t block, unsigned level, uint64_t ox, uint64_t oy,
                                  const QueryRect& q) const {
    uint32_t k = base_.schedule_.k_at(level);
    uint64_t cs = base_.schedule_.side_at(level + 1);
    bool last = (level + 1 == base_.height());
    uint64_t result = 0;
    for (uint32_t ci = 0; ci < k * k; ++ci) {
        uint64_t pos = block + ci;
        if (!base_.bit_at(pos)) continue;
        uint64_t cx = ox + (ci % k) * cs;
        uint64_t cy = oy + (ci / k) * cs;
        if (!q.intersects_block(cx, cy, cs)) continue;
        if (last) {
            result += leaf_value(pos);
        } else {
            result += traverse(base_.child_block(pos, level), level + 1, cx, cy, q);
        }
    }
    return result;
}

uint64_t CountingK2Tree::aggregate_recurse(uint64_t block, unsigned level, uint64_t ox,
                                           uint64_t oy, uint64_t node_value,
                                           const QueryRect& q) const {
    uint32_t k = base_.schedule_.k_at(level);
    uint64_t cs = base_.schedule_.side_at(level + 1);
    bool last = (level + 1 == base_.height());
    bool child_augmented = !last && (level + 1 < aug_levels_);
    uint64_t expected = 0;
    if (child_augmented) expected = node_value / node_children(block, level);

    uint64_t result = 0;
    for (uint32_t ci = 0; ci < k * k; ++ci) {
        uint64_t pos = block + ci;
        if (!base_.bit_at(pos)) continue;
        uint64_t cx = ox + (ci % k) * cs;
        uint64_t cy = oy + (ci / k) * cs;
        if (!q.intersects_block(cx, cy, cs)) continue;
        if (last) {
            result += leaf_value(pos);
        } else if (child_augmented) {
            uint64_t vi = base_.t_.rank1(pos);
            uint64_t child_value = static_cast<uint64_t>(
                static_cast<int64_t>(expected) + zigzag_decode(counts_.access(vi)));
            if (q.contains_block(cx, cy, cs)) {
                result += child_value;
            } else {
                result += aggregate_recurse(base_.child_block(pos, level), level + 1, cx, cy,
                                            child_value, q);
            }
        } else {
            result += traverse(base_.child_block(pos, level), level + 1, cx, cy, q);
        }
    }
    return result;
}

uint64_t CountingK2Tree::query(const QueryRect& q) const {
    if (base_.num_points() == 0) return 0;
    uint64_t side = base_.side();
    if (q.x1 >= side || q.y1 >= side) return 0;
    if (q.x1 == 0 && q.y1 == 0 && q.x2 + 1 >= base_.cols() && q.y2 + 1 >= base_.rows()) {
        return total_;  // resolved at the root
    }
    QueryRect clamped(q.x1, std::min<uint32_t>(q.x2, static_cast<uint32_t>(side - 1)), q.y1,
                      std::min<uint32_t>(q.y2, static_cast<uint32_t>(side - 1)));
    return aggregate_recurse(0, 0, 0, 0, total_, clamped);
}

uint64_t CountingK2Tree::count(const QueryRect& q) const {
    if (mode_ != AggregateMode::Count) {
        throw std::logic_error("CountingK2Tree::count: structure built in Sum mode");
    }
    return query(q);
}

uint64_t CountingK2Tree::sum(const QueryRect& q) const {
    if (mode_ != AggregateMode::Sum) {
        throw std::logic_error("CountingK2Tree::sum: structure built in Count mode");
    }
    return query(q);
}

std::vector<uint64_t> CountingK2Tree::decoded_level_counts(unsigned level) const {
    if (level >= aug_levels_) {
        throw std::out_of_range("CountingK2Tree: level not augmented");
    }
    if (level == 0) return {total_};
    std::vector<uint64_t> out;
    // Pre-order visit reaches each level's nodes in level order.
    auto visit = [&](auto&& self, uint64_t block, unsigned lvl, uint64_t value) -> void {
        uint64_t k = base_.schedule_.k_at(lvl);
        uint64_t expected = value / node_children(block, lvl);
        for (uint64_t ci = 0; ci < k * k; ++ci) {
            uint64_t pos = block + ci;
            if (!base_.t_[pos]) continue;
            uint64_t vi = base_.t_.rank1(pos);
            uint64_t child_value = static_cast<uint64_t>(
                static_cast<int64_t>(expected) + zigzag_decode(counts_.access(vi)));
            if (lvl + 1 == level) {
                out.push_back(child_value);
            } else {
                self(self, base_.child_block(pos, lvl), lvl + 1, child_value);
            }
        }
    };
    if (base_.num_points() > 0) visit(visit, 0, 0, total_);
    return out;
}

bool CountingK2Tree::validate_aggregates() const {
    if (base_.num_points() == 0) return total_ == 0;
    QueryRect everything = QueryRect::full(base_.side());
    auto check = [&](auto&& self, uint64_t block, unsigned lvl, uint64_t value) -> bool {
        uint64_t k = base_.schedule_.k_at(lvl);
        uint64_t cs = base_.schedule_.side_at(lvl + 1);
        bool last = (lvl + 1 == base_.height());
        bool child_augmented = !last && (lvl + 1 < aug_levels_);
        uint64_t expected = child_augmented ? value / node_children(block, lvl) : 0;
        uint64_t sum_children = 0;
        for (uint64_t ci = 0; ci < k * k; ++ci) {
            uint64_t pos = block + ci;
            if (!base_.bit_at(pos)) continue;
            if (last) {
                sum_children += leaf_value(pos);
            } else if (child_augmented) {
                uint64_t vi = base_.t_.rank1(pos);
                int64_t decoded = static_cast<int64_t>(expected) +
                                  zigzag_decode(counts_.access(vi));
                if (decoded < 0) return false;
                if (!self(self, base_.child_block(pos, lvl), lvl + 1,
                          static_cast<uint64_t>(decoded))) {
                    return false;
                }
                sum_children += static_cast<uint64_t>(decoded);
            } else {
                // origins don't matter against the full-range rect
                sum_children += traverse(base_.child_block(pos, lvl), lvl + 1, 0, 0, everything);
            }
        }
        return sum_children == value;
    };
    return check(check, 0, 0, total_);
}

}  // namespace k2agg
