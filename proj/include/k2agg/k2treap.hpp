#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "k2agg/bitvector.hpp"
#include "k2agg/dac.hpp"
#include "k2agg/grid.hpp"
#include "k2agg/regions.hpp"

namespace k2agg {

/*
 * K^2-treap: a K^2-tree partition of a weighted grid where every node stores
 * the coordinates and weight of the heaviest cell of its submatrix, that cell
 * being removed from the matrix before recursing. The topology bitmap T spans
 * all levels (rank is needed in the last one too); node coordinates are kept
 * per level as local offsets inside the submatrix, and weights as the
 * difference against the parent's maximum, DAC-coded in level order with the
 * root's absolute weight at index 0.
 */
class K2Treap {
public:
    struct Parts {
        KSchedule schedule;
        uint64_t rows = 0, cols = 0;
        uint64_t weight_domain = 0;
        BitVector t;
        std::vector<PackedIntArray> coord_x, coord_y;
        DacSequence values;
    };

    struct TopKStats {
        uint64_t pops = 0;
        uint64_t pushes = 0;
    };

    K2Treap() = default;

    static K2Treap build(std::vector<WeightedPoint> points, uint64_t rows, uint64_t cols,
                         const KSchedule& schedule, uint64_t weight_domain = 0,
                         unsigned dac_width = DacSequence::kDefaultWidth);
    static K2Treap from_parts(Parts parts);

    std::optional<uint64_t> access_cell(uint32_t x, uint32_t y) const;
    // The k heaviest points of q in non-increasing weight order (fewer when q
    // holds fewer); queue ties pop in insertion order.
    std::vector<WeightedPoint> top_k(const QueryRect& q, uint64_t k,
                                     TopKStats* stats = nullptr) const;
    std::vector<WeightedPoint> range_report(const QueryRect& q) const;
    // Points of q with weight in [w_lo, w_hi]; subtrees whose maximum is
    // below w_lo are pruned.
    std::vector<WeightedPoint> interval(const QueryRect& q, uint64_t w_lo, uint64_t w_hi) const;

    // Pre-order visit of every stored node: (level, x, y, weight,
    // parent_weight); the root reports its own weight as parent. Integrity
    // checks and the space report are built on this.
    void for_each_node(
        const std::function<void(unsigned, uint32_t, uint32_t, uint64_t, uint64_t)>& fn) const;

    const KSchedule& schedule() const { return schedule_; }
    uint64_t side() const { return schedule_.side(); }
    uint64_t rows() const { return rows_; }
    uint64_t cols() const { return cols_; }
    uint64_t num_points() const { return npoints_; }
    uint64_t weight_domain() const { return weight_domain_; }
    const BitVector& t() const { return t_; }
    const std::vector<PackedIntArray>& coord_x() const { return coord_x_; }
    const std::vector<PackedIntArray>& coord_y() const { return coord_y_; }
    const DacSequence& values() const { return values_; }
    const std::vector<uint64_t>& first() const { return first_; }

    uint64_t size_in_bits() const;

private:
    struct NodeRef {
        unsigned level;      // level of the node (0 = root)
        uint64_t block;      // start of its child block; meaningless at the last level
        uint64_t ox, oy;     // submatrix origin
        uint32_t x, y;       // decoded maximum coordinates
        uint64_t w;          // decoded maximum weight
    };

    NodeRef root_ref() const;
    // Decodes the child of `parent` behind the 1-bit at position pos (child
    // index ci); level is the parent's.
    NodeRef decode_child(const NodeRef& parent, uint64_t pos, uint32_t ci) const;
    unsigned height() const { return schedule_.num_levels(); }

    template <typename Fn>
    void dfs(const NodeRef& node, const QueryRect& q, uint64_t prune_below, Fn&& fn) const;

    KSchedule schedule_;
    uint64_t rows_ = 0, cols_ = 0, npoints_ = 0, weight_domain_ = 0;
    BitVector t_;
    std::vector<PackedIntArray> coord_x_, coord_y_;  // levels 0..height-1
    DacSequence values_;                             // diffs; values_[0] = root weight
    std::vector<uint64_t> first_;                    // first value index per level
    RegionIndex regions_;
};

}  // namespace k2agg
