#pragma once

#include <cstdint>
#include <vector>

#include "k2agg/dac.hpp"
#include "k2agg/grid.hpp"
#include "k2agg/k2tree.hpp"

namespace k2agg {

enum class AggregateMode : uint8_t { Count = 0, Sum = 1 };

/*
 * Counting-augmented K^2-tree. The plain K^2-tree answers range counting by
 * traversing down to the cells; here the first aug_levels levels (root =
 * level 0) additionally carry per-node aggregates so that a submatrix fully
 * inside the query is resolved without descending. A node's aggregate is
 * stored as the difference against the floor of its parent's aggregate
 * divided by the parent's number of non-empty children (the expected uniform
 * share), zigzag-mapped and DAC-coded in level order; counts[0] holds the
 * absolute root aggregate. Below the augmented levels the query falls back to
 * pure topology traversal, so the augmentation changes cost, never answers.
 *
 * In Sum mode the same encoding stores weight sums, and the per-point weights
 * are additionally kept (DAC, indexed by rank over L) so the fallback can sum
 * leaves no matter how few levels are augmented.
 */
class CountingK2Tree {
public:
    struct Parts {
        K2Tree::Parts base;
        AggregateMode mode = AggregateMode::Count;
        unsigned aug_levels = 1;
        uint64_t weight_domain = 0;
        DacSequence counts;
        DacSequence leaf_weights;  // Sum mode only
    };

    CountingK2Tree() = default;

    // aug_levels counts augmented node levels including the root; values
    // beyond the tree depth are clamped. Weights are ignored in Count mode.
    static CountingK2Tree build(std::vector<WeightedPoint> points, uint64_t rows, uint64_t cols,
                                const KSchedule& schedule, unsigned aug_levels,
                                AggregateMode mode = AggregateMode::Count,
                                unsigned dac_width = 1);
    static CountingK2Tree from_parts(Parts parts);

    // Same data, different number of augmented levels (a prefix of counts).
    CountingK2Tree with_aug_levels(unsigned aug_levels) const;

    uint64_t count(const QueryRect& q) const;
    uint64_t sum(const QueryRect& q) const;

    // Decoded aggregates of every non-empty node at the given augmented
    // level, in level order. Level 0 yields the root aggregate.
    std::vector<uint64_t> decoded_level_counts(unsigned level) const;
    // Recomputes every augmented aggregate from the topology and checks the
    // child-sum conservation; integrity hook for tests and `info`.
    bool validate_aggregates() const;

    const K2Tree& base() const { return base_; }
    AggregateMode mode() const { return mode_; }
    unsigned aug_levels() const { return aug_levels_; }
    uint64_t total() const { return total_; }
    uint64_t weight_domain() const { return weight_domain_; }
    const DacSequence& counts() const { return counts_; }
    const DacSequence& leaf_weights() const { return leaf_weights_; }

    uint64_t size_in_bits() const {
        return base_.size_in_bits() + counts_.size_in_bits() + leaf_weights_.size_in_bits();
    }
    uint64_t counts_bits() const { return counts_.size_in_bits(); }

private:
    uint64_t query(const QueryRect& q) const;
    uint64_t aggregate_recurse(uint64_t block, unsigned level, uint64_t ox, uint64_t oy,
                               uint64_t node_value, const QueryRect& q) const;
    uint64_t traverse(uint64_t block, unsigned level, uint64_t ox, uint64_t oy,
                      const QueryRect& q) const;
    uint64_t leaf_value(uint64_t pos) const;  // 1 in Count mode, the weight in Sum mode
    uint64_t node_children(uint64_t block, unsigned level) const;

    K2Tree base_;
    AggregateMode mode_ = AggregateMode::Count;
    unsigned aug_levels_ = 1;
    uint64_t weight_domain_ = 0;
    uint64_t total_ = 0;
    DacSequence counts_;
    DacSequence leaf_weights_;
};

}  // namespace k2agg
